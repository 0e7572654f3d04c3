// Upper-bound sub-Riemannian distances via piecewise-constant controls, and
// the metric-ball probe behind the generalized Flow-Box metric formulation.
#ifndef FLOWBOX_SUBRIEMANNIAN_HPP
#define FLOWBOX_SUBRIEMANNIAN_HPP

#include "flowbox/analytic.hpp"

#include <cstdint>
#include <vector>

namespace flowbox {

struct SROptions {
  double horizon = 2.0;
  int n_steps = 16;
  int budget = 24;        // multistart count
  double reach_tol = 1e-4;
  std::uint64_t seed = 1;
};

// Infimum of sum ||u_k|| dt over piecewise-constant controls steering
// gamma' = sum_i u_i * gen_i(gamma) from p to q. Upper bound by construction;
// +infinity when no control within the budget reaches q.
double sr_distance(const std::vector<AnalyticField>& generators, std::span<const double> p,
                   std::span<const double> q, const SROptions& opts = {});

struct SRQuery {
  std::vector<AnalyticField> generators;
  std::vector<double> q;
  double eta = 1.0;
  int n_steps = 16;
  int budget = 400;
  std::uint64_t seed = 1;
};

struct SRBallReport {
  int k_q = 0;
  bool intersects_X_off_center = false;
  std::vector<double> hit_point;
  double hit_cost = 0.0;
  double hit_distance = 0.0;
};

// Samples random control curves of cost below eta from q and flags points of
// the curves that sit on X (residual < tol) away from q.
SRBallReport sr_ball_probe(const SRQuery& query, const std::vector<AnalyticFun>& ideal_evals,
                           double tol);

}  // namespace flowbox

#endif
