// Section-return detection along orbits and the sampled flow-box delta.
#ifndef FLOWBOX_RETURNS_HPP
#define FLOWBOX_RETURNS_HPP

#include "flowbox/integrate.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace flowbox {

struct CrossingReport {
  std::vector<double> start;
  std::vector<double> crossing_times;  // positive, increasing
  std::vector<double> residuals;       // residual at each crossing (< tol)
  std::optional<double> min_return;
  // Orbit stayed inside the residual tube for the whole window: no return
  // can be separated from the start.
  bool never_left = false;
};

struct ReturnOptions {
  double tol = 1e-7;        // crossing residual tolerance
  double time_tol = 1e-10;  // bisection accuracy in time
  double singular_tol = 1e-9;
  unsigned samples_per_step = 16;
  IntegrateOptions integ;
};

// All t in (0, delta_max] where the orbit from p0 is back on {f_i = 0} within
// tol. Codimension one is tracked by sign change + bisection; higher
// codimension by residual minimization with a barrier rule separating true
// returns from the departure at t=0.
CrossingReport detect_returns(const AnalyticField& field,
                              const std::vector<AnalyticFun>& ideal_evals,
                              std::span<const double> p0, double delta_max,
                              const ReturnOptions& opts = {});

struct DeltaOptions {
  std::vector<std::pair<double, double>> box;
  std::vector<unsigned> grid;  // subdivisions per axis (nodes = grid+1)
  double delta_max = 4.0;
  bool both_directions = true;  // Def. gFB bounds |t|
  unsigned jobs = 1;
  ReturnOptions returns;
};

struct DeltaSample {
  std::vector<double> point;
  std::optional<double> min_return;
  bool backward = false;  // achieved on the reversed field
};

struct DeltaReport {
  std::optional<double> delta_est;
  CrossingReport worst;
  std::vector<DeltaSample> samples;
  std::size_t nodes = 0;
  std::size_t projection_failures = 0;
  std::size_t singular_skipped = 0;
  std::size_t divisor_skipped = 0;
};

// Grid nodes are Newton-projected onto X; singular and divisor points are
// discarded; delta_est is the smallest min_return over the kept samples.
// Throws if no node lands on X.
DeltaReport estimate_flowbox_delta(const AnalyticField& field,
                                   const std::vector<AnalyticFun>& ideal_evals,
                                   const std::vector<AnalyticFun>& divisor_evals,
                                   const DeltaOptions& opts);

}  // namespace flowbox

#endif
