// Numeric reconstruction of the 4D geometrically-quasi-transverse system
// without the generalized Flow-Box property, its transcendental return-time
// function h, and the 5D two-generator variant.
#ifndef FLOWBOX_COUNTEREXAMPLE_HPP
#define FLOWBOX_COUNTEREXAMPLE_HPP

#include "flowbox/analytic.hpp"
#include "flowbox/integrate.hpp"
#include "flowbox/system.hpp"

#include <optional>
#include <string>
#include <vector>

namespace flowbox {

// Root of (1+s^2)·cos(a)·sin(a) - a = 0 on the branch a ~ s·sqrt(6)/2.
struct HSolution {
  double s = 0;
  double h = 0;
  double u = 0;  // h/s, continued by sqrt(6)/2 at s = 0
  double residual = 0;
};

// Newton from a0 = s*sqrt(6)/2; validated window 0 <= s <= 0.7.
HSolution solve_h(double s);

// Memoized h on a dense grid with local cubic interpolation; evaluators call
// this millions of times during grid sweeps.
class HTable {
 public:
  static const HTable& instance();

  double h(double s) const;
  double u(double s) const;       // h/s with the limit value at s = 0
  double hprime(double s) const;  // dh/ds (implicit differentiation)

  double s_max() const { return s_max_; }

 private:
  HTable();
  std::vector<double> h_;
  double s_max_ = 0.7;
  double ds_ = 0;
};

// f, g and the two tangency residuals T1 = d[z-f], 2*T2 = 2*d[w-g] of the 4D
// system, all in the (x, y) plane.
double ce_f(double x, double y);
double ce_g(double x, double y);
double ce_t1(double x, double y);
double ce_t2(double x, double y);

struct CounterexampleSystem {
  std::vector<std::string> vars;      // x, y, z, w
  AnalyticField field;                // y^2 d/dw + x d/dy - y d/dx
  std::vector<AnalyticFun> x_evals;   // z - f(x,y), w - g(x,y)
  FoliatedSystem shadow;              // polynomial shadow: same theta, I = (w - g)
};

CounterexampleSystem build_counterexample4d();

struct Claim1Options {
  unsigned n_r = 200;
  unsigned n_alpha = 200;
  double r_max = 0.5;
  double tol = 1e-7;
  unsigned jobs = 1;
};

struct Claim1Report {
  bool common_zero_off_origin = false;
  // Normalized residuals T1/r^4, T2/r^6 carry the natural scales near the
  // origin; raw minima are reported alongside.
  double min_joint_normalized = 0;
  double min_joint_raw = 0;
  double min_t1_near_t2_locus = 0;  // raw |T1| where |T2|/r^6 < 0.05
  double min_t2_near_t1_locus = 0;  // raw |T2| where |T1|/r^4 < 0.05
  double circle_r = 0;              // r_max/2 circle
  double circle_min_raw = 0;
  double v0_estimate = 0;           // branch y = x^3 V(x) continued toward 0
  double v_sample_x = 0;
};

Claim1Report verify_claim1(const Claim1Options& opts = {});

struct Claim2Report {
  double r0 = 0;
  double t_return = 0;          // h(r0^2)
  double orbit_deviation = 0;   // max node distance to the closed form
  double residual_z = 0;        // |z - f~| at t_return
  double residual_w = 0;        // |w - g~| at t_return
  double membership_residual = 0;
};

Claim2Report verify_claim2(double r0, const IntegrateOptions& opts = {});

struct Remark5D {
  std::vector<std::string> vars;  // x, y, z, w, v
  std::vector<AnalyticField> theta;
  std::vector<AnalyticFun> ideal_evals;  // z - f, w - g, v
  Distribution shadow_theta;             // both generators, polynomial
  Ideal shadow_ideal;                    // (v)
  std::string tag;
};

Remark5D build_remark_5d();

// Drops v and d/dv: recovers the 4D counterexample.
CounterexampleSystem leaf_reduce_remark(const Remark5D& remark);

// eq:aqt holds trivially because d2(v) = 1 is a unit: verified by sampling
// the derivative evaluators; returns the minimum |unit| found.
double remark5d_unit_minimum(const Remark5D& remark, unsigned samples = 64);

}  // namespace flowbox

#endif
