// Adaptive Dormand-Prince 5(4) integration with cubic-Hermite dense output.
#ifndef FLOWBOX_INTEGRATE_HPP
#define FLOWBOX_INTEGRATE_HPP

#include "flowbox/analytic.hpp"

#include <limits>
#include <vector>

namespace flowbox {

struct IntegrateOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 2000000;
};

struct Trajectory {
  std::vector<double> times;                    // strictly monotone
  std::vector<std::vector<double>> states;
  std::vector<std::vector<double>> derivs;      // field value at each node
  std::vector<double> step_sizes;               // accepted step sizes
  std::vector<double> error_estimates;          // local error per accepted step
  bool truncated = false;                       // stopped at the domain boundary

  double t_begin() const { return times.front(); }
  double t_end() const { return times.back(); }
  bool forward() const { return times.back() >= times.front(); }

  // Cubic Hermite interpolation; exact at the accepted nodes.
  std::vector<double> state_at(double t) const;
};

// Integrates from p0 at t=0 to t_end (which may be negative). Local error per
// step is kept below atol + rtol*|state|. Throws on step-size underflow.
Trajectory integrate(const AnalyticField& field, std::span<const double> p0, double t_end,
                     const IntegrateOptions& opts = {});

}  // namespace flowbox

#endif
