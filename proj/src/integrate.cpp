#include "flowbox/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace flowbox {

namespace {

// Dormand-Prince 5(4) tableau, FSAL.
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                 kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192, kB5 = -2187.0 / 6784,
                 kB6 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

using Vec = std::vector<double>;

void axpy(Vec& out, const Vec& y, double h, std::initializer_list<std::pair<const Vec*, double>> ks) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    double acc = 0;
    for (const auto& [k, c] : ks) acc += c * (*k)[i];
    out[i] = y[i] + h * acc;
  }
}

}  // namespace

std::vector<double> Trajectory::state_at(double t) const {
  if (times.size() < 2) return states.front();
  const bool fwd = forward();
  const double lo = fwd ? times.front() : times.back();
  const double hi = fwd ? times.back() : times.front();
  if (t < lo - 1e-12 || t > hi + 1e-12)
    throw std::out_of_range("dense output queried outside the trajectory span");

  // Segment lookup; times are monotone in integration direction.
  std::size_t k;
  if (fwd) {
    k = static_cast<std::size_t>(
        std::upper_bound(times.begin(), times.end(), t) - times.begin());
  } else {
    k = static_cast<std::size_t>(
        std::upper_bound(times.begin(), times.end(), t, std::greater<double>()) - times.begin());
  }
  if (k == 0) k = 1;
  if (k >= times.size()) k = times.size() - 1;
  const std::size_t a = k - 1, b = k;

  const double h = times[b] - times[a];
  if (h == 0) return states[a];
  const double s = (t - times[a]) / h;
  if (s <= 0) return states[a];
  if (s >= 1) return states[b];
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);

  Vec out(states[a].size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = h00 * states[a][i] + h * h10 * derivs[a][i] + h01 * states[b][i] +
             h * h11 * derivs[b][i];
  return out;
}

Trajectory integrate(const AnalyticField& field, std::span<const double> p0, double t_end,
                     const IntegrateOptions& opts) {
  const std::size_t n = field.dimension();
  if (p0.size() != n) throw std::invalid_argument("integrate: initial state dimension mismatch");
  if (field.domain() && !field.domain()->contains(p0))
    throw std::invalid_argument("integrate: initial state outside the declared domain");

  Trajectory traj;
  Vec y(p0.begin(), p0.end());
  double t = 0.0;
  const double dir = t_end >= 0 ? 1.0 : -1.0;

  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);
  field.eval(y, k1);

  traj.times.push_back(t);
  traj.states.push_back(y);
  traj.derivs.push_back(k1);

  if (t_end == 0.0) return traj;

  // Initial step heuristic.
  double ynorm = 0, fnorm = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ynorm = std::max(ynorm, std::abs(y[i]));
    fnorm = std::max(fnorm, std::abs(k1[i]));
  }
  double h = dir * std::min({0.01 * (ynorm + 1.0) / (fnorm + 1e-8), std::abs(t_end) / 10.0,
                             opts.max_step});
  if (h == 0) h = dir * 1e-6;

  std::size_t steps = 0;
  while (dir * (t_end - t) > 0) {
    if (++steps > opts.max_steps)
      throw std::runtime_error("integrate: maximum step count exceeded");
    if (dir * (t + h - t_end) > 0) h = t_end - t;
    if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t)))
      throw std::runtime_error("integrate: step size underflow");

    axpy(ytmp, y, h, {{&k1, kA21}});
    field.eval(ytmp, k2);
    axpy(ytmp, y, h, {{&k1, kA31}, {&k2, kA32}});
    field.eval(ytmp, k3);
    axpy(ytmp, y, h, {{&k1, kA41}, {&k2, kA42}, {&k3, kA43}});
    field.eval(ytmp, k4);
    axpy(ytmp, y, h, {{&k1, kA51}, {&k2, kA52}, {&k3, kA53}, {&k4, kA54}});
    field.eval(ytmp, k5);
    axpy(ytmp, y, h, {{&k1, kA61}, {&k2, kA62}, {&k3, kA63}, {&k4, kA64}, {&k5, kA65}});
    field.eval(ytmp, k6);
    axpy(ynew, y, h, {{&k1, kB1}, {&k3, kB3}, {&k4, kB4}, {&k5, kB5}, {&k6, kB6}});
    field.eval(ynew, k7);

    double err = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = h * (kE1 * k1[i] + kE3 * k3[i] + kE4 * k4[i] + kE5 * k5[i] +
                            kE6 * k6[i] + kE7 * k7[i]);
      const double scale = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(e) / scale);
    }

    if (err <= 1.0) {
      if (field.domain() && !field.domain()->contains(ynew)) {
        // Shrink into the domain; give up and truncate when the step floor
        // is reached.
        if (std::abs(h) < 1e-12 * std::max(1.0, std::abs(t))) {
          traj.truncated = true;
          break;
        }
        h *= 0.5;
        continue;
      }
      t += h;
      y = ynew;
      k1 = k7;  // FSAL
      traj.times.push_back(t);
      traj.states.push_back(y);
      traj.derivs.push_back(k1);
      traj.step_sizes.push_back(h);
      traj.error_estimates.push_back(err);
    }

    double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    factor = std::clamp(factor, 0.2, 5.0);
    h *= factor;
    if (std::abs(h) > opts.max_step) h = dir * opts.max_step;
  }
  return traj;
}

}  // namespace flowbox
