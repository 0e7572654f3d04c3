#include "flowbox/returns.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace flowbox {

namespace {

double residual_at(const std::vector<AnalyticFun>& evals, std::span<const double> x) {
  double r = 0;
  for (const auto& f : evals) r = std::max(r, std::abs(f(x)));
  return r;
}

double sq_residual_at(const std::vector<AnalyticFun>& evals, std::span<const double> x) {
  double r = 0;
  for (const auto& f : evals) {
    const double v = f(x);
    r += v * v;
  }
  return r;
}

// Precise state at time t: re-integrates from the nearest accepted node with
// tight tolerances, so event refinement is not limited by the interpolant.
std::vector<double> precise_state(const AnalyticField& field, const Trajectory& traj, double t) {
  const bool fwd = traj.forward();
  std::size_t k = 0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    if ((fwd && traj.times[i] <= t) || (!fwd && traj.times[i] >= t)) k = i;
  }
  const double dt = t - traj.times[k];
  if (dt == 0) return traj.states[k];
  IntegrateOptions tight;
  tight.rtol = 1e-12;
  tight.atol = 1e-14;
  Trajectory seg = integrate(field, traj.states[k], dt, tight);
  return seg.states.back();
}

struct SampleGrid {
  std::vector<double> times;
  std::vector<double> values;  // signed residual (codim 1) or squared residual
};

SampleGrid sample_along(const Trajectory& traj, const std::vector<AnalyticFun>& evals,
                        bool signed_single, unsigned per_step) {
  SampleGrid g;
  for (std::size_t seg = 0; seg + 1 < traj.times.size(); ++seg) {
    const double ta = traj.times[seg], tb = traj.times[seg + 1];
    const unsigned n = std::max(1u, per_step);
    for (unsigned i = 0; i < n; ++i) {
      const double t = ta + (tb - ta) * static_cast<double>(i) / n;
      auto x = traj.state_at(t);
      g.times.push_back(t);
      g.values.push_back(signed_single ? evals.front()(x) : sq_residual_at(evals, x));
    }
  }
  const double t_last = traj.times.back();
  auto x = traj.states.back();
  g.times.push_back(t_last);
  g.values.push_back(signed_single ? evals.front()(x) : sq_residual_at(evals, x));
  return g;
}

}  // namespace

CrossingReport detect_returns(const AnalyticField& field,
                              const std::vector<AnalyticFun>& ideal_evals,
                              std::span<const double> p0, double delta_max,
                              const ReturnOptions& opts) {
  if (ideal_evals.empty()) throw std::invalid_argument("detect_returns: no ideal evaluators");
  if (delta_max <= 0) throw std::invalid_argument("detect_returns: delta_max must be positive");

  CrossingReport report;
  report.start.assign(p0.begin(), p0.end());

  const double start_res = residual_at(ideal_evals, p0);
  if (start_res > opts.tol) {
    std::ostringstream os;
    os << "start point is not on X: residual " << start_res << " exceeds tol " << opts.tol;
    throw std::invalid_argument(os.str());
  }
  if (field.norm_at(p0) < opts.singular_tol)
    throw std::invalid_argument("start point is singular for the field");

  Trajectory traj = integrate(field, p0, delta_max, opts.integ);

  const bool codim1 = ideal_evals.size() == 1;
  SampleGrid grid = sample_along(traj, ideal_evals, codim1, opts.samples_per_step);

  if (codim1) {
    const double band = 10.0 * opts.tol;
    std::size_t esc = grid.times.size();
    for (std::size_t i = 0; i < grid.times.size(); ++i) {
      if (std::abs(grid.values[i]) >= band) {
        esc = i;
        break;
      }
    }
    if (esc == grid.times.size()) {
      report.never_left = true;
      return report;
    }
    for (std::size_t i = esc; i + 1 < grid.times.size(); ++i) {
      const double va = grid.values[i], vb = grid.values[i + 1];
      if (va == 0.0 || va * vb > 0.0) continue;
      // Bisection against the precisely re-integrated residual.
      double ta = grid.times[i], tb = grid.times[i + 1];
      double fa = ideal_evals.front()(precise_state(field, traj, ta));
      double fb = ideal_evals.front()(precise_state(field, traj, tb));
      if (fa * fb > 0.0) continue;  // interpolation artifact
      while (tb - ta > opts.time_tol) {
        const double tm = 0.5 * (ta + tb);
        const double fm = ideal_evals.front()(precise_state(field, traj, tm));
        if (fa * fm <= 0.0) {
          tb = tm;
          fb = fm;
        } else {
          ta = tm;
          fa = fm;
        }
      }
      const double t_cross = 0.5 * (ta + tb);
      const double res = residual_at(ideal_evals, precise_state(field, traj, t_cross));
      if (t_cross > opts.time_tol && res < opts.tol) {
        report.crossing_times.push_back(t_cross);
        report.residuals.push_back(res);
      }
    }
  } else {
    // Higher codimension: local minima of the squared residual, separated
    // from the previous event by a barrier.
    const double g_start = grid.values.front();
    double barrier_ref = std::max(g_start, 1e-32);
    double running_max = 0.0;
    for (std::size_t i = 1; i + 1 < grid.times.size(); ++i) {
      running_max = std::max(running_max, grid.values[i - 1]);
      const bool local_min =
          grid.values[i] <= grid.values[i - 1] && grid.values[i] <= grid.values[i + 1];
      if (!local_min) continue;

      // Golden-section refinement on the precise squared residual.
      auto g_of = [&](double t) {
        return sq_residual_at(ideal_evals, precise_state(field, traj, t));
      };
      double a = grid.times[i - 1], b = grid.times[i + 1];
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double c = b - gr * (b - a), d = a + gr * (b - a);
      double gc = g_of(c), gd = g_of(d);
      while (b - a > opts.time_tol) {
        if (gc < gd) {
          b = d;
          d = c;
          gd = gc;
          c = b - gr * (b - a);
          gc = g_of(c);
        } else {
          a = c;
          c = d;
          gc = gd;
          d = a + gr * (b - a);
          gd = g_of(d);
        }
      }
      const double t_min = 0.5 * (a + b);
      const double g_min = g_of(t_min);
      if (t_min <= opts.time_tol) continue;
      if (g_min >= opts.tol * opts.tol) continue;
      const double barrier = running_max;
      if (barrier < 100.0 * std::max(g_min, barrier_ref)) continue;
      report.crossing_times.push_back(t_min);
      report.residuals.push_back(std::sqrt(g_min));
      running_max = 0.0;
      barrier_ref = std::max(g_min, 1e-32);
    }
    if (report.crossing_times.empty()) {
      double max_g = 0;
      for (double v : grid.values) max_g = std::max(max_g, v);
      if (max_g < 100.0 * opts.tol * opts.tol) report.never_left = true;
    }
  }

  if (!report.crossing_times.empty()) report.min_return = report.crossing_times.front();
  return report;
}

namespace {

// Gauss-Newton projection onto {f_i = 0} with finite-difference Jacobian.
bool project_to_x(const std::vector<AnalyticFun>& evals, std::vector<double>& x, double tol) {
  const std::size_t k = evals.size(), m = x.size();
  const double fd = 1e-7;
  for (int iter = 0; iter < 60; ++iter) {
    Eigen::VectorXd f(k);
    double res = 0;
    for (std::size_t i = 0; i < k; ++i) {
      f[i] = evals[i](x);
      res = std::max(res, std::abs(f[i]));
    }
    if (res < tol) return true;
    Eigen::MatrixXd jac(k, m);
    std::vector<double> xp = x;
    for (std::size_t j = 0; j < m; ++j) {
      const double h = fd * std::max(1.0, std::abs(x[j]));
      xp[j] = x[j] + h;
      for (std::size_t i = 0; i < k; ++i) jac(i, j) = (evals[i](xp) - f[i]) / h;
      xp[j] = x[j];
    }
    Eigen::VectorXd lambda = (jac * jac.transpose()).fullPivLu().solve(f);
    Eigen::VectorXd step = jac.transpose() * lambda;
    if (!step.allFinite()) return false;
    for (std::size_t j = 0; j < m; ++j) x[j] -= step[j];
  }
  double res = 0;
  for (std::size_t i = 0; i < k; ++i) res = std::max(res, std::abs(evals[i](x)));
  return res < tol;
}

}  // namespace

DeltaReport estimate_flowbox_delta(const AnalyticField& field,
                                   const std::vector<AnalyticFun>& ideal_evals,
                                   const std::vector<AnalyticFun>& divisor_evals,
                                   const DeltaOptions& opts) {
  const std::size_t m = field.dimension();
  if (opts.box.size() != m || opts.grid.size() != m)
    throw std::invalid_argument("estimate_flowbox_delta: box/grid must cover every variable");

  std::vector<std::vector<double>> axes(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto [lo, hi] = opts.box[i];
    if (lo == hi) {
      axes[i] = {lo};
    } else {
      if (opts.grid[i] < 1)
        throw std::invalid_argument("estimate_flowbox_delta: grid must be >= 1 per axis");
      for (unsigned k = 0; k <= opts.grid[i]; ++k)
        axes[i].push_back(lo + (hi - lo) * static_cast<double>(k) / opts.grid[i]);
    }
  }
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.size();

  auto node_coords = [&](std::size_t idx) {
    std::vector<double> x(m);
    for (std::size_t i = m; i-- > 0;) {
      x[i] = axes[i][idx % axes[i].size()];
      idx /= axes[i].size();
    }
    return x;
  };

  const double proj_tol = std::min(opts.returns.tol, 1e-10);
  const AnalyticField reversed = field.reversed();

  struct NodeResult {
    int kind = 0;  // 0 projection failure, 1 singular, 2 divisor, 3 sample
    DeltaSample sample;
    CrossingReport best_report;
  };
  std::vector<NodeResult> results(total);

  auto run_node = [&](std::size_t idx) {
    NodeResult out;
    std::vector<double> x = node_coords(idx);
    if (!project_to_x(ideal_evals, x, proj_tol)) {
      results[idx] = std::move(out);
      return;
    }
    if (field.norm_at(x) < std::max(opts.returns.tol, opts.returns.singular_tol)) {
      out.kind = 1;
      results[idx] = std::move(out);
      return;
    }
    for (const auto& e : divisor_evals) {
      if (std::abs(e(x)) < opts.returns.tol) {
        out.kind = 2;
        results[idx] = std::move(out);
        return;
      }
    }
    out.kind = 3;
    out.sample.point = x;
    CrossingReport fwd = detect_returns(field, ideal_evals, x, opts.delta_max, opts.returns);
    out.sample.min_return = fwd.min_return;
    out.best_report = fwd;
    if (opts.both_directions) {
      CrossingReport bwd = detect_returns(reversed, ideal_evals, x, opts.delta_max, opts.returns);
      if (bwd.min_return &&
          (!out.sample.min_return || *bwd.min_return < *out.sample.min_return)) {
        out.sample.min_return = bwd.min_return;
        out.sample.backward = true;
        out.best_report = bwd;
      }
    }
    results[idx] = std::move(out);
  };

  const unsigned jobs = std::max(1u, opts.jobs);
  if (jobs == 1 || total < 2) {
    for (std::size_t idx = 0; idx < total; ++idx) run_node(idx);
  } else {
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < jobs; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t idx = w; idx < total; idx += jobs) run_node(idx);
      });
    }
    for (auto& t : workers) t.join();
  }

  DeltaReport report;
  report.nodes = total;
  for (auto& r : results) {
    switch (r.kind) {
      case 0: ++report.projection_failures; break;
      case 1: ++report.singular_skipped; break;
      case 2: ++report.divisor_skipped; break;
      case 3: {
        report.samples.push_back(r.sample);
        if (r.sample.min_return &&
            (!report.delta_est || *r.sample.min_return < *report.delta_est)) {
          report.delta_est = r.sample.min_return;
          report.worst = r.best_report;
        }
        break;
      }
    }
  }
  if (report.samples.empty())
    throw std::runtime_error("estimate_flowbox_delta: no grid node projected onto X");
  return report;
}

}  // namespace flowbox
