#include "flowbox/subriemannian.hpp"

#include "flowbox/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>

namespace flowbox {

namespace {

using Vec = std::vector<double>;

struct ControlProblem {
  const std::vector<AnalyticField>* gens;
  Vec p;
  double horizon;
  int n_steps;
  int substeps = 4;

  std::size_t dim() const { return p.size(); }
  std::size_t m() const { return gens->size(); }

  void rhs(const Vec& x, const double* u, Vec& out) const {
    std::fill(out.begin(), out.end(), 0.0);
    Vec g(x.size());
    for (std::size_t i = 0; i < gens->size(); ++i) {
      (*gens)[i].eval(x, g);
      for (std::size_t j = 0; j < x.size(); ++j) out[j] += u[i] * g[j];
    }
  }

  // RK4 with fixed substeps per control interval.
  Vec endpoint(const std::vector<double>& controls) const {
    Vec x = p;
    Vec k1(dim()), k2(dim()), k3(dim()), k4(dim()), xt(dim());
    const double dt = horizon / n_steps;
    const double h = dt / substeps;
    for (int s = 0; s < n_steps; ++s) {
      const double* u = controls.data() + static_cast<std::size_t>(s) * m();
      for (int sub = 0; sub < substeps; ++sub) {
        rhs(x, u, k1);
        for (std::size_t j = 0; j < dim(); ++j) xt[j] = x[j] + 0.5 * h * k1[j];
        rhs(xt, u, k2);
        for (std::size_t j = 0; j < dim(); ++j) xt[j] = x[j] + 0.5 * h * k2[j];
        rhs(xt, u, k3);
        for (std::size_t j = 0; j < dim(); ++j) xt[j] = x[j] + h * k3[j];
        rhs(xt, u, k4);
        for (std::size_t j = 0; j < dim(); ++j)
          x[j] += h / 6.0 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
      }
    }
    return x;
  }

  double cost(const std::vector<double>& controls) const {
    const double dt = horizon / n_steps;
    double total = 0;
    for (int s = 0; s < n_steps; ++s) {
      double unorm = 0;
      for (std::size_t i = 0; i < m(); ++i) {
        const double u = controls[static_cast<std::size_t>(s) * m() + i];
        unorm += u * u;
      }
      total += std::sqrt(unorm) * dt;
    }
    return total;
  }
};

double dist2(const Vec& a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Pattern search: sweeps of per-coordinate +/- moves with a shrinking step.
template <typename F>
double pattern_descend(std::vector<double>& u, double step, double step_floor, F&& objective) {
  double best = objective(u);
  while (step > step_floor) {
    bool improved = false;
    for (std::size_t c = 0; c < u.size(); ++c) {
      for (double d : {step, -step}) {
        u[c] += d;
        const double v = objective(u);
        if (v < best - 1e-15) {
          best = v;
          improved = true;
        } else {
          u[c] -= d;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

}  // namespace

double sr_distance(const std::vector<AnalyticField>& generators, std::span<const double> p,
                   std::span<const double> q, const SROptions& opts) {
  if (generators.empty()) throw std::invalid_argument("sr_distance: no generators");
  const std::size_t dim = generators.front().dimension();
  if (p.size() != dim || q.size() != dim)
    throw std::invalid_argument("sr_distance: point dimension mismatch");

  ControlProblem prob{&generators, Vec(p.begin(), p.end()), opts.horizon, opts.n_steps};
  const std::size_t nu = static_cast<std::size_t>(opts.n_steps) * generators.size();

  const double qdist = std::sqrt(dist2(Vec(p.begin(), p.end()), q));
  const double scale = std::max(qdist, 1e-3) / opts.horizon;

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Constant control aimed at q along the pointwise generator span, used to
  // seed the first starts.
  Vec aim(nu, 0.0);
  {
    Eigen::MatrixXd g(dim, generators.size());
    Vec val(dim);
    for (std::size_t i = 0; i < generators.size(); ++i) {
      generators[i].eval(p, val);
      for (std::size_t j = 0; j < dim; ++j) g(j, i) = val[j];
    }
    Eigen::VectorXd target(dim);
    for (std::size_t j = 0; j < dim; ++j) target[j] = (q[j] - p[j]) / opts.horizon;
    Eigen::VectorXd u0 = g.completeOrthogonalDecomposition().solve(target);
    for (int s = 0; s < opts.n_steps; ++s)
      for (std::size_t i = 0; i < generators.size(); ++i)
        aim[static_cast<std::size_t>(s) * generators.size() + i] = u0[static_cast<long>(i)];
  }

  double best_cost = std::numeric_limits<double>::infinity();
  double best_dist = std::numeric_limits<double>::infinity();
  int stagnant = 0;
  for (int start = 0; start < opts.budget; ++start) {
    std::vector<double> u(nu);
    if (start == 0) {
      u = aim;
    } else if (start == 1) {
      std::fill(u.begin(), u.end(), 0.0);
    } else {
      for (auto& v : u) v = scale * normal(rng);
      if (start % 3 == 0)
        for (std::size_t i = 0; i < nu; ++i) u[i] = 0.5 * (u[i] + aim[i]);
    }

    // Penalty continuation: reach first, then tighten while shaving cost.
    bool feasible = false;
    double d_final = std::numeric_limits<double>::infinity();
    for (double lambda : {1e2, 1e3, 1e4, 1e5, 1e6, 1e7}) {
      auto objective = [&](const std::vector<double>& cu) {
        const Vec end = prob.endpoint(cu);
        return prob.cost(cu) + lambda * dist2(end, q);
      };
      pattern_descend(u, std::max(scale, 0.1), 1e-7, objective);
      d_final = std::sqrt(dist2(prob.endpoint(u), q));
      if (d_final <= opts.reach_tol) {
        feasible = true;
        if (lambda >= 1e6) break;
      } else if (lambda >= 1e4 && d_final > 1e3 * opts.reach_tol) {
        break;  // stuck at a positive endpoint gap, likely unreachable
      }
    }
    best_dist = std::min(best_dist, d_final);
    if (feasible) {
      const double c = prob.cost(u);
      if (c < best_cost - 1e-6) {
        best_cost = c;
        stagnant = 0;
      } else {
        ++stagnant;
      }
    } else {
      ++stagnant;
    }
    if (std::isfinite(best_cost) && stagnant >= 4) break;
    if (!std::isfinite(best_cost) && start >= 7 && best_dist > 1e3 * opts.reach_tol)
      break;  // consistently far from the target: report unreachable
  }
  return best_cost;
}

SRBallReport sr_ball_probe(const SRQuery& query, const std::vector<AnalyticFun>& ideal_evals,
                           double tol) {
  if (query.generators.empty()) throw std::invalid_argument("sr_ball_probe: no generators");
  const std::size_t dim = query.generators.front().dimension();
  if (query.q.size() != dim) throw std::invalid_argument("sr_ball_probe: point dimension mismatch");
  if (query.eta <= 0) throw std::invalid_argument("sr_ball_probe: eta must be positive");

  SRBallReport report;

  {
    const double start_res = [&] {
      double r = 0;
      for (const auto& f : ideal_evals) r = std::max(r, std::abs(f(query.q)));
      return r;
    }();
    if (start_res > tol)
      throw std::invalid_argument("sr_ball_probe: base point is not on X within tol");
  }

  // k_q: numeric rank of the generator matrix at q.
  Eigen::MatrixXd g(dim, query.generators.size());
  Vec val(dim);
  for (std::size_t i = 0; i < query.generators.size(); ++i) {
    query.generators[i].eval(query.q, val);
    for (std::size_t j = 0; j < dim; ++j) g(j, static_cast<long>(i)) = val[j];
  }
  report.k_q = numeric_rank(g, 1e-8);

  ControlProblem prob{&query.generators, query.q, 1.0, query.n_steps};
  const std::size_t nu = static_cast<std::size_t>(query.n_steps) * query.generators.size();
  const double off_center = std::max(100.0 * tol, 1e-5);

  std::mt19937_64 rng(query.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> frac(0.3, 0.95);

  // One RK4 substep with frozen control.
  auto rk4_step = [&prob](const Vec& x0, const double* u, double h) {
    Vec k1(x0.size()), k2(x0.size()), k3(x0.size()), k4(x0.size()), xt(x0.size());
    Vec x = x0;
    prob.rhs(x, u, k1);
    for (std::size_t j = 0; j < x.size(); ++j) xt[j] = x[j] + 0.5 * h * k1[j];
    prob.rhs(xt, u, k2);
    for (std::size_t j = 0; j < x.size(); ++j) xt[j] = x[j] + 0.5 * h * k2[j];
    prob.rhs(xt, u, k3);
    for (std::size_t j = 0; j < x.size(); ++j) xt[j] = x[j] + h * k3[j];
    prob.rhs(xt, u, k4);
    for (std::size_t j = 0; j < x.size(); ++j)
      x[j] += h / 6.0 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
    return x;
  };

  auto consider_hit = [&](const Vec& x, double cost) {
    if (cost >= query.eta) return;
    double res = 0;
    for (const auto& fe : ideal_evals) res = std::max(res, std::abs(fe(x)));
    if (res >= tol) return;
    const double d = std::sqrt(dist2(x, query.q));
    if (d > off_center) {
      report.intersects_X_off_center = true;
      report.hit_point = x;
      report.hit_cost = cost;
      report.hit_distance = d;
    }
  };

  const double dt = prob.horizon / prob.n_steps;
  const int substeps = prob.substeps;
  const double h = dt / substeps;

  for (int s = 0; s < query.budget && !report.intersects_X_off_center; ++s) {
    std::vector<double> u(nu);
    for (auto& v : u) v = normal(rng);
    const double raw_cost = prob.cost(u);
    if (raw_cost == 0) continue;
    const double target = query.eta * frac(rng);
    const double f = target / raw_cost;
    for (auto& v : u) v *= f;

    Vec x = prob.p;
    double cost = 0.0;
    for (int step = 0; step < prob.n_steps && !report.intersects_X_off_center; ++step) {
      const double* uc = u.data() + static_cast<std::size_t>(step) * prob.m();
      double unorm = 0;
      for (std::size_t i = 0; i < prob.m(); ++i) unorm += uc[i] * uc[i];
      unorm = std::sqrt(unorm);
      for (int sub = 0; sub < substeps && !report.intersects_X_off_center; ++sub) {
        Vec x_next = rk4_step(x, uc, h);
        const double cost_next = cost + unorm * h;
        consider_hit(x_next, cost_next);
        // Sign change of any evaluator: refine the crossing time inside the
        // substep, then require all evaluators near zero there.
        for (const auto& fe : ideal_evals) {
          const double fa = fe(x), fb = fe(x_next);
          if (fa == 0.0 || fa * fb >= 0.0) continue;
          double lo = 0.0, hi = h;
          Vec xm = x_next;
          for (int it = 0; it < 60 && hi - lo > 1e-14; ++it) {
            const double mid = 0.5 * (lo + hi);
            xm = rk4_step(x, uc, mid);
            if (fa * fe(xm) <= 0.0)
              hi = mid;
            else
              lo = mid;
          }
          consider_hit(xm, cost + unorm * 0.5 * (lo + hi));
          if (report.intersects_X_off_center) break;
        }
        x = std::move(x_next);
        cost = cost_next;
      }
    }
  }
  return report;
}

}  // namespace flowbox
