#include "flowbox/geometry.hpp"

#include "flowbox/linalg.hpp"
#include "flowbox/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace flowbox {

Ideal derivative_ideal(const Distribution& theta, const Ideal& ideal) {
  std::vector<Polynomial> gens;
  for (const auto& d : theta.generators) {
    for (const auto& f : ideal.generators()) {
      Polynomial df = d.apply(f);
      if (!df.is_zero()) gens.push_back(std::move(df));
    }
  }
  return Ideal(ideal.vars(), std::move(gens));
}

Ideal iterated_derivative_ideal(const Distribution& theta, const Ideal& ideal, unsigned k) {
  Ideal cur = ideal;
  for (unsigned i = 0; i < k; ++i) cur = derivative_ideal(theta, cur);
  return cur;
}

std::optional<unsigned> fitting_order(const Distribution& theta, const Ideal& ideal,
                                      unsigned nu_max) {
  Ideal iterate = ideal;
  Ideal sum = ideal;
  for (unsigned nu = 0; nu <= nu_max; ++nu) {
    Ideal next = derivative_ideal(theta, iterate);
    if (sum.contains(next)) return nu;
    sum = sum + next;
    iterate = std::move(next);
  }
  return std::nullopt;
}

bool is_invariant_ideal(const Distribution& theta, const Ideal& ideal) {
  return ideal.contains(derivative_ideal(theta, ideal));
}

bool module_membership_bounded(const VectorField& v, const std::vector<VectorField>& gens,
                               unsigned degree_bound) {
  const auto& vars = v.vars();
  const std::size_t m = vars.size();
  std::vector<Exponents> monos = monomials_up_to(m, degree_bound);

  // Unknowns: one multiplier coefficient per (generator, monomial).
  // Equations: match every (component, monomial) coefficient of the target.
  std::map<std::pair<std::size_t, Exponents>, std::size_t> row_of;
  auto row_index = [&](std::size_t comp, const Exponents& e) {
    auto key = std::make_pair(comp, e);
    auto it = row_of.find(key);
    if (it != row_of.end()) return it->second;
    std::size_t r = row_of.size();
    row_of.emplace(std::move(key), r);
    return r;
  };

  struct Entry {
    std::size_t row, col;
    Rational value;
  };
  std::vector<Entry> entries;
  for (std::size_t g = 0; g < gens.size(); ++g) {
    if (gens[g].vars() != vars)
      throw std::invalid_argument("module_membership: variable lists differ");
    for (std::size_t mi = 0; mi < monos.size(); ++mi) {
      const std::size_t col = g * monos.size() + mi;
      for (std::size_t comp = 0; comp < m; ++comp) {
        for (const auto& [e, c] : gens[g].component(comp).terms()) {
          Exponents shifted(m);
          for (std::size_t k = 0; k < m; ++k) shifted[k] = e[k] + monos[mi][k];
          entries.push_back({row_index(comp, shifted), col, c});
        }
      }
    }
  }
  std::vector<Rational> rhs_sparse;
  std::vector<std::pair<std::size_t, Rational>> rhs_entries;
  for (std::size_t comp = 0; comp < m; ++comp)
    for (const auto& [e, c] : v.component(comp).terms())
      rhs_entries.emplace_back(row_index(comp, e), c);

  const std::size_t rows = row_of.size();
  const std::size_t cols = gens.size() * monos.size();
  RatMatrix a(rows, std::vector<Rational>(cols, Rational(0)));
  for (const auto& en : entries) a[en.row][en.col] += en.value;
  std::vector<Rational> b(rows, Rational(0));
  for (const auto& [r, c] : rhs_entries) b[r] += c;

  return rat_solve(std::move(a), std::move(b)).has_value();
}

namespace {

// Deterministic rational sample points used for pointwise non-membership
// certificates.
std::vector<std::vector<Rational>> sample_points(std::size_t nvars, std::size_t count) {
  static const Rational palette[] = {Rational(0),      Rational(1),  Rational(-1),
                                     Rational(1, 2),   Rational(-1, 2), Rational(2),
                                     Rational(-2),     Rational(1, 3),  Rational(3)};
  const std::size_t np = sizeof(palette) / sizeof(palette[0]);
  std::uint64_t state = 0x243F6A8885A308D3ull;
  auto next = [&]() {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return static_cast<std::size_t>(state >> 33);
  };
  std::vector<std::vector<Rational>> pts;
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<Rational> p(nvars);
    for (auto& c : p) c = palette[next() % np];
    pts.push_back(std::move(p));
  }
  return pts;
}

}  // namespace

InvolutivityReport is_involutive(const Distribution& theta, int degree_bound) {
  const auto& gens = theta.generators;
  InvolutivityReport report;
  if (gens.size() < 2) return report;

  int maxdeg = 0;
  for (const auto& g : gens)
    for (const auto& c : g.components()) maxdeg = std::max(maxdeg, c.total_degree());
  const unsigned bound =
      degree_bound >= 0 ? static_cast<unsigned>(degree_bound) : static_cast<unsigned>(maxdeg + 2);

  const auto points = sample_points(theta.vars().size(), 60);
  bool any_indeterminate = false;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    for (std::size_t j = i + 1; j < gens.size(); ++j) {
      VectorField bracket = lie_bracket(gens[i], gens[j]);
      if (bracket.is_zero()) continue;

      // A single rational point where the bracket leaves the pointwise span
      // certifies non-membership in the module.
      for (const auto& p : points) {
        RatMatrix span_rows;
        for (const auto& g : gens) span_rows.push_back(g.evaluate(p));
        const std::size_t r0 = rat_rank(span_rows);
        span_rows.push_back(bracket.evaluate(p));
        if (rat_rank(span_rows) > r0) {
          report.verdict = Tristate::False;
          report.witness_i = i;
          report.witness_j = j;
          report.witness_bracket = bracket;
          std::ostringstream os;
          os << "bracket of generators " << i << "," << j
             << " leaves the generator span at a rational sample point";
          report.detail = os.str();
          return report;
        }
      }

      if (!module_membership_bounded(bracket, gens, bound)) {
        any_indeterminate = true;
        report.witness_i = i;
        report.witness_j = j;
        report.witness_bracket = bracket;
        std::ostringstream os;
        os << "degree budget " << bound << " exhausted for bracket of generators " << i << ","
           << j;
        report.detail = os.str();
      }
    }
  }
  report.verdict = any_indeterminate ? Tristate::Indeterminate : Tristate::True;
  return report;
}

PointQT geometric_qt_at(const FoliatedSystem& sys, const std::vector<Rational>& point) {
  if (point.size() != sys.dimension())
    throw std::invalid_argument("geometric_qt_at: point dimension mismatch");

  for (const auto& g : sys.ideal().generators()) {
    Rational v = g.evaluate(point);
    if (v != 0) {
      std::ostringstream os;
      os << "point is not on X: generator " << g.to_string() << " evaluates to " << v.str();
      throw std::invalid_argument(os.str());
    }
  }
  for (const auto& e : sys.divisor()) {
    if (e.evaluate(point) == 0) {
      std::ostringstream os;
      os << "point lies on divisor component " << e.to_string()
         << "; quasi-transversality is defined on X minus the divisor";
      throw std::invalid_argument(os.str());
    }
  }

  const std::size_t m = sys.dimension();
  RatMatrix l_rows;
  for (const auto& g : sys.theta().generators) l_rows.push_back(g.evaluate(point));
  const std::size_t l_dim = rat_rank(l_rows);

  RatMatrix jac;
  for (const auto& g : sys.ideal().generators()) {
    std::vector<Rational> row;
    row.reserve(m);
    for (std::size_t v = 0; v < m; ++v) row.push_back(g.differentiate(v).evaluate(point));
    jac.push_back(std::move(row));
  }
  const auto kernel = rat_kernel(jac, m);
  const std::size_t t_dim = kernel.size();

  RatMatrix stacked = l_rows;
  for (const auto& k : kernel) stacked.push_back(k);
  const std::size_t sum_dim = rat_rank(stacked);

  PointQT out;
  out.point = point;
  out.L_dim = l_dim;
  out.T_dim = t_dim;
  out.sum_dim = sum_dim;
  out.verdict = (sum_dim == l_dim + t_dim);
  return out;
}

namespace {

struct NodeOutcome {
  enum Kind { NotProjected, OnDivisor, Ok } kind = NotProjected;
  std::vector<double> point;
  int l_dim = 0, t_dim = 0, sum_dim = 0;
  bool verdict = true;
};

NodeOutcome scan_node(const FoliatedSystem& sys,
                      const std::vector<std::vector<Polynomial>>& jac_polys,
                      std::vector<double> x, const ScanOptions& opts,
                      const std::vector<std::pair<double, double>>& inflated_box) {
  const auto& gens = sys.ideal().generators();
  const std::size_t k = gens.size();
  const std::size_t m = sys.dimension();
  NodeOutcome out;

  // Gauss-Newton projection onto V(ideal).
  const double proj_tol = std::min(opts.tol, 1e-10);
  bool converged = false;
  for (int iter = 0; iter < 50; ++iter) {
    Eigen::VectorXd f(k);
    double res = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      f[i] = gens[i].evaluate_double(x);
      res = std::max(res, std::abs(f[i]));
    }
    if (res < proj_tol) {
      converged = true;
      break;
    }
    Eigen::MatrixXd jac(k, m);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < m; ++j) jac(i, j) = jac_polys[i][j].evaluate_double(x);
    Eigen::MatrixXd jjt = jac * jac.transpose();
    Eigen::VectorXd lambda = jjt.fullPivLu().solve(f);
    Eigen::VectorXd step = jac.transpose() * lambda;
    if (!step.allFinite()) break;
    for (std::size_t j = 0; j < m; ++j) x[j] -= step[j];
  }
  if (!converged) return out;
  for (std::size_t j = 0; j < m; ++j)
    if (x[j] < inflated_box[j].first || x[j] > inflated_box[j].second) return out;

  for (const auto& e : sys.divisor()) {
    if (std::abs(e.evaluate_double(x)) < opts.tol) {
      out.kind = NodeOutcome::OnDivisor;
      return out;
    }
  }

  Eigen::MatrixXd l_rows(sys.theta().generators.size(), m);
  for (std::size_t g = 0; g < sys.theta().generators.size(); ++g) {
    auto val = sys.theta().generators[g].evaluate_double(x);
    for (std::size_t j = 0; j < m; ++j) l_rows(g, j) = val[j];
  }
  Eigen::MatrixXd jac(k, m);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < m; ++j) jac(i, j) = jac_polys[i][j].evaluate_double(x);

  const int l_dim = numeric_rank(l_rows, opts.tol);
  Eigen::MatrixXd kernel = numeric_kernel(jac, opts.tol);
  const int t_dim = static_cast<int>(kernel.cols());

  Eigen::MatrixXd stacked(l_rows.rows() + kernel.cols(), m);
  stacked.topRows(l_rows.rows()) = l_rows;
  stacked.bottomRows(kernel.cols()) = kernel.transpose();
  const int sum_dim = numeric_rank(stacked, opts.tol);

  out.kind = NodeOutcome::Ok;
  out.point = x;
  out.l_dim = l_dim;
  out.t_dim = t_dim;
  out.sum_dim = sum_dim;
  out.verdict = (sum_dim == l_dim + t_dim);
  return out;
}

}  // namespace

ScanReport geometric_qt_scan(const FoliatedSystem& sys, const ScanOptions& opts) {
  const std::size_t m = sys.dimension();
  if (opts.box.size() != m || opts.grid.size() != m)
    throw std::invalid_argument("geometric_qt_scan: box/grid must cover every variable");
  for (unsigned g : opts.grid)
    if (g < 1) throw std::invalid_argument("geometric_qt_scan: grid must be >= 1 per axis");

  std::vector<std::vector<double>> axes(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto [lo, hi] = opts.box[i];
    if (lo == hi) {
      axes[i] = {lo};
    } else {
      for (unsigned k = 0; k <= opts.grid[i]; ++k)
        axes[i].push_back(lo + (hi - lo) * static_cast<double>(k) / opts.grid[i]);
    }
  }
  std::vector<std::pair<double, double>> inflated(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto [lo, hi] = opts.box[i];
    const double pad = std::max({(hi - lo) * 0.25, 1e-6});
    inflated[i] = {lo - pad, hi + pad};
  }

  std::size_t total = 1;
  for (const auto& a : axes) total *= a.size();

  std::vector<std::vector<Polynomial>> jac_polys;
  for (const auto& g : sys.ideal().generators()) {
    std::vector<Polynomial> row;
    for (std::size_t v = 0; v < m; ++v) row.push_back(g.differentiate(v));
    jac_polys.push_back(std::move(row));
  }

  auto node_coords = [&](std::size_t idx) {
    std::vector<double> x(m);
    for (std::size_t i = m; i-- > 0;) {
      x[i] = axes[i][idx % axes[i].size()];
      idx /= axes[i].size();
    }
    return x;
  };

  std::vector<NodeOutcome> outcomes(total);
  const unsigned jobs = std::max(1u, opts.jobs);
  if (jobs == 1 || total < 2) {
    for (std::size_t idx = 0; idx < total; ++idx)
      outcomes[idx] = scan_node(sys, jac_polys, node_coords(idx), opts, inflated);
  } else {
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < jobs; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t idx = w; idx < total; idx += jobs)
          outcomes[idx] = scan_node(sys, jac_polys, node_coords(idx), opts, inflated);
      });
    }
    for (auto& t : workers) t.join();
  }

  ScanReport report;
  report.nodes = total;
  for (const auto& o : outcomes) {
    switch (o.kind) {
      case NodeOutcome::NotProjected:
        ++report.projection_failures;
        break;
      case NodeOutcome::OnDivisor:
        ++report.divisor_skipped;
        break;
      case NodeOutcome::Ok:
        ++report.projected;
        if (!o.verdict) report.failures.push_back({o.point, o.l_dim, o.t_dim, o.sum_dim});
        break;
    }
  }
  return report;
}

NumericQT numeric_qt_at(const std::vector<AnalyticField>& theta,
                        const std::vector<AnalyticFun>& ideal_evals,
                        std::span<const double> point, double tol) {
  const std::size_t m = point.size();
  Eigen::MatrixXd l_rows(theta.size(), m);
  for (std::size_t g = 0; g < theta.size(); ++g) {
    auto val = theta[g].eval(point);
    for (std::size_t j = 0; j < m; ++j) l_rows(static_cast<long>(g), static_cast<long>(j)) = val[j];
  }
  Eigen::MatrixXd jac(ideal_evals.size(), m);
  std::vector<double> xp(point.begin(), point.end());
  std::vector<double> xm(point.begin(), point.end());
  for (std::size_t j = 0; j < m; ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(point[j]));
    xp[j] = point[j] + h;
    xm[j] = point[j] - h;
    for (std::size_t i = 0; i < ideal_evals.size(); ++i)
      jac(static_cast<long>(i), static_cast<long>(j)) =
          (ideal_evals[i](xp) - ideal_evals[i](xm)) / (2.0 * h);
    xp[j] = point[j];
    xm[j] = point[j];
  }
  NumericQT out;
  out.L_dim = numeric_rank(l_rows, tol);
  Eigen::MatrixXd kernel = numeric_kernel(jac, tol);
  out.T_dim = static_cast<int>(kernel.cols());
  Eigen::MatrixXd stacked(l_rows.rows() + kernel.cols(), m);
  stacked.topRows(l_rows.rows()) = l_rows;
  stacked.bottomRows(kernel.cols()) = kernel.transpose();
  out.sum_dim = numeric_rank(stacked, tol);
  out.verdict = (out.sum_dim == out.L_dim + out.T_dim);
  return out;
}

bool is_analytically_qt(const FoliatedSystem& sys) {
  Ideal theta1 = derivative_ideal(sys.theta(), sys.ideal());
  Ideal theta2 = derivative_ideal(sys.theta(), theta1);
  return (sys.ideal() + theta1).contains(theta2);
}

Ideal tangency_locus(const FoliatedSystem& sys) {
  return sys.ideal() + derivative_ideal(sys.theta(), sys.ideal());
}

namespace {

std::vector<Rational> linear_part(const Polynomial& p) {
  std::vector<Rational> row(p.nvars(), Rational(0));
  for (const auto& [e, c] : p.terms()) {
    if (exps_total_degree(e) != 1) continue;
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i] == 1) row[i] = c;
  }
  return row;
}

}  // namespace

bool regular_curve_aqt_check(const FoliatedSystem& sys) {
  const std::size_t m = sys.dimension();
  RatMatrix rows;
  for (const auto& g : sys.ideal().generators()) {
    if (g.total_degree() != 1) {
      std::ostringstream os;
      os << "regular_curve_aqt_check: generator " << g.to_string()
         << " is not affine of degree one";
      throw std::invalid_argument(os.str());
    }
    rows.push_back(linear_part(g));
  }
  if (rat_rank(rows) != m - 1) {
    std::ostringstream os;
    os << "regular_curve_aqt_check: ideal generators have joint linear rank "
       << rat_rank(rows) << ", expected " << (m - 1);
    throw std::invalid_argument(os.str());
  }
  for (const auto& e : sys.divisor()) {
    if (e.total_degree() != 1) {
      std::ostringstream os;
      os << "regular_curve_aqt_check: divisor component " << e.to_string() << " is not affine";
      throw std::invalid_argument(os.str());
    }
    RatMatrix stacked = rows;
    stacked.push_back(linear_part(e));
    if (rat_rank(stacked) != m) {
      std::ostringstream os;
      os << "regular_curve_aqt_check: divisor component " << e.to_string()
         << " is not transverse to the curve";
      throw std::invalid_argument(os.str());
    }
  }
  Ideal j = tangency_locus(sys);
  return j.contains(derivative_ideal(sys.theta(), j));
}

}  // namespace flowbox
