#include "flowbox/splitting.hpp"

#include "flowbox/linalg.hpp"
#include "flowbox/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace flowbox {

namespace {

std::size_t find_y_index(const VectorField& y_field) {
  std::size_t y_index = SIZE_MAX;
  for (std::size_t i = 0; i < y_field.dimension(); ++i) {
    const Polynomial& c = y_field.component(i);
    if (c.is_zero()) continue;
    const bool is_one = c.is_constant() && c.terms().begin()->second == 1;
    if (!is_one || y_index != SIZE_MAX)
      throw std::invalid_argument(
          "leaf splitting requires Y to be a coordinate field d/dy in the given coordinates");
    y_index = i;
  }
  if (y_index == SIZE_MAX)
    throw std::invalid_argument("leaf splitting requires a nonzero rectified generator Y");
  return y_index;
}

}  // namespace

PolyMatrix extract_connection(const VectorField& y_field, const std::vector<VectorField>& w,
                              unsigned degree_bound) {
  const auto& vars = y_field.vars();
  const std::size_t m = vars.size();
  const std::size_t y_index = find_y_index(y_field);
  const std::size_t s = w.size();

  for (std::size_t j = 0; j < s; ++j) {
    if (w[j].vars() != vars)
      throw std::invalid_argument("extract_connection: variable lists differ");
    if (!w[j].component(y_index).is_zero()) {
      std::ostringstream os;
      os << "extract_connection: W_" << j << " must have zero d/d" << vars[y_index]
         << " component";
      throw std::invalid_argument(os.str());
    }
  }

  const std::vector<Exponents> monos = monomials_up_to(m, degree_bound);
  PolyMatrix a(s, std::vector<Polynomial>(s, Polynomial::zero(vars)));

  for (std::size_t j = 0; j < s; ++j) {
    const VectorField bracket = lie_bracket(y_field, w[j]);

    // Match coefficients of bracket = sum_i A[i][j] * W_i.
    std::map<std::pair<std::size_t, Exponents>, std::size_t> row_of;
    auto row_index = [&](std::size_t comp, const Exponents& e) {
      auto key = std::make_pair(comp, e);
      auto it = row_of.find(key);
      if (it != row_of.end()) return it->second;
      const std::size_t r = row_of.size();
      row_of.emplace(std::move(key), r);
      return r;
    };
    struct Entry {
      std::size_t row, col;
      Rational value;
    };
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < s; ++i) {
      for (std::size_t mi = 0; mi < monos.size(); ++mi) {
        const std::size_t col = i * monos.size() + mi;
        for (std::size_t comp = 0; comp < m; ++comp) {
          for (const auto& [e, c] : w[i].component(comp).terms()) {
            Exponents shifted(m);
            for (std::size_t k = 0; k < m; ++k) shifted[k] = e[k] + monos[mi][k];
            entries.push_back({row_index(comp, shifted), col, c});
          }
        }
      }
    }
    std::vector<std::pair<std::size_t, Rational>> rhs;
    for (std::size_t comp = 0; comp < m; ++comp)
      for (const auto& [e, c] : bracket.component(comp).terms())
        rhs.emplace_back(row_index(comp, e), c);

    const std::size_t rows = row_of.size();
    const std::size_t cols = s * monos.size();
    RatMatrix mat(rows, std::vector<Rational>(cols, Rational(0)));
    for (const auto& en : entries) mat[en.row][en.col] += en.value;
    std::vector<Rational> b(rows, Rational(0));
    for (const auto& [r, c] : rhs) b[r] += c;

    auto sol = rat_solve(std::move(mat), std::move(b));
    if (!sol) {
      std::ostringstream os;
      os << "extract_connection: [Y,W_" << j << "] = " << bracket.to_string()
         << " has no polynomial expansion in the W's within degree bound " << degree_bound;
      throw std::invalid_argument(os.str());
    }
    for (std::size_t i = 0; i < s; ++i) {
      Polynomial p = Polynomial::zero(vars);
      for (std::size_t mi = 0; mi < monos.size(); ++mi)
        p.add_term(monos[mi], (*sol)[i * monos.size() + mi]);
      a[i][j] = std::move(p);
    }
  }
  return a;
}

namespace {

// Natural cubic spline in y per (z node, i, j), multilinear across the z axes.
struct MuInterp {
  std::vector<double> y_nodes;
  std::vector<std::vector<double>> z_axes;  // per z variable
  std::size_t s = 0;
  // values[zn][yn] and second derivatives [zn] as s*s-packed rows per y node.
  std::vector<std::vector<Eigen::MatrixXd>> values;
  std::vector<std::vector<Eigen::MatrixXd>> second;

  void build_splines() {
    const std::size_t ny = y_nodes.size();
    second.assign(values.size(),
                  std::vector<Eigen::MatrixXd>(ny, Eigen::MatrixXd::Zero(s, s)));
    if (ny < 3) return;
    for (std::size_t zn = 0; zn < values.size(); ++zn) {
      for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t j = 0; j < s; ++j) {
          // Tridiagonal natural-spline solve for one scalar sequence.
          std::vector<double> u(ny, 0.0), m2(ny, 0.0);
          for (std::size_t k = 1; k + 1 < ny; ++k) {
            const double sig = (y_nodes[k] - y_nodes[k - 1]) / (y_nodes[k + 1] - y_nodes[k - 1]);
            const double p = sig * m2[k - 1] + 2.0;
            m2[k] = (sig - 1.0) / p;
            const double d1 = (values[zn][k + 1](i, j) - values[zn][k](i, j)) /
                              (y_nodes[k + 1] - y_nodes[k]);
            const double d0 = (values[zn][k](i, j) - values[zn][k - 1](i, j)) /
                              (y_nodes[k] - y_nodes[k - 1]);
            u[k] = (6.0 * (d1 - d0) / (y_nodes[k + 1] - y_nodes[k - 1]) - sig * u[k - 1]) / p;
          }
          for (std::size_t k = ny - 1; k-- > 0;) m2[k] = m2[k] * m2[k + 1] + u[k];
          for (std::size_t k = 0; k < ny; ++k) second[zn][k](i, j) = m2[k];
        }
      }
    }
  }

  double spline_eval(std::size_t zn, std::size_t i, std::size_t j, double y) const {
    const auto& yn = y_nodes;
    if (yn.size() == 1) return values[zn][0](i, j);
    std::size_t hi = std::upper_bound(yn.begin(), yn.end(), y) - yn.begin();
    hi = std::clamp<std::size_t>(hi, 1, yn.size() - 1);
    const std::size_t lo = hi - 1;
    const double h = yn[hi] - yn[lo];
    const double a = (yn[hi] - y) / h, b = (y - yn[lo]) / h;
    return a * values[zn][lo](i, j) + b * values[zn][hi](i, j) +
           ((a * a * a - a) * second[zn][lo](i, j) + (b * b * b - b) * second[zn][hi](i, j)) *
               h * h / 6.0;
  }

  // Multilinear combination over the z cell containing zc.
  double eval(std::size_t i, std::size_t j, double y, const std::vector<double>& zc) const {
    if (z_axes.empty()) return spline_eval(0, i, j, y);
    std::vector<std::size_t> lo(z_axes.size());
    std::vector<double> wgt(z_axes.size());
    for (std::size_t d = 0; d < z_axes.size(); ++d) {
      const auto& ax = z_axes[d];
      if (ax.size() == 1) {
        lo[d] = 0;
        wgt[d] = 0.0;
        continue;
      }
      std::size_t hi = std::upper_bound(ax.begin(), ax.end(), zc[d]) - ax.begin();
      hi = std::clamp<std::size_t>(hi, 1, ax.size() - 1);
      lo[d] = hi - 1;
      wgt[d] = (zc[d] - ax[lo[d]]) / (ax[hi] - ax[lo[d]]);
    }
    double acc = 0.0;
    const std::size_t corners = std::size_t{1} << z_axes.size();
    for (std::size_t mask = 0; mask < corners; ++mask) {
      double wprod = 1.0;
      std::size_t zn = 0;
      for (std::size_t d = 0; d < z_axes.size(); ++d) {
        const bool up = (mask >> d) & 1u;
        const std::size_t idx = lo[d] + (up ? 1 : 0) < z_axes[d].size()
                                    ? lo[d] + (up ? 1 : 0)
                                    : lo[d];
        wprod *= up ? wgt[d] : (1.0 - wgt[d]);
        zn = zn * z_axes[d].size() + idx;
      }
      if (wprod == 0.0) continue;
      acc += wprod * spline_eval(zn, i, j, y);
    }
    return acc;
  }
};

}  // namespace

SplitResult leaf_split(const VectorField& y_field, const std::vector<VectorField>& w,
                       const PolyMatrix& a, const SplitOptions& opts) {
  const auto& vars = y_field.vars();
  const std::size_t m = vars.size();
  const std::size_t y_index = find_y_index(y_field);
  const std::size_t s = w.size();
  if (a.size() != s) throw std::invalid_argument("leaf_split: connection matrix size mismatch");
  for (const auto& row : a)
    if (row.size() != s) throw std::invalid_argument("leaf_split: connection matrix not square");
  if (opts.y_lo > 0.0 || opts.y_hi < 0.0)
    throw std::invalid_argument("leaf_split: y span must contain 0 (mu(0) = identity)");

  SplitResult result;
  result.y_field = y_field;
  result.w = w;
  result.y_index = y_index;

  const std::size_t ny = std::max<unsigned>(opts.y_samples, 2);
  for (std::size_t k = 0; k < ny; ++k)
    result.y_nodes.push_back(opts.y_lo + (opts.y_hi - opts.y_lo) * static_cast<double>(k) /
                                             static_cast<double>(ny - 1));

  std::vector<std::size_t> z_indices;
  for (std::size_t i = 0; i < m; ++i)
    if (i != y_index) z_indices.push_back(i);
  if (opts.z_axes.size() != z_indices.size())
    throw std::invalid_argument("leaf_split: one z axis per non-y variable required");

  std::size_t zn_total = 1;
  for (const auto& ax : opts.z_axes) {
    if (ax.empty()) throw std::invalid_argument("leaf_split: empty z axis");
    zn_total *= ax.size();
  }
  for (std::size_t zn = 0; zn < zn_total; ++zn) {
    std::vector<double> zc(z_indices.size());
    std::size_t rest = zn;
    for (std::size_t d = z_indices.size(); d-- > 0;) {
      zc[d] = opts.z_axes[d][rest % opts.z_axes[d].size()];
      rest /= opts.z_axes[d].size();
    }
    result.z_nodes.push_back(std::move(zc));
  }

  if (s == 0) {
    result.commutator_residual = 0.0;
    return result;
  }

  // Augmented linear ODE per z node: state (y, M) with dM/dy = -A(y,z) M,
  // M(0) = I; column i of M is the solution with start e_i.
  result.mu.assign(zn_total, std::vector<Eigen::MatrixXd>(ny, Eigen::MatrixXd::Identity(
                                                                  static_cast<long>(s),
                                                                  static_cast<long>(s))));
  for (std::size_t zn = 0; zn < zn_total; ++zn) {
    std::vector<AnalyticFun> comps(1 + s * s);
    comps[0] = {[](std::span<const double>) { return 1.0; }, "1"};
    for (std::size_t i = 0; i < s; ++i) {
      for (std::size_t j = 0; j < s; ++j) {
        const std::size_t idx = 1 + i * s + j;  // M(j, i)
        comps[idx] = {
            [&, zn, i, j, this_a = &a, z_idx = &z_indices, yi = y_index, zc = result.z_nodes[zn],
             mm = m](std::span<const double> state) {
              std::vector<double> pt(mm, 0.0);
              pt[yi] = state[0];
              for (std::size_t d = 0; d < z_idx->size(); ++d) pt[(*z_idx)[d]] = zc[d];
              double acc = 0.0;
              for (std::size_t k = 0; k < (*this_a).size(); ++k) {
                const double a_jk = (*this_a)[j][k].evaluate_double(pt);
                acc -= a_jk * state[1 + i * (*this_a).size() + k];
              }
              return acc;
            },
            "-sum_k A[j][k]*M[k][i]"};
      }
    }
    std::vector<std::string> state_vars(1 + s * s);
    state_vars[0] = vars[y_index];
    for (std::size_t k = 0; k < s * s; ++k) state_vars[1 + k] = "mu" + std::to_string(k);
    AnalyticField ode(state_vars, std::move(comps));

    std::vector<double> state0(1 + s * s, 0.0);
    for (std::size_t i = 0; i < s; ++i) state0[1 + i * s + i] = 1.0;

    auto fill_from = [&](const Trajectory& traj, bool forward) {
      for (std::size_t k = 0; k < ny; ++k) {
        const double y = result.y_nodes[k];
        if (forward ? (y < 0) : (y > 0)) continue;
        std::vector<double> st;
        if (y == 0.0) {
          st = state0;
        } else {
          const double t_reach = forward ? traj.t_end() : traj.t_end();
          if ((forward && y > t_reach) || (!forward && y < t_reach)) {
            result.truncated = true;
            st = traj.states.back();
          } else {
            st = traj.state_at(y);
          }
        }
        Eigen::MatrixXd mu(s, s);
        for (std::size_t i = 0; i < s; ++i)
          for (std::size_t j = 0; j < s; ++j)
            mu(static_cast<long>(i), static_cast<long>(j)) = st[1 + i * s + j];
        result.mu[zn][k] = mu;
      }
    };

    try {
      if (opts.y_hi > 0) fill_from(integrate(ode, state0, opts.y_hi, opts.integ), true);
      if (opts.y_lo < 0) fill_from(integrate(ode, state0, opts.y_lo, opts.integ), false);
    } catch (const std::runtime_error&) {
      result.truncated = true;
    }
  }

  // Assemble Z fields through a shared interpolation table.
  auto interp = std::make_shared<MuInterp>();
  interp->y_nodes = result.y_nodes;
  interp->z_axes = opts.z_axes;
  interp->s = s;
  interp->values = result.mu;
  interp->build_splines();

  for (std::size_t i = 0; i < s; ++i) {
    std::vector<AnalyticFun> comps;
    comps.reserve(m);
    for (std::size_t c = 0; c < m; ++c) {
      std::vector<Polynomial> w_comps;
      for (std::size_t j = 0; j < s; ++j) w_comps.push_back(w[j].component(c));
      comps.push_back(
          {[interp, i, w_comps, y_index, z_indices](std::span<const double> p) {
             std::vector<double> zc(z_indices.size());
             for (std::size_t d = 0; d < z_indices.size(); ++d) zc[d] = p[z_indices[d]];
             double acc = 0.0;
             for (std::size_t j = 0; j < w_comps.size(); ++j) {
               const double mu_ij = interp->eval(i, j, p[y_index], zc);
               if (mu_ij != 0.0) acc += mu_ij * w_comps[j].evaluate_double(p);
             }
             return acc;
           },
           "sum_j mu[" + std::to_string(i) + "][j]*W_j"});
    }
    result.z_fields.emplace_back(vars, std::move(comps));
  }

  // Commutator residual by centered differences of the Z components in y.
  double residual = 0.0;
  for (std::size_t zn = 0; zn < zn_total; ++zn) {
    std::vector<double> pt(m, 0.0);
    for (std::size_t d = 0; d < z_indices.size(); ++d) pt[z_indices[d]] = result.z_nodes[zn][d];
    // Z component values on the y line.
    for (std::size_t i = 0; i < s; ++i) {
      for (std::size_t c = 0; c < m; ++c) {
        std::vector<double> vals(ny);
        for (std::size_t k = 0; k < ny; ++k) {
          pt[y_index] = result.y_nodes[k];
          double acc = 0.0;
          for (std::size_t j = 0; j < s; ++j)
            acc += result.mu[zn][k](static_cast<long>(i), static_cast<long>(j)) *
                   w[j].component(c).evaluate_double(pt);
          vals[k] = acc;
        }
        for (std::size_t k = 1; k + 1 < ny; ++k) {
          const double d = (vals[k + 1] - vals[k - 1]) /
                           (result.y_nodes[k + 1] - result.y_nodes[k - 1]);
          residual = std::max(residual, std::abs(d));
        }
      }
    }
  }
  result.commutator_residual = residual;
  return result;
}

bool verify_split(const SplitResult& result, double tol, double rank_tol) {
  if (result.w.empty()) return true;
  if (result.commutator_residual >= tol) return false;

  const std::size_t m = result.y_field.dimension();
  const std::size_t s = result.w.size();
  std::vector<std::size_t> z_indices;
  for (std::size_t i = 0; i < m; ++i)
    if (i != result.y_index) z_indices.push_back(i);

  for (std::size_t zn = 0; zn < result.z_nodes.size(); ++zn) {
    std::vector<double> pt(m, 0.0);
    for (std::size_t d = 0; d < z_indices.size(); ++d)
      pt[z_indices[d]] = result.z_nodes[zn][d];
    for (std::size_t k = 0; k < result.y_nodes.size(); ++k) {
      pt[result.y_index] = result.y_nodes[k];

      Eigen::MatrixXd with_w(1 + s, m), with_z(1 + s, m);
      auto yv = result.y_field.evaluate_double(pt);
      for (std::size_t c = 0; c < m; ++c) with_w(0, c) = with_z(0, c) = yv[c];
      for (std::size_t j = 0; j < s; ++j) {
        auto wv = result.w[j].evaluate_double(pt);
        for (std::size_t c = 0; c < m; ++c) with_w(1 + j, c) = wv[c];
      }
      for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t c = 0; c < m; ++c) {
          double acc = 0.0;
          for (std::size_t j = 0; j < s; ++j)
            acc += result.mu[zn][k](static_cast<long>(i), static_cast<long>(j)) *
                   result.w[j].component(c).evaluate_double(pt);
          with_z(1 + i, c) = acc;
        }
      }
      if (numeric_rank(with_w, rank_tol) != numeric_rank(with_z, rank_tol)) return false;
    }
  }
  return true;
}

}  // namespace flowbox
