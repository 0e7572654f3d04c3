// Test-only oracles, independent of the library code paths they check:
// a degree-bounded linear-algebra membership oracle with its own Gaussian
// elimination, finite-difference helpers, a scaled-squaring matrix
// exponential, and deterministic random polynomial generators.
#ifndef FLOWBOX_TESTS_ORACLES_HPP
#define FLOWBOX_TESTS_ORACLES_HPP

#include "flowbox/polynomial.hpp"

#include <Eigen/Dense>

#include <map>
#include <random>
#include <vector>

namespace oracles {

using flowbox::Exponents;
using flowbox::Polynomial;
using flowbox::Rational;

// Self-contained consistency check for A x = b over the rationals.
inline bool gauss_consistent(std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows == 0 ? 0 : a[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    std::swap(b[p], b[r]);
    const Rational inv = Rational(1) / a[r][c];
    for (std::size_t j = c; j < cols; ++j) a[r][j] *= inv;
    b[r] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      const Rational f = a[i][c];
      for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
      b[i] -= f * b[r];
    }
    ++r;
  }
  for (std::size_t i = r; i < rows; ++i)
    if (b[i] != 0) return false;
  return true;
}

// Membership oracle: solvability of f = sum_i h_i g_i with deg h_i <= bound,
// as a linear system in the coefficients of the h_i.
inline bool membership_oracle(const Polynomial& f, const std::vector<Polynomial>& gens,
                              unsigned bound) {
  const std::size_t m = f.nvars();
  const auto monos = flowbox::monomials_up_to(m, bound);

  std::map<Exponents, std::size_t> row_of;
  auto row_index = [&](const Exponents& e) {
    auto it = row_of.find(e);
    if (it != row_of.end()) return it->second;
    const std::size_t r = row_of.size();
    row_of.emplace(e, r);
    return r;
  };

  struct Entry {
    std::size_t row, col;
    Rational value;
  };
  std::vector<Entry> entries;
  for (std::size_t g = 0; g < gens.size(); ++g) {
    for (std::size_t mi = 0; mi < monos.size(); ++mi) {
      const std::size_t col = g * monos.size() + mi;
      for (const auto& [e, c] : gens[g].terms()) {
        Exponents shifted(m);
        for (std::size_t k = 0; k < m; ++k) shifted[k] = e[k] + monos[mi][k];
        entries.push_back({row_index(shifted), col, c});
      }
    }
  }
  std::vector<std::pair<std::size_t, Rational>> rhs;
  for (const auto& [e, c] : f.terms()) rhs.emplace_back(row_index(e), c);

  std::vector<std::vector<Rational>> a(row_of.size(),
                                       std::vector<Rational>(gens.size() * monos.size(),
                                                             Rational(0)));
  for (const auto& en : entries) a[en.row][en.col] += en.value;
  std::vector<Rational> b(row_of.size(), Rational(0));
  for (const auto& [r, c] : rhs) b[r] += c;
  return gauss_consistent(std::move(a), std::move(b));
}

// Scaled-squaring matrix exponential with a Taylor core.
inline Eigen::MatrixXd expm(const Eigen::MatrixXd& a) {
  const int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(
                                        std::max(1.0, a.cwiseAbs().rowwise().sum().maxCoeff())))) +
                                        4);
  Eigen::MatrixXd scaled = a / std::pow(2.0, squarings);
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  Eigen::MatrixXd term = result;
  for (int k = 1; k <= 24; ++k) {
    term = term * scaled / static_cast<double>(k);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

// Deterministic random polynomials with small rational coefficients.
inline Polynomial random_polynomial(std::mt19937_64& rng, const std::vector<std::string>& vars,
                                    unsigned max_degree, unsigned max_terms) {
  std::uniform_int_distribution<int> num(-4, 4);
  std::uniform_int_distribution<int> den(1, 3);
  const auto monos = flowbox::monomials_up_to(vars.size(), max_degree);
  std::uniform_int_distribution<std::size_t> pick(0, monos.size() - 1);
  Polynomial p = Polynomial::zero(vars);
  const unsigned terms = 1 + static_cast<unsigned>(rng() % max_terms);
  for (unsigned t = 0; t < terms; ++t) {
    const int n = num(rng);
    if (n == 0) continue;
    p.add_term(monos[pick(rng)], Rational(n, den(rng)));
  }
  return p;
}

inline std::vector<Rational> random_rational_point(std::mt19937_64& rng, std::size_t nvars) {
  std::uniform_int_distribution<int> num(-3, 3);
  std::uniform_int_distribution<int> den(1, 4);
  std::vector<Rational> p(nvars);
  for (auto& c : p) c = Rational(num(rng), den(rng));
  return p;
}

}  // namespace oracles

#endif
