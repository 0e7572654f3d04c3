#include "flowbox/linalg.hpp"

#include <stdexcept>

namespace flowbox {

namespace {

// Row echelon form in place; returns pivot column per pivot row.
std::vector<std::size_t> echelon(RatMatrix& m) {
  std::vector<std::size_t> pivots;
  if (m.empty()) return pivots;
  const std::size_t rows = m.size(), cols = m[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && m[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[r]);
    const Rational inv = Rational(1) / m[r][c];
    for (std::size_t j = c; j < cols; ++j) m[r][j] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      const Rational f = m[i][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

std::size_t rat_rank(RatMatrix m) { return echelon(m).size(); }

std::vector<std::vector<Rational>> rat_kernel(const RatMatrix& m, std::size_t ncols) {
  RatMatrix a = m;
  for (const auto& row : a)
    if (row.size() != ncols) throw std::invalid_argument("rat_kernel: ragged matrix");
  std::vector<std::size_t> pivots = echelon(a);

  std::vector<bool> is_pivot(ncols, false);
  for (std::size_t c : pivots) is_pivot[c] = true;

  std::vector<std::vector<Rational>> basis;
  for (std::size_t free_c = 0; free_c < ncols; ++free_c) {
    if (is_pivot[free_c]) continue;
    std::vector<Rational> v(ncols, Rational(0));
    v[free_c] = 1;
    for (std::size_t pr = 0; pr < pivots.size(); ++pr) v[pivots[pr]] = -a[pr][free_c];
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<std::vector<Rational>> rat_solve(RatMatrix a, std::vector<Rational> b) {
  const std::size_t rows = a.size();
  if (b.size() != rows) throw std::invalid_argument("rat_solve: dimension mismatch");
  const std::size_t cols = rows == 0 ? 0 : a[0].size();
  for (std::size_t i = 0; i < rows; ++i) a[i].push_back(b[i]);
  std::vector<std::size_t> pivots = echelon(a);
  // Inconsistent iff some pivot landed in the augmented column.
  if (!pivots.empty() && pivots.back() == cols) return std::nullopt;
  std::vector<Rational> x(cols, Rational(0));
  for (std::size_t pr = 0; pr < pivots.size(); ++pr) x[pivots[pr]] = a[pr][cols];
  return x;
}

}  // namespace flowbox
