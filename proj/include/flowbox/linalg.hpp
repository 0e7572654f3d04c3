// Exact rational dense linear algebra (Gaussian elimination), for the small
// rank/kernel/consistency problems behind the symbolic checks.
#ifndef FLOWBOX_LINALG_HPP
#define FLOWBOX_LINALG_HPP

#include "flowbox/rational.hpp"

#include <optional>
#include <vector>

namespace flowbox {

using RatMatrix = std::vector<std::vector<Rational>>;

std::size_t rat_rank(RatMatrix m);

// Basis of the right kernel {x : m x = 0}; ncols fixes the dimension when
// m has no rows.
std::vector<std::vector<Rational>> rat_kernel(const RatMatrix& m, std::size_t ncols);

// One solution of A x = b, or nullopt if inconsistent.
std::optional<std::vector<Rational>> rat_solve(RatMatrix a, std::vector<Rational> b);

}  // namespace flowbox

#endif
