// Small numeric linear-algebra helpers shared by the floating-point checks.
#ifndef FLOWBOX_NUMERIC_HPP
#define FLOWBOX_NUMERIC_HPP

#include <Eigen/Dense>

namespace flowbox {

// Rank with singular values below tol treated as zero.
int numeric_rank(const Eigen::MatrixXd& m, double tol);

// Orthonormal basis of the right kernel (singular vectors with sigma < tol).
Eigen::MatrixXd numeric_kernel(const Eigen::MatrixXd& m, double tol);

}  // namespace flowbox

#endif
