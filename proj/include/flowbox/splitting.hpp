// Leaf reduction: given Y = d/dy and generators W_j with no y-component,
// build commuting combinations Z_i = sum_j mu_{i,j} W_j by solving the linear
// ODE for the coefficients mu along y.
#ifndef FLOWBOX_SPLITTING_HPP
#define FLOWBOX_SPLITTING_HPP

#include "flowbox/analytic.hpp"
#include "flowbox/integrate.hpp"
#include "flowbox/vector_field.hpp"

#include <Eigen/Dense>

#include <vector>

namespace flowbox {

// A[i][j] with [Y, W_j] = sum_i A[i][j] * W_i.
using PolyMatrix = std::vector<std::vector<Polynomial>>;

// Exact coefficient solve up to degree_bound; throws if the W's are not
// closed under bracketing with Y within the bound.
PolyMatrix extract_connection(const VectorField& y_field, const std::vector<VectorField>& w,
                              unsigned degree_bound);

struct SplitOptions {
  std::vector<std::vector<double>> z_axes;  // grid values per non-y variable, in variable order
  double y_lo = -1.0, y_hi = 1.0;           // must contain 0 (mu(0) = identity)
  unsigned y_samples = 33;
  IntegrateOptions integ{1e-10, 1e-12};
};

struct SplitResult {
  VectorField y_field;
  std::vector<VectorField> w;
  std::size_t y_index = 0;
  std::vector<double> y_nodes;
  std::vector<std::vector<double>> z_nodes;  // product grid over the z axes
  // mu[zn][yn](i,j): j-th coefficient of solution i (Z_i = sum_j mu_{i,j} W_j).
  std::vector<std::vector<Eigen::MatrixXd>> mu;
  std::vector<AnalyticField> z_fields;  // spline in y, multilinear in z
  double commutator_residual = 0.0;
  bool truncated = false;
};

SplitResult leaf_split(const VectorField& y_field, const std::vector<VectorField>& w,
                       const PolyMatrix& a, const SplitOptions& opts);

// residual < tol and rank{Y, Z_1..Z_s} == rank{Y, W_1..W_s} at every grid node.
bool verify_split(const SplitResult& result, double tol, double rank_tol = 1e-8);

}  // namespace flowbox

#endif
