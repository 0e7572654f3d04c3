// Symbolic checks on foliated systems: derivative ideals, fitting order,
// invariance, involutivity, quasi-transversality and tangency loci.
#ifndef FLOWBOX_GEOMETRY_HPP
#define FLOWBOX_GEOMETRY_HPP

#include "flowbox/analytic.hpp"
#include "flowbox/system.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace flowbox {

// theta[I]: ideal generated by d(f) over generators d of theta and f of I.
Ideal derivative_ideal(const Distribution& theta, const Ideal& ideal);

// theta^k[I]; k = 0 returns I unchanged.
Ideal iterated_derivative_ideal(const Distribution& theta, const Ideal& ideal, unsigned k);

// Least nu <= nu_max with theta^(nu+1)[I] contained in sum_{i<=nu} theta^i[I].
std::optional<unsigned> fitting_order(const Distribution& theta, const Ideal& ideal,
                                      unsigned nu_max);

bool is_invariant_ideal(const Distribution& theta, const Ideal& ideal);

// Does v lie in the module over the polynomial ring generated by gens, with
// multiplier degrees bounded by degree_bound?
bool module_membership_bounded(const VectorField& v, const std::vector<VectorField>& gens,
                               unsigned degree_bound);

enum class Tristate { True, False, Indeterminate };

struct InvolutivityReport {
  Tristate verdict = Tristate::True;
  std::size_t witness_i = 0, witness_j = 0;
  VectorField witness_bracket;
  std::string detail;
};

// Degree-bounded check; bound < 0 selects max generator degree + 2.
// False is certified by a pointwise evaluation witness, True by the bounded
// syzygy solve, anything else is Indeterminate.
InvolutivityReport is_involutive(const Distribution& theta, int degree_bound = -1);

struct PointQT {
  std::vector<Rational> point;
  std::size_t L_dim = 0;
  std::size_t T_dim = 0;
  std::size_t sum_dim = 0;
  bool verdict = false;
};

// Exact verdict at a rational point of X off the divisor.
PointQT geometric_qt_at(const FoliatedSystem& sys, const std::vector<Rational>& point);

struct ScanOptions {
  std::vector<std::pair<double, double>> box;  // per-variable interval
  std::vector<unsigned> grid;                  // subdivisions per axis (nodes = grid+1)
  double tol = 1e-7;
  unsigned jobs = 1;
};

struct ScanFailure {
  std::vector<double> point;
  int L_dim = 0, T_dim = 0, sum_dim = 0;
};

struct ScanReport {
  std::vector<ScanFailure> failures;
  std::size_t nodes = 0;
  std::size_t projected = 0;
  std::size_t projection_failures = 0;
  std::size_t divisor_skipped = 0;
};

// Sampled regional check: grid nodes are Newton-projected onto X and tested
// with floating ranks (singular values below tol count as zero).
ScanReport geometric_qt_scan(const FoliatedSystem& sys, const ScanOptions& opts);

struct NumericQT {
  int L_dim = 0, T_dim = 0, sum_dim = 0;
  bool verdict = false;
};

// Floating-point variant for analytic bundles: the Jacobian of the black-box
// evaluators is taken by central differences.
NumericQT numeric_qt_at(const std::vector<AnalyticField>& theta,
                        const std::vector<AnalyticFun>& ideal_evals,
                        std::span<const double> point, double tol);

// The algebraic condition theta^2[I] in I + theta[I] alone; the geometric
// side is reported separately by geometric_qt_at / geometric_qt_scan.
bool is_analytically_qt(const FoliatedSystem& sys);

// I + theta[I].
Ideal tangency_locus(const FoliatedSystem& sys);

// For X a regular affine curve (coordinate-affine generators of rank m-1)
// transverse to the divisor: checks theta[J] in J for J = I + theta[I].
bool regular_curve_aqt_check(const FoliatedSystem& sys);

}  // namespace flowbox

#endif
