// Chart-wise blow-up at coordinate-subspace centers: vector-field pullback,
// order-one weak transform of the ideal, divisor update, and the transform
// identities.
#ifndef FLOWBOX_BLOWUP_HPP
#define FLOWBOX_BLOWUP_HPP

#include "flowbox/analytic.hpp"
#include "flowbox/system.hpp"

#include <string>
#include <utility>
#include <vector>

namespace flowbox {

struct BlowupSpec {
  std::vector<std::string> center_vars;  // center C = V(center_vars), at least 2
  std::string chart_var;                 // exceptional parameter of this chart
};

struct TransformedSystem {
  FoliatedSystem system;   // chart coordinates reuse the original names
  Polynomial exceptional;  // the chart variable
  // Non-identity substitutions, old variable -> image in chart coordinates.
  std::vector<std::pair<std::string, std::string>> substitution_log;
};

// Gates: theta-invariant center, order one in the ideal, syntactic SNC
// divisor. Throws with the violating generator otherwise.
TransformedSystem blowup_chart(const FoliatedSystem& sys, const BlowupSpec& spec);

// I_F * (sum_{i<=nu} theta~^i[I~]) == sigma*(sum_{i<=nu} theta^i[I]) as a
// two-sided Groebner inclusion.
bool verify_transform_identity(const FoliatedSystem& sys, const BlowupSpec& spec, unsigned nu);

// Real polar blow-up x = r cos(alpha), y = r sin(alpha) in the numeric layer.
// Variables at x_index / y_index become r / alpha. Evaluating on r = 0 outside
// the removable-singularity family raises a domain error.
AnalyticField polar_blowup(const AnalyticField& field, std::size_t x_index, std::size_t y_index);

}  // namespace flowbox

#endif
