// Numeric evaluators with declared closed forms: the layer where the
// non-polynomial counterexample data lives.
#ifndef FLOWBOX_ANALYTIC_HPP
#define FLOWBOX_ANALYTIC_HPP

#include "flowbox/vector_field.hpp"

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace flowbox {

struct AnalyticFun {
  std::function<double(std::span<const double>)> fn;
  std::string form;

  double operator()(std::span<const double> x) const { return fn(x); }
};

struct Box {
  std::vector<std::pair<double, double>> ranges;

  bool contains(std::span<const double> x) const {
    for (std::size_t i = 0; i < ranges.size(); ++i)
      if (x[i] < ranges[i].first || x[i] > ranges[i].second) return false;
    return true;
  }
};

class AnalyticField {
 public:
  AnalyticField() = default;
  AnalyticField(std::vector<std::string> vars, std::vector<AnalyticFun> comps,
                std::optional<Box> domain = std::nullopt);

  // Polynomial components keep their exact closed forms and evaluate from the
  // exact rational coefficients.
  static AnalyticField from_polynomials(const VectorField& vf);

  const std::vector<std::string>& vars() const { return vars_; }
  std::size_t dimension() const { return vars_.size(); }
  const std::vector<AnalyticFun>& components() const { return comps_; }
  const std::optional<Box>& domain() const { return domain_; }

  void eval(std::span<const double> x, std::span<double> out) const;
  std::vector<double> eval(std::span<const double> x) const;
  double norm_at(std::span<const double> x) const;

  AnalyticField reversed() const;

 private:
  std::vector<std::string> vars_;
  std::vector<AnalyticFun> comps_;
  std::optional<Box> domain_;
};

// Registry of unary functions allowed in analytic expressions. sin and cos
// are always present; the counterexample registers h.
using FunctionRegistry = std::map<std::string, std::function<double(double)>>;

const FunctionRegistry& default_registry();

// Recursive-descent parser for analytic expressions: +, -, *, /, ^ (integer
// exponent), parentheses, integer literals (floats rejected), variables and
// registered unary functions.
AnalyticFun parse_analytic(const std::string& text, const std::vector<std::string>& vars,
                           const FunctionRegistry& registry = default_registry());

}  // namespace flowbox

#endif
