// Polynomial vector fields and singular distributions.
#ifndef FLOWBOX_VECTOR_FIELD_HPP
#define FLOWBOX_VECTOR_FIELD_HPP

#include "flowbox/polynomial.hpp"

#include <string>
#include <vector>

namespace flowbox {

// One Polynomial component per ambient variable: the coefficient of d/dx_i.
class VectorField {
 public:
  VectorField() = default;
  VectorField(std::vector<std::string> vars, std::vector<Polynomial> components);

  static VectorField coordinate(const std::vector<std::string>& vars, const std::string& name);
  static VectorField parse(const std::vector<std::string>& component_texts,
                           const std::vector<std::string>& vars);

  const std::vector<std::string>& vars() const { return vars_; }
  const std::vector<Polynomial>& components() const { return comps_; }
  const Polynomial& component(std::size_t i) const { return comps_[i]; }
  std::size_t dimension() const { return vars_.size(); }
  bool is_zero() const;

  // Derivation applied to a function: sum_i comps[i] * df/dx_i.
  Polynomial apply(const Polynomial& f) const;

  std::vector<Rational> evaluate(const std::vector<Rational>& point) const;
  std::vector<double> evaluate_double(std::span<const double> point) const;

  VectorField operator-(const VectorField& rhs) const;
  VectorField scaled(const Polynomial& factor) const;

  bool operator==(const VectorField& rhs) const {
    return vars_ == rhs.vars_ && comps_ == rhs.comps_;
  }

  std::string to_string() const;

 private:
  std::vector<std::string> vars_;
  std::vector<Polynomial> comps_;
};

// [v,w]_i = sum_j (v_j dw_i/dx_j - w_j dv_i/dx_j), exact.
VectorField lie_bracket(const VectorField& v, const VectorField& w);

struct Distribution {
  std::vector<VectorField> generators;

  Distribution() = default;
  explicit Distribution(std::vector<VectorField> gens);

  const std::vector<std::string>& vars() const { return generators.front().vars(); }
  std::size_t size() const { return generators.size(); }
};

}  // namespace flowbox

#endif
