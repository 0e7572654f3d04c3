#include "flowbox/vector_field.hpp"

#include <sstream>
#include <stdexcept>

namespace flowbox {

VectorField::VectorField(std::vector<std::string> vars, std::vector<Polynomial> components)
    : vars_(std::move(vars)), comps_(std::move(components)) {
  if (comps_.size() != vars_.size())
    throw std::invalid_argument("vector field: component count must equal ambient dimension");
  for (const auto& c : comps_)
    if (c.vars() != vars_)
      throw std::invalid_argument("vector field: component over a different variable list");
}

VectorField VectorField::coordinate(const std::vector<std::string>& vars,
                                    const std::string& name) {
  std::vector<Polynomial> comps(vars.size(), Polynomial::zero(vars));
  Polynomial probe(vars);
  comps[probe.var_index(name)] = Polynomial::constant(vars, Rational(1));
  return VectorField(vars, std::move(comps));
}

VectorField VectorField::parse(const std::vector<std::string>& component_texts,
                               const std::vector<std::string>& vars) {
  std::vector<Polynomial> comps;
  comps.reserve(component_texts.size());
  for (const auto& t : component_texts) comps.push_back(Polynomial::parse(t, vars));
  return VectorField(vars, std::move(comps));
}

bool VectorField::is_zero() const {
  for (const auto& c : comps_)
    if (!c.is_zero()) return false;
  return true;
}

Polynomial VectorField::apply(const Polynomial& f) const {
  if (f.vars() != vars_)
    throw std::invalid_argument("vector field applied to a function over different variables");
  Polynomial r = Polynomial::zero(vars_);
  for (std::size_t i = 0; i < comps_.size(); ++i) {
    if (comps_[i].is_zero()) continue;
    r += comps_[i] * f.differentiate(i);
  }
  return r;
}

std::vector<Rational> VectorField::evaluate(const std::vector<Rational>& point) const {
  std::vector<Rational> out;
  out.reserve(comps_.size());
  for (const auto& c : comps_) out.push_back(c.evaluate(point));
  return out;
}

std::vector<double> VectorField::evaluate_double(std::span<const double> point) const {
  std::vector<double> out;
  out.reserve(comps_.size());
  for (const auto& c : comps_) out.push_back(c.evaluate_double(point));
  return out;
}

VectorField VectorField::operator-(const VectorField& rhs) const {
  if (vars_ != rhs.vars_) throw std::invalid_argument("vector field subtraction: variables differ");
  std::vector<Polynomial> comps;
  comps.reserve(comps_.size());
  for (std::size_t i = 0; i < comps_.size(); ++i) comps.push_back(comps_[i] - rhs.comps_[i]);
  return VectorField(vars_, std::move(comps));
}

VectorField VectorField::scaled(const Polynomial& factor) const {
  std::vector<Polynomial> comps;
  comps.reserve(comps_.size());
  for (const auto& c : comps_) comps.push_back(c * factor);
  return VectorField(vars_, std::move(comps));
}

std::string VectorField::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < comps_.size(); ++i) {
    if (comps_[i].is_zero()) continue;
    if (!first) os << " + ";
    first = false;
    os << "(" << comps_[i].to_string() << ")*d/d" << vars_[i];
  }
  if (first) os << "0";
  return os.str();
}

VectorField lie_bracket(const VectorField& v, const VectorField& w) {
  if (v.vars() != w.vars()) throw std::invalid_argument("lie_bracket: variable lists differ");
  const auto& vars = v.vars();
  std::vector<Polynomial> comps;
  comps.reserve(vars.size());
  for (std::size_t i = 0; i < vars.size(); ++i) {
    Polynomial c = Polynomial::zero(vars);
    for (std::size_t j = 0; j < vars.size(); ++j) {
      c += v.component(j) * w.component(i).differentiate(j);
      c -= w.component(j) * v.component(i).differentiate(j);
    }
    comps.push_back(std::move(c));
  }
  return VectorField(vars, std::move(comps));
}

Distribution::Distribution(std::vector<VectorField> gens) : generators(std::move(gens)) {
  if (generators.empty())
    throw std::invalid_argument("distribution needs at least one generator");
  for (const auto& g : generators)
    if (g.vars() != generators.front().vars())
      throw std::invalid_argument("distribution generators over different variable lists");
}

}  // namespace flowbox
