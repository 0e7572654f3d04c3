// Sparse multivariate polynomials with exact rational coefficients.
//
// Invariants: no stored coefficient is zero (the zero polynomial has an empty
// term map) and every exponent vector has exactly one entry per ambient
// variable. All arithmetic is exact.
#ifndef FLOWBOX_POLYNOMIAL_HPP
#define FLOWBOX_POLYNOMIAL_HPP

#include "flowbox/rational.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace flowbox {

using Exponents = std::vector<unsigned>;

unsigned exps_total_degree(const Exponents& e);

// All exponent vectors of total degree <= degree, in a fixed deterministic
// order.
std::vector<Exponents> monomials_up_to(std::size_t nvars, unsigned degree);

// Total order on monomials compatible with multiplication. `perm[rank]` is the
// index of the rank-th most significant variable; empty means identity.
struct MonomialOrder {
  enum class Kind { Grevlex, Lex };
  Kind kind = Kind::Grevlex;
  std::vector<std::size_t> perm;

  static MonomialOrder grevlex() { return {Kind::Grevlex, {}}; }
  static MonomialOrder lex(std::vector<std::size_t> perm = {}) {
    return {Kind::Lex, std::move(perm)};
  }

  // Strict comparison: true iff a < b in the order.
  bool less(const Exponents& a, const Exponents& b) const;
  std::string tag(std::size_t nvars) const;
};

class Polynomial {
 public:
  using TermMap = std::map<Exponents, Rational>;

  Polynomial() = default;
  explicit Polynomial(std::vector<std::string> vars) : vars_(std::move(vars)) {}

  static Polynomial zero(const std::vector<std::string>& vars);
  static Polynomial constant(const std::vector<std::string>& vars, Rational c);
  static Polynomial variable(const std::vector<std::string>& vars, const std::string& name);
  static Polynomial monomial(const std::vector<std::string>& vars, Exponents exps, Rational c);

  // Grammar: terms joined by +/-; a term is [coeff*]var[^exp][*var[^exp]...];
  // coeff is an integer or p/q rational. Whitespace insignificant.
  // Floating-point literals are rejected.
  static Polynomial parse(const std::string& text, const std::vector<std::string>& vars);

  const std::vector<std::string>& vars() const { return vars_; }
  std::size_t nvars() const { return vars_.size(); }
  const TermMap& terms() const { return terms_; }
  std::size_t var_index(const std::string& name) const;

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  // -1 for the zero polynomial.
  int total_degree() const;
  unsigned degree_in(std::size_t var) const;

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  Polynomial& operator*=(const Polynomial& rhs) { return *this = *this * rhs; }
  Polynomial scaled(const Rational& c) const;
  Polynomial pow(unsigned n) const;

  bool operator==(const Polynomial& rhs) const {
    return vars_ == rhs.vars_ && terms_ == rhs.terms_;
  }
  bool operator!=(const Polynomial& rhs) const { return !(*this == rhs); }

  Polynomial differentiate(std::size_t var) const;
  Polynomial differentiate(const std::string& var) const;

  Rational evaluate(const std::vector<Rational>& point) const;
  double evaluate_double(std::span<const double> point) const;

  // Simultaneous substitution var i -> images[i]; images share a variable list.
  Polynomial substitute(const std::vector<Polynomial>& images) const;

  // Largest k with x_var^k dividing every term (0 for the zero polynomial).
  unsigned order_in_variable(std::size_t var) const;
  // Exact division by x_var^power, or nullopt if some term is not divisible.
  std::optional<Polynomial> divide_by_variable(std::size_t var, unsigned power) const;

  // Leading term with respect to `order`; polynomial must be nonzero.
  std::pair<Exponents, Rational> leading_term(const MonomialOrder& order) const;

  std::string to_string() const;

  // Internal: inserts coeff*x^exps, folding and dropping zeros.
  void add_term(const Exponents& exps, const Rational& coeff);

 private:
  void check_compatible(const Polynomial& rhs) const;

  std::vector<std::string> vars_;
  TermMap terms_;
};

}  // namespace flowbox

#endif
