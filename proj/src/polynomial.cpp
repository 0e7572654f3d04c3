#include "flowbox/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace flowbox {

unsigned exps_total_degree(const Exponents& e) {
  unsigned d = 0;
  for (unsigned x : e) d += x;
  return d;
}

std::vector<Exponents> monomials_up_to(std::size_t nvars, unsigned degree) {
  std::vector<Exponents> out;
  Exponents cur(nvars, 0);
  std::function<void(std::size_t, unsigned)> rec = [&](std::size_t var, unsigned left) {
    if (var == nvars) {
      out.push_back(cur);
      return;
    }
    for (unsigned e = 0; e <= left; ++e) {
      cur[var] = e;
      rec(var + 1, left - e);
    }
    cur[var] = 0;
  };
  rec(0, degree);
  return out;
}

bool MonomialOrder::less(const Exponents& a, const Exponents& b) const {
  if (a.size() != b.size())
    throw std::invalid_argument("monomial order: exponent lengths differ");
  const std::size_t n = a.size();
  auto at = [&](const Exponents& e, std::size_t rank) -> unsigned {
    return perm.empty() ? e[rank] : e[perm[rank]];
  };
  if (kind == Kind::Lex) {
    for (std::size_t r = 0; r < n; ++r) {
      if (at(a, r) != at(b, r)) return at(a, r) < at(b, r);
    }
    return false;
  }
  // Grevlex: compare total degree, then the last differing (permuted) variable
  // with the *larger* exponent loses.
  const unsigned da = exps_total_degree(a), db = exps_total_degree(b);
  if (da != db) return da < db;
  for (std::size_t r = n; r-- > 0;) {
    if (at(a, r) != at(b, r)) return at(a, r) > at(b, r);
  }
  return false;
}

std::string MonomialOrder::tag(std::size_t nvars) const {
  std::ostringstream os;
  os << (kind == Kind::Grevlex ? "grevlex" : "lex");
  if (!perm.empty()) {
    os << ":";
    for (std::size_t i = 0; i < perm.size(); ++i) os << (i ? "," : "") << perm[i];
  } else {
    os << ":id" << nvars;
  }
  return os.str();
}

Polynomial Polynomial::zero(const std::vector<std::string>& vars) { return Polynomial(vars); }

Polynomial Polynomial::constant(const std::vector<std::string>& vars, Rational c) {
  Polynomial p(vars);
  p.add_term(Exponents(vars.size(), 0), c);
  return p;
}

Polynomial Polynomial::variable(const std::vector<std::string>& vars, const std::string& name) {
  Polynomial p(vars);
  Exponents e(vars.size(), 0);
  e[p.var_index(name)] = 1;
  p.add_term(e, Rational(1));
  return p;
}

Polynomial Polynomial::monomial(const std::vector<std::string>& vars, Exponents exps, Rational c) {
  if (exps.size() != vars.size())
    throw std::invalid_argument("monomial: exponent vector length mismatch");
  Polynomial p(vars);
  p.add_term(exps, c);
  return p;
}

std::size_t Polynomial::var_index(const std::string& name) const {
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i] == name) return i;
  throw std::invalid_argument("unknown variable '" + name + "'");
}

bool Polynomial::is_constant() const {
  if (terms_.empty()) return true;
  return terms_.size() == 1 && exps_total_degree(terms_.begin()->first) == 0;
}

int Polynomial::total_degree() const {
  if (terms_.empty()) return -1;
  unsigned d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, exps_total_degree(e));
  return static_cast<int>(d);
}

unsigned Polynomial::degree_in(std::size_t var) const {
  unsigned d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
  return d;
}

void Polynomial::check_compatible(const Polynomial& rhs) const {
  if (vars_ != rhs.vars_)
    throw std::invalid_argument("polynomial variable lists differ");
}

void Polynomial::add_term(const Exponents& exps, const Rational& coeff) {
  if (coeff == 0) return;
  if (exps.size() != vars_.size())
    throw std::invalid_argument("exponent vector length mismatch");
  auto it = terms_.find(exps);
  if (it == terms_.end()) {
    terms_.emplace(exps, coeff);
  } else {
    it->second += coeff;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial Polynomial::operator-() const {
  Polynomial r(vars_);
  for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  check_compatible(rhs);
  for (const auto& [e, c] : rhs.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
  check_compatible(rhs);
  for (const auto& [e, c] : rhs.terms_) add_term(e, -c);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  a.check_compatible(b);
  Polynomial r(a.vars_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      Exponents e(ea.size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      r.add_term(e, ca * cb);
    }
  }
  return r;
}

Polynomial Polynomial::scaled(const Rational& c) const {
  Polynomial r(vars_);
  if (c == 0) return r;
  for (const auto& [e, k] : terms_) r.terms_.emplace(e, k * c);
  return r;
}

Polynomial Polynomial::pow(unsigned n) const {
  Polynomial r = constant(vars_, Rational(1));
  Polynomial base = *this;
  while (n > 0) {
    if (n & 1u) r = r * base;
    base = base * base;
    n >>= 1u;
  }
  return r;
}

Polynomial Polynomial::differentiate(std::size_t var) const {
  if (var >= vars_.size()) throw std::invalid_argument("differentiate: variable index out of range");
  Polynomial r(vars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponents d = e;
    d[var] -= 1;
    r.add_term(d, c * Rational(e[var]));
  }
  return r;
}

Polynomial Polynomial::differentiate(const std::string& var) const {
  return differentiate(var_index(var));
}

Rational Polynomial::evaluate(const std::vector<Rational>& point) const {
  if (point.size() != vars_.size())
    throw std::invalid_argument("evaluate: point dimension mismatch");
  Rational acc = 0;
  for (const auto& [e, c] : terms_) {
    Rational t = c;
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (unsigned k = 0; k < e[i]; ++k) t *= point[i];
    }
    acc += t;
  }
  return acc;
}

double Polynomial::evaluate_double(std::span<const double> point) const {
  if (point.size() != vars_.size())
    throw std::invalid_argument("evaluate: point dimension mismatch");
  double acc = 0.0;
  for (const auto& [e, c] : terms_) {
    double t = to_double(c);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      t *= std::pow(point[i], static_cast<int>(e[i]));
    }
    acc += t;
  }
  return acc;
}

Polynomial Polynomial::substitute(const std::vector<Polynomial>& images) const {
  if (images.size() != vars_.size())
    throw std::invalid_argument("substitute: one image per variable required");
  const auto& target_vars = images.empty() ? vars_ : images.front().vars();
  Polynomial r = Polynomial::zero(target_vars);
  for (const auto& [e, c] : terms_) {
    Polynomial t = Polynomial::constant(target_vars, c);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] > 0) t = t * images[i].pow(e[i]);
    }
    r += t;
  }
  return r;
}

unsigned Polynomial::order_in_variable(std::size_t var) const {
  if (terms_.empty()) return 0;
  unsigned k = UINT_MAX;
  for (const auto& [e, c] : terms_) k = std::min(k, e[var]);
  return k;
}

std::optional<Polynomial> Polynomial::divide_by_variable(std::size_t var, unsigned power) const {
  Polynomial r(vars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] < power) return std::nullopt;
    Exponents d = e;
    d[var] -= power;
    r.terms_.emplace(std::move(d), c);
  }
  return r;
}

std::pair<Exponents, Rational> Polynomial::leading_term(const MonomialOrder& order) const {
  if (terms_.empty()) throw std::logic_error("leading_term of zero polynomial");
  auto best = terms_.begin();
  for (auto it = std::next(terms_.begin()); it != terms_.end(); ++it) {
    if (order.less(best->first, it->first)) best = it;
  }
  return {best->first, best->second};
}

namespace {

struct Cursor {
  const std::string& s;
  std::size_t i = 0;
  bool done() const { return i >= s.size(); }
  char peek() const { return s[i]; }
};

bool is_var_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_var_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string read_number(Cursor& c) {
  std::string out;
  while (!c.done() && std::isdigit(static_cast<unsigned char>(c.peek()))) out += c.s[c.i++];
  if (!c.done() && c.peek() == '.')
    throw std::invalid_argument("floating-point literal in polynomial text");
  if (!c.done() && c.peek() == '/') {
    out += c.s[c.i++];
    if (c.done() || !std::isdigit(static_cast<unsigned char>(c.peek())))
      throw std::invalid_argument("malformed rational coefficient");
    while (!c.done() && std::isdigit(static_cast<unsigned char>(c.peek()))) out += c.s[c.i++];
    if (!c.done() && c.peek() == '.')
      throw std::invalid_argument("floating-point literal in polynomial text");
  }
  return out;
}

}  // namespace

Polynomial Polynomial::parse(const std::string& text, const std::vector<std::string>& vars) {
  std::string s;
  s.reserve(text.size());
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw std::invalid_argument("empty polynomial text");

  Polynomial result(vars);
  Cursor c{s};
  while (!c.done()) {
    Rational sign(1);
    while (!c.done() && (c.peek() == '+' || c.peek() == '-')) {
      if (c.peek() == '-') sign = -sign;
      ++c.i;
    }
    if (c.done()) throw std::invalid_argument("dangling sign in polynomial text");

    Rational coeff = sign;
    Exponents exps(vars.size(), 0);
    bool expect_factor = true;
    while (expect_factor) {
      if (c.done()) throw std::invalid_argument("dangling '*' in polynomial text");
      if (std::isdigit(static_cast<unsigned char>(c.peek()))) {
        coeff *= parse_rational(read_number(c));
      } else if (is_var_start(c.peek())) {
        std::string name;
        while (!c.done() && is_var_char(c.peek())) name += c.s[c.i++];
        std::size_t idx = SIZE_MAX;
        for (std::size_t v = 0; v < vars.size(); ++v)
          if (vars[v] == name) idx = v;
        if (idx == SIZE_MAX)
          throw std::invalid_argument("unknown variable '" + name + "' in polynomial text");
        unsigned exp = 1;
        if (!c.done() && c.peek() == '^') {
          ++c.i;
          if (c.done() || !std::isdigit(static_cast<unsigned char>(c.peek())))
            throw std::invalid_argument("malformed exponent in polynomial text");
          exp = 0;
          while (!c.done() && std::isdigit(static_cast<unsigned char>(c.peek())))
            exp = exp * 10 + static_cast<unsigned>(c.s[c.i++] - '0');
        }
        exps[idx] += exp;
      } else {
        throw std::invalid_argument(std::string("unexpected character '") + c.peek() +
                                    "' in polynomial text");
      }
      expect_factor = false;
      if (!c.done() && c.peek() == '*') {
        ++c.i;
        expect_factor = true;
      }
    }
    result.add_term(exps, coeff);
  }
  return result;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  // Descending grevlex reads naturally.
  std::vector<const TermMap::value_type*> ordered;
  ordered.reserve(terms_.size());
  for (const auto& t : terms_) ordered.push_back(&t);
  MonomialOrder ord = MonomialOrder::grevlex();
  std::sort(ordered.begin(), ordered.end(),
            [&](const auto* a, const auto* b) { return ord.less(b->first, a->first); });

  std::ostringstream os;
  bool first = true;
  for (const auto* t : ordered) {
    const auto& [e, c] = *t;
    Rational a = c;
    if (first) {
      if (a < 0) {
        os << "-";
        a = -a;
      }
    } else {
      os << (a < 0 ? " - " : " + ");
      if (a < 0) a = -a;
    }
    first = false;
    const bool has_vars = exps_total_degree(e) > 0;
    if (!has_vars || a != 1) {
      os << a.str();
      if (has_vars) os << "*";
    }
    bool first_var = true;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!first_var) os << "*";
      first_var = false;
      os << vars_[i];
      if (e[i] > 1) os << "^" << e[i];
    }
  }
  return os.str();
}

}  // namespace flowbox
