// Exact rational scalar used by the whole symbolic layer.
#ifndef FLOWBOX_RATIONAL_HPP
#define FLOWBOX_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace flowbox {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline std::string to_string(const Rational& q) { return q.str(); }

// Accepts "[-]digits" or "[-]digits/digits". Anything else (notably a '.')
// is rejected: the symbolic layer never sees floating point.
inline Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '+' || text[i] == '-') {
    negative = (text[i] == '-');
    ++i;
  }
  auto read_digits = [&](BigInt& out) {
    if (i >= text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
      throw std::invalid_argument("malformed rational literal '" + text + "'");
    out = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      out = out * 10 + (text[i] - '0');
      ++i;
    }
  };
  BigInt num;
  read_digits(num);
  BigInt den = 1;
  if (i < text.size() && text[i] == '/') {
    ++i;
    read_digits(den);
    if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
  }
  if (i != text.size())
    throw std::invalid_argument("malformed rational literal '" + text +
                                "' (floating-point literals are not accepted)");
  Rational q(num, den);
  return negative ? Rational(-q) : q;
}

}  // namespace flowbox

#endif
