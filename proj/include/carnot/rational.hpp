#pragma once

#include "carnot/errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace carnot {

/// Arbitrary-precision rational used for every symbolic quantity.
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

namespace detail {

/// Decimal integer literal with optional sign. Leading zeros are dropped so
/// the value is never read as octal.
inline Integer parse_integer(std::string s) {
  bool negative = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    s.erase(0, 1);
  }
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError("malformed integer literal '" + s + "'");
  const auto nz = s.find_first_not_of('0');
  const Integer v = nz == std::string::npos ? Integer(0) : Integer(s.substr(nz));
  return negative ? Integer(-v) : v;
}

}  // namespace detail

/// Parses "p", "-p/q" or a plain decimal such as "0.25" into an exact rational.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto trim = [](std::string& v) {
    const auto first = v.find_first_not_of(" \t");
    const auto last = v.find_last_not_of(" \t");
    v = first == std::string::npos ? std::string{} : v.substr(first, last - first + 1);
  };
  trim(s);
  if (s.empty()) throw ConfigError("empty rational literal");
  try {
    if (const auto slash = s.find('/'); slash != std::string::npos) {
      const Integer num = detail::parse_integer(s.substr(0, slash));
      const Integer den = detail::parse_integer(s.substr(slash + 1));
      if (den == 0) throw ConfigError("zero denominator in '" + s + "'");
      return Rational(num, den);
    }
    if (const auto dot = s.find('.'); dot != std::string::npos) {
      std::string digits = s.substr(0, dot) + s.substr(dot + 1);
      Integer den = 1;
      for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
      if (digits == "-" || digits == "+" || digits.empty()) digits += "0";
      return Rational(detail::parse_integer(digits), den);
    }
    return Rational(detail::parse_integer(s));
  } catch (const ConfigError&) {
    throw ConfigError("malformed rational literal '" + s + "'");
  }
}

inline std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline Rational factorial(unsigned k) {
  Integer f = 1;
  for (unsigned i = 2; i <= k; ++i) f *= i;
  return Rational(f);
}

}  // namespace carnot
