#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

#include "reconkit/errors.hpp"

namespace reconkit {

/* Exact coefficient field for the symbolic layer. Arbitrary precision so that
   antipode recursions and character convolutions can never overflow. */
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline Rational rat(long long num, long long den = 1) { return Rational(num, den); }

/* Parses "p", "-p/q" or decimal-free fraction strings used in config files. */
inline Rational parse_rational(const std::string& s) {
  try {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(Integer(s));
    Integer num(s.substr(0, slash));
    Integer den(s.substr(slash + 1));
    if (den == 0) fail(Errc::ParseError, "zero denominator in '" + s + "'");
    return Rational(num, den);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(Errc::ParseError, "bad rational '" + s + "'");
  }
}

inline std::string to_string(const Rational& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) s += "/" + denominator(r).str();
  return s;
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline Rational binomial(long long n, long long k) {
  if (k < 0 || k > n) return 0;
  Integer num = 1, den = 1;
  for (long long i = 0; i < k; ++i) {
    num *= n - i;
    den *= i + 1;
  }
  return Rational(num, den);
}

/* Largest integer strictly below bound; -1 when bound <= 0. */
inline int max_order_below(const Rational& bound) {
  if (bound <= 0) return -1;
  Integer num = boost::multiprecision::numerator(bound);
  Integer den = boost::multiprecision::denominator(bound);
  Integer q = num / den;
  if (q * den == num) q -= 1;
  return int(q);
}

inline Integer factorial(int n) {
  Integer f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace reconkit
