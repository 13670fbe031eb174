#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "momsos/error.hpp"

namespace momsos {

using Integer = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

inline Integer num(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Integer den(const Rational& q) { return boost::multiprecision::denominator(q); }

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// Exact conversion: every finite double is a dyadic rational.
inline Rational from_double(double v) {
  if (!std::isfinite(v)) throw Error(ErrorKind::invalid_argument, "non-finite value cannot be converted to a rational");
  return Rational(v);
}

/// Number of bits of |z|; zero has bit length 0.
inline std::size_t bit_length(const Integer& z) {
  if (z == 0) return 0;
  Integer a = z < 0 ? Integer(-z) : z;
  return boost::multiprecision::msb(a) + 1;
}

inline std::size_t bit_complexity(const Rational& q) {
  return bit_length(num(q)) + bit_length(den(q));
}

inline Integer floor_div(const Integer& a, const Integer& b) {
  Integer q, r;
  boost::multiprecision::divide_qr(a, b, q, r);
  if (r != 0 && ((r < 0) != (b < 0))) q -= 1;
  return q;
}

inline Integer floor(const Rational& q) { return floor_div(num(q), den(q)); }
inline Integer ceil(const Rational& q) { return -floor_div(-num(q), den(q)); }

/// Nearest integer multiple of eps; exact ties go away from zero.
inline Rational round_to_multiple(const Rational& x, const Rational& eps) {
  Rational k = x / eps;
  Rational a = abs(k);
  Integer m = floor(Rational(a + Rational(1, 2)));
  if (k < 0) m = -m;
  return Rational(m) * eps;
}

/// Largest integer multiple of eps that is <= x.
inline Rational floor_to_multiple(const Rational& x, const Rational& eps) {
  return Rational(floor(Rational(x / eps))) * eps;
}

inline std::optional<Integer> exact_isqrt(const Integer& z) {
  if (z < 0) return std::nullopt;
  Integer s = boost::multiprecision::sqrt(z);
  if (s * s == z) return s;
  return std::nullopt;
}

/// sqrt(q) when q is the square of a rational.
inline std::optional<Rational> exact_sqrt(const Rational& q) {
  auto a = exact_isqrt(num(q));
  auto b = exact_isqrt(den(q));
  if (!a || !b) return std::nullopt;
  return Rational(*a, *b);
}

/// A rational upper bound on sqrt(q), exact for perfect squares, otherwise
/// within 2^-precision_bits of the true value.
inline Rational sqrt_upper(const Rational& q, unsigned precision_bits = 40) {
  if (q < 0) throw Error(ErrorKind::invalid_argument, "square root of a negative rational");
  if (auto s = exact_sqrt(q)) return *s;
  Integer scale = Integer(1) << precision_bits;
  Integer scaled = ceil(Rational(q * scale * scale));
  Integer r = boost::multiprecision::sqrt(scaled);
  if (r * r < scaled) r += 1;
  return Rational(r, scale);
}

/// A rational lower bound on sqrt(q), exact for perfect squares.
inline Rational sqrt_lower(const Rational& q, unsigned precision_bits = 40) {
  if (q < 0) throw Error(ErrorKind::invalid_argument, "square root of a negative rational");
  if (auto s = exact_sqrt(q)) return *s;
  Integer scale = Integer(1) << precision_bits;
  Integer scaled = floor(Rational(q * scale * scale));
  return Rational(boost::multiprecision::sqrt(scaled), scale);
}

/// Smallest power of two (possibly with negative exponent) that is >= sqrt(c).
inline Rational pow2_sqrt_upper(const Rational& c) {
  if (c <= 0) throw Error(ErrorKind::invalid_argument, "pow2_sqrt_upper needs a positive argument");
  Rational p(1);
  while (p * p < c) p *= 2;
  while ((p / 2) * (p / 2) >= c) p /= 2;
  return p;
}

inline Rational pow(const Rational& base, unsigned e) {
  Rational r(1);
  for (unsigned i = 0; i < e; ++i) r *= base;
  return r;
}

/// Base-10 digit string to Integer. GMP would read a leading zero as octal.
inline Integer decimal_integer(std::string_view digits) {
  std::size_t nz = digits.find_first_not_of('0');
  if (nz == std::string_view::npos) return Integer(0);
  return Integer(std::string(digits.substr(nz)));
}

inline std::string to_string(const Rational& q) {
  if (den(q) == 1) return num(q).str();
  return num(q).str() + "/" + den(q).str();
}

/// Decimal rendering with `digits` places after the point, rounded to nearest.
inline std::string to_decimal(const Rational& q, unsigned digits) {
  Integer scale = 1;
  for (unsigned i = 0; i < digits; ++i) scale *= 10;
  Rational scaled = abs(q) * scale;
  Integer m = floor(Rational(scaled + Rational(1, 2)));
  std::string s = m.str();
  if (digits > 0) {
    if (s.size() <= digits) s.insert(0, digits + 1 - s.size(), '0');
    s.insert(s.size() - digits, ".");
  }
  if (q < 0 && m != 0) s.insert(0, "-");
  return s;
}

/// Parses `p`, `-p`, `p/q` and decimals `p.d`. Returns nullopt on malformed input.
inline std::optional<Rational> try_parse_rational(std::string_view text) {
  auto is_digits = [](std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
      if (c < '0' || c > '9') return false;
    return true;
  };
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view ip = text.substr(0, dot), fp = text.substr(dot + 1);
    if ((ip.empty() && fp.empty()) || (!ip.empty() && !is_digits(ip)) || (!fp.empty() && !is_digits(fp)))
      return std::nullopt;
    Integer scale = 1;
    for (std::size_t k = 0; k < fp.size(); ++k) scale *= 10;
    Integer whole = ip.empty() ? Integer(0) : decimal_integer(ip);
    Integer frac = fp.empty() ? Integer(0) : decimal_integer(fp);
    Rational r(whole * scale + frac, scale);
    return negative ? Rational(-r) : r;
  }
  auto slash = text.find('/');
  std::string_view p = text.substr(0, slash);
  std::string_view q = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!is_digits(p) || !is_digits(q)) return std::nullopt;
  Integer d = decimal_integer(q);
  if (d == 0) return std::nullopt;
  Rational r(decimal_integer(p), d);
  return negative ? Rational(-r) : r;
}

inline Rational parse_rational(std::string_view text) {
  auto r = try_parse_rational(text);
  if (!r) throw Error(ErrorKind::parse, "malformed rational '" + std::string(text) + "'");
  return *r;
}

}  // namespace momsos
