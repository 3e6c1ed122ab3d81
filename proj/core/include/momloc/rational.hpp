#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace momloc {

/// Exact arbitrary-precision rational scalar. All symbolic algebra in the
/// kernel runs on this type; floating point enters only at evaluation
/// boundaries.
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

/// p/q with q > 0 (normalised by the backing type).
inline Rational make_rational(long p, long q = 1) {
  if (q == 0) throw std::invalid_argument("make_rational: zero denominator");
  return Rational(p, q);
}

/// Renders "p" or "p/q"; the canonical form used by all serializers.
inline std::string rational_str(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

/// Parses "p" or "p/q" (whitespace-free). Inverse of rational_str.
Rational rational_parse(const std::string& s);

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Exact complex scalar with rational real and imaginary parts. Used for
/// term coefficients of momentum distributions (weighted families admit
/// complex weights).
struct ComplexRational {
  Rational re = 0;
  Rational im = 0;

  ComplexRational() = default;
  ComplexRational(Rational r) : re(std::move(r)) {}
  ComplexRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }

  ComplexRational operator-() const { return {-re, -im}; }
  ComplexRational operator+(const ComplexRational& o) const { return {re + o.re, im + o.im}; }
  ComplexRational operator-(const ComplexRational& o) const { return {re - o.re, im - o.im}; }
  ComplexRational operator*(const ComplexRational& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  bool operator==(const ComplexRational& o) const { return re == o.re && im == o.im; }
  bool operator!=(const ComplexRational& o) const { return !(*this == o); }
};

/// "p/q" for real values, "(re,im)" otherwise.
inline std::string complex_rational_str(const ComplexRational& c) {
  if (c.is_real()) return rational_str(c.re);
  return "(" + rational_str(c.re) + "," + rational_str(c.im) + ")";
}

}  // namespace momloc
