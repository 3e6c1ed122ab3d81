#pragma once

#include "momloc/polynomial.hpp"

#include <stdexcept>

namespace momloc {

/// Denominator identically zero (either constructed that way or produced by
/// a substitution). Carries the offending denominator.
class PoleError : public std::domain_error {
 public:
  explicit PoleError(std::string den)
      : std::domain_error("pole: denominator vanishes identically: " + den),
        denominator_(std::move(den)) {}
  const std::string& denominator() const { return denominator_; }

 private:
  std::string denominator_;
};

/// Evaluation hit a zero (or nearly zero, for floating evaluation) value of
/// the denominator at the requested point.
class SingularPointError : public std::domain_error {
 public:
  explicit SingularPointError(std::string den)
      : std::domain_error("singular point: denominator vanishes at the evaluation point: " + den),
        denominator_(std::move(den)) {}
  const std::string& denominator() const { return denominator_; }

 private:
  std::string denominator_;
};

/// degree_in result: either "polynomial in the requested variables of this
/// degree" (with the zero polynomial flagged separately) or "denominator
/// depends on the variables".
struct DegreeResult {
  enum class Kind { Zero, Polynomial, NotPolynomial };
  Kind kind = Kind::Zero;
  int degree = 0;  // meaningful for Kind::Polynomial

  static DegreeResult zero() { return {Kind::Zero, 0}; }
  static DegreeResult polynomial(int d) { return {Kind::Polynomial, d}; }
  static DegreeResult not_polynomial() { return {Kind::NotPolynomial, 0}; }
  bool operator==(const DegreeResult&) const = default;
};

/// Quotient of two polynomials kept in canonical form:
///   - numerator zero  =>  denominator is 1,
///   - gcd(numerator, denominator) = 1,
///   - denominator monic in the lex order (leading coefficient +1).
/// With full cancellation this makes structural equality coincide with
/// equality of rational functions. Construction of very large quotients may
/// skip the polynomial-gcd step (see normalize()); all other invariants
/// still hold and zero detection is unaffected.
class RationalExpr {
 public:
  RationalExpr() : num_(), den_(Rational(1)) {}
  RationalExpr(Polynomial num);  // NOLINT: implicit polynomial lift intended
  RationalExpr(const Rational& c) : RationalExpr(Polynomial(c)) {}
  RationalExpr(long c) : RationalExpr(Polynomial(c)) {}
  explicit RationalExpr(const Symbol& s) : RationalExpr(Polynomial::variable(s)) {}
  RationalExpr(Polynomial num, Polynomial den);

  /// num / prod(factors); cancels factors by exact trial division before
  /// normalising, which keeps the gcd work trivial when the caller knows the
  /// factorisation of the denominator.
  static RationalExpr from_factored(Polynomial num, const std::vector<Polynomial>& den_factors);

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return num_ == Polynomial(Rational(1)) && den_ == Polynomial(Rational(1)); }

  RationalExpr operator-() const;
  RationalExpr operator+(const RationalExpr& o) const;
  RationalExpr operator-(const RationalExpr& o) const;
  RationalExpr operator*(const RationalExpr& o) const;
  RationalExpr operator/(const RationalExpr& o) const;  // throws PoleError on o == 0
  RationalExpr& operator+=(const RationalExpr& o) { *this = *this + o; return *this; }
  RationalExpr& operator-=(const RationalExpr& o) { *this = *this - o; return *this; }
  RationalExpr& operator*=(const RationalExpr& o) { *this = *this * o; return *this; }

  /// Equality of rational functions. Structurally equal representations
  /// compare equal immediately; otherwise the exact cross-multiplication
  /// num*o.den - o.num*den == 0 decides, so the answer never depends on how
  /// far normalisation cancelled.
  bool operator==(const RationalExpr& o) const;
  bool operator!=(const RationalExpr& o) const { return !(*this == o); }
  /// Deterministic structural order (for stable containers / output), not a
  /// semantic order on rational functions.
  std::strong_ordering operator<=>(const RationalExpr& o) const;

  /// Simultaneous substitution (then renormalisation). Throws PoleError when
  /// the substituted denominator is identically zero.
  RationalExpr substitute(const std::map<Symbol, RationalExpr>& bindings) const;

  /// Involutive simultaneous symbol swap; pairs must be disjoint.
  RationalExpr swap_pairs(const std::vector<std::pair<Symbol, Symbol>>& pairs) const;

  /// Degree in `vars` when the expression is a polynomial in them (i.e. the
  /// canonical denominator is free of `vars`).
  DegreeResult degree_in(const std::set<Symbol>& vars) const;

  std::set<Symbol> symbols() const;

  /// Exact evaluation at a rational point. Throws SingularPointError if the
  /// denominator vanishes at the point.
  Rational eval(const std::map<Symbol, Rational>& point) const;
  /// Floating evaluation; throws SingularPointError when |den| falls below
  /// `singular_rel` relative to the magnitude of its largest term.
  double eval(const std::map<Symbol, double>& point, double singular_rel = 1e-12) const;

  /// "num" or "(num)/(den)", deterministic.
  std::string str() const;

 private:
  void normalize();
  Polynomial num_, den_;
};

inline RationalExpr operator+(long c, const RationalExpr& e) { return RationalExpr(c) + e; }
inline RationalExpr operator-(long c, const RationalExpr& e) { return RationalExpr(c) - e; }
inline RationalExpr operator*(long c, const RationalExpr& e) { return RationalExpr(c) * e; }
inline RationalExpr operator/(long c, const RationalExpr& e) { return RationalExpr(c) / e; }

/// Complex-valued rational expression (pair of real expressions). The
/// reduction layer accumulates complex coefficients with these.
struct ComplexExpr {
  RationalExpr re;
  RationalExpr im;

  ComplexExpr() = default;
  ComplexExpr(RationalExpr r) : re(std::move(r)) {}
  ComplexExpr(RationalExpr r, RationalExpr i) : re(std::move(r)), im(std::move(i)) {}

  static ComplexExpr scalar(const ComplexRational& c) {
    return ComplexExpr(RationalExpr(c.re), RationalExpr(c.im));
  }

  bool is_zero() const { return re.is_zero() && im.is_zero(); }

  ComplexExpr operator+(const ComplexExpr& o) const { return {re + o.re, im + o.im}; }
  ComplexExpr operator-(const ComplexExpr& o) const { return {re - o.re, im - o.im}; }
  ComplexExpr operator*(const ComplexExpr& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  bool operator==(const ComplexExpr& o) const { return re == o.re && im == o.im; }

  ComplexExpr substitute(const std::map<Symbol, RationalExpr>& b) const {
    return {re.substitute(b), im.substitute(b)};
  }
  ComplexExpr swap_pairs(const std::vector<std::pair<Symbol, Symbol>>& pairs) const {
    return {re.swap_pairs(pairs), im.swap_pairs(pairs)};
  }
  std::string str() const {
    if (im.is_zero()) return re.str();
    return "(" + re.str() + ") + i*(" + im.str() + ")";
  }
};

}  // namespace momloc
