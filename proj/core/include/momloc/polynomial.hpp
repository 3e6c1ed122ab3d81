#pragma once

#include "momloc/rational.hpp"
#include "momloc/symbol.hpp"

#include <map>
#include <set>
#include <vector>

namespace momloc {

/// Power product of symbols with strictly positive exponents, kept sorted by
/// symbol. The empty monomial is 1.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(const Symbol& s, int exp = 1);

  static Monomial one() { return Monomial(); }

  bool is_one() const { return factors_.empty(); }
  int degree() const;
  int degree_in(const Symbol& s) const;
  int degree_in(const std::set<Symbol>& vars) const;
  bool contains(const Symbol& s) const { return degree_in(s) > 0; }

  Monomial times(const Monomial& o) const;
  bool divides(const Monomial& o) const;        // this | o
  Monomial divided_by(const Monomial& o) const;  // this / o, exact
  static Monomial gcd(const Monomial& a, const Monomial& b);

  /// Graded-lexicographic-free pure lex order: compare exponent sequences on
  /// the (sorted, merged) union of symbols. Total deterministic order.
  std::strong_ordering operator<=>(const Monomial& o) const;
  bool operator==(const Monomial& o) const { return factors_ == o.factors_; }

  const std::vector<std::pair<Symbol, int>>& factors() const { return factors_; }
  void collect_symbols(std::set<Symbol>& out) const;

  std::string str() const;  // "x^2*y"; "1" for the empty monomial

 private:
  std::vector<std::pair<Symbol, int>> factors_;  // sorted by symbol, exps > 0
  friend class Polynomial;
};

/// Sparse multivariate polynomial with exact rational coefficients. The term
/// map never stores zero coefficients, so structural equality of the maps is
/// equality of polynomials. All operations are exact.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(const Rational& c);  // NOLINT: implicit constant lift is intended
  Polynomial(long c) : Polynomial(Rational(c)) {}
  explicit Polynomial(const Symbol& s) { *this = variable(s); }

  static Polynomial zero() { return Polynomial(); }
  static Polynomial constant(const Rational& c) { return Polynomial(c); }
  static Polynomial variable(const Symbol& s, int exp = 1);
  static Polynomial term(const Rational& c, const Monomial& m);

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Value of a constant polynomial (0 for the zero polynomial). Throws if
  /// the polynomial is not constant.
  Rational constant_value() const;

  std::size_t term_count() const { return terms_.size(); }
  const std::map<Monomial, Rational>& terms() const { return terms_; }

  int total_degree() const;
  int degree_in(const Symbol& s) const;
  int degree_in(const std::set<Symbol>& vars) const;
  bool contains(const Symbol& s) const { return degree_in(s) > 0; }
  bool contains_any(const std::set<Symbol>& vars) const;
  std::set<Symbol> symbols() const;

  /// Leading term in the lex order (largest monomial). Requires non-zero.
  std::pair<Monomial, Rational> leading() const;

  Polynomial operator-() const;
  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Polynomial& o) { *this = *this * o; return *this; }
  Polynomial operator*(const Rational& c) const;
  Polynomial pow(int e) const;  // e >= 0

  bool operator==(const Polynomial& o) const { return terms_ == o.terms_; }
  bool operator!=(const Polynomial& o) const { return !(*this == o); }
  /// Deterministic total order (term-map lexicographic); used for canonical
  /// sorting of composite structures, carries no algebraic meaning.
  std::strong_ordering operator<=>(const Polynomial& o) const;

  /// Simultaneous exact substitution by polynomials (rename, shift, ...).
  /// Symbols absent from the map stay untouched.
  Polynomial substitute(const std::map<Symbol, Polynomial>& bindings) const;

  /// Bijective renaming; `pairs` lists disjoint (a, b) swaps applied
  /// simultaneously (a->b and b->a). Throws std::invalid_argument if a
  /// symbol appears twice across the pairs.
  Polynomial swap_pairs(const std::vector<std::pair<Symbol, Symbol>>& pairs) const;

  /// Exact evaluation. Every symbol of the polynomial must be bound.
  Rational eval(const std::map<Symbol, Rational>& point) const;
  /// Floating evaluation. Every symbol of the polynomial must be bound.
  double eval(const std::map<Symbol, double>& point) const;

  /// Exact division: returns true and sets q with *this == q * d when d
  /// divides *this, returns false otherwise. d must be non-zero.
  static bool try_divide_exact(const Polynomial& num, const Polynomial& den, Polynomial& quot);

  /// Monic (w.r.t. lex leading coefficient) greatest common divisor over the
  /// rationals. Tries the evaluation/reconstruction heuristic first (every
  /// candidate is verified by exact trial division before being returned)
  /// and falls back to a subresultant pseudo-remainder sequence.
  static Polynomial gcd(const Polynomial& a, const Polynomial& b);

  /// Like gcd but never uses the heuristic: pure content + subresultant
  /// elimination, guaranteed maximal. Slower; for decisions that must not
  /// depend on heuristic luck.
  static Polynomial gcd_exact(const Polynomial& a, const Polynomial& b);

  /// Divides by the lex leading coefficient; zero stays zero.
  Polynomial monic() const;

  /// Deterministic human-readable form, terms in descending lex order:
  /// "3/2*x^2*y - z + 1/3".
  std::string str() const;

 private:
  void add_term(const Monomial& m, const Rational& c);
  std::map<Monomial, Rational> terms_;
};

inline Polynomial operator*(const Rational& c, const Polynomial& p) { return p * c; }
inline Polynomial operator+(const Rational& c, const Polynomial& p) { return Polynomial(c) + p; }
inline Polynomial operator-(const Rational& c, const Polynomial& p) { return Polynomial(c) - p; }

}  // namespace momloc
