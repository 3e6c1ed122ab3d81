#include "momloc/rational_expr.hpp"

#include <cmath>
#include <stdexcept>

namespace momloc {

Rational rational_parse(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("rational_parse: empty string");
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(Integer(s));
    Integer p(s.substr(0, slash));
    Integer q(s.substr(slash + 1));
    if (q == 0) throw std::invalid_argument("rational_parse: zero denominator");
    return Rational(p, q);
  } catch (const std::runtime_error& e) {
    throw std::invalid_argument("rational_parse: bad literal '" + s + "'");
  }
}

namespace {

// Polynomial-gcd work limit for canonicalisation. Above this combined term
// count the gcd step is skipped (monomial-content and known-factor
// cancellation still apply); this only ever triggers for the very large
// numerators produced by high-degree polynomial multipliers, where zero
// detection and evaluation do not depend on full reduction.
constexpr std::size_t kGcdTermLimit = 1200;

Monomial monomial_content(const Polynomial& p) {
  Monomial g;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    g = first ? m : Monomial::gcd(g, m);
    first = false;
    if (g.is_one()) break;
  }
  return g;
}

Polynomial divide_out_monomial(const Polynomial& p, const Monomial& g) {
  Polynomial out;
  for (const auto& [m, c] : p.terms()) out += Polynomial::term(c, m.divided_by(g));
  return out;
}

RationalExpr expr_pow(const RationalExpr& base, int e) {
  RationalExpr out{Polynomial(Rational(1))};
  RationalExpr b = base;
  while (e > 0) {
    if (e & 1) out *= b;
    e >>= 1;
    if (e > 0) b *= b;
  }
  return out;
}

RationalExpr subst_poly(const Polynomial& p, const std::map<Symbol, RationalExpr>& bindings) {
  RationalExpr out;
  for (const auto& [m, c] : p.terms()) {
    RationalExpr t{Polynomial(c)};
    for (const auto& [s, e] : m.factors()) {
      auto it = bindings.find(s);
      t *= expr_pow(it == bindings.end() ? RationalExpr(s) : it->second, e);
    }
    out += t;
  }
  return out;
}

}  // namespace

RationalExpr::RationalExpr(Polynomial num) : num_(std::move(num)), den_(Rational(1)) {}

RationalExpr::RationalExpr(Polynomial num, Polynomial den)
    : num_(std::move(num)), den_(std::move(den)) {
  normalize();
}

void RationalExpr::normalize() {
  if (den_.is_zero()) throw PoleError(den_.str());
  if (num_.is_zero()) {
    den_ = Polynomial(Rational(1));
    return;
  }

  // Joint monomial content of numerator and denominator.
  Monomial g = Monomial::gcd(monomial_content(num_), monomial_content(den_));
  if (!g.is_one()) {
    num_ = divide_out_monomial(num_, g);
    den_ = divide_out_monomial(den_, g);
  }

  if (!den_.is_constant() &&
      num_.term_count() + den_.term_count() <= kGcdTermLimit) {
    Polynomial common = Polynomial::gcd(num_, den_);
    if (!common.is_constant()) {
      Polynomial qn, qd;
      if (!Polynomial::try_divide_exact(num_, common, qn) ||
          !Polynomial::try_divide_exact(den_, common, qd))
        throw std::logic_error("RationalExpr: gcd does not divide");
      num_ = std::move(qn);
      den_ = std::move(qd);
    }
  }

  // Monic denominator (lex leading coefficient +1) fixes the overall scale.
  const Rational lc = den_.leading().second;
  if (lc != 1) {
    const Rational inv = Rational(1) / lc;
    num_ = num_ * inv;
    den_ = den_ * inv;
  }
}

RationalExpr RationalExpr::from_factored(Polynomial num,
                                         const std::vector<Polynomial>& den_factors) {
  Rational scalar(1);
  std::vector<const Polynomial*> keep;
  std::vector<Polynomial> reduced;
  for (const auto& f : den_factors) {
    if (f.is_zero()) throw PoleError("0");
    if (f.is_constant()) {
      scalar *= f.constant_value();
      continue;
    }
    Polynomial q;
    if (!num.is_zero() && Polynomial::try_divide_exact(num, f, q)) {
      num = std::move(q);
    } else {
      keep.push_back(&f);
    }
  }
  Polynomial den{scalar};
  for (const Polynomial* f : keep) den *= *f;
  return RationalExpr(std::move(num), std::move(den));
}

RationalExpr RationalExpr::operator-() const {
  RationalExpr r = *this;
  r.num_ = -r.num_;
  return r;
}

RationalExpr RationalExpr::operator+(const RationalExpr& o) const {
  if (is_zero()) return o;
  if (o.is_zero()) return *this;
  // a/b + c/d = (a*(d/g) + c*(b/g)) / (b*(d/g)) with g = gcd(b, d).
  Polynomial g = Polynomial::gcd(den_, o.den_);
  Polynomial bg = den_, dg = o.den_;
  if (!g.is_constant()) {
    if (!Polynomial::try_divide_exact(den_, g, bg) ||
        !Polynomial::try_divide_exact(o.den_, g, dg))
      throw std::logic_error("RationalExpr::operator+: gcd does not divide");
  }
  return RationalExpr(num_ * dg + o.num_ * bg, den_ * dg);
}

RationalExpr RationalExpr::operator-(const RationalExpr& o) const { return *this + (-o); }

RationalExpr RationalExpr::operator*(const RationalExpr& o) const {
  if (is_zero() || o.is_zero()) return RationalExpr();
  // Cross-cancel before multiplying to keep intermediates small.
  Polynomial a = num_, b = den_, c = o.num_, d = o.den_;
  Polynomial g1 = Polynomial::gcd(a, d);
  if (!g1.is_constant()) {
    Polynomial qa, qd;
    Polynomial::try_divide_exact(a, g1, qa);
    Polynomial::try_divide_exact(d, g1, qd);
    a = std::move(qa);
    d = std::move(qd);
  }
  Polynomial g2 = Polynomial::gcd(c, b);
  if (!g2.is_constant()) {
    Polynomial qc, qb;
    Polynomial::try_divide_exact(c, g2, qc);
    Polynomial::try_divide_exact(b, g2, qb);
    c = std::move(qc);
    b = std::move(qb);
  }
  return RationalExpr(a * c, b * d);
}

RationalExpr RationalExpr::operator/(const RationalExpr& o) const {
  if (o.is_zero()) throw PoleError(o.str());
  RationalExpr inv;
  inv.num_ = o.den_;
  inv.den_ = o.num_;
  inv.normalize();
  return *this * inv;
}

bool RationalExpr::operator==(const RationalExpr& o) const {
  if (num_ == o.num_ && den_ == o.den_) return true;
  return (num_ * o.den_ - o.num_ * den_).is_zero();
}

std::strong_ordering RationalExpr::operator<=>(const RationalExpr& o) const {
  if (auto c = num_ <=> o.num_; c != 0) return c;
  return den_ <=> o.den_;
}

RationalExpr RationalExpr::substitute(const std::map<Symbol, RationalExpr>& bindings) const {
  RationalExpr n = subst_poly(num_, bindings);
  RationalExpr d = subst_poly(den_, bindings);
  if (d.is_zero()) throw PoleError(den_.str());
  return n / d;
}

RationalExpr RationalExpr::swap_pairs(const std::vector<std::pair<Symbol, Symbol>>& pairs) const {
  // A bijective renaming is an algebra automorphism, so canonical form is
  // re-established by the constructor.
  return RationalExpr(num_.swap_pairs(pairs), den_.swap_pairs(pairs));
}

DegreeResult RationalExpr::degree_in(const std::set<Symbol>& vars) const {
  if (num_.is_zero()) return DegreeResult::zero();
  if (den_.contains_any(vars)) {
    // A non-polynomiality verdict must not hinge on how far the fast
    // cancellation paths got; recheck with the guaranteed-maximal gcd.
    Polynomial g = Polynomial::gcd_exact(num_, den_);
    Polynomial rden = den_, rnum = num_;
    if (!g.is_constant()) {
      Polynomial qn, qd;
      if (!Polynomial::try_divide_exact(num_, g, qn) ||
          !Polynomial::try_divide_exact(den_, g, qd))
        throw std::logic_error("degree_in: gcd does not divide");
      rnum = std::move(qn);
      rden = std::move(qd);
    }
    if (rden.contains_any(vars)) return DegreeResult::not_polynomial();
    return DegreeResult::polynomial(rnum.degree_in(vars));
  }
  return DegreeResult::polynomial(num_.degree_in(vars));
}

std::set<Symbol> RationalExpr::symbols() const {
  std::set<Symbol> out = num_.symbols();
  auto d = den_.symbols();
  out.insert(d.begin(), d.end());
  return out;
}

Rational RationalExpr::eval(const std::map<Symbol, Rational>& point) const {
  Rational d = den_.eval(point);
  if (d == 0) throw SingularPointError(den_.str());
  return num_.eval(point) / d;
}

double RationalExpr::eval(const std::map<Symbol, double>& point, double singular_rel) const {
  // Term-wise evaluation of the denominator so near-cancellation can be
  // detected relative to the magnitude of the contributions.
  double dval = 0, dscale = 0;
  for (const auto& [m, c] : den_.terms()) {
    double t = to_double(c);
    for (const auto& [s, e] : m.factors()) {
      auto it = point.find(s);
      if (it == point.end())
        throw std::invalid_argument("RationalExpr::eval: unbound symbol " + s.name());
      t *= std::pow(it->second, e);
    }
    dval += t;
    dscale = std::max(dscale, std::abs(t));
  }
  if (std::abs(dval) <= singular_rel * std::max(dscale, 1e-300))
    throw SingularPointError(den_.str());
  return num_.eval(point) / dval;
}

std::string RationalExpr::str() const {
  if (den_ == Polynomial(Rational(1))) return num_.str();
  return "(" + num_.str() + ")/(" + den_.str() + ")";
}

}  // namespace momloc
