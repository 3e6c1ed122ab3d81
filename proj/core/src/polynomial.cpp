#include "momloc/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace momloc {

// ---------------------------------------------------------------------------
// Monomial

Monomial::Monomial(const Symbol& s, int exp) {
  if (exp < 0) throw std::invalid_argument("Monomial: negative exponent");
  if (exp > 0) factors_.push_back({s, exp});
}

int Monomial::degree() const {
  int d = 0;
  for (const auto& [s, e] : factors_) d += e;
  return d;
}

int Monomial::degree_in(const Symbol& s) const {
  for (const auto& [t, e] : factors_)
    if (t == s) return e;
  return 0;
}

int Monomial::degree_in(const std::set<Symbol>& vars) const {
  int d = 0;
  for (const auto& [s, e] : factors_)
    if (vars.count(s)) d += e;
  return d;
}

Monomial Monomial::times(const Monomial& o) const {
  Monomial r;
  r.factors_.reserve(factors_.size() + o.factors_.size());
  auto it = factors_.begin(), jt = o.factors_.begin();
  while (it != factors_.end() || jt != o.factors_.end()) {
    if (jt == o.factors_.end() || (it != factors_.end() && it->first < jt->first)) {
      r.factors_.push_back(*it++);
    } else if (it == factors_.end() || jt->first < it->first) {
      r.factors_.push_back(*jt++);
    } else {
      r.factors_.push_back({it->first, it->second + jt->second});
      ++it, ++jt;
    }
  }
  return r;
}

bool Monomial::divides(const Monomial& o) const {
  for (const auto& [s, e] : factors_)
    if (o.degree_in(s) < e) return false;
  return true;
}

Monomial Monomial::divided_by(const Monomial& o) const {
  Monomial r;
  for (const auto& [s, e] : factors_) {
    int oe = o.degree_in(s);
    if (oe > e) throw std::invalid_argument("Monomial::divided_by: not divisible");
    if (e - oe > 0) r.factors_.push_back({s, e - oe});
  }
  return r;
}

Monomial Monomial::gcd(const Monomial& a, const Monomial& b) {
  Monomial r;
  for (const auto& [s, e] : a.factors_) {
    int be = b.degree_in(s);
    int m = std::min(e, be);
    if (m > 0) r.factors_.push_back({s, m});
  }
  return r;
}

std::strong_ordering Monomial::operator<=>(const Monomial& o) const {
  // Pure lex: the exponent of the largest symbol decides first.
  auto it = factors_.rbegin();
  auto jt = o.factors_.rbegin();
  while (it != factors_.rend() && jt != o.factors_.rend()) {
    if (it->first != jt->first)
      return (jt->first < it->first) ? std::strong_ordering::greater : std::strong_ordering::less;
    if (it->second != jt->second) return it->second <=> jt->second;
    ++it, ++jt;
  }
  if (it != factors_.rend()) return std::strong_ordering::greater;
  if (jt != o.factors_.rend()) return std::strong_ordering::less;
  return std::strong_ordering::equal;
}

void Monomial::collect_symbols(std::set<Symbol>& out) const {
  for (const auto& [s, e] : factors_) out.insert(s);
}

std::string Monomial::str() const {
  if (factors_.empty()) return "1";
  std::string out;
  for (const auto& [s, e] : factors_) {
    if (!out.empty()) out += "*";
    out += s.name();
    if (e != 1) out += "^" + std::to_string(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Polynomial basics

Polynomial::Polynomial(const Rational& c) {
  if (c != 0) terms_.emplace(Monomial::one(), c);
}

Polynomial Polynomial::variable(const Symbol& s, int exp) {
  if (exp < 0) throw std::invalid_argument("Polynomial::variable: negative exponent");
  Polynomial p;
  p.terms_.emplace(Monomial(s, exp), Rational(1));
  return p;
}

Polynomial Polynomial::term(const Rational& c, const Monomial& m) {
  Polynomial p;
  if (c != 0) p.terms_.emplace(m, c);
  return p;
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
}

Rational Polynomial::constant_value() const {
  if (terms_.empty()) return Rational(0);
  if (!is_constant()) throw std::logic_error("Polynomial::constant_value: not constant");
  return terms_.begin()->second;
}

int Polynomial::total_degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

int Polynomial::degree_in(const Symbol& s) const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree_in(s));
  return d;
}

int Polynomial::degree_in(const std::set<Symbol>& vars) const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree_in(vars));
  return d;
}

bool Polynomial::contains_any(const std::set<Symbol>& vars) const {
  for (const auto& [m, c] : terms_)
    if (m.degree_in(vars) > 0) return true;
  return false;
}

std::set<Symbol> Polynomial::symbols() const {
  std::set<Symbol> out;
  for (const auto& [m, c] : terms_) m.collect_symbols(out);
  return out;
}

std::pair<Monomial, Rational> Polynomial::leading() const {
  if (terms_.empty()) throw std::logic_error("Polynomial::leading: zero polynomial");
  auto it = terms_.rbegin();
  return {it->first, it->second};
}

void Polynomial::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial Polynomial::operator-() const {
  Polynomial r;
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
  return r;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial r = *this;
  r += o;
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  Polynomial r = *this;
  r -= o;
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial r;
  for (const auto& [m1, c1] : terms_)
    for (const auto& [m2, c2] : o.terms_) r.add_term(m1.times(m2), c1 * c2);
  return r;
}

Polynomial Polynomial::operator*(const Rational& c) const {
  if (c == 0) return Polynomial();
  Polynomial r;
  for (const auto& [m, k] : terms_) r.terms_.emplace(m, k * c);
  return r;
}

Polynomial Polynomial::pow(int e) const {
  if (e < 0) throw std::invalid_argument("Polynomial::pow: negative exponent");
  Polynomial r(Rational(1));
  Polynomial base = *this;
  while (e > 0) {
    if (e & 1) r *= base;
    e >>= 1;
    if (e > 0) base *= base;
  }
  return r;
}

std::strong_ordering Polynomial::operator<=>(const Polynomial& o) const {
  auto it = terms_.begin(), jt = o.terms_.begin();
  while (it != terms_.end() && jt != o.terms_.end()) {
    if (auto c = it->first <=> jt->first; c != 0) return c;
    if (it->second != jt->second)
      return it->second < jt->second ? std::strong_ordering::less : std::strong_ordering::greater;
    ++it, ++jt;
  }
  if (it != terms_.end()) return std::strong_ordering::greater;
  if (jt != o.terms_.end()) return std::strong_ordering::less;
  return std::strong_ordering::equal;
}

Polynomial Polynomial::substitute(const std::map<Symbol, Polynomial>& bindings) const {
  Polynomial out;
  for (const auto& [m, c] : terms_) {
    Polynomial t(c);
    for (const auto& [s, e] : m.factors()) {
      auto it = bindings.find(s);
      if (it == bindings.end()) {
        t *= variable(s, e);
      } else {
        t *= it->second.pow(e);
      }
    }
    out += t;
  }
  return out;
}

Polynomial Polynomial::swap_pairs(const std::vector<std::pair<Symbol, Symbol>>& pairs) const {
  std::map<Symbol, Symbol> rename;
  std::set<Symbol> seen;
  for (const auto& [a, b] : pairs) {
    if (!seen.insert(a).second || !seen.insert(b).second)
      throw std::invalid_argument("swap_pairs: pairs are not disjoint");
    rename[a] = b;
    rename[b] = a;
  }
  Polynomial out;
  for (const auto& [m, c] : terms_) {
    std::vector<std::pair<Symbol, int>> fs;
    fs.reserve(m.factors().size());
    for (const auto& [s, e] : m.factors()) {
      auto it = rename.find(s);
      fs.push_back({it == rename.end() ? s : it->second, e});
    }
    std::sort(fs.begin(), fs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Monomial nm;
    nm.factors_ = std::move(fs);
    out.add_term(nm, c);
  }
  return out;
}

namespace {

Rational rational_pow(const Rational& r, int e) {
  Rational out(1);
  Rational base = r;
  while (e > 0) {
    if (e & 1) out *= base;
    e >>= 1;
    if (e > 0) base *= base;
  }
  return out;
}

}  // namespace

Rational Polynomial::eval(const std::map<Symbol, Rational>& point) const {
  Rational out(0);
  for (const auto& [m, c] : terms_) {
    Rational t = c;
    for (const auto& [s, e] : m.factors()) {
      auto it = point.find(s);
      if (it == point.end())
        throw std::invalid_argument("Polynomial::eval: unbound symbol " + s.name());
      t *= rational_pow(it->second, e);
    }
    out += t;
  }
  return out;
}

double Polynomial::eval(const std::map<Symbol, double>& point) const {
  double out = 0;
  for (const auto& [m, c] : terms_) {
    double t = to_double(c);
    for (const auto& [s, e] : m.factors()) {
      auto it = point.find(s);
      if (it == point.end())
        throw std::invalid_argument("Polynomial::eval: unbound symbol " + s.name());
      t *= std::pow(it->second, e);
    }
    out += t;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Division and gcd

bool Polynomial::try_divide_exact(const Polynomial& num, const Polynomial& den, Polynomial& quot) {
  if (den.is_zero()) throw std::invalid_argument("try_divide_exact: zero divisor");
  Polynomial q;
  Polynomial r = num;
  const auto [dm, dc] = den.leading();
  while (!r.is_zero()) {
    const auto [rm, rc] = r.leading();
    if (!dm.divides(rm)) return false;
    Polynomial t = term(rc / dc, rm.divided_by(dm));
    q += t;
    r -= t * den;
  }
  quot = std::move(q);
  return true;
}

namespace {

// Coefficients of p viewed as univariate in x over the remaining symbols.
std::map<int, Polynomial> to_univariate(const Polynomial& p, const Symbol& x) {
  std::map<int, Polynomial> out;
  for (const auto& [m, c] : p.terms()) {
    int e = m.degree_in(x);
    Monomial rest = m.divided_by(Monomial(x, e));
    out[e] += Polynomial::term(c, rest);
  }
  return out;
}

Polynomial gcd_impl(const Polynomial& a, const Polynomial& b, bool heuristic);

// gcd of all x-coefficients (the content of p in R[x], R the remaining ring).
Polynomial content_in(const Polynomial& p, const Symbol& x, bool heuristic) {
  auto coeffs = to_univariate(p, x);
  Polynomial c;
  for (const auto& [e, q] : coeffs) {
    // The verified entry point, so a heuristic misfire can never hand the
    // elimination a content that fails to divide its own coefficients.
    c = heuristic ? Polynomial::gcd(c, q) : gcd_impl(c, q, heuristic);
    if (c.is_constant() && !c.is_zero()) return Polynomial(Rational(1));
  }
  return c;
}

Polynomial primitive_in(const Polynomial& p, const Symbol& x, bool heuristic) {
  Polynomial c = content_in(p, x, heuristic);
  Polynomial q;
  if (!Polynomial::try_divide_exact(p, c, q))
    throw std::logic_error("primitive_in: content does not divide");
  return q;
}

// Leading coefficient of p in x (p viewed as univariate over the rest).
Polynomial leading_in(const Polynomial& p, const Symbol& x) {
  auto pc = to_univariate(p, x);
  return pc.rbegin()->second;
}

// Standard pseudo-remainder: lc(Q)^(deg P - deg Q + 1) * P mod Q in x,
// for deg_x P >= deg_x Q >= 1.
Polynomial prem(Polynomial P, const Polynomial& Q, const Symbol& x) {
  auto qc = to_univariate(Q, x);
  const int dQ = qc.rbegin()->first;
  const Polynomial lcQ = qc.rbegin()->second;
  int pad = P.degree_in(x) - dQ + 1;
  while (!P.is_zero()) {
    const int dP = P.degree_in(x);
    if (dP < dQ) break;
    Polynomial lcP = leading_in(P, x);
    P = lcQ * P - lcP * Polynomial::variable(x, dP - dQ) * Q;
    --pad;
  }
  while (pad-- > 0) P = lcQ * P;
  return P;
}

Polynomial divide_exact(const Polynomial& num, const Polynomial& den, const char* where) {
  Polynomial q;
  if (!Polynomial::try_divide_exact(num, den, q)) throw std::logic_error(where);
  return q;
}

// --- Heuristic gcd (evaluate / integer gcd / balanced-digit reconstruction,
// verified by exact trial division; falls back to the subresultant PRS).

Integer int_numerator(const Rational& c) { return boost::multiprecision::numerator(c); }

// Clear denominators and integer content: returns an integer-coefficient
// associate of p (gcd over the rationals is monic-normalised at the end, so
// scalar factors are irrelevant).
Polynomial to_primitive_integer(const Polynomial& p) {
  Integer l = 1;
  for (const auto& [m, c] : p.terms())
    l = boost::multiprecision::lcm(l, Integer(boost::multiprecision::denominator(c)));
  Integer content = 0;
  for (const auto& [m, c] : p.terms())
    content = boost::multiprecision::gcd(content, Integer(boost::multiprecision::abs(int_numerator(c * l))));
  if (content == 0) return Polynomial();
  Polynomial out;
  for (const auto& [m, c] : p.terms()) out += Polynomial::term(Rational(int_numerator(c * l) / content), m);
  return out;
}

Integer int_content(const Polynomial& p) {
  Integer g = 0;
  for (const auto& [m, c] : p.terms())
    g = boost::multiprecision::gcd(g, Integer(boost::multiprecision::abs(int_numerator(c))));
  return g;
}

Integer max_abs_int_coeff(const Polynomial& p) {
  Integer m = 0;
  for (const auto& [mon, c] : p.terms()) {
    Integer a = boost::multiprecision::abs(int_numerator(c));
    if (a > m) m = a;
  }
  return m;
}

// p with x bound to the integer xi; p must have integer coefficients.
Polynomial eval_var_at_integer(const Polynomial& p, const Symbol& x, const Integer& xi) {
  std::map<int, Integer> powers;
  Polynomial out;
  for (const auto& [m, c] : p.terms()) {
    int e = m.degree_in(x);
    auto it = powers.find(e);
    if (it == powers.end()) it = powers.emplace(e, boost::multiprecision::pow(xi, e)).first;
    out += Polynomial::term(c * Rational(it->second), m.divided_by(Monomial(x, e)));
  }
  return out;
}

// One balanced base-xi digit of g: digit coefficients lie in (-xi/2, xi/2],
// and g is replaced by the exact quotient (g - digit) / xi.
Polynomial balanced_digit(Polynomial& g, const Integer& xi) {
  Polynomial digit, quot;
  for (const auto& [m, c] : g.terms()) {
    Integer v = int_numerator(c);
    Integer r = v % xi;
    if (r < 0) r += xi;
    if (2 * r > xi) r -= xi;
    if (r != 0) digit += Polynomial::term(Rational(r), m);
    Integer q = (v - r) / xi;
    if (q != 0) quot += Polynomial::term(Rational(q), m);
  }
  g = std::move(quot);
  return digit;
}

constexpr unsigned kHeuMaxVars = 12;
constexpr unsigned kHeuMaxBits = 100000;

// Core of the heuristic: A, B primitive integer polynomials, neither constant.
std::optional<Polynomial> gcd_heu_impl(const Polynomial& A, const Polynomial& B) {
  std::set<Symbol> vars = A.symbols();
  {
    auto vb = B.symbols();
    vars.insert(vb.begin(), vb.end());
  }
  if (vars.size() > kHeuMaxVars) return std::nullopt;
  if (vars.empty()) {
    return Polynomial(Rational(boost::multiprecision::gcd(int_content(A), int_content(B))));
  }
  const Symbol x = *vars.rbegin();
  const int dx = std::max(A.degree_in(x), B.degree_in(x));

  // The integer-content base case below is only sound when the side that
  // evaluates to a constant depends on x alone: a multivariate input that
  // collapses to a constant at xi has lost its dependence on the other
  // variables, and a candidate reconstructed from the collapsed image can be
  // a proper (verified, but not maximal) divisor of the true gcd.
  const auto univariate_in = [&x](const Polynomial& p) {
    for (const auto& s : p.symbols())
      if (!(s == x)) return false;
    return true;
  };
  const bool a_only_x = univariate_in(A);
  const bool b_only_x = univariate_in(B);

  Integer amax = max_abs_int_coeff(A), bmax = max_abs_int_coeff(B);
  Integer xi = 2 * std::min(amax, bmax) + 2;
  if (xi < 4) xi = 4;

  for (int attempt = 0; attempt < 6; ++attempt) {
    if (boost::multiprecision::msb(xi) + 1 > kHeuMaxBits) return std::nullopt;
    Polynomial Ax = eval_var_at_integer(A, x, xi);
    Polynomial Bx = eval_var_at_integer(B, x, xi);
    std::optional<Polynomial> g;
    if (Ax.is_zero() || Bx.is_zero()) {
      g = std::nullopt;  // xi hit a root; just grow it
    } else if (Ax.is_constant() || Bx.is_constant()) {
      if ((Ax.is_constant() && a_only_x) || (Bx.is_constant() && b_only_x))
        g = Polynomial(Rational(boost::multiprecision::gcd(int_content(Ax), int_content(Bx))));
      // else: degenerate evaluation collapsed a multivariate input; grow xi
    } else {
      g = gcd_heu_impl(Ax, Bx);
    }
    if (g && !g->is_zero()) {
      Polynomial G, img = *g;
      int i = 0;
      bool ok = true;
      while (!img.is_zero()) {
        if (i > dx) {
          ok = false;
          break;
        }
        Polynomial digit = balanced_digit(img, xi);
        G += digit * Polynomial::variable(x, i);
        ++i;
      }
      if (ok && !G.is_zero()) {
        Integer cg = int_content(G);
        if (cg > 1) G = divide_exact(G, Polynomial(Rational(cg)), "gcd: heu content");
        Polynomial qa, qb;
        if (Polynomial::try_divide_exact(A, G, qa) && Polynomial::try_divide_exact(B, G, qb))
          return G;
      }
    }
    xi = xi * 73794 / 27011;  // growth factor from the classical heuristic
  }
  return std::nullopt;
}

std::optional<Polynomial> gcd_heuristic(const Polynomial& a, const Polynomial& b) {
  Polynomial A = to_primitive_integer(a);
  Polynomial B = to_primitive_integer(b);
  auto g = gcd_heu_impl(A, B);
  if (!g) return std::nullopt;
  return g->monic();
}

Polynomial gcd_impl(const Polynomial& a, const Polynomial& b, bool heuristic) {
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  if (a.is_constant() || b.is_constant()) return Polynomial(Rational(1));
  if (a == b) return a.monic();

  if (heuristic) {
    if (auto heu = gcd_heuristic(a, b)) return *heu;
  }

  std::set<Symbol> syms = a.symbols();
  {
    auto sb = b.symbols();
    syms.insert(sb.begin(), sb.end());
  }
  const Symbol x = *syms.rbegin();

  const int da = a.degree_in(x), db = b.degree_in(x);
  if (da == 0 || db == 0) {
    // One side is free of the top variable, so the gcd is x-free and divides
    // the content of the other side.
    const Polynomial& xfree = (da == 0) ? a : b;
    const Polynomial& xfull = (da == 0) ? b : a;
    return gcd_impl(xfree, content_in(xfull, x, heuristic), heuristic);
  }

  Polynomial ca = content_in(a, x, heuristic);
  Polynomial cb = content_in(b, x, heuristic);
  Polynomial c = gcd_impl(ca, cb, heuristic);

  Polynomial P = divide_exact(a, ca, "gcd: content division failed");
  Polynomial Q = divide_exact(b, cb, "gcd: content division failed");
  if (P.degree_in(x) < Q.degree_in(x)) std::swap(P, Q);

  // Subresultant pseudo-remainder sequence (Brown): the beta divisions are
  // exact and keep coefficient growth polynomial, with a single content
  // extraction at the end instead of one per round.
  int delta = P.degree_in(x) - Q.degree_in(x);
  Polynomial psi(Rational(-1));
  Polynomial beta(Rational(delta % 2 == 0 ? -1 : 1));  // (-1)^(delta+1)
  while (true) {
    Polynomial R = prem(P, Q, x);
    if (R.is_zero()) return (c * primitive_in(Q, x, heuristic)).monic();
    if (R.degree_in(x) == 0) return c.monic();  // coprime in x
    R = divide_exact(R, beta, "gcd: subresultant beta division failed");

    const Polynomial lcQ = leading_in(Q, x);
    const Polynomial neg_lcQ = -lcQ;
    Polynomial psi_next;
    if (delta == 0) {
      psi_next = psi;
    } else if (delta == 1) {
      psi_next = neg_lcQ;
    } else {
      psi_next = divide_exact(neg_lcQ.pow(delta), psi.pow(delta - 1),
                              "gcd: subresultant psi division failed");
    }
    const int delta_next = Q.degree_in(x) - R.degree_in(x);
    beta = -(lcQ * psi_next.pow(delta_next));
    psi = std::move(psi_next);
    delta = delta_next;
    P = std::move(Q);
    Q = std::move(R);
  }
}

}  // namespace

Polynomial Polynomial::monic() const {
  if (is_zero()) return *this;
  return *this * (Rational(1) / leading().second);
}

Polynomial Polynomial::gcd(const Polynomial& a, const Polynomial& b) {
  Polynomial g = gcd_impl(a, b, /*heuristic=*/true);
  // The fast path may recurse through heuristic content extraction; a stale
  // partial content there would surface as a candidate that fails trial
  // division. Verify, and rerun the guaranteed elimination if it does.
  if (!g.is_constant()) {
    Polynomial q;
    if ((!a.is_zero() && !try_divide_exact(a, g, q)) ||
        (!b.is_zero() && !try_divide_exact(b, g, q)))
      return gcd_impl(a, b, /*heuristic=*/false);
  }
  return g;
}

Polynomial Polynomial::gcd_exact(const Polynomial& a, const Polynomial& b) {
  return gcd_impl(a, b, /*heuristic=*/false);
}

std::string Polynomial::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  // Descending lex order.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    const bool neg = c < 0;
    const Rational a = neg ? Rational(-c) : c;
    if (first) {
      if (neg) out << "-";
      first = false;
    } else {
      out << (neg ? " - " : " + ");
    }
    if (m.is_one()) {
      out << rational_str(a);
    } else if (a == 1) {
      out << m.str();
    } else {
      out << rational_str(a) << "*" << m.str();
    }
  }
  return out.str();
}

}  // namespace momloc
