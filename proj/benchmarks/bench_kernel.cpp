#include <benchmark/benchmark.h>

#include "momloc/rational_expr.hpp"

using namespace momloc;

namespace {

SymbolTable& tbl() {
  static SymbolTable t;
  return t;
}

RationalExpr bracket_term(const Symbol& u, const Symbol& v, const Symbol& a, int s) {
  Polynomial pu = Polynomial::variable(u), pv = Polynomial::variable(v),
             pa = Polynomial::variable(a);
  Polynomial shifted = pu + Polynomial(Rational(s)) * pa;
  return RationalExpr(Polynomial(Rational(1)), Rational(2) * pu * (shifted * shifted - pv * pv));
}

}  // namespace

static void BM_BracketCancellation(benchmark::State& state) {
  Symbol x = tbl().formal("x"), y = tbl().formal("y"), a = tbl().formal("a");
  for (auto _ : state) {
    RationalExpr b = bracket_term(y, x, a, +1) + bracket_term(x, y, a, -1) -
                     bracket_term(x, y, a, +1) - bracket_term(y, x, a, -1);
    benchmark::DoNotOptimize(b.is_zero());
  }
}
BENCHMARK(BM_BracketCancellation);

static void BM_PolynomialGcd(benchmark::State& state) {
  Symbol x = tbl().formal("x"), y = tbl().formal("y");
  Polynomial px = Polynomial::variable(x), py = Polynomial::variable(y);
  Polynomial a = (px + py).pow(6) * (px - py);
  Polynomial b = (px + py).pow(4) * (px * py + Polynomial(Rational(1)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(Polynomial::gcd(a, b));
  }
}
BENCHMARK(BM_PolynomialGcd);

BENCHMARK_MAIN();
