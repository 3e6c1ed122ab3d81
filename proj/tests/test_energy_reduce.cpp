#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "momloc/commutator.hpp"
#include "momloc/energy_reduce.hpp"

using namespace momloc;

namespace {

FieldModel bose(int n, int d, std::vector<Rational> masses) {
  return make_bose_model(n, d, std::move(masses));
}

Polynomial var(const Symbol& s) { return Polynomial::variable(s); }

Term make_term(std::vector<std::optional<Atom>> slots, bool conservation,
               Polynomial poly = Polynomial(Rational(1))) {
  Term t;
  t.slots = std::move(slots);
  t.conservation = conservation;
  t.poly = std::move(poly);
  return t;
}

}  // namespace

TEST_CASE("free two-point reduction") {
  FieldModel m = bose(2, 4, {Rational(1)});
  ReducedExpr r = reduce_free_two_point(m);
  REQUIRE(r.size() == 1);
  const ReducedTerm& g = r.groups()[0];
  CHECK(g.spatial_conservation);
  CHECK_FALSE(g.residual.has_value());
  CHECK_FALSE(g.spectators[0].has_value());
  CHECK_FALSE(g.spectators[1].has_value());

  Polynomial x = var(omega_sym(0, 0));
  Polynomial y = var(omega_sym(1, 0));
  RationalExpr expected =
      RationalExpr::from_factored(Polynomial(Rational(1)), {Rational(2) * x}) -
      RationalExpr::from_factored(Polynomial(Rational(1)), {Rational(2) * y});
  CHECK(g.coefficient == ComplexExpr(expected));

  // No spectator slots, hence no a symbol anywhere.
  CHECK(g.coefficient.re.symbols().count(a_sym()) == 0);

  // The conservation delta identifies the two energies; the result is zero.
  ReducedExpr constrained =
      apply_support_constraints(r, {{omega_sym(1, 0), omega_sym(0, 0)}});
  CHECK(constrained.is_zero());
  CHECK(apply_support_constraints(r, {{omega_sym(0, 0), omega_sym(1, 0)}}).is_zero());
  CHECK(apply_support_constraints(r, {}) == r);
}

TEST_CASE("support constraints are guarded") {
  FieldModel m3 = bose(3, 4, {Rational(1)});
  ReducedExpr r3 = reduce_double_integral(build_structure_function(m3), 0);
  CHECK_THROWS_AS(apply_support_constraints(r3, {{omega_sym(1, 0), omega_sym(0, 0)}}),
                  std::invalid_argument);

  FieldModel m2 = bose(2, 4, {Rational(1), Rational(2)});
  ReducedExpr r2 = reduce_free_two_point(m2, 0);
  // Different species have different masses: identification unjustified.
  CHECK_THROWS_AS(apply_support_constraints(r2, {{omega_sym(1, 1), omega_sym(0, 0)}}),
                  std::invalid_argument);
  // Non-energy symbols are rejected outright.
  CHECK_THROWS_AS(apply_support_constraints(r2, {{k_sym(0, 0), k_sym(1, 0)}}),
                  std::invalid_argument);

  // Groups without the conservation delta never justify the identification.
  Term t = make_term({Atom::shell(+1, 0), Atom::shell(-1, 0)}, false);
  ReducedExpr loose = reduce_double_integral(MomentumDistribution(m2, {t}), 0);
  CHECK_THROWS_AS(apply_support_constraints(loose, {{omega_sym(1, 0), omega_sym(0, 0)}}),
                  std::invalid_argument);
}

TEST_CASE("shell plus propagator reduction") {
  FieldModel m = bose(3, 4, {Rational(1)});
  Polynomial x = var(omega_sym(0, 0));
  Polynomial y = var(omega_sym(1, 0));
  Polynomial a = var(a_sym());

  // Backward shell at the first slot, propagator at the second.
  Term t = make_term({Atom::shell(-1, 0), Atom::propagator(0), Atom::shell(+1, 0)}, true);
  ReducedExpr r = reduce_double_integral(MomentumDistribution(m, {t}), 0);
  REQUIRE(r.size() == 1);
  const ReducedTerm& g = r.groups()[0];
  CHECK(g.spatial_conservation);
  CHECK_FALSE(g.residual.has_value());
  CHECK(g.spectators[2] == Atom::shell(+1, 0));

  Polynomial xa = x - a;
  RationalExpr expected = RationalExpr::from_factored(
      Polynomial(Rational(1)), {Rational(2) * x, xa * xa - y * y});
  CHECK(g.coefficient == ComplexExpr(expected));

  std::map<Symbol, Rational> pt{{omega_sym(0, 0), Rational(2)},
                                {omega_sym(1, 0), Rational(3)},
                                {a_sym(), Rational(1)}};
  CHECK(g.coefficient.re.eval(pt) == Rational(-1, 32));

  // Propagator first, forward shell second: 1/(2y((y+a)^2-x^2)), which at
  // x=2, y=3, a=1 equals 1/72.
  Term u = make_term({Atom::propagator(0), Atom::shell(+1, 0), Atom::shell(+1, 0)}, true);
  ReducedExpr ru = reduce_double_integral(MomentumDistribution(m, {u}), 0);
  REQUIRE(ru.size() == 1);
  Polynomial ya = y + a;
  CHECK(ru.groups()[0].coefficient ==
        ComplexExpr(RationalExpr::from_factored(Polynomial(Rational(1)),
                                                {Rational(2) * y, ya * ya - x * x})));
  CHECK(ru.groups()[0].coefficient.re.eval(pt) == Rational(1, 72));
}

TEST_CASE("polynomial factors receive on-shell substitutions") {
  FieldModel m = bose(3, 4, {Rational(1)});
  Polynomial x = var(omega_sym(0, 0));
  Polynomial y = var(omega_sym(1, 0));
  Polynomial a = var(a_sym());
  Polynomial xa = x - a;

  // k_2^0 is fixed by the conservation delta to omega_1 - a.
  Term t = make_term({Atom::shell(-1, 0), Atom::propagator(0), Atom::shell(+1, 0)}, true,
                     var(k_sym(1, 0)));
  ReducedExpr r = reduce_double_integral(MomentumDistribution(m, {t}), 0);
  REQUIRE(r.size() == 1);
  CHECK(r.groups()[0].coefficient ==
        ComplexExpr(RationalExpr::from_factored(xa, {Rational(2) * x, xa * xa - y * y})));

  // Spectator energies stay symbolic.
  Term s = make_term({Atom::shell(-1, 0), Atom::propagator(0), Atom::shell(+1, 0)}, true,
                     var(k_sym(2, 0)));
  ReducedExpr rs = reduce_double_integral(MomentumDistribution(m, {s}), 0);
  REQUIRE(rs.size() == 1);
  CHECK(rs.groups()[0].coefficient.re.symbols().count(k_sym(2, 0)) == 1);

  // Without conservation, two shells resolve directly; the energy value +x
  // cancels against the Jacobian.
  FieldModel m2 = bose(2, 4, {Rational(1)});
  Term f = make_term({Atom::shell(+1, 0), Atom::shell(-1, 0)}, false, var(k_sym(0, 0)));
  ReducedExpr rf = reduce_double_integral(MomentumDistribution(m2, {f}), 0);
  REQUIRE(rf.size() == 1);
  CHECK_FALSE(rf.groups()[0].spatial_conservation);
  CHECK_FALSE(rf.groups()[0].residual.has_value());
  Polynomial y2 = var(omega_sym(1, 0));
  CHECK(rf.groups()[0].coefficient ==
        ComplexExpr(RationalExpr::from_factored(Polynomial(Rational(1)), {Rational(4) * y2})));
}

TEST_CASE("residual energy deltas") {
  FieldModel m2 = bose(2, 4, {Rational(1)});
  Term t = make_term({Atom::shell(+1, 0), Atom::shell(-1, 0)}, true);
  ReducedExpr r = reduce_double_integral(MomentumDistribution(m2, {t}), 0);
  REQUIRE(r.size() == 1);
  const ReducedTerm& g = r.groups()[0];
  REQUIRE(g.residual.has_value());
  CHECK(*g.residual == ResidualDelta{+1, 0, -1, 0});
  CHECK(g.spatial_conservation);
  Polynomial x = var(omega_sym(0, 0));
  Polynomial y = var(omega_sym(1, 0));
  CHECK(g.coefficient == ComplexExpr(RationalExpr::from_factored(
                             Polynomial(Rational(1)), {Rational(2) * x, Rational(2) * y})));
  CHECK(r.str().find("d(- om1_1 + om2_1)") == std::string::npos);  // sign order: +x then -y
  CHECK(r.str().find("om1_1") != std::string::npos);

  FieldModel m3 = bose(3, 4, {Rational(1)});
  Term u = make_term({Atom::shell(-1, 0), Atom::shell(-1, 0), Atom::propagator(0)}, true);
  ReducedExpr ru = reduce_double_integral(MomentumDistribution(m3, {u}), 0);
  REQUIRE(ru.size() == 1);
  CHECK(*ru.groups()[0].residual == ResidualDelta{-1, 0, -1, 0});
  CHECK(ru.str().find("d(a - om1_1 - om2_1)") != std::string::npos);
}

TEST_CASE("bracket cancellation, closed form") {
  for (int N : {1, 2}) {
    std::vector<Rational> masses;
    for (int s = 0; s < N; ++s) masses.push_back(Rational(s + 1));
    FieldModel m = bose(3, 4, masses);
    for (int j = 0; j < 2; ++j) {
      CHECK(reduce_double_integral(structure_commutator_closed_form(m, j), j).is_zero());
      CHECK(
          reduce_double_integral(structure_commutator_closed_form(m, j, true), j).is_zero());
    }
  }
}

TEST_CASE("structure commutator reduces to zero") {
  for (int n : {3, 4}) {
    for (int N : {1, 2}) {
      std::vector<Rational> masses;
      for (int s = 0; s < N; ++s) masses.push_back(Rational(2 * s + 1, 2));
      FieldModel m = bose(n, 4, masses);
      MomentumDistribution g = build_structure_function(m);
      for (int j = 0; j + 1 < n; ++j)
        CHECK(reduce_double_integral(commutator_at(g, j), j).is_zero());
    }
  }
}

TEST_CASE("residual groups cancel between the commutator halves") {
  FieldModel m = bose(3, 4, {Rational(1)});
  MomentumDistribution g = build_structure_function(m);

  ReducedExpr half1 = reduce_double_integral(g, 0);
  CHECK_FALSE(half1.is_zero());

  // The j' = 3 term leaves a residual delta group with weight 1/(4 x y).
  bool residual_seen = false;
  for (const ReducedTerm& grp : half1.groups()) {
    if (!grp.residual) continue;
    residual_seen = true;
    CHECK(*grp.residual == ResidualDelta{-1, 0, -1, 0});
    CHECK(grp.spectators[2] == Atom::propagator(0));
    Polynomial x = var(omega_sym(0, 0));
    Polynomial y = var(omega_sym(1, 0));
    CHECK(grp.coefficient == ComplexExpr(RationalExpr::from_factored(
                                 Polynomial(Rational(1)), {Rational(2) * x, Rational(2) * y})));
  }
  CHECK(residual_seen);

  ReducedExpr half2 = reduce_double_integral(-sigma_weighted_exchange(g, 0), 0);
  ReducedExpr total = half1 + half2;
  CHECK(total.is_zero());
  CHECK(total == reduce_double_integral(commutator_at(g, 0), 0));
}

TEST_CASE("reduction is linear") {
  FieldModel m = bose(3, 4, {Rational(1)});
  MomentumDistribution d1 = structure_commutator_closed_form(m, 0);
  MomentumDistribution d2 = build_structure_function(m);
  ComplexRational c{Rational(3), Rational(2)};
  CHECK(reduce_double_integral(d1 + d2.scaled(c), 0) ==
        reduce_double_integral(d1, 0) + reduce_double_integral(d2, 0).scaled(c));
}

TEST_CASE("reducing the exchanged distribution swaps the pair") {
  FieldModel m = bose(3, 4, {Rational(1), Rational(2)});
  MomentumDistribution g = build_structure_function(m);
  for (int j = 0; j < 2; ++j) {
    ReducedExpr swapped = reduce_double_integral(sigma_weighted_exchange(g, j), j);
    CHECK(swapped == reduce_double_integral(g, j).swapped_pair());
  }
}

TEST_CASE("unsupported terms") {
  FieldModel m = bose(2, 4, {Rational(1)});
  auto reduce_single = [&](Term t) {
    return reduce_double_integral(MomentumDistribution(m, {std::move(t)}), 0);
  };
  CHECK_THROWS_AS(reduce_single(make_term({Atom::propagator(0), Atom::propagator(0)}, true)),
                  UnsupportedTermError);
  CHECK_THROWS_AS(reduce_single(make_term({Atom::propagator(0), std::nullopt}, true)),
                  UnsupportedTermError);
  CHECK_THROWS_AS(reduce_single(make_term({std::nullopt, std::nullopt}, true)),
                  UnsupportedTermError);
  CHECK_THROWS_AS(
      reduce_single(make_term({Atom::shell(-1, 0), Atom::propagator(0)}, false)),
      UnsupportedTermError);
  CHECK_THROWS_AS(reduce_single(make_term({Atom::shell(-1, 0), std::nullopt}, false)),
                  UnsupportedTermError);

  MomentumDistribution w = build_free_two_point(m);
  CHECK_THROWS_AS(reduce_double_integral(w, 1), std::invalid_argument);
  CHECK_THROWS_AS(reduce_double_integral(w, -1), std::invalid_argument);
}

TEST_CASE("reduced expression algebra") {
  FieldModel m = bose(3, 4, {Rational(1)});
  ReducedExpr r = reduce_double_integral(build_structure_function(m), 0);
  CHECK((r + (-r)).is_zero());
  CHECK(r.scaled(ComplexRational{}).is_zero());
  CHECK(r.scaled(ComplexRational{Rational(1), Rational(0)}) == r);

  ReducedExpr r1 = reduce_double_integral(build_structure_function(m), 1);
  CHECK_THROWS_AS(r + r1, std::invalid_argument);

  // Construction validates group shapes.
  ReducedTerm bad;
  bad.spectators = {Atom::shell(+1, 0), std::nullopt, std::nullopt};
  bad.coefficient = ComplexExpr(RationalExpr(Rational(1)));
  CHECK_THROWS_AS(ReducedExpr(m, 0, {bad}), std::invalid_argument);

  ReducedTerm badres;
  badres.spectators = {std::nullopt, std::nullopt, Atom::shell(+1, 0)};
  badres.spatial_conservation = false;
  badres.residual = ResidualDelta{+1, 0, +1, 0};
  badres.coefficient = ComplexExpr(RationalExpr(Rational(1)));
  CHECK_THROWS_AS(ReducedExpr(m, 0, {badres}), std::invalid_argument);
}

TEST_CASE("reduced str smoke") {
  FieldModel m = bose(2, 4, {Rational(1)});
  ReducedExpr r = reduce_free_two_point(m);
  CHECK(r.str().find("d(sum k_vec)") != std::string::npos);
  CHECK(r.str().find("om1_1") != std::string::npos);
  CHECK(ReducedExpr(m, 0).str() == "0");
}
