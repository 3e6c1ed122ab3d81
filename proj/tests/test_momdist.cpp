#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "momloc/momdist.hpp"

#include <set>

using namespace momloc;

namespace {

FieldModel bose(int n, int d, std::vector<Rational> masses) {
  return make_bose_model(n, d, std::move(masses));
}

const ComplexRational kOne{Rational(1), Rational(0)};
const ComplexRational kI{Rational(0), Rational(1)};

}  // namespace

TEST_CASE("field model validation") {
  CHECK_NOTHROW(bose(2, 4, {Rational(1)}));
  CHECK_NOTHROW(bose(3, 2, {Rational(1, 2), Rational(3)}));

  CHECK_THROWS_AS(bose(1, 4, {Rational(1)}), std::invalid_argument);
  CHECK_THROWS_AS(bose(2, 1, {Rational(1)}), std::invalid_argument);
  CHECK_THROWS_AS(bose(2, 4, {}), std::invalid_argument);

  // Massless species are admissible only from d = 4 on.
  CHECK_THROWS_AS(bose(2, 2, {Rational(0)}), std::invalid_argument);
  CHECK_THROWS_AS(bose(2, 3, {Rational(0)}), std::invalid_argument);
  CHECK_NOTHROW(bose(2, 4, {Rational(0)}));
  CHECK_THROWS_AS(bose(2, 4, {Rational(-1)}), std::invalid_argument);

  FieldModel m = bose(2, 4, {Rational(1), Rational(2)});
  CHECK(m.sigma_constant());
  m.sigma[0][1] = m.sigma[1][0] = -1;
  CHECK_NOTHROW(m.validate());
  CHECK_FALSE(m.sigma_constant());
  CHECK(m.sigma_sign(0, 1) == -1);
  CHECK(m.sigma_sign(0, 0) == 1);

  m.sigma[0][1] = 2;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m.sigma[0][1] = 1;  // now asymmetric vs sigma[1][0] = -1
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
  m.sigma = {{1, 1}};
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("symbol naming and inverse lookups") {
  Symbol om = omega_sym(0, 1);
  CHECK(om.name() == "om1_2");
  CHECK(om.kind() == SymbolKind::Energy);
  auto oi = omega_info(om);
  REQUIRE(oi.has_value());
  CHECK(oi->slot == 0);
  CHECK(oi->species == 1);

  Symbol k = k_sym(2, 0);
  CHECK(k.name() == "k3_0");
  CHECK(k.kind() == SymbolKind::Momentum);
  auto ki = momentum_info(k);
  REQUIRE(ki.has_value());
  CHECK(ki->slot == 2);
  CHECK(ki->mu == 0);

  CHECK(mass_sym(0).name() == "m1");
  CHECK(mass_info(mass_sym(3)).value() == 3);
  CHECK(a_sym().name() == "a");
  CHECK(a_sym().kind() == SymbolKind::EnergySum);

  CHECK_FALSE(omega_info(k).has_value());
  CHECK_FALSE(momentum_info(om).has_value());
  CHECK_FALSE(mass_info(k).has_value());

  CHECK(symbol_from_name("om2_1") == omega_sym(1, 0));
  CHECK(symbol_from_name("k1_3") == k_sym(0, 3));
  CHECK(symbol_from_name("m2") == mass_sym(1));
  CHECK(symbol_from_name("a") == a_sym());
  CHECK(symbol_from_name("q").kind() == SymbolKind::Formal);
}

TEST_CASE("free two-point term structure") {
  FieldModel m = bose(2, 4, {Rational(1)});
  MomentumDistribution w = build_free_two_point(m);
  REQUIRE(w.size() == 1);
  const Term& t = w.terms()[0];
  CHECK(t.coeff == kOne);
  CHECK(t.conservation);
  REQUIRE(t.slots.size() == 2);
  REQUIRE(t.slots[0].has_value());
  CHECK(*t.slots[0] == Atom::shell(-1, 0));
  CHECK_FALSE(t.slots[1].has_value());
  CHECK(t.str() == "1 d-[m1](k1) d(sum k)");

  CHECK_THROWS_AS(build_free_two_point(bose(3, 4, {Rational(1)})),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_free_two_point(m, 1), std::invalid_argument);
}

TEST_CASE("structure function term counts") {
  // n * N^n explicit terms, none merging.
  CHECK(build_structure_function(bose(3, 4, {Rational(1)})).size() == 3);
  CHECK(build_structure_function(bose(3, 4, {Rational(1), Rational(2)})).size() == 24);
  CHECK(build_structure_function(bose(4, 4, {Rational(1), Rational(2)})).size() == 64);
  CHECK(build_structure_function(bose(5, 4, {Rational(1)})).size() == 5);
  CHECK(build_structure_function(bose(5, 4, {Rational(1), Rational(2)})).size() == 160);

  CHECK_THROWS_AS(build_structure_function(bose(2, 4, {Rational(1)})),
                  std::invalid_argument);
}

TEST_CASE("structure function atom pattern") {
  MomentumDistribution g = build_structure_function(bose(3, 4, {Rational(1)}));
  // Exactly one term carries the propagator in the middle slot; it must have
  // a backward shell before and a forward shell after.
  int middle = 0;
  for (const Term& t : g.terms()) {
    REQUIRE(t.conservation);
    CHECK(t.coeff == kOne);
    int props = 0;
    for (const auto& atom : t.slots) {
      REQUIRE(atom.has_value());
      if (atom->type == Atom::Type::Propagator) ++props;
    }
    CHECK(props == 1);
    if (t.slots[1]->type == Atom::Type::Propagator) {
      ++middle;
      CHECK(*t.slots[0] == Atom::shell(-1, 0));
      CHECK(*t.slots[2] == Atom::shell(+1, 0));
    }
  }
  CHECK(middle == 1);

  // Deterministic canonical form: independent builds are structurally equal.
  CHECK(g == build_structure_function(bose(3, 4, {Rational(1)})));
}

TEST_CASE("canonicalization merges and cancels") {
  FieldModel m = bose(3, 4, {Rational(1)});
  MomentumDistribution g = build_structure_function(m);

  MomentumDistribution twice = g + g;
  CHECK(twice.size() == g.size());
  for (const Term& t : twice.terms())
    CHECK(t.coeff == ComplexRational{Rational(2), Rational(0)});
  CHECK(twice == g.scaled(ComplexRational{Rational(2), Rational(0)}));

  CHECK((g - g).is_zero());
  CHECK((g + (-g)).is_zero());
  CHECK(g.scaled(ComplexRational{}).is_zero());
  CHECK((-g).scaled(ComplexRational{Rational(-1), Rational(0)}) == g);

  MomentumDistribution other(bose(4, 4, {Rational(1)}));
  CHECK_THROWS_AS(g + other, std::invalid_argument);
}

TEST_CASE("polynomial factors on terms") {
  FieldModel m = bose(3, 4, {Rational(1)});
  MomentumDistribution g = build_structure_function(m);

  CHECK(g.multiplied_by(Polynomial(Rational(1))) == g);

  Polynomial dot = minkowski_dot(m, 0, 1);
  MomentumDistribution gd = g.multiplied_by(dot);
  CHECK(gd.size() == g.size());
  for (const Term& t : gd.terms()) CHECK(t.poly == dot);

  CHECK(g.multiplied_by(Polynomial()).is_zero());

  // Only momentum components of the model are allowed in the factor.
  Polynomial bad = Polynomial::variable(global_symbols().formal("x"));
  CHECK_THROWS_AS(g.multiplied_by(bad), std::invalid_argument);
  Polynomial out_of_range = Polynomial::variable(k_sym(3, 0));  // slot 4 of 3
  CHECK_THROWS_AS(g.multiplied_by(out_of_range), std::invalid_argument);
}

TEST_CASE("minkowski dot") {
  FieldModel m = bose(2, 4, {Rational(1)});
  Polynomial dot = minkowski_dot(m, 0, 1);
  Polynomial expect = Polynomial::variable(k_sym(0, 0)) * Polynomial::variable(k_sym(1, 0));
  for (int mu = 1; mu < 4; ++mu)
    expect -= Polynomial::variable(k_sym(0, mu)) * Polynomial::variable(k_sym(1, mu));
  CHECK(dot == expect);
  CHECK(dot.total_degree() == 2);
  CHECK_THROWS_AS(minkowski_dot(m, 0, 2), std::invalid_argument);
}

TEST_CASE("weighted structure functions") {
  FieldModel m = bose(3, 4, {Rational(1)});
  WeightList unit = {{0, kOne}};
  CHECK(build_weighted_structure_function(m, unit) == build_structure_function(m));

  // Shared two-species list with complex weights: coefficient is the product
  // of the slot weights.
  FieldModel m2 = bose(3, 4, {Rational(1), Rational(2)});
  ComplexRational half{Rational(1, 2), Rational(0)};
  WeightList wl = {{0, half}, {1, kI}};
  MomentumDistribution g = build_weighted_structure_function(m2, wl);
  CHECK(g.size() == 24);

  // Term j = 0, species (1, 0, 1): weight i * 1/2 * i = -1/2.
  bool found = false;
  for (const Term& t : g.terms()) {
    if (t.slots[0] == Atom::propagator(1) && t.slots[1] == Atom::shell(+1, 0) &&
        t.slots[2] == Atom::shell(+1, 1)) {
      found = true;
      CHECK(t.coeff == ComplexRational{Rational(-1, 2), Rational(0)});
    }
  }
  CHECK(found);

  // Per-slot lists multiply out: sizes 1 x 2 x 1 give 3 * 2 terms.
  std::vector<WeightList> per_slot = {{{0, kOne}}, {{0, half}, {1, kI}}, {{1, kOne}}};
  CHECK(build_weighted_structure_function(m2, per_slot).size() == 6);

  CHECK_THROWS_AS(build_weighted_structure_function(m2, WeightList{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_weighted_structure_function(m2, WeightList{{2, kOne}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      build_weighted_structure_function(m2, std::vector<WeightList>{{{0, kOne}}}),
      std::invalid_argument);
}

TEST_CASE("spectral support") {
  // Structure functions satisfy it for every n, N in range.
  CHECK(check_spectral_support(build_structure_function(bose(3, 4, {Rational(1)}))));
  CHECK(check_spectral_support(
      build_structure_function(bose(4, 4, {Rational(1), Rational(2)}))));
  CHECK(check_spectral_support(build_free_two_point(bose(2, 4, {Rational(1)}))));

  FieldModel m = bose(2, 4, {Rational(1)});

  // Forward followed by backward shell puts k_2 into the backward cone.
  Term bad;
  bad.slots = {Atom::shell(+1, 0), Atom::shell(-1, 0)};
  bad.conservation = true;
  CHECK_FALSE(check_spectral_support(MomentumDistribution(m, {bad})));

  // The mirrored pattern is certified twice over: directly and through the
  // conservation delta.
  Term good;
  good.slots = {Atom::shell(-1, 0), Atom::shell(+1, 0)};
  good.conservation = true;
  CHECK(check_spectral_support(MomentumDistribution(m, {good})));

  // Without conservation the direct route still works ...
  good.conservation = false;
  CHECK(check_spectral_support(MomentumDistribution(m, {good})));

  // ... but an unconstrained trailing slot cannot be certified.
  Term open;
  open.slots = {Atom::shell(-1, 0), std::nullopt};
  open.conservation = false;
  CHECK_FALSE(check_spectral_support(MomentumDistribution(m, {open})));

  // Invariant under polynomial multipliers: support is about atoms only.
  MomentumDistribution g = build_structure_function(bose(3, 4, {Rational(1)}));
  CHECK(check_spectral_support(g.multiplied_by(minkowski_dot(g.model(), 0, 2))) ==
        check_spectral_support(g));
}

TEST_CASE("multiplier validation") {
  FieldModel m = bose(3, 4, {Rational(1)});
  std::string why;

  Polynomial dot01 = minkowski_dot(m, 0, 1);
  Polynomial dot02 = minkowski_dot(m, 0, 2);
  Polynomial dot12 = minkowski_dot(m, 1, 2);

  // Sum of squared pairwise products over all blocks: symmetric + invariant.
  Polynomial sym2 = dot01 * dot01 + dot02 * dot02 + dot12 * dot12;
  CHECK(validate_multiplier(m, sym2, &why));
  CHECK(why.empty());

  CHECK(validate_multiplier(m, Polynomial(Rational(1))));
  CHECK(validate_multiplier(m, Polynomial()));

  // A single pairwise product misses block symmetry for n = 3.
  CHECK_FALSE(validate_multiplier(m, dot01, &why));
  CHECK(why.find("symmetric") != std::string::npos);

  // Block-symmetric but not Lorentz invariant: sum of energy components.
  Polynomial energies;
  for (int l = 0; l < m.n; ++l) energies += Polynomial::variable(k_sym(l, 0));
  CHECK_FALSE(validate_multiplier(m, energies, &why));
  CHECK(why.find("boost") != std::string::npos);

  // Invariant under boosts in the (0,1) plane but not under rotations.
  Polynomial plane01;
  for (int l = 0; l < m.n; ++l) {
    Polynomial k0 = Polynomial::variable(k_sym(l, 0));
    Polynomial k1 = Polynomial::variable(k_sym(l, 1));
    plane01 += k0 * k0 - k1 * k1;
  }
  CHECK_FALSE(validate_multiplier(m, plane01, &why));
  CHECK(why.find("rotation") != std::string::npos);

  // Foreign symbols are rejected.
  CHECK_FALSE(validate_multiplier(m, Polynomial::variable(a_sym()), &why));
  CHECK(why.find("momentum component") != std::string::npos);
  CHECK_FALSE(validate_multiplier(m, Polynomial::variable(k_sym(3, 0)), &why));

  // Full Minkowski squares of single blocks are invariant but must respect
  // block symmetry; the symmetric sum passes.
  Polynomial squares;
  for (int l = 0; l < m.n; ++l) squares += minkowski_dot(m, l, l);
  CHECK(validate_multiplier(m, squares, &why));

  // d = 2 has no spatial rotation planes; boost alone decides.
  FieldModel m2 = bose(2, 2, {Rational(1)});
  CHECK(validate_multiplier(m2, minkowski_dot(m2, 0, 1)));
}

TEST_CASE("json round trips") {
  FieldModel m = bose(3, 4, {Rational(1, 2), Rational(2)});
  m.sigma[0][1] = m.sigma[1][0] = -1;
  CHECK(model_from_json(model_to_json(m)) == m);

  ComplexRational half_i{Rational(0), Rational(1, 2)};
  MomentumDistribution g =
      build_weighted_structure_function(m, WeightList{{0, kOne}, {1, half_i}})
          .multiplied_by(minkowski_dot(m, 0, 2));
  std::string text = distribution_to_json(g);
  MomentumDistribution back = distribution_from_json(text);
  CHECK(back == g);
  CHECK(distribution_to_json(back) == text);

  MomentumDistribution w = build_free_two_point(bose(2, 4, {Rational(1)}));
  CHECK(distribution_from_json(distribution_to_json(w)) == w);

  CHECK_THROWS_AS(distribution_from_json("{\"schema\":\"other/9\"}"),
                  std::invalid_argument);
  CHECK_THROWS(distribution_from_json("not json"));
}
