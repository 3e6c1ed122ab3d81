#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "momloc/numoracle.hpp"

#include <cmath>
#include <vector>

using namespace momloc;

namespace {

SpacetimePoint pt(double t, double r) { return SpacetimePoint{t, {r}}; }

// Closed form in d = 2 inside the light cone: Delta(x) = -sgn(x^0) J_0(m s)/2
// with s = sqrt((x^0)^2 - (x^1)^2).
double bessel_reference(double mass, double t, double r) {
  const double s2 = t * t - r * r;
  REQUIRE(s2 > 0);
  return -0.5 * (t > 0 ? 1.0 : -1.0) * std::cyl_bessel_j(0.0, mass * std::sqrt(s2));
}

}  // namespace

TEST_CASE("pauli_jordan_d2: argument validation") {
  CHECK_THROWS_AS(pauli_jordan_d2(0.0, pt(1, 0)), std::invalid_argument);
  CHECK_THROWS_AS(pauli_jordan_d2(-1.0, pt(1, 0)), std::invalid_argument);
  CHECK_THROWS_AS(pauli_jordan_d2(1.0, pt(1, 0), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(pauli_jordan_d2(1.0, pt(1, 0), 1e-8, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(pauli_jordan_d2(1.0, SpacetimePoint{1.0, {}}), std::invalid_argument);
  CHECK_THROWS_AS(pauli_jordan_d2(1.0, SpacetimePoint{1.0, {0.5, 0.5}}), std::invalid_argument);
  const double nan = std::nan("");
  CHECK_THROWS_AS(pauli_jordan_d2(1.0, pt(nan, 0)), std::invalid_argument);
}

TEST_CASE("pauli_jordan_d2: vanishes at spacelike separation") {
  const auto res = pauli_jordan_d2(1.0, pt(0, 2));
  CHECK(std::abs(res.value) <= 1e-6);
  CHECK(res.error <= 1e-6);
}

TEST_CASE("pauli_jordan_d2: timelike axis point matches the Bessel closed form") {
  const auto res = pauli_jordan_d2(1.0, pt(2, 0));
  const double want = bessel_reference(1.0, 2, 0);
  CHECK(std::abs(res.value - want) <= 1e-4);
  CHECK(res.error <= 1e-6);
  // J_0(2)/2 is about 0.112: the value must be genuinely nonzero.
  CHECK(res.value < -0.1);
}

TEST_CASE("pauli_jordan_d2: generic timelike points match the Bessel closed form") {
  for (const auto& [t, r] : std::vector<std::pair<double, double>>{
           {2.5, 1.0}, {1.3, 0.2}, {-2.0, 0.7}, {3.1, -2.0}}) {
    const auto res = pauli_jordan_d2(1.0, pt(t, r));
    CHECK(std::abs(res.value - bessel_reference(1.0, t, r)) <= 1e-4);
  }
  // A heavier mass changes the oscillation scale.
  const auto heavy = pauli_jordan_d2(2.5, pt(2, 0.5));
  CHECK(std::abs(heavy.value - bessel_reference(2.5, 2, 0.5)) <= 1e-4);
}

TEST_CASE("pauli_jordan_d2: light-cone points fail with an accuracy error") {
  CHECK_THROWS_AS(pauli_jordan_d2(1.0, pt(0, 0)), AccuracyError);
  CHECK_THROWS_AS(pauli_jordan_d2(1.0, pt(1, 1)), AccuracyError);
  try {
    pauli_jordan_d2(1.0, pt(1, -1));
    FAIL("expected an accuracy error on the light cone");
  } catch (const AccuracyError& e) {
    CHECK(e.achieved() > 0);
    CHECK(std::string(e.what()).find("achieved") != std::string::npos);
  }
  // Just off the cone the tail converges in principle, but the cutoff an
  // honest bound demands is impractical; this must error out, not grind.
  CHECK_THROWS_AS(pauli_jordan_d2(1.0, pt(1, 0.99999)), AccuracyError);
}

TEST_CASE("pauli_jordan_d2: antisymmetric under time reflection") {
  for (const auto& [t, r] : std::vector<std::pair<double, double>>{
           {1.5, 0.4}, {0.7, 0.3}, {2.2, 1.9}, {0.4, 1.9}}) {
    const auto plus = pauli_jordan_d2(1.0, pt(t, r));
    const auto minus = pauli_jordan_d2(1.0, pt(-t, r));
    CHECK(std::abs(plus.value + minus.value) <= plus.error + minus.error + 1e-12);
  }
}

TEST_CASE("pauli_jordan_d2: ten spacelike points stay below 1e-6") {
  for (int i = 0; i < 10; ++i) {
    const double t = 0.15 * i;
    const double r = std::sqrt(t * t + 0.5 + 0.05 * i);
    const auto res = pauli_jordan_d2(1.0, pt(t, r));
    CAPTURE(t);
    CAPTURE(r);
    CHECK(std::abs(res.value) <= 1e-6);
  }
}

TEST_CASE("pauli_jordan_d2: halving the panel width moves the value less than the reported error") {
  const auto coarse = pauli_jordan_d2(1.0, pt(1.7, 0.6), 1e-8, 0.4);
  const auto fine = pauli_jordan_d2(1.0, pt(1.7, 0.6), 1e-8, 0.2);
  CHECK(std::abs(coarse.value - fine.value) <= coarse.error + 1e-15);
  CHECK(std::abs(fine.value - bessel_reference(1.0, 1.7, 0.6)) <= 1e-4);
}

TEST_CASE("pauli_jordan_d2: the reported error respects the tolerance") {
  const auto loose = pauli_jordan_d2(1.0, pt(1.2, 0.3), 1e-6);
  const auto tight = pauli_jordan_d2(1.0, pt(1.2, 0.3), 1e-10);
  CHECK(loose.error < 1e-6);
  CHECK(tight.error < 1e-10);
  CHECK(std::abs(loose.value - tight.value) <= loose.error + tight.error);
}

TEST_CASE("spacetime point: minkowski square uses the (+,-) signature") {
  CHECK(pt(2, 1).minkowski_square() == doctest::Approx(3.0));
  CHECK(pt(0, 2).minkowski_square() == doctest::Approx(-4.0));
  CHECK(SpacetimePoint{1.0, {0.5, 0.5}}.minkowski_square() == doctest::Approx(0.5));
}

TEST_CASE("mollifier: normalised even bump of the advertised width") {
  CHECK_THROWS_AS(Mollifier(0.0), std::invalid_argument);
  CHECK_THROWS_AS(Mollifier(-0.2), std::invalid_argument);

  const Mollifier phi(0.3);
  CHECK(phi.epsilon() == 0.3);
  CHECK(phi.value(0.31) == 0.0);
  CHECK(phi.value(-0.31) == 0.0);
  CHECK(phi.value(0.12) == phi.value(-0.12));
  CHECK(phi.value(0.0) > 0);

  // Unit integral, checked on a fine midpoint grid over the support.
  const int n = 20000;
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    const double x = -0.3 + 0.6 * (i + 0.5) / n;
    sum += phi.value(x) * 0.6 / n;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-8));

  // The profile's own normalisation.
  CHECK(Mollifier::profile(1.0) == 0.0);
  CHECK(Mollifier::profile(0.0) == doctest::Approx(std::exp(-1.0) / 0.4439938161680786));
}

TEST_CASE("bump_test_function: scaling of the support and bounds") {
  CHECK_THROWS_AS(bump_test_function(0, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(bump_test_function(0, -1, 1), std::invalid_argument);

  const auto g = bump_test_function(5, 1, 2);
  CHECK(g.radius == doctest::Approx(6.0));
  CHECK(g.f(5.0) == doctest::Approx(2 * Mollifier::profile(0.0)));
  CHECK(g.f(6.01) == 0.0);
  CHECK(g.f(3.99) == 0.0);
  CHECK(g.l1_bound == doctest::Approx(2.0));
  CHECK(g.c2_bound > 0);

  const auto narrow = bump_test_function(0, 0.5, 1);
  const auto wide = bump_test_function(0, 2.0, 1);
  CHECK(narrow.c2_bound > wide.c2_bound);
}

TEST_CASE("mollified_time_zero_free_field: argument validation") {
  const Mollifier phi(0.2);
  const auto g = bump_test_function(0, 1, 1);
  CHECK_THROWS_AS(mollified_time_zero_free_field(0.0, phi, g), std::invalid_argument);
  CHECK_THROWS_AS(mollified_time_zero_free_field(1.0, phi, g, 0, 0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(mollified_time_zero_free_field(1.0, phi, g, std::nan(""), 0), std::invalid_argument);

  SpatialTestFunction empty;
  CHECK_THROWS_AS(mollified_time_zero_free_field(1.0, phi, empty), std::invalid_argument);

  SpatialTestFunction no_bound = g;
  no_bound.c2_bound = 0;
  CHECK_THROWS_AS(mollified_time_zero_free_field(1.0, phi, no_bound, 0.1, 0), std::invalid_argument);

  // A tolerance the tail bound cannot reach with a practical cutoff.
  CHECK_THROWS_AS(mollified_time_zero_free_field(1.0, Mollifier(0.05), g, 0.1, 0, 1e-60),
                  AccuracyError);
}

TEST_CASE("mollified_time_zero_free_field: coinciding smearing times give exactly zero") {
  const auto g = bump_test_function(0, 1, 1);
  double prev = 1;
  for (double eps : {0.4, 0.2, 0.1, 0.05}) {
    const auto res = mollified_time_zero_free_field(1.0, Mollifier(eps), g);
    // Even mollifier against the antisymmetric commutator: zero identically,
    // not merely up to quadrature noise.
    CHECK(res.value == 0.0);
    CHECK(res.error == 0.0);
    CHECK(std::abs(res.value) <= prev);
    prev = std::abs(res.value);
  }
}

TEST_CASE("mollified_time_zero_free_field: zero test function gives zero") {
  const Mollifier phi(0.2);
  const auto res = mollified_time_zero_free_field(1.0, phi, bump_test_function(0, 1, 0), 0.3, 0.1);
  CHECK(res.value == 0.0);

  SpatialTestFunction zero;
  zero.f = [](double) { return 0.0; };
  zero.radius = 1;
  const auto res2 = mollified_time_zero_free_field(1.0, phi, zero, 0.3, 0.1);
  CHECK(res2.value == 0.0);
}

TEST_CASE("mollified_time_zero_free_field: depends on the smearing times through s - t only") {
  const auto g = bump_test_function(0, 1, 1);
  const Mollifier phi(0.1);
  // Dyadic times so both calls see bitwise-identical s - t.
  const auto a = mollified_time_zero_free_field(1.0, phi, g, 0.375, 0.125);
  const auto b = mollified_time_zero_free_field(1.0, phi, g, 0.25, 0.0);
  CHECK(a.value == b.value);
  CHECK(a.error == b.error);
}

TEST_CASE("mollified_time_zero_free_field: offset smearing times decay linearly with the width") {
  const auto g = bump_test_function(0, 1, 1);
  std::vector<double> values;
  std::vector<double> errors;
  for (double eps : {0.4, 0.2, 0.1, 0.05}) {
    const auto res = mollified_time_zero_free_field(1.0, Mollifier(eps), g, eps / 2, -eps / 2);
    values.push_back(res.value);
    errors.push_back(res.error);
  }
  // Smearing times a width apart probe the commutator at relative time eps,
  // where it behaves like -g(0) * eps: nonzero, negative, and shrinking by
  // about a factor two per halving.
  for (size_t i = 0; i < values.size(); ++i) {
    CHECK(values[i] < 0);
    CHECK(std::abs(values[i]) > 10 * errors[i]);
    if (i > 0) {
      CHECK(std::abs(values[i]) < std::abs(values[i - 1]));
      CHECK(std::abs(values[i - 1]) / std::abs(values[i]) == doctest::Approx(2.0).epsilon(0.3));
    }
  }
  const double slope =
      std::log2(std::abs(values.front()) / std::abs(values.back())) / (values.size() - 1);
  CHECK(slope == doctest::Approx(1.0).epsilon(0.3));
  CHECK(std::abs(values.back()) == doctest::Approx(0.0414).epsilon(0.2));
}

TEST_CASE("mollified_time_zero_free_field: spatially distant test function decouples") {
  const auto far = bump_test_function(5, 1, 1);
  const auto res = mollified_time_zero_free_field(1.0, Mollifier(0.2), far, 0.1, 0);
  // The commutator is supported inside the light cone; smearing reaches
  // relative times of at most 0.5, far short of the support at |xi| >= 4.
  CHECK(std::abs(res.value) <= 1e-7);
  CHECK(std::abs(res.value) <= res.error + 1e-9);
}

TEST_CASE("mollified_time_zero_free_field: narrow mollifier approaches the sharp commutator") {
  const auto g = bump_test_function(0, 0.5, 1);
  const auto mol = mollified_time_zero_free_field(1.0, Mollifier(0.05), g, 2.0, 0.0);

  // Independent position-space reference: pair g against the commutator at
  // relative time 2 using the oscillatory-quadrature oracle on a fine grid.
  const int n = 150;
  double ref = 0;
  for (int i = 0; i < n; ++i) {
    const double xi = -0.5 + 1.0 * (i + 0.5) / n;
    ref += g.f(xi) * pauli_jordan_d2(1.0, pt(2.0, xi), 1e-8).value / n;
  }
  CHECK(mol.value == doctest::Approx(ref).epsilon(0.01));
  CHECK(mol.value < -0.05);
}
