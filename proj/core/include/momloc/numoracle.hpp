#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace momloc {

/// Minkowski point with signature (+,-,...): square() = t^2 - |x|^2.
struct SpacetimePoint {
  double t = 0;
  std::vector<double> x;

  double minkowski_square() const;
};

/// Value with an absolute error estimate (quadrature remainder plus
/// analytic tail bounds).
struct QuadratureResult {
  double value = 0;
  double error = 0;
};

/// The requested tolerance is unreachable; achieved() reports the best
/// error bound obtained before giving up.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved error bound " + std::to_string(achieved) + ")"),
        achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

/// The canonical smooth bump exp(-1/(1-x^2)) on (-1,1), normalised to unit
/// integral, rescaled as phi_eps(x) = phi(x/eps)/eps: even, smooth,
/// supported in [-eps, eps], integral one.
class Mollifier {
 public:
  explicit Mollifier(double epsilon);

  double epsilon() const { return epsilon_; }
  double value(double x) const;  // phi_eps(x)

  static double profile(double x);         // normalised bump on [-1,1]
  static double profile_second(double x);  // its second derivative

 private:
  double epsilon_;
};

/// Compactly supported spatial profile together with the bounds the
/// quadrature tails need: |f| vanishes outside [-radius, radius], l1_bound
/// >= integral of |f|, c2_bound >= integral of |f''|. scale is the smallest
/// feature length the quadrature must resolve (0 = the radius itself).
struct SpatialTestFunction {
  std::function<double(double)> f;
  double radius = 1;
  double l1_bound = 0;
  double c2_bound = 0;
  double scale = 0;
};

/// Translated and dilated copy of the canonical bump:
/// g(x) = amplitude * profile((x - center)/halfwidth); the L1 and
/// second-derivative bounds scale analytically.
SpatialTestFunction bump_test_function(double center, double halfwidth, double amplitude = 1);

/// Free-field commutator function in d = 2 by quadrature:
///   Delta(x) = -(1/2pi) Int dk sin(omega x^0 - k x^1)/omega,
///   omega = sqrt(k^2 + m^2).
/// The integral is cut at a frequency K with the tail resummed by two
/// integration-by-parts boundary corrections; the remaining tail is bounded
/// analytically and K grows until that bound is below tolerance/2. On the
/// light cone the phase derivative of the tail degenerates and the bound
/// cannot converge: AccuracyError. max_panel caps the panel width of the
/// Gauss-Legendre rule on [0, K] (0 = automatic).
QuadratureResult pauli_jordan_d2(double mass, const SpacetimePoint& x, double tolerance = 1e-8,
                                 double max_panel = 0);

/// Free-field commutator two-point function smeared with phi_eps in both
/// time arguments at times s and t and with g in the relative spatial
/// coordinate:
///   value = Int Delta(u, xi) psi_eps(u - (s - t)) g(xi) du dxi,
/// psi_eps the autocorrelation of phi_eps. Evaluated in momentum space,
///   value = -(1/pi) Int_0^inf sin(omega tau) phi_c(eps omega)^2 G_c(k)
///           / omega dk,   tau = s - t,
/// with phi_c and G_c the cosine transforms of the mollifier profile and of
/// g. At tau = 0 the integrand vanishes identically — the mollifier is
/// even, so coinciding smearing times annihilate the antisymmetric
/// commutator — and the result is exactly zero.
QuadratureResult mollified_time_zero_free_field(double mass, const Mollifier& phi,
                                                const SpatialTestFunction& g, double s = 0,
                                                double t = 0, double tolerance = 1e-8);

}  // namespace momloc
