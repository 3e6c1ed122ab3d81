#pragma once

#include "momloc/energy_reduce.hpp"

#include <complex>
#include <cstdint>
#include <functional>

namespace momloc {

/// Knobs of the numeric polynomiality test. Defaults are deliberately
/// generous: coefficients reaching this layer are exact, so the only noise
/// is floating-point rounding.
struct NumericConfig {
  int rays = 16;             // random ray directions per sweep
  int max_degree = 8;        // highest polynomial degree certified
  double step = 0.125;       // finite-difference step along a ray
  double tolerance = 1e-9;   // relative to the largest sampled magnitude
  int draws = 5;             // generic draws of the remaining variables
  int max_retries = 100;     // singular-point resampling budget per ray
  std::uint64_t seed = 20260816;
};

/// Outcome of the locality decision.
struct LocalityVerdict {
  enum class Kind { Zero, PolynomialOfDegree, NonPolynomial, Undecided };

  /// Reproducible description of a failed ray sweep.
  struct Witness {
    std::vector<double> direction;
    std::vector<double> base;
    double step = 0;
    int max_order = 0;     // finite-difference orders tested up to this
    int failing_order = 0; // order whose differences stay large
    double residual = 0;   // failing difference relative to the sampled scale
  };

  Kind kind = Kind::Undecided;
  int degree = 0;                  // for PolynomialOfDegree
  std::optional<Witness> witness;  // for NonPolynomial found numerically
  std::string reason;              // for Undecided and non-numeric NonPolynomial

  static LocalityVerdict zero() { return {Kind::Zero, 0, std::nullopt, {}}; }
  static LocalityVerdict polynomial(int degree) {
    return {Kind::PolynomialOfDegree, degree, std::nullopt, {}};
  }
  static LocalityVerdict non_polynomial(Witness w) {
    return {Kind::NonPolynomial, 0, std::move(w), {}};
  }
  static LocalityVerdict non_polynomial_reason(std::string why) {
    return {Kind::NonPolynomial, 0, std::nullopt, std::move(why)};
  }
  static LocalityVerdict undecided(std::string why) {
    return {Kind::Undecided, 0, std::nullopt, std::move(why)};
  }

  bool is_zero() const { return kind == Kind::Zero; }
  bool is_local() const { return kind == Kind::Zero || kind == Kind::PolynomialOfDegree; }
  std::string str() const;
};

/// Symbolic layer: certifies exactly the zero case. Anything nonzero is
/// Undecided here — the energies are algebraic, not rational, functions of
/// the relative momentum, so nonzero coefficients go to the numeric test.
LocalityVerdict test_locality_symbolic(const ReducedExpr& r);

/// Finite-difference polynomiality test of `evaluator` on rays in R^dim:
/// per ray, forward differences up to order max_degree + 1 of samples
/// base + i*step*direction; the minimal degree whose higher differences all
/// fall below tolerance * scale wins. Rays hitting singular points (the
/// evaluator throws SingularPointError) are redrawn up to max_retries times;
/// Zero when every sample is exactly zero; Undecided when no usable ray
/// remains.
LocalityVerdict test_polynomiality_numeric(
    const std::function<double(const std::vector<double>&)>& evaluator, int dim,
    const NumericConfig& config = {});

/// Numeric bindings of the outer variables of a ReducedExpr. Spatial vectors
/// have d-1 components; entries of spectator_k / free_energies at the two
/// distinguished slots are ignored. free_energies supplies k_l^0 for
/// spectator slots whose group carries no on-shell atom there. When groups
/// carry the spatial conservation delta, on-support evaluation requires
/// q_plus = -(1/2) * sum of the spectator spatial momenta.
struct ReducedBindings {
  std::vector<double> q_plus;
  std::vector<double> q_minus;
  std::vector<std::vector<double>> spectator_k;
  std::vector<double> free_energies;
};

/// Sum of the non-residual group coefficients evaluated at the bindings
/// (residual-delta groups are supported on measure-zero energy surfaces and
/// are reported by decide_locality instead). On-shell energies are computed
/// as omega = sqrt(|k_vec|^2 + m^2); the spectator-energy sum a is assembled
/// per group from its shell atoms and the supplied free energies. Throws
/// SingularPointError near vanishing denominators.
std::complex<double> evaluate_reduced(const ReducedExpr& r, const ReducedBindings& b,
                                      double singular_rel = 1e-6);

/// Full decision: symbolic zero first; then residual-delta groups — their
/// coefficients restricted to the delta's support must vanish, anything else
/// is a non-smooth layer, hence NonPolynomial; finally the finite-difference
/// test in q_minus of every remaining group coefficient (real and imaginary
/// parts, `draws` generic draws of the outer variables each). A coefficient
/// that is symbolically nonzero but samples to exactly zero is reported
/// Undecided rather than silently accepted.
LocalityVerdict decide_locality(const ReducedExpr& r, const NumericConfig& config = {});

}  // namespace momloc
