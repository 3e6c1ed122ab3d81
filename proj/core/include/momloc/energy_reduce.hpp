#pragma once

#include "momloc/momdist.hpp"
#include "momloc/rational_expr.hpp"

#include <stdexcept>

namespace momloc {

/// A term fell outside the exactly integrable atom algebra (for example a
/// propagator at both distinguished slots, or a slot the energy deltas
/// cannot resolve).
class UnsupportedTermError : public std::domain_error {
 public:
  explicit UnsupportedTermError(const std::string& what)
      : std::domain_error("unsupported term: " + what) {}
};

/// An on-shell substitution produced an identically vanishing propagator
/// denominator (defensive; unreachable for distinct energy symbols).
class SingularTermError : public std::domain_error {
 public:
  explicit SingularTermError(std::string den)
      : std::domain_error("singular term: substituted denominator vanishes identically: " + den),
        denominator_(std::move(den)) {}
  const std::string& denominator() const { return denominator_; }

 private:
  std::string denominator_;
};

/// Residual one-dimensional energy delta left over when both distinguished
/// slots carried on-shell deltas and the conservation delta was consumed:
///   delta(a + sign_j * omega_{j, species_j} + sign_j1 * omega_{j+1, species_j1}),
/// where the `a` part is present only when the model has spectator slots.
struct ResidualDelta {
  int sign_j = +1;
  int species_j = 0;
  int sign_j1 = +1;
  int species_j1 = 0;

  bool operator==(const ResidualDelta&) const = default;
  auto operator<=>(const ResidualDelta&) const = default;
};

/// One group of the reduced double energy integral: the atoms of the
/// untouched slots (always empty at the two distinguished ones), the spatial
/// part of the conservation delta if present, an optional residual energy
/// delta, and the accumulated coefficient — a complex rational expression in
/// the on-shell energies omega_{l,s}, the spectator-energy sum a, and any
/// momentum components left by polynomial factors.
struct ReducedTerm {
  std::vector<std::optional<Atom>> spectators;
  bool spatial_conservation = false;
  std::optional<ResidualDelta> residual;
  ComplexExpr coefficient;
};

/// Canonical sum of reduced groups for one distinguished slot pair (j, j+1):
/// groups are sorted by (spectators, conservation, residual) and merged,
/// zero coefficients dropped. The symbol a is opaque here; a numeric
/// evaluation must bind it to the sum of the spectator energies.
class ReducedExpr {
 public:
  ReducedExpr(FieldModel model, int j);
  ReducedExpr(FieldModel model, int j, std::vector<ReducedTerm> groups);

  const FieldModel& model() const { return model_; }
  int j() const { return j_; }
  const std::vector<ReducedTerm>& groups() const { return groups_; }
  bool is_zero() const { return groups_.empty(); }
  std::size_t size() const { return groups_.size(); }

  ReducedExpr operator+(const ReducedExpr& o) const;
  ReducedExpr operator-() const;
  ReducedExpr scaled(const ComplexRational& c) const;

  /// Image under the exchange of the two distinguished momentum blocks:
  /// omega_{j,s} <-> omega_{j+1,s} for every species, k_j^mu <-> k_{j+1}^mu,
  /// and the residual-delta roles swapped. Spectators are untouched.
  ReducedExpr swapped_pair() const;

  bool operator==(const ReducedExpr& o) const;

  std::string str() const;

 private:
  void canonicalize();
  FieldModel model_;
  int j_ = 0;
  std::vector<ReducedTerm> groups_;
};

/// Integrates every term over the two energies k_j^0 and k_{j+1}^0, exactly:
/// first the on-shell delta at one distinguished slot (k^0 -> +-omega with
/// Jacobian 1/(2 omega)), then the energy part of the conservation delta,
/// which fixes the other distinguished energy to -(a + (+-omega)). A
/// propagator at the other slot turns into the denominator
/// ((omega +- a)^2 - omega'^2); a second on-shell delta leaves a residual
/// energy delta with weight 1/(4 omega omega'); polynomial factors receive
/// the on-shell substitutions. Terms the delta algebra cannot resolve throw
/// UnsupportedTermError.
ReducedExpr reduce_double_integral(const MomentumDistribution& dist, int j);

/// Reduction of the free two-point commutator: coefficient
/// 1/(2 omega_1) - 1/(2 omega_2) on the spatial conservation delta, with no
/// a symbol (there are no spectator slots).
ReducedExpr reduce_free_two_point(const FieldModel& model, int species = 0);

/// Substitutes identifications between on-shell energy symbols that the
/// support of the prefactor forces. Accepted only when the model has exactly
/// the two distinguished slots (n = 2), every group carries the spatial
/// conservation delta delta(k_vec_1 + k_vec_2) — which forces
/// |k_vec_1| = |k_vec_2| and hence equal energies of equal-mass species —
/// and no residual energy delta. Anything else: std::invalid_argument.
ReducedExpr apply_support_constraints(const ReducedExpr& r,
                                      const std::vector<std::pair<Symbol, Symbol>>& identifications);

}  // namespace momloc
