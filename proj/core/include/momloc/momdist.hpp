#pragma once

#include "momloc/rational_expr.hpp"

#include <optional>
#include <string>
#include <vector>

namespace momloc {

/// Field content of an n-point function: spacetime dimension d (metric
/// +,-,...,-), a finite list of species with masses, and the statistics
/// signs sigma[a][b] = +-1 (symmetric) weighting the exchange of species a
/// and b.
///
/// Mass positivity follows the support requirements of the two-variable
/// energy integral: strictly positive masses for d in {2,3}, non-negative
/// for d >= 4.
struct FieldModel {
  int n = 2;          // number of momentum slots
  int d = 4;          // spacetime dimension
  std::vector<Rational> masses;          // one per species
  std::vector<std::vector<int>> sigma;   // species x species, entries +-1

  int species_count() const { return static_cast<int>(masses.size()); }
  const Rational& mass(int species) const;
  int sigma_sign(int a, int b) const;
  /// True when every sigma entry equals sigma[0][0].
  bool sigma_constant() const;

  /// Throws std::invalid_argument when any structural rule is violated.
  void validate() const;

  bool operator==(const FieldModel&) const = default;
};

/// Convenience: Bose statistics (all sigma entries +1).
FieldModel make_bose_model(int n, int d, std::vector<Rational> masses);

// ---------------------------------------------------------------------------
// Symbols of the momentum problem. Slots and species are 0-based in code and
// 1-based in symbol names: omega_sym(0, 0) <-> "om1_1" (kind Energy),
// k_sym(0, 2) <-> "k1_2" (kind Momentum, component index mu is 0-based with
// mu = 0 the energy component), mass_sym(0) <-> "m1" (kind Mass), and
// a_sym() <-> "a" (kind EnergySum), the sum of the spectator energies.

Symbol omega_sym(int slot, int species);
Symbol k_sym(int slot, int mu);
Symbol mass_sym(int species);
Symbol a_sym();

struct OmegaInfo {
  int slot;
  int species;
  bool operator==(const OmegaInfo&) const = default;
};

struct MomentumInfo {
  int slot;
  int mu;
  bool operator==(const MomentumInfo&) const = default;
};

/// Inverse lookups; nullopt when the symbol is not of the expected shape.
std::optional<OmegaInfo> omega_info(const Symbol& s);
std::optional<MomentumInfo> momentum_info(const Symbol& s);
std::optional<int> mass_info(const Symbol& s);

/// Re-interns a symbol from its name, classifying the kind by the naming
/// scheme above (used when reading serialized expressions).
Symbol symbol_from_name(const std::string& name);

// ---------------------------------------------------------------------------
// Distributions

/// One distributional factor attached to a slot: either an on-shell delta
/// theta(sign k0) delta(k^2 - m^2) or a principal-value propagator
/// 1 / (k^2 - m^2), both for a fixed species.
struct Atom {
  enum class Type { OnShellDelta, Propagator };
  Type type = Type::OnShellDelta;
  int sign = +1;    // +1 or -1 for OnShellDelta; ignored (0) for Propagator
  int species = 0;  // 0-based

  static Atom shell(int sign, int species) { return Atom{Type::OnShellDelta, sign, species}; }
  static Atom propagator(int species) { return Atom{Type::Propagator, 0, species}; }

  bool operator==(const Atom&) const = default;
  auto operator<=>(const Atom&) const = default;
  std::string str(int slot) const;
};

/// One term: coeff * poly(k components) * prod_l atom_l(k_l) * [delta(sum k)].
/// Slots without an atom are constrained only by the conservation delta.
struct Term {
  ComplexRational coeff{Rational(1), Rational(0)};
  Polynomial poly{Rational(1)};             // in k_sym components
  std::vector<std::optional<Atom>> slots;   // size model.n
  bool conservation = true;

  std::string str() const;
};

/// Finite sum of terms over a fixed field model, kept canonical: terms are
/// sorted by structural key (slots, conservation, poly) and merged, and
/// zero-coefficient terms are dropped.
class MomentumDistribution {
 public:
  explicit MomentumDistribution(FieldModel model);
  MomentumDistribution(FieldModel model, std::vector<Term> terms);

  const FieldModel& model() const { return model_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  MomentumDistribution operator-() const;
  MomentumDistribution operator+(const MomentumDistribution& o) const;
  MomentumDistribution operator-(const MomentumDistribution& o) const;
  MomentumDistribution scaled(const ComplexRational& c) const;

  /// Multiplies every term's polynomial factor (momentum components only).
  MomentumDistribution multiplied_by(const Polynomial& p) const;

  bool operator==(const MomentumDistribution& o) const;

  std::string str() const;

 private:
  void canonicalize();
  FieldModel model_;
  std::vector<Term> terms_;
};

// ---------------------------------------------------------------------------
// Builders

/// Two-point function of the free field of species `species`:
/// delta^-_m(k_1) delta(k_1 + k_2) (slot 2 carries no atom).
MomentumDistribution build_free_two_point(const FieldModel& model, int species = 0);

/// Structure-function n-point distribution: sum over j = 1..n and over all
/// species assignments of
///   prod_{l<j} delta^-(k_l) * PV(k_j) * prod_{l>j} delta^+(k_l) * delta(sum k).
/// n * N^n terms in total.
MomentumDistribution build_structure_function(const FieldModel& model);

/// Weighted variant: slot l sums only over `weights[l]`, a list of
/// (species, complex weight) pairs, and each term's coefficient is the
/// product of its slots' weights. The single-list overload replicates one
/// list across slots (the configuration in which locality holds).
using WeightList = std::vector<std::pair<int, ComplexRational>>;
MomentumDistribution build_weighted_structure_function(const FieldModel& model,
                                                       const std::vector<WeightList>& per_slot);
MomentumDistribution build_weighted_structure_function(const FieldModel& model,
                                                       const WeightList& shared);

// ---------------------------------------------------------------------------
// Checks

/// True when the term structure certifies, for every r in 2..n, that the
/// support of the term forces sum_{l>=r} k_l into the closed forward cone:
/// either all slots >= r carry delta^+ (and no propagator sits there), or
/// the term has the conservation delta and all slots < r carry delta^-.
/// Polynomial factors are irrelevant to support.
bool check_spectral_support(const MomentumDistribution& dist);

/// Validates a polynomial multiplier in the k components of `model`:
///   - symmetric under exchanging adjacent momentum blocks l <-> l+1,
///   - Lorentz invariant.
/// Invariance is checked as an exact polynomial identity at one rational
/// group element per generating plane: a boost with cosh = 5/4, sinh = 3/4
/// in the (0,1) plane and rotations with cos = 3/5, sin = 4/5 in adjacent
/// spatial planes. Each such element generates a dense (respectively
/// unbounded) subgroup of its one-parameter group, so exact invariance at it
/// already forces invariance under the whole connected group.
bool validate_multiplier(const FieldModel& model, const Polynomial& p, std::string* reason = nullptr);

/// Minkowski product of momentum blocks l and l' as a polynomial,
/// k_l . k_l' = k_l0 k_l'0 - sum_i k_li k_l'i.
Polynomial minkowski_dot(const FieldModel& model, int slot_a, int slot_b);

// ---------------------------------------------------------------------------
// Serialization (JSON text; schema "momloc-dist/1")

std::string distribution_to_json(const MomentumDistribution& dist);
MomentumDistribution distribution_from_json(const std::string& text);
std::string model_to_json(const FieldModel& model);
FieldModel model_from_json(const std::string& text);

}  // namespace momloc
