#pragma once

#include "momloc/momdist.hpp"

namespace momloc {

/// Statistics-weighted exchange of slots j and j+1 (0-based, j in [0, n-2]):
/// per term, the atoms at the two slots swap places, the momentum components
/// of the two blocks are relabelled inside the polynomial factor, and the
/// coefficient picks up the sign sigma(kappa_j, kappa_{j+1}) read off the
/// term before the exchange. The map is an involution (sigma is symmetric
/// with entries +-1).
///
/// When one of the two slots carries no atom its species is undetermined;
/// that is fine when sigma is constant, otherwise std::invalid_argument.
MomentumDistribution sigma_weighted_exchange(const MomentumDistribution& dist, int j);

/// Commutator at the slot pair (j, j+1):
///   dist - sigma_weighted_exchange(dist, j),
/// canonicalized, so structurally equal terms cancel exactly.
MomentumDistribution commutator_at(const MomentumDistribution& dist, int j);

/// The commutator of the structure function at the slot pair (j, j+1),
/// built directly instead of by exchange: spectator slots l < j carry
/// species-summed backward shells, slots l > j+1 species-summed forward
/// shells, and the middle pair runs over all ordered species pairs
/// (alpha, beta) with the four-term bracket
///   + shell(-,alpha)(k_j)   * pv(beta)(k_{j+1})
///   + pv(alpha)(k_j)        * shell(+,beta)(k_{j+1})
///   - pv(beta)(k_j)         * shell(-,alpha)(k_{j+1})
///   - shell(+,beta)(k_j)    * pv(alpha)(k_{j+1}).
/// `reindexed` swaps the species roles in the two subtracted terms; both
/// variants canonicalize to the same distribution, and both equal
/// commutator_at(build_structure_function(model), j).
///
/// Defined for Bose statistics (all sigma entries +1); 4 * N^n terms.
MomentumDistribution structure_commutator_closed_form(const FieldModel& model, int j,
                                                      bool reindexed = false);

}  // namespace momloc
