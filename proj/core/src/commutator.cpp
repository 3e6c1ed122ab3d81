#include "momloc/commutator.hpp"

#include <stdexcept>

namespace momloc {

namespace {

void check_slot_pair(const FieldModel& model, int j) {
  if (j < 0 || j + 1 >= model.n)
    throw std::invalid_argument("commutator: slot pair index out of range");
}

}  // namespace

MomentumDistribution sigma_weighted_exchange(const MomentumDistribution& dist, int j) {
  const FieldModel& model = dist.model();
  check_slot_pair(model, j);

  std::vector<std::pair<Symbol, Symbol>> block;
  for (int mu = 0; mu < model.d; ++mu) block.push_back({k_sym(j, mu), k_sym(j + 1, mu)});

  std::vector<Term> out;
  out.reserve(dist.terms().size());
  for (const Term& t : dist.terms()) {
    const auto& left = t.slots[static_cast<std::size_t>(j)];
    const auto& right = t.slots[static_cast<std::size_t>(j + 1)];
    int sign;
    if (left && right) {
      sign = model.sigma_sign(left->species, right->species);
    } else if (model.sigma_constant()) {
      sign = model.sigma_sign(0, 0);
    } else {
      throw std::invalid_argument(
          "sigma_weighted_exchange: slot without atom leaves the species "
          "undetermined and sigma is not constant");
    }
    Term e = t;
    std::swap(e.slots[static_cast<std::size_t>(j)], e.slots[static_cast<std::size_t>(j + 1)]);
    e.poly = t.poly.swap_pairs(block);
    e.coeff = t.coeff * ComplexRational{Rational(sign), Rational(0)};
    out.push_back(std::move(e));
  }
  return MomentumDistribution(model, std::move(out));
}

MomentumDistribution commutator_at(const MomentumDistribution& dist, int j) {
  return dist - sigma_weighted_exchange(dist, j);
}

MomentumDistribution structure_commutator_closed_form(const FieldModel& model, int j,
                                                      bool reindexed) {
  model.validate();
  if (model.n < 3)
    throw std::invalid_argument("structure functions are defined for n >= 3");
  check_slot_pair(model, j);
  for (const auto& row : model.sigma)
    for (int s : row)
      if (s != 1)
        throw std::invalid_argument(
            "structure_commutator_closed_form: defined for Bose statistics");

  const int n = model.n;
  const int N = model.species_count();
  std::vector<int> spectators;  // slot indices carrying species-summed shells
  for (int l = 0; l < n; ++l)
    if (l != j && l != j + 1) spectators.push_back(l);

  std::vector<Term> terms;
  std::vector<int> idx(spectators.size(), 0);
  while (true) {
    for (int alpha = 0; alpha < N; ++alpha) {
      for (int beta = 0; beta < N; ++beta) {
        // Four bracket terms for the ordered pair (alpha, beta).
        struct BracketTerm {
          int sign;
          Atom at_j;
          Atom at_j1;
        };
        const BracketTerm bracket[4] = {
            {+1, Atom::shell(-1, alpha), Atom::propagator(beta)},
            {+1, Atom::propagator(alpha), Atom::shell(+1, beta)},
            reindexed ? BracketTerm{-1, Atom::propagator(alpha), Atom::shell(-1, beta)}
                      : BracketTerm{-1, Atom::propagator(beta), Atom::shell(-1, alpha)},
            reindexed ? BracketTerm{-1, Atom::shell(+1, alpha), Atom::propagator(beta)}
                      : BracketTerm{-1, Atom::shell(+1, beta), Atom::propagator(alpha)},
        };
        for (const BracketTerm& b : bracket) {
          Term t;
          t.coeff = ComplexRational{Rational(b.sign), Rational(0)};
          t.slots.resize(static_cast<std::size_t>(n));
          for (std::size_t s = 0; s < spectators.size(); ++s) {
            const int l = spectators[s];
            t.slots[static_cast<std::size_t>(l)] =
                Atom::shell(l < j ? -1 : +1, idx[s]);
          }
          t.slots[static_cast<std::size_t>(j)] = b.at_j;
          t.slots[static_cast<std::size_t>(j + 1)] = b.at_j1;
          t.conservation = true;
          terms.push_back(std::move(t));
        }
      }
    }
    if (spectators.empty()) break;
    std::size_t s = 0;
    while (s < idx.size() && ++idx[s] == N) {
      idx[s] = 0;
      ++s;
    }
    if (s == idx.size()) break;
  }
  return MomentumDistribution(model, std::move(terms));
}

}  // namespace momloc
