#include "momloc/energy_reduce.hpp"

#include "momloc/commutator.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace momloc {

namespace {

std::strong_ordering atom_opt_cmp(const std::optional<Atom>& x, const std::optional<Atom>& y) {
  if (x.has_value() != y.has_value())
    return x.has_value() ? std::strong_ordering::greater : std::strong_ordering::less;
  if (!x) return std::strong_ordering::equal;
  return *x <=> *y;
}

std::strong_ordering residual_cmp(const std::optional<ResidualDelta>& x,
                                  const std::optional<ResidualDelta>& y) {
  if (x.has_value() != y.has_value())
    return x.has_value() ? std::strong_ordering::greater : std::strong_ordering::less;
  if (!x) return std::strong_ordering::equal;
  return *x <=> *y;
}

std::strong_ordering group_key_cmp(const ReducedTerm& a, const ReducedTerm& b) {
  for (std::size_t i = 0; i < std::min(a.spectators.size(), b.spectators.size()); ++i)
    if (auto c = atom_opt_cmp(a.spectators[i], b.spectators[i]); c != 0) return c;
  if (a.spectators.size() != b.spectators.size())
    return a.spectators.size() <=> b.spectators.size();
  if (a.spatial_conservation != b.spatial_conservation)
    return a.spatial_conservation ? std::strong_ordering::greater : std::strong_ordering::less;
  return residual_cmp(a.residual, b.residual);
}

void validate_group(const FieldModel& model, int j, const ReducedTerm& g) {
  if (g.spectators.size() != static_cast<std::size_t>(model.n))
    throw std::invalid_argument("ReducedExpr: spectator slot count does not match the model");
  if (g.spectators[static_cast<std::size_t>(j)] ||
      g.spectators[static_cast<std::size_t>(j + 1)])
    throw std::invalid_argument("ReducedExpr: distinguished slots must carry no atom");
  for (const auto& atom : g.spectators) {
    if (!atom) continue;
    if (atom->species < 0 || atom->species >= model.species_count())
      throw std::invalid_argument("ReducedExpr: species out of range");
  }
  if (g.residual) {
    if (!g.spatial_conservation)
      throw std::invalid_argument(
          "ReducedExpr: a residual energy delta requires the conservation delta");
    const ResidualDelta& r = *g.residual;
    if ((r.sign_j != 1 && r.sign_j != -1) || (r.sign_j1 != 1 && r.sign_j1 != -1))
      throw std::invalid_argument("ReducedExpr: residual delta signs must be +-1");
    if (r.species_j < 0 || r.species_j >= model.species_count() || r.species_j1 < 0 ||
        r.species_j1 >= model.species_count())
      throw std::invalid_argument("ReducedExpr: residual delta species out of range");
  }
}

}  // namespace

ReducedExpr::ReducedExpr(FieldModel model, int j) : model_(std::move(model)), j_(j) {
  model_.validate();
  if (j_ < 0 || j_ + 1 >= model_.n)
    throw std::invalid_argument("ReducedExpr: slot pair index out of range");
}

ReducedExpr::ReducedExpr(FieldModel model, int j, std::vector<ReducedTerm> groups)
    : model_(std::move(model)), j_(j), groups_(std::move(groups)) {
  model_.validate();
  if (j_ < 0 || j_ + 1 >= model_.n)
    throw std::invalid_argument("ReducedExpr: slot pair index out of range");
  canonicalize();
}

void ReducedExpr::canonicalize() {
  for (const ReducedTerm& g : groups_) validate_group(model_, j_, g);
  std::erase_if(groups_, [](const ReducedTerm& g) { return g.coefficient.is_zero(); });
  std::sort(groups_.begin(), groups_.end(),
            [](const ReducedTerm& a, const ReducedTerm& b) { return group_key_cmp(a, b) < 0; });
  std::vector<ReducedTerm> merged;
  for (ReducedTerm& g : groups_) {
    if (!merged.empty() && group_key_cmp(merged.back(), g) == 0) {
      merged.back().coefficient = merged.back().coefficient + g.coefficient;
    } else {
      merged.push_back(std::move(g));
    }
  }
  std::erase_if(merged, [](const ReducedTerm& g) { return g.coefficient.is_zero(); });
  groups_ = std::move(merged);
}

ReducedExpr ReducedExpr::operator+(const ReducedExpr& o) const {
  if (!(model_ == o.model_) || j_ != o.j_)
    throw std::invalid_argument("ReducedExpr: cannot add over different models or slot pairs");
  std::vector<ReducedTerm> gs = groups_;
  gs.insert(gs.end(), o.groups_.begin(), o.groups_.end());
  return ReducedExpr(model_, j_, std::move(gs));
}

ReducedExpr ReducedExpr::operator-() const {
  return scaled(ComplexRational{Rational(-1), Rational(0)});
}

ReducedExpr ReducedExpr::scaled(const ComplexRational& c) const {
  std::vector<ReducedTerm> gs = groups_;
  ComplexExpr s = ComplexExpr::scalar(c);
  for (ReducedTerm& g : gs) g.coefficient = g.coefficient * s;
  return ReducedExpr(model_, j_, std::move(gs));
}

ReducedExpr ReducedExpr::swapped_pair() const {
  std::vector<std::pair<Symbol, Symbol>> pairs;
  for (int s = 0; s < model_.species_count(); ++s)
    pairs.push_back({omega_sym(j_, s), omega_sym(j_ + 1, s)});
  for (int mu = 0; mu < model_.d; ++mu) pairs.push_back({k_sym(j_, mu), k_sym(j_ + 1, mu)});

  std::vector<ReducedTerm> gs = groups_;
  for (ReducedTerm& g : gs) {
    g.coefficient = g.coefficient.swap_pairs(pairs);
    if (g.residual)
      g.residual = ResidualDelta{g.residual->sign_j1, g.residual->species_j1,
                                 g.residual->sign_j, g.residual->species_j};
  }
  return ReducedExpr(model_, j_, std::move(gs));
}

bool ReducedExpr::operator==(const ReducedExpr& o) const {
  if (!(model_ == o.model_) || j_ != o.j_ || groups_.size() != o.groups_.size()) return false;
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    const ReducedTerm& a = groups_[i];
    const ReducedTerm& b = o.groups_[i];
    if (group_key_cmp(a, b) != 0 || !(a.coefficient == b.coefficient)) return false;
  }
  return true;
}

std::string ReducedExpr::str() const {
  if (groups_.empty()) return "0";
  std::ostringstream out;
  const bool has_spectators = model_.n > 2;
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    const ReducedTerm& g = groups_[i];
    if (i) out << "\n";
    out << "[";
    bool first = true;
    for (std::size_t l = 0; l < g.spectators.size(); ++l) {
      if (!g.spectators[l]) continue;
      if (!first) out << " ";
      out << g.spectators[l]->str(static_cast<int>(l));
      first = false;
    }
    if (g.spatial_conservation) {
      if (!first) out << " ";
      out << "d(sum k_vec)";
      first = false;
    }
    if (g.residual) {
      const ResidualDelta& r = *g.residual;
      out << " d(";
      if (has_spectators) out << "a ";
      out << (r.sign_j > 0 ? (has_spectators ? "+ " : "") : "- ")
          << omega_sym(j_, r.species_j).name() << " "
          << (r.sign_j1 > 0 ? "+ " : "- ") << omega_sym(j_ + 1, r.species_j1).name() << ")";
    }
    out << "] * " << g.coefficient.str();
  }
  return out.str();
}

namespace {

struct GroupKey {
  std::vector<std::optional<Atom>> spectators;
  bool spatial_conservation = false;
  std::optional<ResidualDelta> residual;

  bool operator<(const GroupKey& o) const {
    for (std::size_t i = 0; i < std::min(spectators.size(), o.spectators.size()); ++i)
      if (auto c = atom_opt_cmp(spectators[i], o.spectators[i]); c != 0) return c < 0;
    if (spectators.size() != o.spectators.size()) return spectators.size() < o.spectators.size();
    if (spatial_conservation != o.spatial_conservation) return !spatial_conservation;
    return residual_cmp(residual, o.residual) < 0;
  }
};

}  // namespace

ReducedExpr reduce_double_integral(const MomentumDistribution& dist, int j) {
  const FieldModel& model = dist.model();
  if (j < 0 || j + 1 >= model.n)
    throw std::invalid_argument("reduce_double_integral: slot pair index out of range");

  const bool has_spectators = model.n > 2;
  const Polynomial a_part =
      has_spectators ? Polynomial::variable(a_sym()) : Polynomial();

  // Group -> (species at j, species at j+1) -> accumulated coefficient.
  // Accumulating per species cluster keeps the four members of each
  // cancelling bracket adjacent, so sums collapse early.
  std::map<GroupKey, std::map<std::pair<int, int>, ComplexExpr>> accum;

  for (const Term& t : dist.terms()) {
    const auto& left = t.slots[static_cast<std::size_t>(j)];
    const auto& right = t.slots[static_cast<std::size_t>(j + 1)];

    const bool left_shell = left && left->type == Atom::Type::OnShellDelta;
    const bool right_shell = right && right->type == Atom::Type::OnShellDelta;
    const bool left_prop = left && left->type == Atom::Type::Propagator;
    const bool right_prop = right && right->type == Atom::Type::Propagator;

    GroupKey key;
    key.spectators = t.slots;
    key.spectators[static_cast<std::size_t>(j)] = std::nullopt;
    key.spectators[static_cast<std::size_t>(j + 1)] = std::nullopt;
    key.spatial_conservation = t.conservation;

    Polynomial sub_j, sub_j1;   // on-shell values of k_j^0, k_{j+1}^0
    RationalExpr base;

    if (left_shell && right_shell) {
      const Polynomial x = Polynomial::variable(omega_sym(j, left->species));
      const Polynomial y = Polynomial::variable(omega_sym(j + 1, right->species));
      sub_j = Rational(left->sign) * x;
      sub_j1 = Rational(right->sign) * y;
      base = RationalExpr::from_factored(Polynomial(Rational(1)),
                                         {Rational(2) * x, Rational(2) * y});
      if (t.conservation)
        key.residual = ResidualDelta{left->sign, left->species, right->sign, right->species};
    } else if (left_shell && right_prop) {
      if (!t.conservation)
        throw UnsupportedTermError("a propagator needs the conservation delta: " + t.str());
      const Polynomial x = Polynomial::variable(omega_sym(j, left->species));
      const Polynomial y = Polynomial::variable(omega_sym(j + 1, right->species));
      sub_j = Rational(left->sign) * x;
      sub_j1 = -(a_part + sub_j);
      Polynomial den = sub_j1 * sub_j1 - y * y;
      if (den.is_zero()) throw SingularTermError(den.str());
      base = RationalExpr::from_factored(Polynomial(Rational(1)), {Rational(2) * x, den});
    } else if (left_prop && right_shell) {
      if (!t.conservation)
        throw UnsupportedTermError("a propagator needs the conservation delta: " + t.str());
      const Polynomial x = Polynomial::variable(omega_sym(j, left->species));
      const Polynomial y = Polynomial::variable(omega_sym(j + 1, right->species));
      sub_j1 = Rational(right->sign) * y;
      sub_j = -(a_part + sub_j1);
      Polynomial den = sub_j * sub_j - x * x;
      if (den.is_zero()) throw SingularTermError(den.str());
      base = RationalExpr::from_factored(Polynomial(Rational(1)), {Rational(2) * y, den});
    } else if (left_shell && !right) {
      if (!t.conservation)
        throw UnsupportedTermError("an unconstrained energy integral diverges: " + t.str());
      const Polynomial x = Polynomial::variable(omega_sym(j, left->species));
      sub_j = Rational(left->sign) * x;
      sub_j1 = -(a_part + sub_j);
      base = RationalExpr::from_factored(Polynomial(Rational(1)), {Rational(2) * x});
    } else if (!left && right_shell) {
      if (!t.conservation)
        throw UnsupportedTermError("an unconstrained energy integral diverges: " + t.str());
      const Polynomial y = Polynomial::variable(omega_sym(j + 1, right->species));
      sub_j1 = Rational(right->sign) * y;
      sub_j = -(a_part + sub_j1);
      base = RationalExpr::from_factored(Polynomial(Rational(1)), {Rational(2) * y});
    } else if (left_prop && right_prop) {
      throw UnsupportedTermError("propagators at both distinguished slots: " + t.str());
    } else {
      throw UnsupportedTermError(
          "the energy deltas cannot resolve the distinguished slots: " + t.str());
    }

    std::map<Symbol, Polynomial> subs;
    subs[k_sym(j, 0)] = sub_j;
    subs[k_sym(j + 1, 0)] = sub_j1;
    RationalExpr weight = RationalExpr(t.poly.substitute(subs)) * base;

    ComplexExpr contrib{RationalExpr(Polynomial(t.coeff.re)) * weight,
                        RationalExpr(Polynomial(t.coeff.im)) * weight};
    std::pair<int, int> cluster{left ? left->species : -1, right ? right->species : -1};
    auto& cell = accum[key][cluster];
    cell = cell + contrib;
  }

  std::vector<ReducedTerm> groups;
  for (auto& [key, clusters] : accum) {
    ComplexExpr total;
    for (auto& [cluster, coeff] : clusters) total = total + coeff;
    if (total.is_zero()) continue;
    ReducedTerm g;
    g.spectators = key.spectators;
    g.spatial_conservation = key.spatial_conservation;
    g.residual = key.residual;
    g.coefficient = std::move(total);
    groups.push_back(std::move(g));
  }
  return ReducedExpr(model, j, std::move(groups));
}

ReducedExpr reduce_free_two_point(const FieldModel& model, int species) {
  return reduce_double_integral(commutator_at(build_free_two_point(model, species), 0), 0);
}

ReducedExpr apply_support_constraints(
    const ReducedExpr& r, const std::vector<std::pair<Symbol, Symbol>>& identifications) {
  if (identifications.empty()) return r;
  const FieldModel& model = r.model();
  if (model.n != 2)
    throw std::invalid_argument(
        "apply_support_constraints: only the two-slot conservation delta forces "
        "energy identifications");
  for (const ReducedTerm& g : r.groups()) {
    if (!g.spatial_conservation)
      throw std::invalid_argument(
          "apply_support_constraints: a group lacks the spatial conservation delta");
    if (g.residual)
      throw std::invalid_argument(
          "apply_support_constraints: not applicable to residual energy deltas");
  }

  std::map<Symbol, RationalExpr> bindings;
  for (const auto& [from, to] : identifications) {
    auto fi = omega_info(from);
    auto ti = omega_info(to);
    if (!fi || !ti)
      throw std::invalid_argument(
          "apply_support_constraints: identifications must relate on-shell energies");
    if (fi->species != ti->species)
      throw std::invalid_argument(
          "apply_support_constraints: equal spatial momenta force equal energies only "
          "for equal masses");
    if (std::min(fi->slot, ti->slot) != 0 || std::max(fi->slot, ti->slot) != 1)
      throw std::invalid_argument(
          "apply_support_constraints: identification must relate the two conserved slots");
    bindings[from] = RationalExpr(Polynomial::variable(to));
  }

  std::vector<ReducedTerm> gs = r.groups();
  for (ReducedTerm& g : gs) g.coefficient = g.coefficient.substitute(bindings);
  return ReducedExpr(model, r.j(), std::move(gs));
}

}  // namespace momloc
