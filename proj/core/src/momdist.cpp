#include "momloc/momdist.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace momloc {

using nlohmann::json;

// ---------------------------------------------------------------------------
// FieldModel

const Rational& FieldModel::mass(int species) const {
  if (species < 0 || species >= species_count())
    throw std::invalid_argument("FieldModel::mass: species out of range");
  return masses[static_cast<std::size_t>(species)];
}

int FieldModel::sigma_sign(int a, int b) const {
  if (a < 0 || a >= species_count() || b < 0 || b >= species_count())
    throw std::invalid_argument("FieldModel::sigma_sign: species out of range");
  return sigma[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
}

bool FieldModel::sigma_constant() const {
  for (const auto& row : sigma)
    for (int s : row)
      if (s != sigma[0][0]) return false;
  return true;
}

void FieldModel::validate() const {
  if (n < 2) throw std::invalid_argument("FieldModel: need at least two slots");
  if (d < 2) throw std::invalid_argument("FieldModel: need spacetime dimension >= 2");
  if (masses.empty()) throw std::invalid_argument("FieldModel: need at least one species");
  for (const Rational& m : masses) {
    if (d <= 3) {
      if (m <= 0)
        throw std::invalid_argument("FieldModel: masses must be positive for d = 2, 3");
    } else if (m < 0) {
      throw std::invalid_argument("FieldModel: masses must be non-negative");
    }
  }
  const std::size_t N = masses.size();
  if (sigma.size() != N) throw std::invalid_argument("FieldModel: sigma must be species x species");
  for (std::size_t i = 0; i < N; ++i) {
    if (sigma[i].size() != N)
      throw std::invalid_argument("FieldModel: sigma must be species x species");
    for (std::size_t j = 0; j < N; ++j) {
      if (sigma[i][j] != 1 && sigma[i][j] != -1)
        throw std::invalid_argument("FieldModel: sigma entries must be +-1");
      if (sigma[i][j] != sigma[j][i])
        throw std::invalid_argument("FieldModel: sigma must be symmetric");
    }
  }
}

FieldModel make_bose_model(int n, int d, std::vector<Rational> masses) {
  FieldModel m;
  m.n = n;
  m.d = d;
  m.masses = std::move(masses);
  m.sigma.assign(m.masses.size(), std::vector<int>(m.masses.size(), 1));
  m.validate();
  return m;
}

// ---------------------------------------------------------------------------
// Symbols

Symbol omega_sym(int slot, int species) {
  if (slot < 0 || species < 0) throw std::invalid_argument("omega_sym: negative index");
  return global_symbols().intern(
      "om" + std::to_string(slot + 1) + "_" + std::to_string(species + 1), SymbolKind::Energy);
}

Symbol k_sym(int slot, int mu) {
  if (slot < 0 || mu < 0) throw std::invalid_argument("k_sym: negative index");
  return global_symbols().intern("k" + std::to_string(slot + 1) + "_" + std::to_string(mu),
                                 SymbolKind::Momentum);
}

Symbol mass_sym(int species) {
  if (species < 0) throw std::invalid_argument("mass_sym: negative index");
  return global_symbols().intern("m" + std::to_string(species + 1), SymbolKind::Mass);
}

Symbol a_sym() { return global_symbols().intern("a", SymbolKind::EnergySum); }

namespace {

// Parses "<prefix><int>_<int>" returning the two integers.
std::optional<std::pair<int, int>> parse_indexed_pair(const std::string& name,
                                                      const std::string& prefix) {
  if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix) != 0)
    return std::nullopt;
  std::size_t us = name.find('_', prefix.size());
  if (us == std::string::npos || us == prefix.size() || us + 1 >= name.size())
    return std::nullopt;
  int first = 0, second = 0;
  for (std::size_t i = prefix.size(); i < us; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return std::nullopt;
    first = first * 10 + (name[i] - '0');
  }
  for (std::size_t i = us + 1; i < name.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return std::nullopt;
    second = second * 10 + (name[i] - '0');
  }
  return std::make_pair(first, second);
}

std::optional<int> parse_indexed(const std::string& name, const std::string& prefix) {
  if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix) != 0)
    return std::nullopt;
  int v = 0;
  for (std::size_t i = prefix.size(); i < name.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(name[i]))) return std::nullopt;
    v = v * 10 + (name[i] - '0');
  }
  return v;
}

}  // namespace

std::optional<OmegaInfo> omega_info(const Symbol& s) {
  if (!s.valid() || s.kind() != SymbolKind::Energy) return std::nullopt;
  auto p = parse_indexed_pair(s.name(), "om");
  if (!p || p->first < 1 || p->second < 1) return std::nullopt;
  return OmegaInfo{p->first - 1, p->second - 1};
}

std::optional<MomentumInfo> momentum_info(const Symbol& s) {
  if (!s.valid() || s.kind() != SymbolKind::Momentum) return std::nullopt;
  auto p = parse_indexed_pair(s.name(), "k");
  if (!p || p->first < 1) return std::nullopt;
  return MomentumInfo{p->first - 1, p->second};
}

std::optional<int> mass_info(const Symbol& s) {
  if (!s.valid() || s.kind() != SymbolKind::Mass) return std::nullopt;
  auto v = parse_indexed(s.name(), "m");
  if (!v || *v < 1) return std::nullopt;
  return *v - 1;
}

Symbol symbol_from_name(const std::string& name) {
  if (name == "a") return a_sym();
  if (auto p = parse_indexed_pair(name, "om"); p && p->first >= 1 && p->second >= 1)
    return global_symbols().intern(name, SymbolKind::Energy);
  if (auto p = parse_indexed_pair(name, "k"); p && p->first >= 1)
    return global_symbols().intern(name, SymbolKind::Momentum);
  if (auto v = parse_indexed(name, "m"); v && *v >= 1)
    return global_symbols().intern(name, SymbolKind::Mass);
  return global_symbols().formal(name);
}

// ---------------------------------------------------------------------------
// Terms

std::string Atom::str(int slot) const {
  std::ostringstream out;
  if (type == Type::OnShellDelta) {
    out << "d" << (sign > 0 ? "+" : "-") << "[m" << (species + 1) << "](k" << (slot + 1) << ")";
  } else {
    out << "pv[m" << (species + 1) << "](k" << (slot + 1) << ")";
  }
  return out.str();
}

std::string Term::str() const {
  std::ostringstream out;
  out << complex_rational_str(coeff);
  if (!(poly == Polynomial(Rational(1)))) out << " * (" << poly.str() << ")";
  for (std::size_t l = 0; l < slots.size(); ++l)
    if (slots[l]) out << " " << slots[l]->str(static_cast<int>(l));
  if (conservation) out << " d(sum k)";
  return out.str();
}

namespace {

std::strong_ordering atom_opt_cmp(const std::optional<Atom>& x, const std::optional<Atom>& y) {
  if (x.has_value() != y.has_value())
    return x.has_value() ? std::strong_ordering::greater : std::strong_ordering::less;
  if (!x) return std::strong_ordering::equal;
  return *x <=> *y;
}

// Structural key order: slots, conservation, then polynomial. The
// coefficient is excluded so equal-structure terms merge.
std::strong_ordering term_key_cmp(const Term& a, const Term& b) {
  const std::size_t na = a.slots.size(), nb = b.slots.size();
  for (std::size_t i = 0; i < std::min(na, nb); ++i)
    if (auto c = atom_opt_cmp(a.slots[i], b.slots[i]); c != 0) return c;
  if (na != nb) return na <=> nb;
  if (a.conservation != b.conservation)
    return a.conservation ? std::strong_ordering::greater : std::strong_ordering::less;
  return a.poly <=> b.poly;
}

void validate_term(const FieldModel& model, const Term& t) {
  if (t.slots.size() != static_cast<std::size_t>(model.n))
    throw std::invalid_argument("Term: slot count does not match the model");
  for (const auto& atom : t.slots) {
    if (!atom) continue;
    if (atom->species < 0 || atom->species >= model.species_count())
      throw std::invalid_argument("Term: species out of range");
    if (atom->type == Atom::Type::OnShellDelta && atom->sign != 1 && atom->sign != -1)
      throw std::invalid_argument("Term: on-shell delta sign must be +-1");
  }
  for (const Symbol& s : t.poly.symbols()) {
    auto info = momentum_info(s);
    if (!info || info->slot >= model.n || info->mu >= model.d)
      throw std::invalid_argument("Term: polynomial factor must use momentum components of the model");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// MomentumDistribution

MomentumDistribution::MomentumDistribution(FieldModel model) : model_(std::move(model)) {
  model_.validate();
}

MomentumDistribution::MomentumDistribution(FieldModel model, std::vector<Term> terms)
    : model_(std::move(model)), terms_(std::move(terms)) {
  model_.validate();
  canonicalize();
}

void MomentumDistribution::canonicalize() {
  for (const Term& t : terms_) validate_term(model_, t);
  std::erase_if(terms_, [](const Term& t) { return t.coeff.is_zero() || t.poly.is_zero(); });
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return term_key_cmp(a, b) < 0; });
  std::vector<Term> merged;
  for (Term& t : terms_) {
    if (!merged.empty() && term_key_cmp(merged.back(), t) == 0) {
      merged.back().coeff = merged.back().coeff + t.coeff;
    } else {
      merged.push_back(std::move(t));
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coeff.is_zero(); });
  terms_ = std::move(merged);
}

MomentumDistribution MomentumDistribution::operator-() const {
  return scaled(ComplexRational{Rational(-1), Rational(0)});
}

MomentumDistribution MomentumDistribution::operator+(const MomentumDistribution& o) const {
  if (!(model_ == o.model_))
    throw std::invalid_argument("MomentumDistribution: cannot add over different models");
  std::vector<Term> ts = terms_;
  ts.insert(ts.end(), o.terms_.begin(), o.terms_.end());
  return MomentumDistribution(model_, std::move(ts));
}

MomentumDistribution MomentumDistribution::operator-(const MomentumDistribution& o) const {
  return *this + (-o);
}

MomentumDistribution MomentumDistribution::scaled(const ComplexRational& c) const {
  std::vector<Term> ts = terms_;
  for (Term& t : ts) t.coeff = t.coeff * c;
  return MomentumDistribution(model_, std::move(ts));
}

MomentumDistribution MomentumDistribution::multiplied_by(const Polynomial& p) const {
  std::vector<Term> ts = terms_;
  for (Term& t : ts) t.poly = t.poly * p;
  return MomentumDistribution(model_, std::move(ts));
}

bool MomentumDistribution::operator==(const MomentumDistribution& o) const {
  if (!(model_ == o.model_) || terms_.size() != o.terms_.size()) return false;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const Term& a = terms_[i];
    const Term& b = o.terms_[i];
    if (term_key_cmp(a, b) != 0 || !(a.coeff == b.coeff)) return false;
  }
  return true;
}

std::string MomentumDistribution::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i) out << "\n+ ";
    out << terms_[i].str();
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Builders

MomentumDistribution build_free_two_point(const FieldModel& model, int species) {
  model.validate();
  if (model.n != 2)
    throw std::invalid_argument("build_free_two_point: the free two-point function has n = 2");
  if (species < 0 || species >= model.species_count())
    throw std::invalid_argument("build_free_two_point: species out of range");
  Term t;
  t.slots = {Atom::shell(-1, species), std::nullopt};
  t.conservation = true;
  return MomentumDistribution(model, {std::move(t)});
}

MomentumDistribution build_weighted_structure_function(const FieldModel& model,
                                                       const std::vector<WeightList>& per_slot) {
  model.validate();
  if (model.n < 3)
    throw std::invalid_argument("structure functions are defined for n >= 3");
  if (per_slot.size() != static_cast<std::size_t>(model.n))
    throw std::invalid_argument("build_weighted_structure_function: need one weight list per slot");
  for (const WeightList& wl : per_slot) {
    if (wl.empty())
      throw std::invalid_argument("build_weighted_structure_function: empty weight list");
    for (const auto& [species, w] : wl)
      if (species < 0 || species >= model.species_count())
        throw std::invalid_argument("build_weighted_structure_function: species out of range");
  }

  std::vector<Term> terms;
  const int n = model.n;
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  for (int j = 0; j < n; ++j) {
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      Term t;
      t.slots.resize(static_cast<std::size_t>(n));
      ComplexRational coeff{Rational(1), Rational(0)};
      for (int l = 0; l < n; ++l) {
        const auto& [species, w] = per_slot[static_cast<std::size_t>(l)][idx[static_cast<std::size_t>(l)]];
        coeff = coeff * w;
        if (l < j) {
          t.slots[static_cast<std::size_t>(l)] = Atom::shell(-1, species);
        } else if (l == j) {
          t.slots[static_cast<std::size_t>(l)] = Atom::propagator(species);
        } else {
          t.slots[static_cast<std::size_t>(l)] = Atom::shell(+1, species);
        }
      }
      t.coeff = coeff;
      t.conservation = true;
      terms.push_back(std::move(t));

      int l = n - 1;
      while (l >= 0 && ++idx[static_cast<std::size_t>(l)] ==
                           per_slot[static_cast<std::size_t>(l)].size()) {
        idx[static_cast<std::size_t>(l)] = 0;
        --l;
      }
      if (l < 0) break;
    }
  }
  return MomentumDistribution(model, std::move(terms));
}

MomentumDistribution build_weighted_structure_function(const FieldModel& model,
                                                       const WeightList& shared) {
  return build_weighted_structure_function(
      model, std::vector<WeightList>(static_cast<std::size_t>(model.n), shared));
}

MomentumDistribution build_structure_function(const FieldModel& model) {
  WeightList all;
  for (int species = 0; species < model.species_count(); ++species)
    all.push_back({species, ComplexRational{Rational(1), Rational(0)}});
  return build_weighted_structure_function(model, all);
}

// ---------------------------------------------------------------------------
// Spectral support

namespace {

bool is_shell_with_sign(const std::optional<Atom>& atom, int sign) {
  return atom && atom->type == Atom::Type::OnShellDelta && atom->sign == sign;
}

}  // namespace

bool check_spectral_support(const MomentumDistribution& dist) {
  const int n = dist.model().n;
  for (const Term& t : dist.terms()) {
    // Tail sums from the second slot onwards; the total sum is fixed by the
    // conservation delta and carries no sign information.
    for (int r = 1; r < n; ++r) {
      bool direct = true;
      for (int l = r; l < n; ++l)
        if (!is_shell_with_sign(t.slots[static_cast<std::size_t>(l)], +1)) {
          direct = false;
          break;
        }
      if (direct) continue;
      // sum_{l>=r} k_l = -sum_{l<r} k_l by conservation; the right-hand side
      // lies in the forward cone when every earlier slot is backward on-shell.
      bool via_conservation = t.conservation;
      for (int l = 0; via_conservation && l < r; ++l)
        if (!is_shell_with_sign(t.slots[static_cast<std::size_t>(l)], -1))
          via_conservation = false;
      if (!via_conservation) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Multiplier validation

Polynomial minkowski_dot(const FieldModel& model, int slot_a, int slot_b) {
  if (slot_a < 0 || slot_a >= model.n || slot_b < 0 || slot_b >= model.n)
    throw std::invalid_argument("minkowski_dot: slot out of range");
  Polynomial out = Polynomial::variable(k_sym(slot_a, 0)) * Polynomial::variable(k_sym(slot_b, 0));
  for (int mu = 1; mu < model.d; ++mu)
    out -= Polynomial::variable(k_sym(slot_a, mu)) * Polynomial::variable(k_sym(slot_b, mu));
  return out;
}

bool validate_multiplier(const FieldModel& model, const Polynomial& p, std::string* reason) {
  auto fail = [&](const std::string& why) {
    if (reason) *reason = why;
    return false;
  };
  for (const Symbol& s : p.symbols()) {
    auto info = momentum_info(s);
    if (!info || info->slot >= model.n || info->mu >= model.d)
      return fail("multiplier uses symbol " + s.name() +
                  " which is not a momentum component of the model");
  }

  for (int l = 0; l + 1 < model.n; ++l) {
    std::vector<std::pair<Symbol, Symbol>> pairs;
    for (int mu = 0; mu < model.d; ++mu) pairs.push_back({k_sym(l, mu), k_sym(l + 1, mu)});
    if (!(p.swap_pairs(pairs) == p))
      return fail("multiplier is not symmetric under exchanging momentum blocks " +
                  std::to_string(l + 1) + " and " + std::to_string(l + 2));
  }

  // One exact rational group element per generating plane suffices: a boost
  // with cosh = 5/4 generates an unbounded subgroup of its one-parameter
  // group, and cos = 3/5 is not a root of unity angle, so invariance under
  // the single element forces invariance under the closure, which is the
  // whole one-parameter group.
  {
    const Rational ch(5, 4), sh(3, 4);
    std::map<Symbol, Polynomial> boost;
    for (int l = 0; l < model.n; ++l) {
      boost[k_sym(l, 0)] = ch * Polynomial::variable(k_sym(l, 0)) +
                           sh * Polynomial::variable(k_sym(l, 1));
      boost[k_sym(l, 1)] = sh * Polynomial::variable(k_sym(l, 0)) +
                           ch * Polynomial::variable(k_sym(l, 1));
    }
    if (!(p.substitute(boost) == p)) return fail("multiplier is not invariant under boosts");
  }
  for (int i = 1; i + 1 < model.d; ++i) {
    const Rational c(3, 5), s(4, 5);
    std::map<Symbol, Polynomial> rot;
    for (int l = 0; l < model.n; ++l) {
      rot[k_sym(l, i)] = c * Polynomial::variable(k_sym(l, i)) -
                         s * Polynomial::variable(k_sym(l, i + 1));
      rot[k_sym(l, i + 1)] = s * Polynomial::variable(k_sym(l, i)) +
                             c * Polynomial::variable(k_sym(l, i + 1));
    }
    if (!(p.substitute(rot) == p))
      return fail("multiplier is not invariant under spatial rotations");
  }
  if (reason) reason->clear();
  return true;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json rational_to_json(const Rational& r) { return rational_str(r); }

Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_string()) return rational_parse(j.get<std::string>());
  throw std::invalid_argument("expected a rational as string or integer");
}

json complex_to_json(const ComplexRational& c) {
  if (c.im == 0) return rational_to_json(c.re);
  return json{{"re", rational_to_json(c.re)}, {"im", rational_to_json(c.im)}};
}

ComplexRational complex_from_json(const json& j) {
  if (j.is_object()) {
    ComplexRational c;
    c.re = j.contains("re") ? rational_from_json(j.at("re")) : Rational(0);
    c.im = j.contains("im") ? rational_from_json(j.at("im")) : Rational(0);
    return c;
  }
  return ComplexRational{rational_from_json(j), Rational(0)};
}

json poly_to_json(const Polynomial& p) {
  json out = json::array();
  for (const auto& [m, c] : p.terms()) {
    json exps = json::object();
    for (const auto& [s, e] : m.factors()) exps[s.name()] = e;
    out.push_back(json::array({rational_to_json(c), exps}));
  }
  return out;
}

Polynomial poly_from_json(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("polynomial: expected an array of terms");
  Polynomial out;
  for (const json& t : j) {
    if (!t.is_array() || t.size() != 2)
      throw std::invalid_argument("polynomial term: expected [coeff, exponents]");
    Rational c = rational_from_json(t[0]);
    Monomial m;
    for (const auto& [name, exp] : t[1].items())
      m = m.times(Monomial(symbol_from_name(name), exp.get<int>()));
    out += Polynomial::term(c, m);
  }
  return out;
}

json atom_to_json(const Atom& a) {
  if (a.type == Atom::Type::OnShellDelta)
    return json{{"type", "shell"}, {"sign", a.sign}, {"species", a.species}};
  return json{{"type", "prop"}, {"species", a.species}};
}

Atom atom_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "shell") return Atom::shell(j.at("sign").get<int>(), j.at("species").get<int>());
  if (type == "prop") return Atom::propagator(j.at("species").get<int>());
  throw std::invalid_argument("atom: unknown type " + type);
}

json term_to_json(const Term& t) {
  json slots = json::array();
  for (const auto& atom : t.slots) {
    if (atom) {
      slots.push_back(atom_to_json(*atom));
    } else {
      slots.push_back(nullptr);
    }
  }
  return json{{"coeff", complex_to_json(t.coeff)},
              {"poly", poly_to_json(t.poly)},
              {"slots", std::move(slots)},
              {"conservation", t.conservation}};
}

Term term_from_json(const json& j) {
  Term t;
  t.coeff = complex_from_json(j.at("coeff"));
  t.poly = poly_from_json(j.at("poly"));
  for (const json& a : j.at("slots")) {
    if (a.is_null()) {
      t.slots.push_back(std::nullopt);
    } else {
      t.slots.push_back(atom_from_json(a));
    }
  }
  t.conservation = j.at("conservation").get<bool>();
  return t;
}

json model_to_json_obj(const FieldModel& m) {
  json masses = json::array();
  for (const Rational& x : m.masses) masses.push_back(rational_to_json(x));
  return json{{"n", m.n}, {"d", m.d}, {"masses", std::move(masses)}, {"sigma", m.sigma}};
}

FieldModel model_from_json_obj(const json& j) {
  FieldModel m;
  m.n = j.at("n").get<int>();
  m.d = j.at("d").get<int>();
  for (const json& x : j.at("masses")) m.masses.push_back(rational_from_json(x));
  m.sigma = j.at("sigma").get<std::vector<std::vector<int>>>();
  m.validate();
  return m;
}

}  // namespace

std::string model_to_json(const FieldModel& model) { return model_to_json_obj(model).dump(2); }

FieldModel model_from_json(const std::string& text) {
  return model_from_json_obj(json::parse(text));
}

std::string distribution_to_json(const MomentumDistribution& dist) {
  json terms = json::array();
  for (const Term& t : dist.terms()) terms.push_back(term_to_json(t));
  json out{{"schema", "momloc-dist/1"},
           {"model", model_to_json_obj(dist.model())},
           {"terms", std::move(terms)}};
  return out.dump(2);
}

MomentumDistribution distribution_from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.value("schema", "") != std::string("momloc-dist/1"))
    throw std::invalid_argument("distribution: unsupported schema");
  FieldModel model = model_from_json_obj(j.at("model"));
  std::vector<Term> terms;
  for (const json& t : j.at("terms")) terms.push_back(term_from_json(t));
  return MomentumDistribution(std::move(model), std::move(terms));
}

}  // namespace momloc
