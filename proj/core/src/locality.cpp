#include "momloc/locality.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace momloc {

namespace {

void check_config(const NumericConfig& c) {
  if (c.rays < 1) throw std::invalid_argument("NumericConfig: rays must be >= 1");
  if (c.max_degree < 1) throw std::invalid_argument("NumericConfig: max_degree must be >= 1");
  if (!(c.step > 0)) throw std::invalid_argument("NumericConfig: step must be positive");
  if (!(c.tolerance > 0)) throw std::invalid_argument("NumericConfig: tolerance must be positive");
  if (c.draws < 1) throw std::invalid_argument("NumericConfig: draws must be >= 1");
  if (c.max_retries < 0) throw std::invalid_argument("NumericConfig: max_retries must be >= 0");
}

std::string ray_summary(const LocalityVerdict::Witness& w) {
  std::ostringstream os;
  os << "order-" << w.failing_order << " differences stay at " << w.residual
     << " of the sampled scale (step " << w.step << ", direction";
  for (double c : w.direction) os << ' ' << c;
  os << ", base";
  for (double c : w.base) os << ' ' << c;
  os << ")";
  return os.str();
}

}  // namespace

std::string LocalityVerdict::str() const {
  switch (kind) {
    case Kind::Zero:
      return "zero";
    case Kind::PolynomialOfDegree:
      return "polynomial of degree " + std::to_string(degree) +
             " in the relative spatial momentum";
    case Kind::NonPolynomial:
      if (witness) {
        std::string s = "non-polynomial: " + ray_summary(*witness);
        if (!reason.empty()) s += " [" + reason + "]";
        return s;
      }
      return "non-polynomial: " + reason;
    case Kind::Undecided:
      return "undecided: " + reason;
  }
  return "undecided";
}

LocalityVerdict test_locality_symbolic(const ReducedExpr& r) {
  if (r.is_zero()) return LocalityVerdict::zero();
  return LocalityVerdict::undecided(
      "symbolic layer certifies only the zero case; " + std::to_string(r.size()) +
      " group(s) remain — run the numeric polynomiality test");
}

LocalityVerdict test_polynomiality_numeric(
    const std::function<double(const std::vector<double>&)>& evaluator, int dim,
    const NumericConfig& config) {
  check_config(config);
  if (dim < 1) throw std::invalid_argument("test_polynomiality_numeric: dim must be >= 1");
  if (!evaluator) throw std::invalid_argument("test_polynomiality_numeric: empty evaluator");

  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<int> comp(-8, 8);
  std::uniform_real_distribution<double> base_comp(-0.75, 0.75);
  const int npts = config.max_degree + 2;  // supports differences up to order max_degree + 1

  struct Ray {
    std::vector<double> dir;
    std::vector<double> base;
    std::vector<double> vals;
  };
  std::vector<Ray> rays;
  rays.reserve(static_cast<std::size_t>(config.rays));

  for (int r = 0; r < config.rays; ++r) {
    bool usable = false;
    for (int attempt = 0; attempt <= config.max_retries && !usable; ++attempt) {
      Ray ray;
      ray.dir.resize(static_cast<std::size_t>(dim));
      double norm2 = 0;
      do {
        norm2 = 0;
        for (auto& c : ray.dir) {
          c = static_cast<double>(comp(rng));
          norm2 += c * c;
        }
      } while (norm2 == 0);
      const double inv = 1.0 / std::sqrt(norm2);
      for (auto& c : ray.dir) c *= inv;
      ray.base.resize(static_cast<std::size_t>(dim));
      for (auto& c : ray.base) c = base_comp(rng);

      ray.vals.resize(static_cast<std::size_t>(npts));
      try {
        std::vector<double> x(static_cast<std::size_t>(dim));
        for (int i = 0; i < npts; ++i) {
          for (int c = 0; c < dim; ++c)
            x[static_cast<std::size_t>(c)] =
                ray.base[static_cast<std::size_t>(c)] +
                config.step * static_cast<double>(i) * ray.dir[static_cast<std::size_t>(c)];
          ray.vals[static_cast<std::size_t>(i)] = evaluator(x);
        }
        usable = true;
        rays.push_back(std::move(ray));
      } catch (const SingularPointError&) {
        // redraw direction and base
      }
    }
  }

  if (rays.empty())
    return LocalityVerdict::undecided("every sampled ray hit a singular point");

  double scale = 0;
  for (const auto& ray : rays)
    for (double v : ray.vals) scale = std::max(scale, std::abs(v));
  if (scale == 0) return LocalityVerdict::zero();

  int overall = 0;
  for (const auto& ray : rays) {
    // forward differences: after the k-th pass d[i] = Delta^k f(x_i)
    std::vector<double> d = ray.vals;
    int largest_failing = 0;
    double failing_mag = 0;
    for (int k = 1; k <= config.max_degree + 1; ++k) {
      for (std::size_t i = 0; i + 1 < d.size(); ++i) d[i] = d[i + 1] - d[i];
      d.pop_back();
      double mk = 0;
      for (double v : d) mk = std::max(mk, std::abs(v));
      if (mk > config.tolerance * scale) {
        largest_failing = k;
        failing_mag = mk;
      }
    }
    if (largest_failing == config.max_degree + 1) {
      LocalityVerdict::Witness w;
      w.direction = ray.dir;
      w.base = ray.base;
      w.step = config.step;
      w.max_order = config.max_degree + 1;
      w.failing_order = largest_failing;
      w.residual = failing_mag / scale;
      return LocalityVerdict::non_polynomial(std::move(w));
    }
    overall = std::max(overall, largest_failing);
  }
  return LocalityVerdict::polynomial(overall);
}

namespace {

void check_bindings(const FieldModel& model, const ReducedBindings& b) {
  const std::size_t sdim = static_cast<std::size_t>(model.d - 1);
  const std::size_t n = static_cast<std::size_t>(model.n);
  if (b.q_plus.size() != sdim || b.q_minus.size() != sdim)
    throw std::invalid_argument("ReducedBindings: q_plus/q_minus must have d-1 components");
  if (b.spectator_k.size() != n)
    throw std::invalid_argument("ReducedBindings: spectator_k must have one entry per slot");
  for (const auto& k : b.spectator_k)
    if (k.size() != sdim)
      throw std::invalid_argument("ReducedBindings: spectator momenta must have d-1 components");
  if (b.free_energies.size() != n)
    throw std::invalid_argument("ReducedBindings: free_energies must have one entry per slot");
}

// Spatial momentum of slot `slot` under the bindings.
std::vector<double> slot_momentum(int j, const ReducedBindings& b, int slot) {
  const std::size_t sdim = b.q_plus.size();
  std::vector<double> k(sdim);
  if (slot == j) {
    for (std::size_t i = 0; i < sdim; ++i) k[i] = b.q_plus[i] + b.q_minus[i];
  } else if (slot == j + 1) {
    for (std::size_t i = 0; i < sdim; ++i) k[i] = b.q_plus[i] - b.q_minus[i];
  } else {
    k = b.spectator_k[static_cast<std::size_t>(slot)];
  }
  return k;
}

double omega_value(const FieldModel& model, int j, const ReducedBindings& b, int slot,
                   int species) {
  const std::vector<double> k = slot_momentum(j, b, slot);
  double k2 = 0;
  for (double c : k) k2 += c * c;
  const double m = to_double(model.mass(species));
  return std::sqrt(k2 + m * m);
}

// Energy component k_l^0 of a spectator slot: the shell value for on-shell
// atoms, the supplied free energy otherwise.
double spectator_energy(const FieldModel& model, int j, const ReducedTerm& g,
                        const ReducedBindings& b, int slot) {
  const auto& atom = g.spectators[static_cast<std::size_t>(slot)];
  if (atom && atom->type == Atom::Type::OnShellDelta)
    return static_cast<double>(atom->sign) * omega_value(model, j, b, slot, atom->species);
  return b.free_energies[static_cast<std::size_t>(slot)];
}

// Numeric values for every symbol of one group's coefficient.
std::map<Symbol, double> group_bindings(const FieldModel& model, int j, const ReducedTerm& g,
                                        const ReducedBindings& b) {
  std::map<Symbol, double> point;
  std::set<Symbol> syms = g.coefficient.re.symbols();
  for (const auto& s : g.coefficient.im.symbols()) syms.insert(s);

  double a = 0;
  bool a_known = false;
  for (const auto& s : syms) {
    if (auto om = omega_info(s)) {
      point[s] = omega_value(model, j, b, om->slot, om->species);
    } else if (auto mo = momentum_info(s)) {
      if (mo->mu == 0) {
        if (mo->slot == j || mo->slot == j + 1)
          throw std::invalid_argument(
              "group coefficient still contains an integrated energy component: " + s.name());
        point[s] = spectator_energy(model, j, g, b, mo->slot);
      } else {
        point[s] = slot_momentum(j, b, mo->slot)[static_cast<std::size_t>(mo->mu - 1)];
      }
    } else if (auto ms = mass_info(s)) {
      point[s] = to_double(model.mass(*ms));
    } else if (s == a_sym()) {
      if (!a_known) {
        for (int l = 0; l < model.n; ++l) {
          if (l == j || l == j + 1) continue;
          a += spectator_energy(model, j, g, b, l);
        }
        a_known = true;
      }
      point[s] = a;
    } else {
      throw std::invalid_argument("cannot bind symbol numerically: " + s.name());
    }
  }
  return point;
}

}  // namespace

std::complex<double> evaluate_reduced(const ReducedExpr& r, const ReducedBindings& b,
                                      double singular_rel) {
  check_bindings(r.model(), b);
  std::complex<double> total{0, 0};
  for (const auto& g : r.groups()) {
    if (g.residual) continue;  // supported on a measure-zero energy surface
    const auto point = group_bindings(r.model(), r.j(), g, b);
    total += std::complex<double>(g.coefficient.re.eval(point, singular_rel),
                                  g.coefficient.im.eval(point, singular_rel));
  }
  return total;
}

namespace {

std::string residual_text(const FieldModel& model, int j, const ResidualDelta& rd) {
  std::ostringstream os;
  os << "d(";
  if (model.n > 2) os << "a ";
  if (model.n > 2 || rd.sign_j < 0) os << (rd.sign_j > 0 ? "+ " : "- ");
  os << omega_sym(j, rd.species_j).name() << ' ' << (rd.sign_j1 > 0 ? "+ " : "- ")
     << omega_sym(j + 1, rd.species_j1).name() << ")";
  return os.str();
}

// Restrict a residual group's coefficient to the support of its energy
// delta. Returns the restricted coefficient, or nullopt when the support is
// known to be empty (both species massive, same shell signs, no spectators).
std::optional<ComplexExpr> restrict_to_residual_support(const FieldModel& model, int j,
                                                        const ReducedTerm& g) {
  const ResidualDelta& rd = *g.residual;
  if (model.n > 2) {
    // d(a + s*om_j + s'*om_j1): eliminate the spectator-energy sum.
    Polynomial sub;
    sub -= Rational(rd.sign_j) * Polynomial::variable(omega_sym(j, rd.species_j));
    sub -= Rational(rd.sign_j1) * Polynomial::variable(omega_sym(j + 1, rd.species_j1));
    std::map<Symbol, RationalExpr> bind{{a_sym(), RationalExpr(sub)}};
    return g.coefficient.substitute(bind);
  }
  // n == 2: no spectator energies, the delta ties the two shell energies.
  if (rd.sign_j == rd.sign_j1) {
    // d(om_j + om_j1) (up to overall sign): empty support for massive fields.
    if (model.mass(rd.species_j) > 0 && model.mass(rd.species_j1) > 0) return std::nullopt;
    return g.coefficient;  // point support at vanishing momenta; keep as is
  }
  // d(om_j - om_j1): restrict to equal energies.
  std::map<Symbol, RationalExpr> bind{
      {omega_sym(j + 1, rd.species_j1),
       RationalExpr(Polynomial::variable(omega_sym(j, rd.species_j)))}};
  return g.coefficient.substitute(bind);
}

}  // namespace

LocalityVerdict decide_locality(const ReducedExpr& r, const NumericConfig& config) {
  check_config(config);
  if (r.is_zero()) return LocalityVerdict::zero();

  const FieldModel& model = r.model();
  const int j = r.j();
  const int sdim = model.d - 1;

  // Residual-delta groups first: a nonzero coefficient on the delta's
  // support is a genuinely singular layer of the double integral, which no
  // polynomial matches.
  std::vector<std::size_t> regular;
  for (std::size_t gi = 0; gi < r.groups().size(); ++gi) {
    const auto& g = r.groups()[gi];
    if (!g.residual) {
      regular.push_back(gi);
      continue;
    }
    const auto restricted = restrict_to_residual_support(model, j, g);
    if (!restricted) continue;  // empty support
    if (restricted->is_zero()) continue;
    const std::string where =
        "group " + std::to_string(gi) + " with " + residual_text(model, j, *g.residual);
    if (model.n == 2 && g.residual->sign_j == g.residual->sign_j1)
      return LocalityVerdict::undecided(
          where + ": massless point-supported energy delta with coefficient " +
          restricted->str());
    return LocalityVerdict::non_polynomial_reason(
        where + ": coefficient restricted to the delta's support is nonzero: " +
        restricted->str());
  }

  if (regular.empty()) return LocalityVerdict::zero();

  // Numeric sweep: every remaining coefficient, real and imaginary part
  // separately, sampled in q_minus at `draws` generic values of the outer
  // variables. Spatial conservation pins q_plus to minus half the spectator
  // momentum sum so sampling stays on the delta's support.
  bool any_conservation = false;
  for (std::size_t gi : regular)
    if (r.groups()[gi].spatial_conservation) any_conservation = true;

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  int max_deg = 0;
  for (int draw = 0; draw < config.draws; ++draw) {
    ReducedBindings base;
    base.q_minus.assign(static_cast<std::size_t>(sdim), 0.0);
    base.spectator_k.resize(static_cast<std::size_t>(model.n));
    for (auto& k : base.spectator_k) {
      k.resize(static_cast<std::size_t>(sdim));
      for (auto& c : k) c = unit(rng);
    }
    base.free_energies.resize(static_cast<std::size_t>(model.n));
    for (auto& e : base.free_energies) e = unit(rng);
    base.q_plus.assign(static_cast<std::size_t>(sdim), 0.0);
    if (any_conservation) {
      for (int l = 0; l < model.n; ++l) {
        if (l == j || l == j + 1) continue;
        for (int c = 0; c < sdim; ++c)
          base.q_plus[static_cast<std::size_t>(c)] -=
              0.5 * base.spectator_k[static_cast<std::size_t>(l)][static_cast<std::size_t>(c)];
      }
    } else {
      for (auto& c : base.q_plus) c = unit(rng);
    }

    for (std::size_t gi : regular) {
      const auto& g = r.groups()[gi];
      for (int part = 0; part < 2; ++part) {
        const RationalExpr& expr = part == 0 ? g.coefficient.re : g.coefficient.im;
        if (expr.is_zero()) continue;
        auto evaluator = [&](const std::vector<double>& qm) {
          ReducedBindings b = base;
          b.q_minus = qm;
          return expr.eval(group_bindings(model, j, g, b), 1e-6);
        };
        NumericConfig sweep = config;
        sweep.seed = config.seed ^
                     (0x9e3779b97f4a7c15ULL *
                      (1 + static_cast<std::uint64_t>(draw) * 4096 +
                       static_cast<std::uint64_t>(gi) * 16 + static_cast<std::uint64_t>(part)));
        LocalityVerdict v = test_polynomiality_numeric(evaluator, sdim, sweep);
        const std::string where = "group " + std::to_string(gi) + ", draw " +
                                  std::to_string(draw) + ", " + (part == 0 ? "re" : "im") +
                                  " part";
        switch (v.kind) {
          case LocalityVerdict::Kind::NonPolynomial:
            v.reason = where;
            return v;
          case LocalityVerdict::Kind::Undecided:
            v.reason = where + ": " + v.reason;
            return v;
          case LocalityVerdict::Kind::Zero:
            return LocalityVerdict::undecided(
                where + ": coefficient is symbolically nonzero but sampled identically zero");
          case LocalityVerdict::Kind::PolynomialOfDegree:
            max_deg = std::max(max_deg, v.degree);
            break;
        }
      }
    }
  }
  return LocalityVerdict::polynomial(max_deg);
}

}  // namespace momloc
