#include "momloc/jld.hpp"

#include "momloc/commutator.hpp"
#include "momloc/energy_reduce.hpp"
#include "momloc/momdist.hpp"
#include "momloc/numoracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace momloc {

namespace {

constexpr std::size_t kMaxCells = std::size_t{1} << 24;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
}

}  // namespace

SpectralFn::SpectralFn(SpectralGridBox box, std::array<int, 3> nu, int nk, double tv_bound)
    : box_(box), nu_(nu), nk_(nk), tv_bound_(tv_bound) {
  for (int a = 0; a < 3; ++a) {
    require_finite(box_.u_lo[a], "SpectralFn: box edge");
    require_finite(box_.u_hi[a], "SpectralFn: box edge");
    if (!(box_.u_hi[a] > box_.u_lo[a]))
      throw std::invalid_argument("SpectralFn: u box must have positive extent on every axis");
    if (nu_[a] < 1) throw std::invalid_argument("SpectralFn: need at least one cell per u axis");
  }
  require_finite(box_.k2_lo, "SpectralFn: squared-mass edge");
  require_finite(box_.k2_hi, "SpectralFn: squared-mass edge");
  if (box_.k2_lo < 0)
    throw std::invalid_argument("SpectralFn: squared-mass axis cannot extend below zero");
  if (!(box_.k2_hi > box_.k2_lo))
    throw std::invalid_argument("SpectralFn: squared-mass interval must have positive extent");
  if (nk_ < 1) throw std::invalid_argument("SpectralFn: need at least one squared-mass cell");
  require_finite(tv_bound_, "SpectralFn: tv_bound");
  if (tv_bound_ < 0) throw std::invalid_argument("SpectralFn: tv_bound must be nonnegative");

  const std::size_t cells = static_cast<std::size_t>(nu_[0]) * static_cast<std::size_t>(nu_[1]) *
                            static_cast<std::size_t>(nu_[2]) * static_cast<std::size_t>(nk_);
  if (cells > kMaxCells) throw std::invalid_argument("SpectralFn: grid too large");
  phi1_.assign(cells, 0.0);
  phi2_.assign(cells, 0.0);
}

double SpectralFn::du(int axis) const {
  if (axis < 0 || axis >= 3) throw std::out_of_range("SpectralFn: axis");
  return (box_.u_hi[static_cast<std::size_t>(axis)] - box_.u_lo[static_cast<std::size_t>(axis)]) /
         nu_[static_cast<std::size_t>(axis)];
}

double SpectralFn::dk2() const { return (box_.k2_hi - box_.k2_lo) / nk_; }

double SpectralFn::u_center(int axis, int index) const {
  if (axis < 0 || axis >= 3) throw std::out_of_range("SpectralFn: axis");
  if (index < 0 || index >= nu_[static_cast<std::size_t>(axis)])
    throw std::out_of_range("SpectralFn: u index");
  return box_.u_lo[static_cast<std::size_t>(axis)] + (index + 0.5) * du(axis);
}

double SpectralFn::k2_center(int index) const {
  if (index < 0 || index >= nk_) throw std::out_of_range("SpectralFn: squared-mass index");
  return box_.k2_lo + (index + 0.5) * dk2();
}

std::size_t SpectralFn::index(int ix, int iy, int iz, int ik) const {
  if (ix < 0 || ix >= nu_[0] || iy < 0 || iy >= nu_[1] || iz < 0 || iz >= nu_[2] || ik < 0 ||
      ik >= nk_)
    throw std::out_of_range("SpectralFn: cell index");
  return ((static_cast<std::size_t>(ix) * static_cast<std::size_t>(nu_[1]) +
           static_cast<std::size_t>(iy)) *
              static_cast<std::size_t>(nu_[2]) +
          static_cast<std::size_t>(iz)) *
             static_cast<std::size_t>(nk_) +
         static_cast<std::size_t>(ik);
}

double SpectralFn::interp(const std::vector<double>& values, const std::array<double, 3>& u,
                          double k2) const {
  if (!(k2 >= box_.k2_lo && k2 <= box_.k2_hi)) return 0.0;
  std::size_t cell = 0;
  for (int a = 0; a < 3; ++a) {
    const double lo = box_.u_lo[static_cast<std::size_t>(a)];
    const double hi = box_.u_hi[static_cast<std::size_t>(a)];
    const double ua = u[static_cast<std::size_t>(a)];
    if (!(ua >= lo && ua <= hi)) return 0.0;
    int idx = static_cast<int>((ua - lo) / du(a));
    idx = std::min(idx, nu_[static_cast<std::size_t>(a)] - 1);
    cell = cell * static_cast<std::size_t>(nu_[static_cast<std::size_t>(a)]) +
           static_cast<std::size_t>(idx);
  }
  const std::size_t base = cell * static_cast<std::size_t>(nk_);
  const double t = (k2 - box_.k2_lo) / dk2() - 0.5;
  if (t <= 0) return values[base];
  if (t >= nk_ - 1) return values[base + static_cast<std::size_t>(nk_) - 1];
  const int i = static_cast<int>(t);
  const double f = t - i;
  return (1 - f) * values[base + static_cast<std::size_t>(i)] +
         f * values[base + static_cast<std::size_t>(i) + 1];
}

double SpectralFn::phi1_at(const std::array<double, 3>& u, double k2) const {
  return interp(phi1_, u, k2);
}

double SpectralFn::phi2_at(const std::array<double, 3>& u, double k2) const {
  return interp(phi2_, u, k2);
}

double SpectralFn::grid_integral_phi2() const {
  long double acc = 0;
  for (double v : phi2_) acc += v;
  return static_cast<double>(acc) * cell_volume_u() * dk2();
}

double SpectralFn::coarseness_bound() const {
  return tv_bound_ * std::max({du(0), du(1), du(2), dk2()});
}

void SpectralFn::require_finite_values() const {
  for (double v : phi1_)
    if (!std::isfinite(v)) throw std::invalid_argument("SpectralFn: phi1 values must be finite");
  for (double v : phi2_)
    if (!std::isfinite(v)) throw std::invalid_argument("SpectralFn: phi2 values must be finite");
}

namespace {

// Squared distance from the spatial probe to every u cell center, in flat
// cell order (x outer, z inner) — the same order the shell sum walks.
std::vector<double> cell_radii_sq(const SpectralFn& s, const std::array<double, 3>& q_vec) {
  const auto& nu = s.nu();
  std::vector<double> r2;
  r2.reserve(static_cast<std::size_t>(nu[0]) * static_cast<std::size_t>(nu[1]) *
             static_cast<std::size_t>(nu[2]));
  for (int ix = 0; ix < nu[0]; ++ix) {
    const double dx = q_vec[0] - s.u_center(0, ix);
    for (int iy = 0; iy < nu[1]; ++iy) {
      const double dy = q_vec[1] - s.u_center(1, iy);
      for (int iz = 0; iz < nu[2]; ++iz) {
        const double dz = q_vec[2] - s.u_center(2, iz);
        r2.push_back(dx * dx + dy * dy + dz * dz);
      }
    }
  }
  return r2;
}

// Shell sum at fixed energy: for each u cell the squared-mass delta picks
// kappa^2 = q0^2 - r^2 with unit jacobian; cells whose window misses it
// contribute nothing.
double eval_shells(const SpectralFn& s, double q0, const std::vector<double>& r2) {
  if (q0 == 0) return 0.0;
  const double lo = s.box().k2_lo;
  const double hi = s.box().k2_hi;
  const double dk = s.dk2();
  const int nk = s.nk();
  const auto& v1 = s.phi1_values();
  const auto& v2 = s.phi2_values();
  const double q0sq = q0 * q0;
  double acc1 = 0, acc2 = 0;
  for (std::size_t c = 0; c < r2.size(); ++c) {
    const double k2 = q0sq - r2[c];
    if (!(k2 >= lo && k2 <= hi)) continue;
    const std::size_t base = c * static_cast<std::size_t>(nk);
    const double t = (k2 - lo) / dk - 0.5;
    double w1, w2;
    if (t <= 0) {
      w1 = v1[base];
      w2 = v2[base];
    } else if (t >= nk - 1) {
      w1 = v1[base + static_cast<std::size_t>(nk) - 1];
      w2 = v2[base + static_cast<std::size_t>(nk) - 1];
    } else {
      const int i = static_cast<int>(t);
      const double f = t - i;
      w1 = (1 - f) * v1[base + static_cast<std::size_t>(i)] +
           f * v1[base + static_cast<std::size_t>(i) + 1];
      w2 = (1 - f) * v2[base + static_cast<std::size_t>(i)] +
           f * v2[base + static_cast<std::size_t>(i) + 1];
    }
    acc1 += w1;
    acc2 += w2;
  }
  const double sgn = q0 > 0 ? 1.0 : -1.0;
  return sgn * (acc1 + q0 * acc2) * s.cell_volume_u();
}

void check_point(const std::array<double, 4>& q) {
  for (double x : q) require_finite(x, "evaluate_jld: point");
}

}  // namespace

double evaluate_jld(const SpectralFn& s, const std::array<double, 4>& q) {
  check_point(q);
  s.require_finite_values();
  const auto r2 = cell_radii_sq(s, {q[1], q[2], q[3]});
  return eval_shells(s, q[0], r2);
}

double evaluate_jld_within(const SpectralFn& s, const std::array<double, 4>& q,
                           double tolerance) {
  if (!(tolerance > 0) || !std::isfinite(tolerance))
    throw std::invalid_argument("evaluate_jld_within: tolerance must be positive");
  const double bound = s.coarseness_bound();
  if (bound > tolerance)
    throw AccuracyError("spectral grid too coarse for the requested tolerance", bound);
  return evaluate_jld(s, q);
}

JLDCommutator::JLDCommutator(const SpectralFn& s) : s_(&s) { s.require_finite_values(); }

double JLDCommutator::value(const std::array<double, 4>& q) const {
  auto it = cache_.find(q);
  if (it != cache_.end()) return it->second;
  const double v = evaluate_jld(*s_, q);
  cache_.emplace(q, v);
  return v;
}

namespace {

constexpr std::array<double, 8> kGlNodes = {
    -0.96028985649753623, -0.79666647741362674, -0.52553240991632899, -0.18343464249564980,
    0.18343464249564980,  0.52553240991632899,  0.79666647741362674,  0.96028985649753623};
constexpr std::array<double, 8> kGlWeights = {
    0.10122853629037626, 0.22238103445337447, 0.31370664587788729, 0.36268378337836198,
    0.36268378337836198, 0.31370664587788729, 0.22238103445337447, 0.10122853629037626};

double integrate_energy(const SpectralFn& s, const std::vector<double>& r2, double radius,
                        int panels) {
  const double h = 2 * radius / panels;
  double acc = 0;
  for (int p = 0; p < panels; ++p) {
    const double mid = -radius + (p + 0.5) * h;
    for (std::size_t n = 0; n < kGlNodes.size(); ++n)
      acc += kGlWeights[n] * eval_shells(s, mid + 0.5 * h * kGlNodes[n], r2);
  }
  return acc * 0.5 * h;
}

}  // namespace

SumRuleResult sum_rule(const SpectralFn& s, double tolerance) {
  if (!(tolerance > 0) || !std::isfinite(tolerance))
    throw std::invalid_argument("sum_rule: tolerance must be positive");
  s.require_finite_values();

  SumRuleResult out;
  out.analytic = s.grid_integral_phi2();

  const auto& box = s.box();
  std::array<double, 3> center{}, half{};
  for (int a = 0; a < 3; ++a) {
    center[static_cast<std::size_t>(a)] =
        0.5 * (box.u_lo[static_cast<std::size_t>(a)] + box.u_hi[static_cast<std::size_t>(a)]);
    half[static_cast<std::size_t>(a)] =
        0.5 * (box.u_hi[static_cast<std::size_t>(a)] - box.u_lo[static_cast<std::size_t>(a)]);
  }
  const std::array<std::array<double, 3>, 3> probes = {{
      {center[0], center[1], center[2]},
      {center[0] + 0.35 * half[0], center[1] - 0.21 * half[1], center[2] + 0.13 * half[2]},
      {center[0] - 0.17 * half[0], center[1] + 0.29 * half[1], center[2] - 0.33 * half[2]},
  }};

  for (const auto& qv : probes) {
    const auto r2 = cell_radii_sq(s, qv);

    // Past this energy every cell's shell window is empty: the farthest box
    // corner bounds the cell radii, the squared-mass edge bounds the window.
    double rmax2 = 0;
    for (int corner = 0; corner < 8; ++corner) {
      double acc = 0;
      for (int a = 0; a < 3; ++a) {
        const double edge = ((corner >> a) & 1) != 0 ? box.u_hi[static_cast<std::size_t>(a)]
                                                     : box.u_lo[static_cast<std::size_t>(a)];
        const double d = qv[static_cast<std::size_t>(a)] - edge;
        acc += d * d;
      }
      rmax2 = std::max(rmax2, acc);
    }
    const double radius = std::sqrt(rmax2 + box.k2_hi);

    int panels = 24;
    double prev = integrate_energy(s, r2, radius, panels);
    const int panel_cap = 6144;
    double value = prev;
    double err = std::numeric_limits<double>::infinity();
    while (true) {
      panels *= 2;
      value = integrate_energy(s, r2, radius, panels);
      err = std::abs(value - prev);
      if (err <= tolerance) break;
      if (panels >= panel_cap)
        throw AccuracyError("sum rule quadrature did not reach the requested tolerance", err);
      prev = value;
    }
    out.probes.push_back({qv, value, err});
  }

  double lo = out.probes[0].value, hi = out.probes[0].value, mean = 0;
  for (const auto& p : out.probes) {
    lo = std::min(lo, p.value);
    hi = std::max(hi, p.value);
    mean += p.value;
  }
  out.numeric = mean / static_cast<double>(out.probes.size());
  out.spread = hi - lo;
  return out;
}

BeyondJldReport beyond_jld_demo(const NumericConfig& config) {
  BeyondJldReport report;

  // A cubic is a perfectly good polynomial, but no constant: the class of
  // energy-integrated commutators is wider than the constants the shell
  // representation can produce.
  report.cubic = test_polynomiality_numeric(
      [](const std::vector<double>& q) { return q[0] * q[1] * q[2]; }, 3, config);

  FieldModel model = make_bose_model(4, 4, {Rational(1)});
  const int j = 0;
  const MomentumDistribution base = build_structure_function(model);

  report.control =
      decide_locality(reduce_double_integral(commutator_at(base, j), j), config);

  const Polynomial bracket_dot = minkowski_dot(model, j, j + 1);
  Polynomial multiplier(Rational(1));
  for (int power = 1; power <= 4; ++power) {
    multiplier = multiplier * bracket_dot;
    LocalityVerdict verdict = decide_locality(
        reduce_double_integral(commutator_at(base.multiplied_by(multiplier), j), j), config);
    const std::string label = "(k1.k2)^" + std::to_string(power);
    report.scan.push_back({label, verdict});

    if (report.witness.empty() && verdict.kind != LocalityVerdict::Kind::Zero &&
        verdict.kind != LocalityVerdict::Kind::Undecided) {
      int degree = 0;
      for (const auto& sym : multiplier.symbols())
        degree = std::max(degree, multiplier.degree_in(sym));
      if (degree >= 4) {
        report.witness = label;
        report.witness_power = power;
        report.witness_degree = degree;
        report.with_multiplier = verdict;
      }
    }
  }
  return report;
}

namespace {

double read_value(std::istream& is, const char* what) {
  double v = 0;
  if (!(is >> v)) throw std::runtime_error(std::string("spectral load: malformed ") + what);
  if (!std::isfinite(v))
    throw std::runtime_error(std::string("spectral load: non-finite ") + what);
  return v;
}

int read_count(std::istream& is, const char* what) {
  long long v = 0;
  if (!(is >> v) || v < 1 || v > static_cast<long long>(kMaxCells))
    throw std::runtime_error(std::string("spectral load: malformed ") + what);
  return static_cast<int>(v);
}

void expect_keyword(std::istream& is, const char* keyword) {
  std::string token;
  if (!(is >> token) || token != keyword)
    throw std::runtime_error(std::string("spectral load: expected '") + keyword + "'");
}

void write_values(std::ostream& os, const std::vector<double>& values) {
  std::size_t on_line = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    os << values[i];
    if (++on_line == 6 || i + 1 == values.size()) {
      os << '\n';
      on_line = 0;
    } else {
      os << ' ';
    }
  }
}

}  // namespace

void save_spectral_fn(const SpectralFn& s, std::ostream& os) {
  s.require_finite_values();
  os << "momloc-spectral/1\n";
  os << std::setprecision(17);
  const auto& box = s.box();
  os << "u_lo " << box.u_lo[0] << ' ' << box.u_lo[1] << ' ' << box.u_lo[2] << '\n';
  os << "u_hi " << box.u_hi[0] << ' ' << box.u_hi[1] << ' ' << box.u_hi[2] << '\n';
  os << "k2 " << box.k2_lo << ' ' << box.k2_hi << '\n';
  os << "nu " << s.nu()[0] << ' ' << s.nu()[1] << ' ' << s.nu()[2] << '\n';
  os << "nk " << s.nk() << '\n';
  os << "tv_bound " << s.tv_bound() << '\n';
  os << "phi1\n";
  write_values(os, s.phi1_values());
  os << "phi2\n";
  write_values(os, s.phi2_values());
  if (!os) throw std::runtime_error("spectral save: stream failure");
}

void save_spectral_fn(const SpectralFn& s, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("spectral save: cannot open " + path);
  save_spectral_fn(s, os);
}

SpectralFn load_spectral_fn(std::istream& is) {
  expect_keyword(is, "momloc-spectral/1");
  SpectralGridBox box;
  expect_keyword(is, "u_lo");
  for (auto& v : box.u_lo) v = read_value(is, "box edge");
  expect_keyword(is, "u_hi");
  for (auto& v : box.u_hi) v = read_value(is, "box edge");
  expect_keyword(is, "k2");
  box.k2_lo = read_value(is, "squared-mass edge");
  box.k2_hi = read_value(is, "squared-mass edge");
  expect_keyword(is, "nu");
  std::array<int, 3> nu{};
  for (auto& n : nu) n = read_count(is, "resolution");
  expect_keyword(is, "nk");
  const int nk = read_count(is, "resolution");
  expect_keyword(is, "tv_bound");
  const double tv = read_value(is, "tv_bound");

  SpectralFn s(box, nu, nk, tv);
  expect_keyword(is, "phi1");
  for (int ix = 0; ix < nu[0]; ++ix)
    for (int iy = 0; iy < nu[1]; ++iy)
      for (int iz = 0; iz < nu[2]; ++iz)
        for (int ik = 0; ik < nk; ++ik) s.phi1(ix, iy, iz, ik) = read_value(is, "phi1 value");
  expect_keyword(is, "phi2");
  for (int ix = 0; ix < nu[0]; ++ix)
    for (int iy = 0; iy < nu[1]; ++iy)
      for (int iz = 0; iz < nu[2]; ++iz)
        for (int ik = 0; ik < nk; ++ik) s.phi2(ix, iy, iz, ik) = read_value(is, "phi2 value");
  return s;
}

SpectralFn load_spectral_fn(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("spectral load: cannot open " + path);
  return load_spectral_fn(is);
}

}  // namespace momloc
