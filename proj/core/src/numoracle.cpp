#include "momloc/numoracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace momloc {

namespace {

// 15-point Gauss-Legendre rule on [-1,1] with an embedded 7-point rule for
// the error estimate (two separate rules; the estimate is |GL15 - GL7|).
constexpr int kGl15 = 15;
constexpr double kGl15Node[kGl15] = {
    0.0,
    -0.2011940939974345, 0.2011940939974345,
    -0.3941513470775634, 0.3941513470775634,
    -0.5709721726085388, 0.5709721726085388,
    -0.7244177313601701, 0.7244177313601701,
    -0.8482065834104272, 0.8482065834104272,
    -0.9372733924007060, 0.9372733924007060,
    -0.9879925180204854, 0.9879925180204854,
};
constexpr double kGl15Weight[kGl15] = {
    0.2025782419255613,
    0.1984314853271116, 0.1984314853271116,
    0.1861610000155622, 0.1861610000155622,
    0.1662692058169939, 0.1662692058169939,
    0.1395706779261543, 0.1395706779261543,
    0.1071592204671719, 0.1071592204671719,
    0.0703660474881081, 0.0703660474881081,
    0.0307532419961173, 0.0307532419961173,
};

constexpr int kGl7 = 7;
constexpr double kGl7Node[kGl7] = {
    0.0,
    -0.4058451513773972, 0.4058451513773972,
    -0.7415311855993945, 0.7415311855993945,
    -0.9491079123427585, 0.9491079123427585,
};
constexpr double kGl7Weight[kGl7] = {
    0.4179591836734694,
    0.3818300505051189, 0.3818300505051189,
    0.2797053914892767, 0.2797053914892767,
    0.1294849661688697, 0.1294849661688697,
};

struct PanelSum {
  double value = 0;
  double estimate = 0;
};

// Composite quadrature of f over [a,b] with panels no wider than h_max.
template <typename F>
PanelSum integrate_panels(F&& f, double a, double b, double h_max) {
  PanelSum out;
  if (!(b > a)) return out;
  const int n = static_cast<int>(std::ceil((b - a) / h_max));
  const double h = (b - a) / n;
  for (int p = 0; p < n; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h;
    const double half = 0.5 * h;
    double s15 = 0;
    for (int i = 0; i < kGl15; ++i) s15 += kGl15Weight[i] * f(mid + half * kGl15Node[i]);
    double s7 = 0;
    for (int i = 0; i < kGl7; ++i) s7 += kGl7Weight[i] * f(mid + half * kGl7Node[i]);
    out.value += half * s15;
    out.estimate += half * std::abs(s15 - s7);
  }
  return out;
}

template <typename F>
double integrate(F&& f, double a, double b, int panels) {
  return integrate_panels(std::forward<F>(f), a, b, (b - a) / std::max(panels, 1)).value;
}

double require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
  return v;
}

// Raw (unnormalised) bump and the our normalisation constant.
double raw_bump(double x) {
  const double u = 1 - x * x;
  if (u <= 0) return 0;
  return std::exp(-1.0 / u);
}

double bump_norm() {
  static const double n = integrate([](double x) { return raw_bump(x); }, -1.0, 1.0, 64);
  return n;
}

// L1 norm of the second derivative of the normalised profile; used as the
// constant in the |cosine transform| <= C2/theta^2 decay bound. Slight
// inflation keeps it a safe majorant despite the quadrature of |.|.
double profile_c2() {
  static const double c2 = 1.05 * integrate([](double x) { return std::abs(Mollifier::profile_second(x)); },
                                            -1.0, 1.0, 512);
  return c2;
}

// Cosine transform of the normalised profile, int phi(x) cos(theta x) dx.
// The panel count resolves both the oscillation and the bump itself.
double profile_cos_transform(double theta) {
  theta = std::abs(theta);
  const int panels = std::max(12, static_cast<int>(std::ceil(theta / 3)));
  return 2 * integrate([theta](double x) { return Mollifier::profile(x) * std::cos(theta * x); },
                       0.0, 1.0, panels);
}

// Cosine transform of a spatial test function over its support. The panel
// count resolves the oscillation and the function's own feature scale; a
// low-frequency bias here would survive the oscillatory cancellation of the
// outer integral, so the feature scale matters even at small k.
double test_fn_cos_transform(const SpatialTestFunction& g, double k) {
  const double r = g.radius;
  const double feature = (g.scale > 0 ? g.scale : r) / 8;
  const int panels = std::max({4, static_cast<int>(std::ceil(2 * r / feature)),
                               static_cast<int>(std::ceil(2 * r * std::abs(k) / 3))});
  return integrate([&g, k](double xi) { return g.f(xi) * std::cos(k * xi); }, -r, r, panels);
}

struct TailData {
  double correction = 0;  // boundary terms of two integrations by parts
  double bound = 0;       // majorant of what remains past the cutoff
};

// Tail of int_K^inf sin(omega t) cos(k r) / omega dk, split into the phases
// phi_pm = omega t +- k r. Two integrations by parts give the boundary
// correction Im e^{i phi}(i g - w)/phi' at K, with g = 1/omega and
// w = (g' phi' - g phi'')/phi'^2; the leftover is bounded by 2|w/phi'|
// per phase (the factor 2 is a safety margin on the monotone-decay step).
TailData tail_at(double mass, double t, double r, double K) {
  const double omega = std::hypot(K, mass);
  const double g = 1 / omega;
  const double gp = -K / (omega * omega * omega);
  const double ppdd = t * mass * mass / (omega * omega * omega);  // phi'' (same both phases)
  TailData out;
  for (int s : {+1, -1}) {
    const double c = (K / omega) * t + s * r;  // phi'
    if (std::abs(c) < 1e-300) {
      out.bound = std::numeric_limits<double>::infinity();
      return out;
    }
    const double w = (gp * c - g * ppdd) / (c * c);
    const double phase = omega * t + s * K * r;
    out.correction += 0.5 * (g * std::cos(phase) - w * std::sin(phase)) / c;
    out.bound += 0.5 * 2 * std::abs(w / c);
  }
  return out;
}

}  // namespace

double SpacetimePoint::minkowski_square() const {
  double s = t * t;
  for (double xi : x) s -= xi * xi;
  return s;
}

Mollifier::Mollifier(double epsilon) : epsilon_(epsilon) {
  require_finite(epsilon, "epsilon");
  if (epsilon <= 0) throw std::invalid_argument("mollifier width must be positive");
}

double Mollifier::value(double x) const { return profile(x / epsilon_) / epsilon_; }

double Mollifier::profile(double x) { return raw_bump(x) / bump_norm(); }

double Mollifier::profile_second(double x) {
  const double u = 1 - x * x;
  if (u <= 0) return 0;
  const double sp = -2 * x / (u * u);
  const double spp = (-2 - 6 * x * x) / (u * u * u);
  return profile(x) * (spp + sp * sp);
}

SpatialTestFunction bump_test_function(double center, double halfwidth, double amplitude) {
  require_finite(center, "center");
  require_finite(halfwidth, "halfwidth");
  require_finite(amplitude, "amplitude");
  if (halfwidth <= 0) throw std::invalid_argument("halfwidth must be positive");
  SpatialTestFunction g;
  g.f = [center, halfwidth, amplitude](double xi) {
    return amplitude * Mollifier::profile((xi - center) / halfwidth);
  };
  g.radius = std::abs(center) + halfwidth;
  g.l1_bound = std::abs(amplitude) * halfwidth;
  g.c2_bound = std::abs(amplitude) * profile_c2() / halfwidth;
  g.scale = halfwidth;
  return g;
}

QuadratureResult pauli_jordan_d2(double mass, const SpacetimePoint& x, double tolerance,
                                 double max_panel) {
  require_finite(mass, "mass");
  require_finite(tolerance, "tolerance");
  require_finite(max_panel, "max_panel");
  if (mass <= 0) throw std::invalid_argument("mass must be positive");
  if (tolerance <= 0) throw std::invalid_argument("tolerance must be positive");
  if (max_panel < 0) throw std::invalid_argument("max_panel must be nonnegative");
  if (x.x.size() != 1) throw std::invalid_argument("expected a point with one spatial component");
  const double t = require_finite(x.t, "x.t");
  const double r = require_finite(x.x[0], "x.x[0]");
  const double pi = std::acos(-1.0);

  // Stationary points of the phases: (k/omega) t = -+ r. Beyond them the
  // phase derivatives are single-signed, which the tail formulas need.
  double kstar = 0;
  if (t != 0) {
    for (int s : {+1, -1}) {
      const double rho = -s * r / t;
      if (rho > 0 && rho < 1) kstar = std::max(kstar, mass * rho / std::sqrt(1 - rho * rho));
    }
  }

  // Grow the cutoff until the post-correction tail bound is within budget.
  // On the light cone |t| = |r| one phase derivative decays to zero and the
  // bound grows with K instead; detect the stall and report failure.
  const double tail_budget = 0.5 * tolerance * pi;
  double K = 2 * kstar + 8 * mass + 8;
  TailData tail = tail_at(mass, t, r, K);
  double best_bound = tail.bound;
  int stalls = 0;
  for (int iter = 0; iter < 60 && !(tail.bound < tail_budget); ++iter) {
    const double prev = tail.bound;
    K *= 2;
    tail = tail_at(mass, t, r, K);
    best_bound = std::min(best_bound, tail.bound);
    stalls = tail.bound >= 0.9 * prev ? stalls + 1 : 0;
    if (stalls >= 3) break;
  }
  if (!(tail.bound < tail_budget)) {
    throw AccuracyError("tail bound does not converge at the requested tolerance", best_bound / pi);
  }

  const double freq = std::abs(t) + std::abs(r);
  double h = pi / (freq + 2);
  if (max_panel > 0) h = std::min(h, max_panel);
  // Near the light cone the bound converges only at cutoffs whose panel
  // count is impractical; fail honestly rather than grind.
  const double panel_limit = 2e7;
  if (K / h > panel_limit) {
    throw AccuracyError("cutoff requires too many quadrature panels", tail.bound / pi);
  }
  const auto integrand = [mass, t, r](double k) {
    const double omega = std::hypot(k, mass);
    return std::sin(omega * t) * std::cos(k * r) / omega;
  };

  PanelSum body = integrate_panels(integrand, 0.0, K, h);
  if (max_panel <= 0) {
    for (int refine = 0; refine < 8 && !(body.estimate < tail_budget); ++refine) {
      if (K / (0.5 * h) > panel_limit) break;
      h *= 0.5;
      body = integrate_panels(integrand, 0.0, K, h);
    }
    if (!(body.estimate < tail_budget)) {
      throw AccuracyError("panel quadrature does not reach the requested tolerance",
                          (body.estimate + tail.bound) / pi);
    }
  }

  QuadratureResult out;
  out.value = -(body.value + tail.correction) / pi;
  out.error = (body.estimate + tail.bound) / pi;
  return out;
}

QuadratureResult mollified_time_zero_free_field(double mass, const Mollifier& phi,
                                                const SpatialTestFunction& g, double s, double t,
                                                double tolerance) {
  require_finite(mass, "mass");
  require_finite(s, "s");
  require_finite(t, "t");
  require_finite(tolerance, "tolerance");
  if (mass <= 0) throw std::invalid_argument("mass must be positive");
  if (tolerance <= 0) throw std::invalid_argument("tolerance must be positive");
  if (!g.f) throw std::invalid_argument("test function is empty");
  if (g.radius <= 0) throw std::invalid_argument("test function radius must be positive");
  if (g.l1_bound < 0 || g.c2_bound < 0) throw std::invalid_argument("test function bounds must be nonnegative");
  if (g.l1_bound > 0 && g.c2_bound <= 0) {
    throw std::invalid_argument("a nonzero test function needs c2_bound for the tail bound");
  }

  const double tau = s - t;
  if (tau == 0) {
    // Coinciding smearing times: the mollifier autocorrelation is even while
    // the commutator is odd in relative time, so the pairing vanishes
    // identically (the integrand below is sin(0) * ... = 0 pointwise).
    return {0.0, 0.0};
  }

  const double pi = std::acos(-1.0);
  const double eps = phi.epsilon();

  // |profile cosine transform| <= C2/theta^2 and |G_c| <= c2_bound/k^2 give
  // an integrable majorant C2^2 c2 / (eps^4 k^7) past the cutoff.
  const double c2p = profile_c2();
  const double tail_const = c2p * c2p * g.c2_bound / (6 * pi * eps * eps * eps * eps);
  double K = 4 * mass + 4 / eps + 4;
  if (tail_const > 0) {
    K = std::max(K, 1.2 * std::pow(tail_const / (0.5 * tolerance), 1.0 / 6.0));
  }
  if (!(K < 1e9)) {
    throw AccuracyError("mollified tail bound needs an impractical cutoff",
                        tail_const / std::pow(1e9, 6));
  }
  const double tail_bound = tail_const / std::pow(K, 6);
  const double h = pi / (2 * (g.radius + std::abs(tau)) + 2);
  if (K / h > 1e5 || 2 * g.radius * K / 3 > 2e5) {
    throw AccuracyError("cutoff and support require too many quadrature panels", tail_bound);
  }

  const auto integrand = [&](double k) {
    const double omega = std::hypot(k, mass);
    const double osc = std::sin(omega * tau);
    if (osc == 0) return 0.0;
    const double pc = profile_cos_transform(eps * omega);
    return osc * pc * pc * test_fn_cos_transform(g, k) / omega;
  };
  const PanelSum body = integrate_panels(integrand, 0.0, K, h);

  QuadratureResult out;
  out.value = -body.value / pi;
  out.error = body.estimate / pi + tail_bound + 1e-12 * std::max(1.0, g.l1_bound);
  return out;
}

}  // namespace momloc
