#include "momloc/scenario.hpp"

#include "momloc/commutator.hpp"
#include "momloc/energy_reduce.hpp"
#include "momloc/jld.hpp"
#include "momloc/momdist.hpp"
#include "momloc/numoracle.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace momloc {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void config_error(const std::string& what) {
  throw std::runtime_error("config: " + what);
}

const json& field(const json& obj, const char* key) {
  if (!obj.contains(key)) config_error(std::string("missing field '") + key + "'");
  return obj.at(key);
}

int int_field(const json& obj, const char* key) {
  const json& v = field(obj, key);
  if (!v.is_number_integer()) config_error(std::string("'") + key + "' must be an integer");
  return v.get<int>();
}

int int_field_or(const json& obj, const char* key, int fallback) {
  return obj.contains(key) ? int_field(obj, key) : fallback;
}

double num_field(const json& obj, const char* key) {
  const json& v = field(obj, key);
  if (!v.is_number()) config_error(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

double num_field_or(const json& obj, const char* key, double fallback) {
  return obj.contains(key) ? num_field(obj, key) : fallback;
}

std::string str_field(const json& obj, const char* key) {
  const json& v = field(obj, key);
  if (!v.is_string()) config_error(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

std::string str_field_or(const json& obj, const char* key, const std::string& fallback) {
  return obj.contains(key) ? str_field(obj, key) : fallback;
}

// Exact rational from an integer or a "p/q" string.
Rational rational_field(const json& v, const char* key) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_string()) {
    try {
      return rational_parse(v.get<std::string>());
    } catch (const std::exception& e) {
      config_error(std::string("'") + key + "': " + e.what());
    }
  }
  config_error(std::string("'") + key + "' must be an integer or a rational string");
}

std::vector<Rational> masses_for(const json& obj) {
  if (obj.contains("masses")) {
    const json& list = obj.at("masses");
    if (!list.is_array() || list.empty()) config_error("'masses' must be a non-empty array");
    std::vector<Rational> masses;
    for (const json& m : list) masses.push_back(rational_field(m, "masses"));
    return masses;
  }
  const int count = int_field_or(obj, "N", 1);
  if (count < 1) config_error("'N' must be at least 1");
  std::vector<Rational> masses;
  for (int i = 0; i < count; ++i) masses.emplace_back(i + 1);
  return masses;
}

// 1-based commutator slots requested by the scenario ("j": index or "all").
std::vector<int> slots_for(const json& obj, int n) {
  if (!obj.contains("j") || (obj.at("j").is_string() && obj.at("j").get<std::string>() == "all")) {
    std::vector<int> slots;
    for (int j = 1; j <= n - 1; ++j) slots.push_back(j);
    return slots;
  }
  const int j = int_field(obj, "j");
  if (j < 1 || j > n - 1) config_error("'j' out of range");
  return {j};
}

struct Expectation {
  std::string expect;
  std::optional<int> degree;
};

Expectation expectation_for(const json& obj) {
  Expectation e;
  e.expect = str_field(obj, "expect");
  if (obj.contains("degree")) e.degree = int_field(obj, "degree");
  return e;
}

bool verdict_matches(const LocalityVerdict& v, const Expectation& e) {
  if (e.expect == "zero") return v.is_zero();
  if (e.expect == "non-zero")
    return !v.is_zero() && v.kind != LocalityVerdict::Kind::Undecided;
  if (e.expect == "polynomial")
    return v.kind == LocalityVerdict::Kind::PolynomialOfDegree &&
           (!e.degree || v.degree == *e.degree);
  if (e.expect == "non-polynomial") return v.kind == LocalityVerdict::Kind::NonPolynomial;
  if (e.expect == "any") return true;
  config_error("unknown expectation '" + e.expect + "'");
}

NumericConfig numeric_config(const json& obj, const NumericConfig& base) {
  NumericConfig cfg = base;
  if (obj.contains("seed")) cfg.seed = field(obj, "seed").get<std::uint64_t>();
  if (obj.contains("tolerance")) cfg.tolerance = num_field(obj, "tolerance");
  return cfg;
}

LocalityVerdict run_pipeline(const MomentumDistribution& dist, int slot_1based,
                             const NumericConfig& cfg) {
  const int slot = slot_1based - 1;
  return decide_locality(reduce_double_integral(commutator_at(dist, slot), slot), cfg);
}

// Shared "run the reduction at every requested slot" driver.
void run_verdict_scenario(ScenarioOutcome& out, const MomentumDistribution& dist,
                          const std::vector<int>& slots, const Expectation& expect,
                          const NumericConfig& cfg) {
  out.matched = true;
  for (int j : slots) {
    const LocalityVerdict v = run_pipeline(dist, j, cfg);
    const bool ok = verdict_matches(v, expect);
    out.lines.push_back("j=" + std::to_string(j) + ": " + v.str() + (ok ? "" : "  <- mismatch"));
    out.matched = out.matched && ok;
  }
  out.lines.push_back("expect " + expect.expect + ": " + (out.matched ? "MATCH" : "MISMATCH"));
}

void run_free_field(const json& obj, ScenarioOutcome& out, const NumericConfig& cfg) {
  const int d = int_field_or(obj, "d", 4);
  const Rational mass =
      obj.contains("mass") ? rational_field(obj.at("mass"), "mass") : Rational(1);
  const FieldModel model = make_bose_model(2, d, {mass});
  out.lines.push_back("free field d=" + std::to_string(d) + " mass=" + rational_str(mass));

  // The spatial conservation delta forces equal energies of the two slots;
  // without that identification the decision honestly refuses to certify.
  const ReducedExpr constrained = apply_support_constraints(
      reduce_free_two_point(model), {{omega_sym(1, 0), omega_sym(0, 0)}});
  const Expectation expect = expectation_for(obj);
  const LocalityVerdict v = decide_locality(constrained, cfg);
  out.matched = verdict_matches(v, expect);
  out.lines.push_back("j=1 (omega_2 = omega_1 applied): " + v.str());
  out.lines.push_back("expect " + expect.expect + ": " + (out.matched ? "MATCH" : "MISMATCH"));
}

void run_structure(const json& obj, ScenarioOutcome& out, const NumericConfig& cfg) {
  const int n = int_field(obj, "n");
  const int d = int_field_or(obj, "d", 4);
  const std::vector<Rational> masses = masses_for(obj);
  const FieldModel model = make_bose_model(n, d, masses);
  std::string desc = "structure n=" + std::to_string(n) + " d=" + std::to_string(d) + " masses=";
  for (std::size_t i = 0; i < masses.size(); ++i)
    desc += (i ? "," : "") + rational_str(masses[i]);
  out.lines.push_back(desc);
  run_verdict_scenario(out, build_structure_function(model), slots_for(obj, n),
                       expectation_for(obj), cfg);
}

void run_weighted(const json& obj, ScenarioOutcome& out, const NumericConfig& cfg) {
  const int n = int_field(obj, "n");
  const int d = int_field_or(obj, "d", 4);
  const std::vector<Rational> masses = masses_for(obj);
  const FieldModel model = make_bose_model(n, d, masses);

  const json& wl = field(obj, "weights");
  if (!wl.is_array() || wl.empty()) config_error("'weights' must be a non-empty array");
  WeightList shared;
  for (const json& w : wl) {
    if (!w.is_array() || w.size() != 3) config_error("each weight must be [species, re, im]");
    const int species = w.at(0).is_number_integer() ? w.at(0).get<int>() : -1;
    if (species < 0 || species >= model.species_count()) config_error("weight species out of range");
    shared.emplace_back(species, ComplexRational(rational_field(w.at(1), "weights"),
                                                 rational_field(w.at(2), "weights")));
  }

  std::string desc = "weighted structure n=" + std::to_string(n) + " weights=";
  for (std::size_t i = 0; i < shared.size(); ++i)
    desc += (i ? " " : "") + std::to_string(shared[i].first) + ":" +
            complex_rational_str(shared[i].second);
  out.lines.push_back(desc);
  run_verdict_scenario(out, build_weighted_structure_function(model, shared), slots_for(obj, n),
                       expectation_for(obj), cfg);
}

void run_multiplier(const json& obj, ScenarioOutcome& out, const NumericConfig& cfg) {
  const int n = int_field(obj, "n");
  const int d = int_field_or(obj, "d", 4);
  const int power = int_field(obj, "power");
  if (power < 1) config_error("'power' must be at least 1");
  const std::vector<int> slots = slots_for(obj, n);
  if (slots.size() != 1) config_error("multiplier scenarios need a single 'j'");
  const int j = slots.front();

  const FieldModel model = make_bose_model(n, d, masses_for(obj));
  const Polynomial dot = minkowski_dot(model, j - 1, j);
  Polynomial multiplier(Rational(1));
  for (int p = 0; p < power; ++p) multiplier = multiplier * dot;

  std::string reason;
  if (!validate_multiplier(model, multiplier, &reason))
    config_error("multiplier rejected: " + reason);

  const std::string label =
      "(k" + std::to_string(j) + ".k" + std::to_string(j + 1) + ")^" + std::to_string(power);
  out.lines.push_back("multiplier " + label + " on structure n=" + std::to_string(n));

  const Expectation expect = expectation_for(obj);
  const LocalityVerdict v =
      run_pipeline(build_structure_function(model).multiplied_by(multiplier), j, cfg);
  out.matched = verdict_matches(v, expect);
  out.lines.push_back("j=" + std::to_string(j) + ": " + v.str());
  if (!v.is_zero()) out.lines.push_back("witness " + label);
  out.lines.push_back("expect " + expect.expect + ": " + (out.matched ? "MATCH" : "MISMATCH"));
}

// Smooth bump phi2 normalized to unit grid integral plus an arbitrary smooth
// phi1, the stock grid for sum-rule scenarios without a spectral file.
SpectralFn stock_gaussian_grid(int nu, int nk) {
  SpectralGridBox box;
  box.u_lo = {-1, -1, -1};
  box.u_hi = {1, 1, 1};
  box.k2_lo = 0.0;
  box.k2_hi = 1.0;
  SpectralFn s(box, {nu, nu, nu}, nk, 1.0);
  for (int ix = 0; ix < nu; ++ix)
    for (int iy = 0; iy < nu; ++iy)
      for (int iz = 0; iz < nu; ++iz) {
        const double x = s.u_center(0, ix), y = s.u_center(1, iy), z = s.u_center(2, iz);
        const double gu = std::exp(-8.0 * (x * x + y * y + z * z));
        for (int ik = 0; ik < nk; ++ik) {
          const double k2 = s.k2_center(ik);
          const double dk = (k2 - 0.5) / 0.1;
          s.phi2(ix, iy, iz, ik) = gu * std::exp(-dk * dk);
          s.phi1(ix, iy, iz, ik) = gu * (0.6 + 0.3 * k2);
        }
      }
  const double norm = s.grid_integral_phi2();
  for (int ix = 0; ix < nu; ++ix)
    for (int iy = 0; iy < nu; ++iy)
      for (int iz = 0; iz < nu; ++iz)
        for (int ik = 0; ik < nk; ++ik) s.phi2(ix, iy, iz, ik) /= norm;
  return s;
}

void run_jld_sumrule(const json& obj, ScenarioOutcome& out, int index,
                     std::vector<ReportFile>& files, const NumericConfig& cfg) {
  const int nu = int_field_or(obj, "nu", 16);
  const int nk = int_field_or(obj, "nk", nu);
  const double tol = obj.contains("tolerance") ? num_field(obj, "tolerance")
                                               : std::min(cfg.tolerance * 100, 1e-7);
  const double rel = num_field_or(obj, "rel", 1e-6);

  SpectralFn s = obj.contains("spectral") ? load_spectral_fn(str_field(obj, "spectral"))
                                          : stock_gaussian_grid(nu, nk);
  out.lines.push_back("grid " + std::to_string(s.nu()[0]) + "x" + std::to_string(s.nu()[1]) +
                      "x" + std::to_string(s.nu()[2]) + " k2-cells " + std::to_string(s.nk()));

  const SumRuleResult r = sum_rule(s, tol);
  out.lines.push_back("analytic " + fmt(r.analytic));
  out.lines.push_back("numeric " + fmt(r.numeric));
  out.lines.push_back("spread " + fmt(r.spread));

  std::string csv = "qx,qy,qz,value,error\n";
  for (const auto& p : r.probes) {
    out.lines.push_back("probe (" + fmt(p.q_vec[0]) + "," + fmt(p.q_vec[1]) + "," +
                        fmt(p.q_vec[2]) + ") value " + fmt(p.value) + " error " + fmt(p.error));
    csv += fmt(p.q_vec[0]);
    csv += ',' + fmt(p.q_vec[1]) + ',' + fmt(p.q_vec[2]) + ',' + fmt(p.value) + ',' +
           fmt(p.error) + '\n';
  }
  files.push_back({"scenario-" + std::to_string(index) + ".csv", csv});

  const double scale = std::max(1.0, std::fabs(r.analytic));
  out.matched =
      std::fabs(r.numeric - r.analytic) <= rel * scale && r.spread <= rel * scale;
  out.lines.push_back(std::string("expect match within ") + fmt(rel) + ": " +
                      (out.matched ? "MATCH" : "MISMATCH"));
}

void run_oracle_pauli_jordan(const json& obj, ScenarioOutcome& out, int index,
                             std::vector<ReportFile>& files) {
  const double mass = num_field_or(obj, "mass", 1.0);
  const double tol = num_field_or(obj, "tolerance", 1e-8);
  const json& pts = field(obj, "points");
  if (!pts.is_array() || pts.empty()) config_error("'points' must be a non-empty array");

  const std::string expect = str_field_or(obj, "expect", "any");
  const double bound = num_field_or(obj, "bound", 1e-6);
  out.lines.push_back("pauli-jordan mass=" + fmt(mass));

  out.matched = true;
  std::string csv = "t,x,value,error\n";
  for (const json& p : pts) {
    if (!p.is_array() || p.size() != 2) config_error("each point must be [t, x]");
    SpacetimePoint pt;
    pt.t = p.at(0).get<double>();
    pt.x = {p.at(1).get<double>()};
    const QuadratureResult r = pauli_jordan_d2(mass, pt, tol);
    bool ok = true;
    if (expect == "spacelike-zero") {
      if (pt.minkowski_square() >= 0) config_error("spacelike-zero expects spacelike points");
      ok = std::fabs(r.value) <= bound;
    } else if (expect != "any") {
      config_error("unknown expectation '" + expect + "'");
    }
    out.matched = out.matched && ok;
    out.lines.push_back("point (" + fmt(pt.t) + "," + fmt(pt.x[0]) + ") value " + fmt(r.value) +
                        " error " + fmt(r.error) + (ok ? "" : "  <- mismatch"));
    csv += fmt(pt.t);
    csv += ',' + fmt(pt.x[0]) + ',' + fmt(r.value) + ',' + fmt(r.error) + '\n';
  }
  files.push_back({"scenario-" + std::to_string(index) + ".csv", csv});
  out.lines.push_back("expect " + expect + ": " + (out.matched ? "MATCH" : "MISMATCH"));
}

void run_oracle_time_zero(const json& obj, ScenarioOutcome& out, int index,
                          std::vector<ReportFile>& files) {
  const double mass = num_field_or(obj, "mass", 1.0);
  const double tol = num_field_or(obj, "tolerance", 1e-8);
  std::vector<double> epsilons = {0.4, 0.2, 0.1, 0.05};
  if (obj.contains("epsilons")) {
    epsilons.clear();
    for (const json& e : obj.at("epsilons")) epsilons.push_back(e.get<double>());
    if (epsilons.empty()) config_error("'epsilons' must be non-empty");
  }
  const std::string expect = str_field_or(obj, "expect", "decreasing");
  out.lines.push_back("time-zero mass=" + fmt(mass));

  // Smearing times one mollifier width apart probe the vanishing of the
  // commutator as the time-zero limit is approached.
  const SpatialTestFunction g = bump_test_function(0, 1, 1);
  std::vector<QuadratureResult> results;
  std::string csv = "eps,value,error\n";
  for (double eps : epsilons) {
    const QuadratureResult r =
        mollified_time_zero_free_field(mass, Mollifier(eps), g, eps / 2, -eps / 2, tol);
    results.push_back(r);
    out.lines.push_back("eps " + fmt(eps) + " value " + fmt(r.value) + " error " + fmt(r.error));
    csv += fmt(eps);
    csv += ',' + fmt(r.value) + ',' + fmt(r.error) + '\n';
  }
  files.push_back({"scenario-" + std::to_string(index) + ".csv", csv});

  out.matched = true;
  if (expect == "decreasing") {
    for (std::size_t i = 1; i < results.size(); ++i)
      out.matched = out.matched &&
                    std::fabs(results[i].value) <=
                        std::fabs(results[i - 1].value) + results[i].error + results[i - 1].error;
  } else if (expect != "any") {
    config_error("unknown expectation '" + expect + "'");
  }
  out.lines.push_back("expect " + expect + ": " + (out.matched ? "MATCH" : "MISMATCH"));
}

void run_one(const json& obj, ScenarioOutcome& out, int index, std::vector<ReportFile>& files,
             const NumericConfig& base) {
  const std::string kind = str_field(obj, "kind");
  const NumericConfig cfg = numeric_config(obj, base);
  if (kind == "free-field") {
    run_free_field(obj, out, cfg);
  } else if (kind == "structure") {
    run_structure(obj, out, cfg);
  } else if (kind == "weighted-structure") {
    run_weighted(obj, out, cfg);
  } else if (kind == "multiplier") {
    run_multiplier(obj, out, cfg);
  } else if (kind == "jld-sumrule") {
    run_jld_sumrule(obj, out, index, files, cfg);
  } else if (kind == "oracle") {
    const std::string oracle = str_field(obj, "oracle");
    if (oracle == "pauli-jordan") {
      run_oracle_pauli_jordan(obj, out, index, files);
    } else if (oracle == "time-zero") {
      run_oracle_time_zero(obj, out, index, files);
    } else {
      config_error("unknown oracle '" + oracle + "'");
    }
  } else {
    config_error("unknown scenario kind '" + kind + "'");
  }
}

}  // namespace

std::string ScenarioReport::text() const {
  std::string body = "momloc-report/1\n";
  body += "scenarios " + std::to_string(outcomes.size()) + "\n";
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    body += "scenario " + std::to_string(i) + ": " + outcomes[i].label + "\n";
    for (const std::string& line : outcomes[i].lines) body += "  " + line + "\n";
  }
  std::size_t matched = 0;
  for (const auto& o : outcomes) matched += o.matched ? 1 : 0;
  body += "summary " + std::to_string(matched) + "/" + std::to_string(outcomes.size()) +
          " matched\n";
  return body;
}

ScenarioReport run_scenarios(const std::string& config_text, const ScenarioOverrides& overrides) {
  json doc;
  try {
    doc = json::parse(config_text);
  } catch (const std::exception& e) {
    config_error(std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) config_error("top level must be an object");
  if (!doc.contains("schema") || doc.at("schema") != "momloc-scenario/1")
    config_error("missing or unsupported schema (want \"momloc-scenario/1\")");

  NumericConfig base;
  if (doc.contains("seed")) base.seed = doc.at("seed").get<std::uint64_t>();
  if (overrides.seed) base.seed = *overrides.seed;
  if (overrides.tolerance) base.tolerance = *overrides.tolerance;

  ScenarioReport report;
  if (!doc.contains("scenarios")) return report;
  const json& list = doc.at("scenarios");
  if (!list.is_array()) config_error("'scenarios' must be an array");

  for (std::size_t i = 0; i < list.size(); ++i) {
    const json& obj = list.at(i);
    if (!obj.is_object()) config_error("each scenario must be an object");
    ScenarioOutcome out;
    out.label = obj.contains("label") ? str_field(obj, "label")
                                      : str_field(obj, "kind") + "-" + std::to_string(i);
    try {
      run_one(obj, out, static_cast<int>(i), report.files, base);
    } catch (const std::runtime_error& e) {
      // Config problems abort the whole run; see run_one's config_error calls.
      if (std::string(e.what()).rfind("config:", 0) == 0) throw;
      out.matched = false;
      out.lines.push_back(std::string("pipeline error: ") + e.what());
    } catch (const std::exception& e) {
      out.matched = false;
      out.lines.push_back(std::string("pipeline error: ") + e.what());
    }
    report.all_matched = report.all_matched && out.matched;
    report.outcomes.push_back(std::move(out));
  }
  return report;
}

ScenarioReport run_scenario_file(const std::string& path, const ScenarioOverrides& overrides) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path);
  std::stringstream buf;
  buf << is.rdbuf();
  return run_scenarios(buf.str(), overrides);
}

std::vector<std::string> emit_report(const ScenarioReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("emit_report: cannot create " + dir.string() + ": " +
                                   ec.message());

  std::vector<std::string> written;
  const auto write_file = [&](const std::string& name, const std::string& content) {
    const fs::path path = dir / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("emit_report: cannot open " + path.string());
    os << content;
    if (!os) throw std::runtime_error("emit_report: write failed for " + path.string());
    written.push_back(path.string());
  };

  write_file("report.txt", report.text());
  for (const ReportFile& f : report.files) write_file(f.name, f.content);
  return written;
}

}  // namespace momloc
