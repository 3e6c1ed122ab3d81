#include "momloc/scenario.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

// Splits "a,b,c" into trimmed nonempty pieces.
std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      if (!cur.empty()) parts.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) parts.push_back(cur);
  return parts;
}

// "p/q" stays a string (exact), plain integers become JSON integers.
json rational_token(const std::string& tok) {
  if (tok.find('/') != std::string::npos) return tok;
  try {
    std::size_t used = 0;
    const long long v = std::stoll(tok, &used);
    if (used == tok.size()) return v;
  } catch (const std::exception&) {
  }
  return tok;
}

struct CommonFlags {
  std::string out_dir;
  std::uint64_t seed = 0;
  double tolerance = 0;
  bool seed_set = false;
  bool tolerance_set = false;
};

int run_document(const json& doc, const CommonFlags& flags) {
  momloc::ScenarioOverrides overrides;
  if (flags.seed_set) overrides.seed = flags.seed;
  if (flags.tolerance_set) overrides.tolerance = flags.tolerance;

  const auto start = std::chrono::steady_clock::now();
  const momloc::ScenarioReport report = momloc::run_scenarios(doc.dump(), overrides);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::fputs(report.text().c_str(), stdout);
  std::fprintf(stderr, "elapsed %.3f s\n", elapsed);

  if (!flags.out_dir.empty()) {
    for (const std::string& path : momloc::emit_report(report, flags.out_dir))
      std::fprintf(stderr, "wrote %s\n", path.c_str());
  }
  return report.all_matched ? 0 : 1;
}

int run_config_file(const std::string& path, const CommonFlags& flags) {
  momloc::ScenarioOverrides overrides;
  if (flags.seed_set) overrides.seed = flags.seed;
  if (flags.tolerance_set) overrides.tolerance = flags.tolerance;

  const auto start = std::chrono::steady_clock::now();
  const momloc::ScenarioReport report = momloc::run_scenario_file(path, overrides);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::fputs(report.text().c_str(), stdout);
  std::fprintf(stderr, "elapsed %.3f s\n", elapsed);

  if (!flags.out_dir.empty()) {
    for (const std::string& written : momloc::emit_report(report, flags.out_dir))
      std::fprintf(stderr, "wrote %s\n", written.c_str());
  }
  return report.all_matched ? 0 : 1;
}

json wrap(json scenario) {
  json doc;
  doc["schema"] = "momloc-scenario/1";
  doc["scenarios"] = json::array({std::move(scenario)});
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"momloc: locality analysis of momentum space distributions"};
  app.require_subcommand(0, 1);

  CommonFlags flags;
  std::string config_path;
  app.add_option("--config", config_path, "run every scenario in a configuration file");
  app.add_option("--out", flags.out_dir, "directory for report.txt and CSV side files");
  auto* seed_opt = app.add_option("--seed", flags.seed, "override the numeric sweep seed");
  auto* tol_opt =
      app.add_option("--tolerance", flags.tolerance, "override the numeric tolerance");

  // check-free-field
  int ff_d = 4;
  std::string ff_mass = "1", ff_expect = "zero";
  auto* ff = app.add_subcommand("check-free-field", "two-point function locality");
  ff->add_option("--d", ff_d, "spacetime dimension");
  ff->add_option("--mass", ff_mass, "field mass (integer or p/q)");
  ff->add_option("--expect", ff_expect, "expected verdict");

  // check-structure
  int st_n = 4, st_d = 4, st_count = 2;
  std::string st_masses, st_j = "all", st_expect = "zero";
  auto* st = app.add_subcommand("check-structure", "structure-function locality");
  st->add_option("--n", st_n, "number of arguments");
  st->add_option("--d", st_d, "spacetime dimension");
  st->add_option("--N", st_count, "species count (masses 1..N)");
  st->add_option("--masses", st_masses, "comma-separated species masses");
  st->add_option("--j", st_j, "commutator slot (1-based) or 'all'");
  st->add_option("--expect", st_expect, "expected verdict");

  // check-weighted
  int wt_n = 3, wt_d = 4;
  std::string wt_masses = "1,2", wt_weights = "0:1:1/2,1:1/4:-1", wt_j = "all",
              wt_expect = "zero";
  auto* wt = app.add_subcommand("check-weighted", "weighted structure-function locality");
  wt->add_option("--n", wt_n, "number of arguments");
  wt->add_option("--d", wt_d, "spacetime dimension");
  wt->add_option("--masses", wt_masses, "comma-separated species masses");
  wt->add_option("--weights", wt_weights, "species:re:im list shared across slots");
  wt->add_option("--j", wt_j, "commutator slot (1-based) or 'all'");
  wt->add_option("--expect", wt_expect, "expected verdict");

  // check-multiplier
  int mu_n = 4, mu_d = 4, mu_power = 4, mu_j = 1, mu_count = 1;
  std::string mu_expect = "non-zero";
  auto* mu = app.add_subcommand("check-multiplier", "bracket-dot multiplier pipeline");
  mu->add_option("--n", mu_n, "number of arguments");
  mu->add_option("--d", mu_d, "spacetime dimension");
  mu->add_option("--N", mu_count, "species count (masses 1..N)");
  mu->add_option("--power", mu_power, "power of the bracket dot (k_j . k_j+1)");
  mu->add_option("--j", mu_j, "commutator slot (1-based)");
  mu->add_option("--expect", mu_expect, "expected verdict");

  // jld-sumrule
  int jl_nu = 16, jl_nk = 0;
  double jl_rel = 1e-6;
  std::string jl_spectral;
  auto* jl = app.add_subcommand("jld-sumrule", "energy integral against the grid sum");
  jl->add_option("--nu", jl_nu, "cells per spatial axis");
  jl->add_option("--nk", jl_nk, "squared-mass cells (default: same as --nu)");
  jl->add_option("--rel", jl_rel, "relative match requirement");
  jl->add_option("--spectral", jl_spectral, "spectral grid file (default: stock Gaussian)");

  // oracle-pauli-jordan
  double pj_mass = 1.0, pj_bound = 1e-6;
  std::string pj_points = "0:1,0.5:1.5,1:2,0:2.5,1.5:2.5", pj_expect = "spacelike-zero";
  auto* pj = app.add_subcommand("oracle-pauli-jordan", "position-space commutator oracle");
  pj->add_option("--mass", pj_mass, "field mass");
  pj->add_option("--points", pj_points, "comma-separated t:x points");
  pj->add_option("--bound", pj_bound, "allowed |value| for spacelike-zero");
  pj->add_option("--expect", pj_expect, "'spacelike-zero' or 'any'");

  // oracle-time-zero
  double tz_mass = 1.0;
  std::string tz_eps = "0.4,0.2,0.1,0.05", tz_expect = "decreasing";
  auto* tz = app.add_subcommand("oracle-time-zero", "mollified time-zero commutator oracle");
  tz->add_option("--mass", tz_mass, "field mass");
  tz->add_option("--epsilons", tz_eps, "comma-separated mollifier widths");
  tz->add_option("--expect", tz_expect, "'decreasing' or 'any'");

  CLI11_PARSE(app, argc, argv);
  flags.seed_set = seed_opt->count() > 0;
  flags.tolerance_set = tol_opt->count() > 0;

  try {
    if (!config_path.empty()) {
      if (!app.get_subcommands().empty()) {
        std::fprintf(stderr, "error: --config cannot be combined with a subcommand\n");
        return 2;
      }
      return run_config_file(config_path, flags);
    }
    if (app.get_subcommands().empty()) {
      std::puts(app.help().c_str());
      return 0;
    }

    json s;
    if (ff->parsed()) {
      s["kind"] = "free-field";
      s["d"] = ff_d;
      s["mass"] = rational_token(ff_mass);
      s["expect"] = ff_expect;
    } else if (st->parsed()) {
      s["kind"] = "structure";
      s["n"] = st_n;
      s["d"] = st_d;
      if (!st_masses.empty()) {
        json masses = json::array();
        for (const std::string& m : split_list(st_masses)) masses.push_back(rational_token(m));
        s["masses"] = masses;
      } else {
        s["N"] = st_count;
      }
      s["j"] = st_j == "all" ? json("all") : json(std::stoi(st_j));
      s["expect"] = st_expect;
    } else if (wt->parsed()) {
      s["kind"] = "weighted-structure";
      s["n"] = wt_n;
      s["d"] = wt_d;
      json masses = json::array();
      for (const std::string& m : split_list(wt_masses)) masses.push_back(rational_token(m));
      s["masses"] = masses;
      json weights = json::array();
      for (const std::string& w : split_list(wt_weights)) {
        const auto c1 = w.find(':');
        const auto c2 = w.find(':', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
          std::fprintf(stderr, "error: weight '%s' is not species:re:im\n", w.c_str());
          return 2;
        }
        weights.push_back(json::array({std::stoi(w.substr(0, c1)),
                                       rational_token(w.substr(c1 + 1, c2 - c1 - 1)),
                                       rational_token(w.substr(c2 + 1))}));
      }
      s["weights"] = weights;
      s["j"] = wt_j == "all" ? json("all") : json(std::stoi(wt_j));
      s["expect"] = wt_expect;
    } else if (mu->parsed()) {
      s["kind"] = "multiplier";
      s["n"] = mu_n;
      s["d"] = mu_d;
      s["N"] = mu_count;
      s["power"] = mu_power;
      s["j"] = mu_j;
      s["expect"] = mu_expect;
    } else if (jl->parsed()) {
      s["kind"] = "jld-sumrule";
      s["nu"] = jl_nu;
      s["nk"] = jl_nk > 0 ? jl_nk : jl_nu;
      s["rel"] = jl_rel;
      if (!jl_spectral.empty()) s["spectral"] = jl_spectral;
      if (flags.tolerance_set) s["tolerance"] = flags.tolerance;
    } else if (pj->parsed()) {
      s["kind"] = "oracle";
      s["oracle"] = "pauli-jordan";
      s["mass"] = pj_mass;
      s["bound"] = pj_bound;
      s["expect"] = pj_expect;
      json points = json::array();
      for (const std::string& p : split_list(pj_points)) {
        const auto colon = p.find(':');
        if (colon == std::string::npos) {
          std::fprintf(stderr, "error: point '%s' is not t:x\n", p.c_str());
          return 2;
        }
        points.push_back(
            json::array({std::stod(p.substr(0, colon)), std::stod(p.substr(colon + 1))}));
      }
      s["points"] = points;
      if (flags.tolerance_set) s["tolerance"] = flags.tolerance;
    } else if (tz->parsed()) {
      s["kind"] = "oracle";
      s["oracle"] = "time-zero";
      s["mass"] = tz_mass;
      s["expect"] = tz_expect;
      json eps = json::array();
      for (const std::string& e : split_list(tz_eps)) eps.push_back(std::stod(e));
      s["epsilons"] = eps;
      if (flags.tolerance_set) s["tolerance"] = flags.tolerance;
    }
    return run_document(wrap(std::move(s)), flags);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    std::fprintf(stderr, "run '%s --help' for usage\n", argv[0]);
    return 2;
  }
}
