#pragma once

#include "momloc/locality.hpp"

#include <optional>
#include <string>
#include <vector>

namespace momloc {

/// One executed scenario: a stable label, whether its declared expectation
/// held, and the report lines describing what happened. Lines never contain
/// timings or machine identifiers, so reports are byte-reproducible.
struct ScenarioOutcome {
  std::string label;
  bool matched = false;
  std::vector<std::string> lines;
};

/// A named side file emitted by a scenario (CSV plot data).
struct ReportFile {
  std::string name;
  std::string content;
};

/// Result of a whole configuration run.
struct ScenarioReport {
  bool all_matched = true;
  std::vector<ScenarioOutcome> outcomes;
  std::vector<ReportFile> files;

  /// Versioned report body (schema momloc-report/1): header, one block per
  /// scenario in config order, match summary. Deterministic for a fixed
  /// config and seed.
  std::string text() const;
};

/// Caller-supplied overrides that beat the config file's values.
struct ScenarioOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
};

/// Runs every scenario in a configuration document.
///
/// The document is JSON with schema tag "momloc-scenario/1":
///   {"schema": "momloc-scenario/1", "seed": 1, "scenarios": [...]}
/// Each scenario object carries "kind" — one of "free-field", "structure",
/// "weighted-structure", "multiplier", "jld-sumrule", "oracle" — its
/// parameters, and the expected outcome ("expect"). Slot indices j are
/// 1-based; "j": "all" expands to every slot and requires every verdict to
/// match the expectation. Malformed documents throw std::runtime_error;
/// failures inside a scenario are recorded in its outcome and count as a
/// mismatch.
ScenarioReport run_scenarios(const std::string& config_text,
                             const ScenarioOverrides& overrides = {});

/// Same, reading the configuration from a file.
ScenarioReport run_scenario_file(const std::string& path,
                                 const ScenarioOverrides& overrides = {});

/// Writes report.txt plus any side files into out_dir (creating it if
/// needed; "" means the current directory) and returns the written paths.
/// I/O failures throw std::runtime_error.
std::vector<std::string> emit_report(const ScenarioReport& report, const std::string& out_dir);

}  // namespace momloc
