#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sephier/derivation.hpp"
#include "sephier/evolution.hpp"
#include "sephier/gauge.hpp"

namespace sephier {

inline constexpr const char* kToolkitVersion = "0.1.0";

/// One named check suite run. `hierarchy` is a builtin preset name (with
/// optional parameters) or a JSON file path; spec overrides d/K/m/f apply to
/// presets, files carry their own. tolerance 0 selects the per-check default.
struct RunConfig {
  std::string check = "all";
  std::string hierarchy = "linear_schrodinger";
  int d = 1;
  int K = 2;
  int m = 1;
  int f = 0;
  int samples = 100;
  std::uint64_t seed = 1;
  double tolerance = 0.0;
  int conglomerate_n = 2;
  bool conglomerate_fermi_sign = false;
  double grid_length = 6.283185307179586;
  int grid_points = 64;
  double dt = 1e-4;
  double time = 0.01;
  double gauge_gamma = 0.3;
  double gauge_lambda = 1.0;
  std::string expect = "pass";  // "pass" | "fail"
  std::string out_path;
  std::string csv_path;
};

RunConfig config_from_json_text(const std::string& text);
RunConfig load_config_file(const std::string& path);
std::string config_to_json_text(const RunConfig& config);

struct CheckResult {
  std::string name;
  int samples = 0;
  std::string metric;
  double value = 0.0;
  double tolerance = 0.0;
  bool has_k_hat = false;
  cdouble k_hat{};
  std::string verdict;
  bool pass = false;
  double wall_ms = 0.0;
  std::string witness_json;  // replayable payload, embeds the hierarchy
};

struct Report {
  std::string version = kToolkitVersion;
  std::string generated_at;  // ISO-8601 UTC; excluded from determinism
  RunConfig config;
  std::vector<CheckResult> checks;
  bool all_pass = true;
};

/// Executes the configured check (or the full suite for "all"),
/// deterministically for a given seed.
Report run(const RunConfig& config);

std::string report_to_json_text(const Report& report);

/// Exit code with expect-inversion: 0 when the outcome matches expectation,
/// 2 otherwise. Operational errors surface as exceptions (exit 1 in the CLI).
int report_exit_code(const Report& report);

/// Names accepted by RunConfig::check.
const std::vector<std::string>& known_checks();

/// Re-evaluates every witness embedded in a report and compares against the
/// recorded values (tolerance 1e-12). Prints one line per check; returns 0
/// on full agreement, 2 otherwise.
int replay_report(const std::string& report_json, std::ostream& out);

}  // namespace sephier
