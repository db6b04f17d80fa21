#include <doctest.h>

#include <fstream>
#include <regex>
#include <sstream>

#include "sephier/checks.hpp"

using namespace sephier;

namespace {

RunConfig quick_all_config() {
  RunConfig cfg;
  cfg.check = "all";
  cfg.samples = 25;
  cfg.seed = 9;
  cfg.grid_points = 16;
  cfg.dt = 4e-4;
  cfg.time = 0.01;
  return cfg;
}

std::string scrub_volatile(std::string text) {
  text = std::regex_replace(
      text, std::regex("\"generated_at\": \"[^\"]*\""), "\"generated_at\": \"\"");
  text = std::regex_replace(
      text, std::regex("\"wall_ms\": [0-9.eE+-]+"), "\"wall_ms\": 0");
  return text;
}

}  // namespace

TEST_CASE("config JSON round trip and validation") {
  RunConfig cfg;
  cfg.check = "sym-derivation";
  cfg.hierarchy = "doebner_goldin(0.3)";
  cfg.samples = 17;
  cfg.seed = 99;
  cfg.expect = "fail";
  cfg.grid_points = 24;

  const RunConfig back = config_from_json_text(config_to_json_text(cfg));
  CHECK(back.check == cfg.check);
  CHECK(back.hierarchy == cfg.hierarchy);
  CHECK(back.samples == cfg.samples);
  CHECK(back.seed == cfg.seed);
  CHECK(back.expect == cfg.expect);
  CHECK(back.grid_points == cfg.grid_points);

  CHECK_THROWS_AS(config_from_json_text(R"({"check":"bogus"})"), ShapeError);
  CHECK_THROWS_AS(config_from_json_text(R"({"expect":"maybe"})"), ShapeError);
  CHECK_THROWS_AS(config_from_json_text(R"({"f":2})"), ShapeError);
  CHECK_THROWS_AS(config_from_json_text(R"({"grid":{"n":4}})"), ShapeError);
  CHECK_THROWS_AS(config_from_json_text("no json"), ShapeError);
  CHECK_THROWS_AS(load_config_file("/nonexistent/config.json"), ShapeError);
}

TEST_CASE("reports are deterministic modulo timestamps and wall times") {
  const RunConfig cfg = quick_all_config();
  const Report first = run(cfg);
  const Report second = run(cfg);
  CHECK(scrub_volatile(report_to_json_text(first)) ==
        scrub_volatile(report_to_json_text(second)));
  CHECK(first.all_pass);
}

TEST_CASE("exit codes honor the expectation") {
  Report report;
  report.config.expect = "pass";
  report.all_pass = true;
  CHECK(report_exit_code(report) == 0);
  report.all_pass = false;
  CHECK(report_exit_code(report) == 2);
  report.config.expect = "fail";
  CHECK(report_exit_code(report) == 0);
  report.all_pass = true;
  CHECK(report_exit_code(report) == 2);
}

TEST_CASE("failing checks carry witnesses that replay exactly") {
  RunConfig cfg;
  cfg.check = "sym-derivation";
  cfg.hierarchy = "doebner_goldin(0.3)";
  cfg.samples = 20;
  cfg.seed = 4;
  cfg.expect = "fail";

  const Report report = run(cfg);
  REQUIRE(report.checks.size() == 1);
  CHECK(!report.checks[0].pass);
  CHECK(report_exit_code(report) == 0);

  std::ostringstream lines;
  CHECK(replay_report(report_to_json_text(report), lines) == 0);
  CHECK(lines.str().find("REPLAY OK") != std::string::npos);

  SUBCASE("tampered values are caught") {
    std::string tampered = report_to_json_text(report);
    const std::size_t at = tampered.find("\"value\":");
    REQUIRE(at != std::string::npos);
    tampered.replace(at, 9, "\"value\": 1e9, \"ignored\":");
    std::ostringstream out;
    CHECK(replay_report(tampered, out) == 2);
    CHECK(out.str().find("REPLAY FAIL") != std::string::npos);
  }
}

TEST_CASE("the full suite replays witness-by-witness") {
  const Report report = run(quick_all_config());
  std::ostringstream lines;
  CHECK(replay_report(report_to_json_text(report), lines) == 0);
  int count = 0;
  std::istringstream in(lines.str());
  std::string line;
  while (std::getline(in, line)) count += line.rfind("REPLAY OK", 0) == 0;
  CHECK(count == 8);
}

TEST_CASE("report and csv files are written on request") {
  RunConfig cfg;
  cfg.check = "evolve-gap";
  cfg.samples = 1;
  cfg.grid_points = 16;
  cfg.dt = 4e-4;
  cfg.time = 0.01;
  cfg.out_path = "/tmp/sephier_test_report.json";
  cfg.csv_path = "/tmp/sephier_test_trace.csv";

  const Report report = run(cfg);
  CHECK(report.all_pass);

  std::ifstream rep(cfg.out_path);
  REQUIRE(rep.good());
  std::stringstream buffer;
  buffer << rep.rdbuf();
  CHECK(buffer.str().find("\"evolve-gap\"") != std::string::npos);

  std::ifstream csv(cfg.csv_path);
  REQUIRE(csv.good());
  std::string header;
  std::getline(csv, header);
  CHECK(header == "i1,i2,re,im");

  std::remove(cfg.out_path.c_str());
  std::remove(cfg.csv_path.c_str());
}

TEST_CASE("operational errors surface as exceptions") {
  RunConfig cfg;
  cfg.hierarchy = "/nonexistent/hierarchy.json";
  CHECK_THROWS_AS(run(cfg), ShapeError);

  RunConfig preset_too_small;
  preset_too_small.check = "conglomerate";
  preset_too_small.K = 1;  // presets need K >= 2
  CHECK_THROWS_AS(run(preset_too_small), ShapeError);
}

TEST_CASE("nonlinear hierarchies fail the certificate check through run()") {
  RunConfig cfg;
  cfg.check = "certify-linearity";
  cfg.hierarchy = "cubic_nls";
  cfg.samples = 40;
  const Report report = run(cfg);
  REQUIRE(report.checks.size() == 1);
  CHECK(report.checks[0].verdict == "nonlinear");
  CHECK(report.checks[0].has_k_hat);
  CHECK(report_exit_code(report) == 2);
}
