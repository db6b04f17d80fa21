#include "sephier/checks.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace sephier {

using nlohmann::json;

namespace {

constexpr double kGaugeRoundTripBound = 1e-10;
constexpr double kUndeformedGapBound = 1e-3;
constexpr double kReplayTolerance = 1e-12;

json complex_to_json(cdouble v) { return json::array({v.real(), v.imag()}); }

cdouble complex_from_json(const json& j) {
  return cdouble(j.at(0).get<double>(), j.at(1).get<double>());
}

json jet_to_json(const Jet& jet) {
  json j;
  j["d"] = jet.spec().d;
  j["K"] = jet.spec().K;
  j["m"] = jet.spec().m;
  json base = json::array();
  for (int k = 0; k < jet.basepoint().size(); ++k) base.push_back(jet.basepoint()(k));
  j["basepoint"] = std::move(base);
  json values = json::array();
  for (int a = 0; a < jet.spec().m; ++a)
    for (int r = 0; r < jet.indices().size(); ++r)
      values.push_back(complex_to_json(jet.value(a, r)));
  j["values"] = std::move(values);
  return j;
}

Jet jet_from_json(const json& j) {
  const JetSpec spec{j.at("d").get<int>(), j.at("K").get<int>(), j.at("m").get<int>()};
  Eigen::VectorXd basepoint(spec.d);
  for (int k = 0; k < spec.d; ++k) basepoint(k) = j.at("basepoint").at(k).get<double>();
  Jet jet(spec, basepoint);
  const json& values = j.at("values");
  int cursor = 0;
  for (int a = 0; a < spec.m; ++a)
    for (int r = 0; r < spec.index_count(); ++r)
      jet.at(a, r) = complex_from_json(values.at(cursor++));
  return jet;
}

json quadruple_to_json(const ABQuadruple& ab) {
  json j;
  j["alpha"] = jet_to_json(ab.alpha);
  j["beta"] = jet_to_json(ab.beta);
  j["alpha_tilde"] = jet_to_json(ab.alpha_tilde);
  j["beta_tilde"] = jet_to_json(ab.beta_tilde);
  return j;
}

ABQuadruple quadruple_from_json(const json& j) {
  return ABQuadruple(jet_from_json(j.at("alpha")), jet_from_json(j.at("beta")),
                     jet_from_json(j.at("alpha_tilde")),
                     jet_from_json(j.at("beta_tilde")));
}

const char* flow_kind_name(FlowKind kind) {
  switch (kind) {
    case FlowKind::Scale: return "scale";
    case FlowKind::Shift: return "shift";
    case FlowKind::ShiftSwapped: return "shift_swapped";
  }
  return "?";
}

FlowKind flow_kind_from_name(const std::string& name) {
  if (name == "scale") return FlowKind::Scale;
  if (name == "shift") return FlowKind::Shift;
  if (name == "shift_swapped") return FlowKind::ShiftSwapped;
  throw ShapeError("unknown flow kind '" + name + "'");
}

double default_tolerance(const std::string& check) {
  if (check == "flow-invariance") return 1e-12;
  if (check == "certify-linearity") return 1e-6;
  if (check == "evolve-gap") return 1e-6;
  if (check == "gauge-demo") return 1e-5;
  return 1e-8;
}

std::string iso_utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

}  // namespace

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names = {
      "plain-derivation", "sym-derivation", "flow-invariance",
      "flow-field",       "certify-linearity", "conglomerate",
      "evolve-gap",       "gauge-demo",        "all"};
  return names;
}

RunConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& err) {
    throw ShapeError(std::string("config JSON is malformed: ") + err.what());
  }
  RunConfig c;
  c.check = j.value("check", c.check);
  c.hierarchy = j.value("hierarchy", c.hierarchy);
  c.d = j.value("d", c.d);
  c.K = j.value("K", c.K);
  c.m = j.value("m", c.m);
  c.f = j.value("f", c.f);
  c.samples = j.value("samples", c.samples);
  c.seed = j.value("seed", c.seed);
  c.tolerance = j.value("tolerance", c.tolerance);
  c.conglomerate_n = j.value("conglomerate_n", c.conglomerate_n);
  c.conglomerate_fermi_sign =
      j.value("conglomerate_fermi_sign", c.conglomerate_fermi_sign);
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    c.grid_length = g.value("L", c.grid_length);
    c.grid_points = g.value("n", c.grid_points);
    c.dt = g.value("dt", c.dt);
    c.time = g.value("t", c.time);
  }
  c.gauge_gamma = j.value("gauge_gamma", c.gauge_gamma);
  c.gauge_lambda = j.value("gauge_lambda", c.gauge_lambda);
  c.expect = j.value("expect", c.expect);
  c.out_path = j.value("out", c.out_path);
  c.csv_path = j.value("csv", c.csv_path);

  bool known = false;
  for (const std::string& name : known_checks()) known = known || name == c.check;
  if (!known) throw ShapeError("unknown check '" + c.check + "'");
  if (c.expect != "pass" && c.expect != "fail")
    throw ShapeError("expect must be 'pass' or 'fail'");
  if (c.samples < 1 || c.d < 1 || c.K < 0 || c.m < 1 || (c.f != 0 && c.f != 1) ||
      c.conglomerate_n < 1 || c.grid_points < 8 || !(c.dt > 0.0) ||
      !(c.time > 0.0) || !(c.grid_length > 0.0) || c.gauge_lambda == 0.0)
    throw ShapeError("config has out-of-range numeric fields");
  return c;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ShapeError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return config_from_json_text(buffer.str());
}

std::string config_to_json_text(const RunConfig& c) {
  json j;
  j["check"] = c.check;
  j["hierarchy"] = c.hierarchy;
  j["d"] = c.d;
  j["K"] = c.K;
  j["m"] = c.m;
  j["f"] = c.f;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["tolerance"] = c.tolerance;
  j["conglomerate_n"] = c.conglomerate_n;
  j["conglomerate_fermi_sign"] = c.conglomerate_fermi_sign;
  j["grid"] = {{"L", c.grid_length}, {"n", c.grid_points}, {"dt", c.dt}, {"t", c.time}};
  j["gauge_gamma"] = c.gauge_gamma;
  j["gauge_lambda"] = c.gauge_lambda;
  j["expect"] = c.expect;
  j["out"] = c.out_path;
  j["csv"] = c.csv_path;
  return j.dump(2);
}

namespace {

json hierarchy_json(const Hierarchy& hierarchy) {
  return json::parse(hierarchy_to_json_text(hierarchy));
}

CheckResult sweep_result(const std::string& metric, const ResidualReport& report,
                         json witness) {
  CheckResult out;
  out.name = report.check;
  out.samples = report.samples;
  out.metric = metric;
  out.value = report.max_normalized;
  out.tolerance = report.tolerance;
  out.verdict = report.pass ? "pass" : "fail";
  out.pass = report.pass;
  witness["check"] = report.check;
  witness["value"] = report.max_normalized;
  out.witness_json = witness.dump();
  return out;
}

CheckResult check_plain(const RunConfig& cfg, const Hierarchy& hier, double tol) {
  const ResidualReport report = plain_sweep(hier, cfg.samples, cfg.seed, tol);
  const PlainSample sample =
      sample_plain_pair(hier.spec, cfg.seed, report.argmax_sample);
  json witness;
  witness["hierarchy"] = hierarchy_json(hier);
  witness["sample_index"] = report.argmax_sample;
  witness["alpha"] = jet_to_json(sample.alpha);
  witness["beta_tilde"] = jet_to_json(sample.beta_tilde);
  return sweep_result("max_normalized_residual", report, std::move(witness));
}

CheckResult check_sym(const RunConfig& cfg, const Hierarchy& hier, double tol) {
  const ResidualReport report = sym_sweep(hier, cfg.samples, cfg.seed, tol);
  json witness;
  witness["hierarchy"] = hierarchy_json(hier);
  witness["sample_index"] = report.argmax_sample;
  witness["quadruple"] =
      quadruple_to_json(sample_quadruple(hier.spec, cfg.seed, report.argmax_sample));
  return sweep_result("max_normalized_residual", report, std::move(witness));
}

CheckResult check_flow_invariance(const RunConfig& cfg, const Hierarchy& hier,
                                  double tol) {
  const ResidualReport report =
      flow_invariance_sweep(hier, cfg.samples, cfg.seed, tol);
  const FlowSample sample = sample_flow(hier.spec, cfg.seed, report.argmax_sample);
  json witness;
  witness["hierarchy"] = hierarchy_json(hier);
  witness["sample_index"] = report.argmax_sample;
  witness["quadruple"] = quadruple_to_json(sample.ab);
  witness["flow"] = flow_kind_name(sample.kind);
  witness["s"] = complex_to_json(sample.s);
  return sweep_result("max_relative_invariance_error", report, std::move(witness));
}

CheckResult check_flow_field(const RunConfig& cfg, const Hierarchy& hier,
                             double tol) {
  const ResidualReport report = flow_field_sweep(hier, cfg.samples, cfg.seed, tol);
  json witness;
  witness["hierarchy"] = hierarchy_json(hier);
  witness["sample_index"] = report.argmax_sample;
  witness["quadruple"] =
      quadruple_to_json(sample_quadruple(hier.spec, cfg.seed, report.argmax_sample));
  return sweep_result("max_normalized_residual", report, std::move(witness));
}

CheckResult check_certificate(const RunConfig& cfg, const Hierarchy& hier,
                              double tol) {
  const LinearityCertificate cert =
      linearity_certificate(hier, cfg.samples, cfg.seed, tol);
  const CertificateSample sample =
      sample_certificate_pair(hier.spec, cfg.seed, cert.argmax_sample);
  CheckResult out;
  out.name = "certify-linearity";
  out.samples = cert.samples;
  out.metric = "max_dev";
  out.value = cert.max_dev;
  out.tolerance = tol;
  out.has_k_hat = true;
  out.k_hat = cert.k_hat;
  out.verdict = cert.linear_consistent ? "linear-consistent" : "nonlinear";
  out.pass = cert.linear_consistent;

  json witness;
  witness["check"] = "certify-linearity";
  witness["hierarchy"] = hierarchy_json(hier);
  witness["sample_index"] = cert.argmax_sample;
  witness["alpha"] = jet_to_json(sample.alpha);
  witness["beta"] = jet_to_json(sample.beta);
  witness["k_hat"] = complex_to_json(cert.k_hat);
  witness["value"] = cert.max_dev;
  out.witness_json = witness.dump();
  return out;
}

CheckResult check_conglomerate(const RunConfig& cfg, const Hierarchy& hier,
                               double tol) {
  const ResidualReport report =
      conglomerate_reduce(hier, cfg.conglomerate_n, cfg.samples, cfg.seed, tol,
                          cfg.conglomerate_fermi_sign);
  const JetSpec congl = conglomerate_spec(hier.spec, cfg.conglomerate_n);
  json witness;
  witness["hierarchy"] = hierarchy_json(hier);
  witness["sample_index"] = report.argmax_sample;
  witness["N"] = cfg.conglomerate_n;
  witness["fermi_sign"] = cfg.conglomerate_fermi_sign;
  witness["quadruple"] =
      quadruple_to_json(sample_quadruple(congl, cfg.seed, report.argmax_sample));
  return sweep_result("max_normalized_residual", report, std::move(witness));
}

CheckResult check_evolve_gap(const RunConfig& cfg, const Hierarchy& hier,
                             double tol) {
  const Grid grid(cfg.grid_length, cfg.grid_points);
  const auto [phi, psi] = standard_gap_pair(grid);
  const double gap_plain =
      separation_gap(hier, phi, psi, cfg.time, cfg.dt, ProductKind::Plain);
  const double gap_sym =
      separation_gap(hier, phi, psi, cfg.time, cfg.dt, ProductKind::Sym);

  if (!cfg.csv_path.empty()) {
    const int steps = static_cast<int>(std::lround(cfg.time / cfg.dt));
    const EvolutionMap map{&hier, Integrator::RK4, cfg.dt, steps};
    const GridState evolved = evolve(map, sym_tensor(phi, psi, hier.stats));
    std::ofstream csv(cfg.csv_path);
    if (!csv) throw ShapeError("cannot open CSV path '" + cfg.csv_path + "'");
    write_csv(evolved, csv);
  }

  CheckResult out;
  out.name = "evolve-gap";
  out.samples = 1;
  out.metric = "max_relative_gap";
  out.value = std::max(gap_plain, gap_sym);
  out.tolerance = tol;
  out.verdict = out.value < tol ? "pass" : "fail";
  out.pass = out.value < tol;

  json witness;
  witness["check"] = "evolve-gap";
  witness["hierarchy"] = hierarchy_json(hier);
  witness["grid"] = {{"L", cfg.grid_length}, {"n", cfg.grid_points}};
  witness["dt"] = cfg.dt;
  witness["t"] = cfg.time;
  witness["gap_plain"] = gap_plain;
  witness["gap_sym"] = gap_sym;
  witness["value"] = out.value;
  out.witness_json = witness.dump();
  return out;
}

struct GaugeDemoNumbers {
  double roundtrip = 0.0;
  double deformed = 0.0;
  double undeformed = 0.0;
};

GaugeDemoNumbers gauge_demo_numbers(const GaugeParams& params,
                                    const Hierarchy& hier, const Grid& grid,
                                    double t, double dt) {
  const auto [phi, psi] = gauge_demo_pair(grid);
  const GridState roundtrip = apply_gauge(
      params, apply_gauge(params, phi, GaugeDirection::Forward),
      GaugeDirection::Inverse);
  GaugeDemoNumbers out;
  out.roundtrip = (roundtrip.amplitudes() - phi.amplitudes()).cwiseAbs().maxCoeff() /
                  phi.amplitudes().cwiseAbs().maxCoeff();
  out.deformed = deformed_separation_gap(params, hier, phi, psi, t, dt);
  out.undeformed = gauged_sym_gap(params, hier, phi, psi, t, dt);
  return out;
}

CheckResult check_gauge_demo(const RunConfig& cfg, const Hierarchy& hier,
                             double tol) {
  const GaugeParams params{cfg.gauge_gamma, cfg.gauge_lambda};
  const Grid grid(cfg.grid_length, cfg.grid_points);
  const GaugeDemoNumbers numbers =
      gauge_demo_numbers(params, hier, grid, cfg.time, cfg.dt);

  CheckResult out;
  out.name = "gauge-demo";
  out.samples = 1;
  out.metric = "deformed_gap";
  out.value = numbers.deformed;
  out.tolerance = tol;
  out.pass = numbers.roundtrip < kGaugeRoundTripBound && numbers.deformed < tol &&
             numbers.undeformed > kUndeformedGapBound;
  out.verdict = out.pass ? "pass" : "fail";

  json witness;
  witness["check"] = "gauge-demo";
  witness["hierarchy"] = hierarchy_json(hier);
  witness["grid"] = {{"L", cfg.grid_length}, {"n", cfg.grid_points}};
  witness["dt"] = cfg.dt;
  witness["t"] = cfg.time;
  witness["gamma"] = cfg.gauge_gamma;
  witness["lambda"] = cfg.gauge_lambda;
  witness["roundtrip_error"] = numbers.roundtrip;
  witness["deformed_gap"] = numbers.deformed;
  witness["undeformed_gap"] = numbers.undeformed;
  witness["value"] = numbers.deformed;
  out.witness_json = witness.dump();
  return out;
}

CheckResult dispatch_check(const std::string& name, const RunConfig& cfg,
                           const Hierarchy& hier) {
  const double tol =
      cfg.tolerance > 0.0 ? cfg.tolerance : default_tolerance(name);
  if (name == "plain-derivation") return check_plain(cfg, hier, tol);
  if (name == "sym-derivation") return check_sym(cfg, hier, tol);
  if (name == "flow-invariance") return check_flow_invariance(cfg, hier, tol);
  if (name == "flow-field") return check_flow_field(cfg, hier, tol);
  if (name == "certify-linearity") return check_certificate(cfg, hier, tol);
  if (name == "conglomerate") return check_conglomerate(cfg, hier, tol);
  if (name == "evolve-gap") return check_evolve_gap(cfg, hier, tol);
  if (name == "gauge-demo") return check_gauge_demo(cfg, hier, tol);
  throw ShapeError("unknown check '" + name + "'");
}

}  // namespace

Report run(const RunConfig& config) {
  Report report;
  report.generated_at = iso_utc_now();
  report.config = config;

  const int max_arity = std::max(4, 2 * config.conglomerate_n);
  const Hierarchy hierarchy =
      resolve_hierarchy(config.hierarchy, JetSpec{config.d, config.K, config.m},
                        Statistics(config.f), max_arity);

  std::vector<std::string> names;
  if (config.check == "all") {
    names = {"plain-derivation", "sym-derivation",   "flow-invariance",
             "flow-field",       "certify-linearity", "conglomerate",
             "evolve-gap",       "gauge-demo"};
  } else {
    names = {config.check};
  }

  for (const std::string& name : names) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult result = dispatch_check(name, config, hierarchy);
    const auto stop = std::chrono::steady_clock::now();
    result.wall_ms =
        std::chrono::duration<double, std::milli>(stop - start).count();
    report.all_pass = report.all_pass && result.pass;
    report.checks.push_back(std::move(result));
  }

  if (!config.out_path.empty()) {
    std::ofstream out(config.out_path);
    if (!out) throw ShapeError("cannot open report path '" + config.out_path + "'");
    out << report_to_json_text(report) << "\n";
  }
  return report;
}

std::string report_to_json_text(const Report& report) {
  json j;
  j["version"] = report.version;
  j["generated_at"] = report.generated_at;
  j["config"] = json::parse(config_to_json_text(report.config));
  json checks = json::array();
  for (const CheckResult& check : report.checks) {
    json c;
    c["name"] = check.name;
    c["samples"] = check.samples;
    c["metric"] = check.metric;
    c["value"] = check.value;
    c["tolerance"] = check.tolerance;
    if (check.has_k_hat) c["k_hat"] = complex_to_json(check.k_hat);
    c["verdict"] = check.verdict;
    c["pass"] = check.pass;
    c["wall_ms"] = check.wall_ms;
    c["witness"] = json::parse(check.witness_json);
    checks.push_back(std::move(c));
  }
  j["checks"] = std::move(checks);
  j["all_pass"] = report.all_pass;
  return j.dump(2);
}

int report_exit_code(const Report& report) {
  const bool expected_fail = report.config.expect == "fail";
  const bool outcome = expected_fail ? !report.all_pass : report.all_pass;
  return outcome ? 0 : 2;
}

namespace {

double replay_value(const json& witness) {
  const std::string check = witness.at("check").get<std::string>();
  const Hierarchy hierarchy =
      hierarchy_from_json_text(witness.at("hierarchy").dump());

  if (check == "plain-derivation") {
    return plain_residual(hierarchy, hierarchy, hierarchy,
                          jet_from_json(witness.at("alpha")),
                          jet_from_json(witness.at("beta_tilde")))
        .max_normalized();
  }
  if (check == "sym-derivation") {
    return sym_residual(hierarchy, quadruple_from_json(witness.at("quadruple")))
        .max_normalized();
  }
  if (check == "flow-invariance") {
    return flow_invariance_error(
        hierarchy, quadruple_from_json(witness.at("quadruple")),
        flow_kind_from_name(witness.at("flow").get<std::string>()),
        complex_from_json(witness.at("s")));
  }
  if (check == "flow-field") {
    return flow_field_residual(hierarchy,
                               quadruple_from_json(witness.at("quadruple")))
        .max_normalized();
  }
  if (check == "certify-linearity") {
    const Jet alpha = jet_from_json(witness.at("alpha"));
    const Jet beta = jet_from_json(witness.at("beta"));
    const cdouble k_hat = complex_from_json(witness.at("k_hat"));
    Eigen::VectorXcd bracket = -eval_operator(hierarchy, beta);
    for (int c = 0; c < hierarchy.spec.m; ++c)
      for (int rank = 0; rank < hierarchy.spec.index_count(); ++rank)
        bracket += beta.value(c, rank) * wirtinger_grad(hierarchy, alpha, c, rank);
    double worst = 0.0;
    for (int a = 0; a < hierarchy.spec.m; ++a)
      worst = std::max(worst, std::abs(bracket(a) / beta.zeroth(a) - k_hat));
    return worst;
  }
  if (check == "conglomerate") {
    return conglomerate_residual(hierarchy, witness.at("N").get<int>(),
                                 quadruple_from_json(witness.at("quadruple")),
                                 witness.at("fermi_sign").get<bool>())
        .max_normalized();
  }
  if (check == "evolve-gap") {
    const Grid grid(witness.at("grid").at("L").get<double>(),
                    witness.at("grid").at("n").get<int>());
    const auto [phi, psi] = standard_gap_pair(grid);
    const double t = witness.at("t").get<double>();
    const double dt = witness.at("dt").get<double>();
    const double gap_plain =
        separation_gap(hierarchy, phi, psi, t, dt, ProductKind::Plain);
    const double gap_sym =
        separation_gap(hierarchy, phi, psi, t, dt, ProductKind::Sym);
    return std::max(gap_plain, gap_sym);
  }
  if (check == "gauge-demo") {
    const Grid grid(witness.at("grid").at("L").get<double>(),
                    witness.at("grid").at("n").get<int>());
    const GaugeParams params{witness.at("gamma").get<double>(),
                             witness.at("lambda").get<double>()};
    return gauge_demo_numbers(params, hierarchy, grid,
                              witness.at("t").get<double>(),
                              witness.at("dt").get<double>())
        .deformed;
  }
  throw ShapeError("replay: unknown check '" + check + "'");
}

}  // namespace

int replay_report(const std::string& report_json, std::ostream& out) {
  json report;
  try {
    report = json::parse(report_json);
  } catch (const json::exception& err) {
    throw ShapeError(std::string("report JSON is malformed: ") + err.what());
  }
  int status = 0;
  for (const json& check : report.at("checks")) {
    const json& witness = check.at("witness");
    const double recorded = witness.at("value").get<double>();
    const double recomputed = replay_value(witness);
    const double delta = std::abs(recomputed - recorded);
    const bool ok = delta <= kReplayTolerance;
    if (!ok) status = 2;
    out << (ok ? "REPLAY OK  " : "REPLAY FAIL ") << check.at("name").get<std::string>()
        << "  recorded=" << recorded << "  recomputed=" << recomputed
        << "  |delta|=" << delta << "\n";
  }
  return status;
}

}  // namespace sephier
