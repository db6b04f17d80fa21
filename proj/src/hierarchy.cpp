#include "sephier/hierarchy.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace sephier {

using nlohmann::json;

const std::vector<ExprPtr>& Hierarchy::arity(int n) const {
  auto it = operators.find(n);
  if (it == operators.end())
    throw ShapeError("hierarchy '" + name + "' provides no arity-" +
                     std::to_string(n) + " operator");
  return it->second;
}

int Hierarchy::component_count(int n) const {
  int count = 1;
  for (int k = 0; k < n; ++k) count *= spec.m;
  return count;
}

int encode_internal(const std::vector<int>& components, int m) {
  int rank = 0;
  for (int a : components) rank = rank * m + a;
  return rank;
}

void decode_internal(int rank, int arity, int m, std::vector<int>& components) {
  components.resize(static_cast<std::size_t>(arity));
  for (int j = arity - 1; j >= 0; --j) {
    components[static_cast<std::size_t>(j)] = rank % m;
    rank /= m;
  }
}

void finalize_hierarchy(Hierarchy& hierarchy) {
  std::string problems;
  bool linear = true;
  for (const auto& [arity, bodies] : hierarchy.operators) {
    if (arity < 1) problems += "arity must be >= 1\n";
    if (static_cast<int>(bodies.size()) != hierarchy.component_count(arity))
      problems += "arity " + std::to_string(arity) + " must have m^n = " +
                  std::to_string(hierarchy.component_count(arity)) +
                  " components, got " + std::to_string(bodies.size()) + "\n";
    for (std::size_t c = 0; c < bodies.size(); ++c) {
      for (const ValidationIssue& issue :
           validate(*bodies[c], hierarchy.spec, arity)) {
        if (!issue.fatal) continue;
        problems += "arity " + std::to_string(arity) + " component " +
                    std::to_string(c) + " [" + issue.path + "]: " +
                    issue.message + "\n";
      }
      if (!is_linear_in_jet(*bodies[c])) linear = false;
    }
  }
  if (!problems.empty())
    throw ShapeError("hierarchy validation failed:\n" + problems);
  hierarchy.linear = linear;
}

Hierarchy hierarchy_from_json_text(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& err) {
    throw ShapeError(std::string("hierarchy JSON is malformed: ") + err.what());
  }
  Hierarchy h;
  try {
    h.stats = Statistics(doc.at("f").get<int>());
    h.spec.d = doc.at("d").get<int>();
    h.spec.K = doc.at("K").get<int>();
    h.spec.m = doc.at("m").get<int>();
    for (const auto& [key, bodies] : doc.at("operators").items()) {
      const int arity = std::stoi(key);
      std::vector<ExprPtr> parsed;
      for (const auto& body : bodies)
        parsed.push_back(parse_operator(body.get<std::string>()));
      h.operators.emplace(arity, std::move(parsed));
    }
  } catch (const json::exception& err) {
    throw ShapeError(std::string("hierarchy JSON is missing fields: ") + err.what());
  }
  finalize_hierarchy(h);
  return h;
}

std::string hierarchy_to_json_text(const Hierarchy& hierarchy) {
  json doc;
  doc["f"] = hierarchy.stats.fermi;
  doc["d"] = hierarchy.spec.d;
  doc["K"] = hierarchy.spec.K;
  doc["m"] = hierarchy.spec.m;
  json ops = json::object();
  for (const auto& [arity, bodies] : hierarchy.operators) {
    json list = json::array();
    for (const ExprPtr& body : bodies) list.push_back(print_operator(*body));
    ops[std::to_string(arity)] = std::move(list);
  }
  doc["operators"] = std::move(ops);
  return doc.dump(2);
}

Hierarchy load_hierarchy_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ShapeError("cannot open hierarchy file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  Hierarchy h = hierarchy_from_json_text(buffer.str());
  h.name = path;
  return h;
}

namespace {

// Rewrites a one-particle body so it acts in the given slot of an arity-n
// operator with output internal indices `out_internal`: jet references pick up
// the other slots' internal indices with zero derivative orders, coordinates
// move to the slot.
ExprPtr lift_into_slot(const Expr& e, int slot, int arity,
                       const std::vector<int>& out_internal, int d) {
  ExprPtr node = clone(e);
  struct Walker {
    int slot, arity, d;
    const std::vector<int>& internal;
    void walk(Expr& n) const {
      if (n.kind == ExprKind::Coordinate) {
        n.particle = slot;
      } else if (n.kind == ExprKind::JetVar) {
        const int b = n.jet.internals.at(0);
        const MultiIndex order = n.jet.orders.at(0);
        n.jet.internals = internal;
        n.jet.internals[static_cast<std::size_t>(slot)] = b;
        n.jet.orders.assign(static_cast<std::size_t>(arity),
                            MultiIndex::Zero(d));
        n.jet.orders[static_cast<std::size_t>(slot)] = order;
      }
      if (n.lhs) walk(*n.lhs);
      if (n.rhs) walk(*n.rhs);
    }
  };
  Walker{slot, arity, d, out_internal}.walk(*node);
  return node;
}

}  // namespace

std::vector<ExprPtr> lift_bodies(const std::vector<const Expr*>& one_particle,
                                 const JetSpec& spec, int arity) {
  if (static_cast<int>(one_particle.size()) != spec.m)
    throw ShapeError("lift_bodies: need one body per internal component");
  int count = 1;
  for (int k = 0; k < arity; ++k) count *= spec.m;

  std::vector<ExprPtr> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<int> internal;
  for (int c = 0; c < count; ++c) {
    decode_internal(c, arity, spec.m, internal);
    ExprPtr sum;
    for (int slot = 0; slot < arity; ++slot) {
      const Expr* body =
          one_particle[static_cast<std::size_t>(internal[static_cast<std::size_t>(slot)])];
      ExprPtr term = lift_into_slot(*body, slot, arity, internal, spec.d);
      if (!sum) {
        sum = std::move(term);
      } else {
        auto add = std::make_unique<Expr>();
        add->kind = ExprKind::Add;
        add->lhs = std::move(sum);
        add->rhs = std::move(term);
        sum = std::move(add);
      }
    }
    out.push_back(std::move(sum));
  }
  return out;
}

namespace {

std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

std::string midx_text(int d, int axis, int order) {
  std::string out = "(";
  for (int k = 0; k < d; ++k) {
    if (k) out += ",";
    out += std::to_string(k == axis ? order : 0);
  }
  return out + ")";
}

// -sum_k d^2/dx_k^2 applied to component a
std::string laplacian_text(int a, int d) {
  std::string out;
  for (int k = 0; k < d; ++k) {
    if (k) out += " - ";
    out += "u[" + std::to_string(a) + "](" + midx_text(d, k, 2) + ")";
  }
  return "-(" + out + ")";
}

struct PresetSpec {
  std::string base;
  std::vector<double> args;
};

PresetSpec split_preset(const std::string& text) {
  const auto open = text.find('(');
  if (open == std::string::npos) return {text, {}};
  if (text.back() != ')')
    throw ShapeError("malformed preset arguments in '" + text + "'");
  PresetSpec out{text.substr(0, open), {}};
  std::string args = text.substr(open + 1, text.size() - open - 2);
  std::stringstream stream(args);
  std::string piece;
  while (std::getline(stream, piece, ',')) {
    try {
      out.args.push_back(std::stod(piece));
    } catch (const std::exception&) {
      throw ShapeError("malformed preset argument '" + piece + "'");
    }
  }
  return out;
}

std::vector<std::string> preset_one_particle_bodies(const PresetSpec& preset,
                                                    const JetSpec& spec) {
  const int d = spec.d;
  const int m = spec.m;
  if (spec.K < 2)
    throw ShapeError("presets need K >= 2 for their second derivatives");

  std::vector<std::string> bodies;
  if (preset.base == "free_schrodinger") {
    for (int a = 0; a < m; ++a) bodies.push_back(laplacian_text(a, d));
  } else if (preset.base == "linear_schrodinger") {
    // -Laplacian + V with the fixed polynomial V(x) = 0.3 + 0.7 |x|^2.
    std::string v = "0.3";
    for (int k = 0; k < d; ++k)
      v += " + 0.7*x[0]" + (k ? "." + std::to_string(k) : std::string()) + "^2";
    for (int a = 0; a < m; ++a)
      bodies.push_back(laplacian_text(a, d) + " + (" + v + ")*u[" +
                       std::to_string(a) + "](" + midx_text(d, 0, 0) + ")");
  } else if (preset.base == "cubic_nls") {
    std::string density;
    for (int a = 0; a < m; ++a) {
      if (a) density += " + ";
      density += "abs2(u[" + std::to_string(a) + "](" + midx_text(d, 0, 0) + "))";
    }
    for (int a = 0; a < m; ++a)
      bodies.push_back(laplacian_text(a, d) + " + (" + density + ")*u[" +
                       std::to_string(a) + "](" + midx_text(d, 0, 0) + ")");
  } else if (preset.base == "doebner_goldin") {
    if (m != 1)
      throw ShapeError("doebner_goldin preset is defined for m = 1 only");
    const double gamma = preset.args.empty() ? 0.3 : preset.args[0];
    const std::string u0 = "u[0](" + midx_text(d, 0, 0) + ")";
    // Laplacian of the density rho = |u|^2 expanded by the product rule:
    // d^2_k rho = u_2k conj(u) + 2 u_k conj(u_k) + u conj(u_2k).
    std::string lap_rho;
    for (int k = 0; k < d; ++k) {
      const std::string u1 = "u[0](" + midx_text(d, k, 1) + ")";
      const std::string u2 = "u[0](" + midx_text(d, k, 2) + ")";
      if (k) lap_rho += " + ";
      lap_rho += u2 + "*conj(" + u0 + ") + 2*" + u1 + "*conj(" + u1 + ") + " +
                 u0 + "*conj(" + u2 + ")";
    }
    bodies.push_back(laplacian_text(0, d) + " + i*" + format_double(gamma) +
                     "*((" + lap_rho + ")/abs2(" + u0 + "))*" + u0);
  } else {
    throw ShapeError(
        "unknown preset '" + preset.base +
        "' (known: linear_schrodinger, free_schrodinger, cubic_nls, "
        "doebner_goldin)");
  }
  return bodies;
}

}  // namespace

bool is_preset_name(const std::string& name_with_args) {
  const std::string base = split_preset(name_with_args).base;
  return base == "linear_schrodinger" || base == "free_schrodinger" ||
         base == "cubic_nls" || base == "doebner_goldin";
}

Hierarchy make_preset(const std::string& name_with_args, const JetSpec& spec,
                      Statistics stats, int max_arity) {
  const PresetSpec preset = split_preset(name_with_args);
  const std::vector<std::string> body_text =
      preset_one_particle_bodies(preset, spec);

  std::vector<ExprPtr> one_particle;
  for (const std::string& text : body_text)
    one_particle.push_back(parse_operator(text));

  Hierarchy h;
  h.stats = stats;
  h.spec = spec;
  h.name = name_with_args;
  std::vector<const Expr*> raw;
  for (const ExprPtr& b : one_particle) raw.push_back(b.get());
  for (int arity = 1; arity <= max_arity; ++arity)
    h.operators.emplace(arity, lift_bodies(raw, spec, arity));
  finalize_hierarchy(h);
  return h;
}

Hierarchy resolve_hierarchy(const std::string& preset_or_path,
                            const JetSpec& spec, Statistics stats,
                            int max_arity) {
  if (is_preset_name(preset_or_path))
    return make_preset(preset_or_path, spec, stats, max_arity);
  return load_hierarchy_file(preset_or_path);
}

namespace {

class OneParticleBinding final : public JetBinding {
 public:
  explicit OneParticleBinding(const Jet& jet) : jet_(jet) {}

  cdouble jet_value(const JetVarRef& ref, int pos) const override {
    const int rank = jet_.indices().index_of(ref.orders[0]);
    if (rank < 0 || ref.internals.size() != 1)
      throw DomainError("jet variable does not resolve against the jet table", pos);
    return jet_.value(ref.internals[0], rank);
  }

  double coordinate(int, int component) const override {
    return jet_.basepoint()(component);
  }

 private:
  const Jet& jet_;
};

class PairBinding final : public JetBinding {
 public:
  explicit PairBinding(const PairJet& pair) : pair_(pair) {}

  cdouble jet_value(const JetVarRef& ref, int pos) const override {
    if (ref.internals.size() != 2)
      throw DomainError("jet variable does not resolve against the pair table", pos);
    const int ri = pair_.indices().index_of(ref.orders[0]);
    const int rj = pair_.indices().index_of(ref.orders[1]);
    if (ri < 0 || rj < 0)
      throw DomainError("multi-index outside the pair table", pos);
    return pair_.value(ref.internals[0], ref.internals[1], ri, rj);
  }

  double coordinate(int particle, int component) const override {
    return particle == 0 ? pair_.x()(component) : pair_.y()(component);
  }

 private:
  const PairJet& pair_;
};

Eigen::VectorXcd eval_components(const std::vector<ExprPtr>& bodies,
                                 const JetBinding& binding) {
  Eigen::VectorXcd out(static_cast<long>(bodies.size()));
  for (std::size_t c = 0; c < bodies.size(); ++c) {
    try {
      out(static_cast<long>(c)) = eval_expr(*bodies[c], binding);
    } catch (DomainError& err) {
      err.component = static_cast<int>(c);
      throw;
    }
  }
  return out;
}

}  // namespace

Eigen::VectorXcd eval_operator(const Hierarchy& hierarchy, const Jet& jet) {
  if (!(jet.spec() == hierarchy.spec))
    throw ShapeError("eval_operator: jet spec does not match the hierarchy");
  return eval_components(hierarchy.arity(1), OneParticleBinding(jet));
}

Eigen::VectorXcd eval_operator(const Hierarchy& hierarchy, const PairJet& pair) {
  if (!(pair.spec() == hierarchy.spec))
    throw ShapeError("eval_operator: pair spec does not match the hierarchy");
  return eval_components(hierarchy.arity(2), PairBinding(pair));
}

namespace {

template <typename Eval>
Eigen::VectorXcd wirtinger_from(Eval&& evaluate, cdouble center, double step) {
  const double h = step > 0.0 ? step : 1e-5 * std::max(1.0, std::abs(center));
  const Eigen::VectorXcd re_plus = evaluate(center + cdouble(h, 0.0));
  const Eigen::VectorXcd re_minus = evaluate(center - cdouble(h, 0.0));
  const Eigen::VectorXcd im_plus = evaluate(center + cdouble(0.0, h));
  const Eigen::VectorXcd im_minus = evaluate(center - cdouble(0.0, h));
  const Eigen::VectorXcd d_re = (re_plus - re_minus) / (2.0 * h);
  const Eigen::VectorXcd d_im = (im_plus - im_minus) / (2.0 * h);
  return 0.5 * (d_re - kImaginaryUnit * d_im);
}

}  // namespace

Eigen::VectorXcd wirtinger_grad(const Hierarchy& hierarchy, const Jet& jet,
                                int component, int rank, double step) {
  Jet probe = jet;
  const cdouble center = jet.value(component, rank);
  auto evaluate = [&](cdouble v) {
    probe.at(component, rank) = v;
    return eval_operator(hierarchy, probe);
  };
  return wirtinger_from(evaluate, center, step);
}

Eigen::VectorXcd wirtinger_grad(const Hierarchy& hierarchy, const PairJet& pair,
                                int a, int b, int rank_i, int rank_j,
                                double step) {
  PairJet probe = pair;
  const cdouble center = pair.value(a, b, rank_i, rank_j);
  auto evaluate = [&](cdouble v) {
    probe.at(a, b, rank_i, rank_j) = v;
    return eval_operator(hierarchy, probe);
  };
  return wirtinger_from(evaluate, center, step);
}

}  // namespace sephier
