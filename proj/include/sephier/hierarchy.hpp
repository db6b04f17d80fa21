#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <vector>

#include "sephier/opdsl.hpp"
#include "sephier/tensor.hpp"

namespace sephier {

/// A hierarchy of operators H_n: for each provided arity n, m^n component
/// expressions indexed by the output internal multi-index (slot 0 most
/// significant).
struct Hierarchy {
  Statistics stats{0};
  JetSpec spec{};
  std::map<int, std::vector<ExprPtr>> operators;
  bool linear = false;  // every body homogeneous C-linear in the jet table
  std::string name = "custom";

  bool has_arity(int n) const { return operators.count(n) != 0; }
  const std::vector<ExprPtr>& arity(int n) const;
  int component_count(int n) const;
};

/// Rank of an internal multi-index (A_1,..,A_n) in the component list.
int encode_internal(const std::vector<int>& components, int m);
void decode_internal(int rank, int arity, int m, std::vector<int>& components);

/// Validates every component of every arity; throws ShapeError with the
/// collected messages on failure. Also recomputes the linear flag.
void finalize_hierarchy(Hierarchy& hierarchy);

/// JSON document {"f":0|1,"d":int,"K":int,"m":int,"operators":{"1":[body..]}}.
Hierarchy hierarchy_from_json_text(const std::string& json_text);
std::string hierarchy_to_json_text(const Hierarchy& hierarchy);
Hierarchy load_hierarchy_file(const std::string& path);

/// Canonical slot-wise lift of one-particle bodies (one per internal
/// component) to the given arity: H_n = sum_j H_1 acting in slot j.
std::vector<ExprPtr> lift_bodies(const std::vector<const Expr*>& one_particle,
                                 const JetSpec& spec, int arity);

/// Builtin presets: "linear_schrodinger", "free_schrodinger", "cubic_nls",
/// "doebner_goldin(gamma)". Bodies are lifted slot-wise to arities
/// 1..max_arity.
Hierarchy make_preset(const std::string& name_with_args, const JetSpec& spec,
                      Statistics stats, int max_arity = 4);
bool is_preset_name(const std::string& name_with_args);

/// Loads a hierarchy from a preset name or a JSON file path. Spec and
/// statistics apply to presets only; files carry their own.
Hierarchy resolve_hierarchy(const std::string& preset_or_path,
                            const JetSpec& spec, Statistics stats,
                            int max_arity = 4);

/// Evaluates the arity-1 operator on a jet; component A of the result is
/// H_1^A(x, jet).
Eigen::VectorXcd eval_operator(const Hierarchy& hierarchy, const Jet& jet);

/// Evaluates the arity-2 operator on a pair jet; entry A*m+B is H_2^{AB}.
Eigen::VectorXcd eval_operator(const Hierarchy& hierarchy, const PairJet& pair);

/// Wirtinger derivative dH_1^A / d a_I^C at the given jet, by central
/// differences on the real and imaginary parts of the targeted entry:
/// d/da = 1/2 (d/dRe - i d/dIm). step <= 0 selects 1e-5 * max(1, |entry|).
Eigen::VectorXcd wirtinger_grad(const Hierarchy& hierarchy, const Jet& jet,
                                int component, int rank, double step = 0.0);

/// Same for the arity-2 operator and one pair-jet entry.
Eigen::VectorXcd wirtinger_grad(const Hierarchy& hierarchy, const PairJet& pair,
                                int a, int b, int rank_i, int rank_j,
                                double step = 0.0);

}  // namespace sephier
