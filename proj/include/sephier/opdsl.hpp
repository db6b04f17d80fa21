#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "sephier/common.hpp"
#include "sephier/jet.hpp"
#include "sephier/multi_index.hpp"

namespace sephier {

// Expression language for possibly nonlinear differential operators acting on
// jets. Grammar (whitespace-insensitive):
//
//   expr   := term (("+"|"-") term)*
//   term   := factor (("*"|"/") factor)*
//   factor := unary ("^" uint)?
//   unary  := "-" unary | atom
//   atom   := number | "i" | coord | jetvar | func "(" expr ")" | "(" expr ")"
//   coord  := "x" "[" uint "]" ("." uint)?
//   jetvar := "u" "[" uint ("," uint)* "]" "(" midx (";" midx)* ")"
//   midx   := "(" uint ("," uint)* ")"
//   func   := "conj" | "re" | "im" | "abs2" | "exp" | "log"
//
// Particle and internal indices are zero-based. A jet variable
// u[A_1,..,A_p]((I_1);..;(I_p)) denotes the derivative table entry with
// internal indices A_j and per-slot multi-indices I_j.

enum class ExprKind {
  Number,
  ImaginaryUnit,
  Coordinate,
  JetVar,
  Negate,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Call,
};

enum class Builtin { Conj, Re, Im, Abs2, Exp, Log };

/// Jet-table reference: one internal index and one multi-index per slot.
struct JetVarRef {
  std::vector<int> internals;
  std::vector<MultiIndex> orders;
};

struct Expr {
  ExprKind kind{};
  int pos = 0;  // byte offset in the source text, for diagnostics

  double number = 0.0;              // Number
  int particle = 0, component = 0;  // Coordinate
  JetVarRef jet;                    // JetVar
  Builtin func = Builtin::Conj;     // Call
  int exponent = 0;                 // Pow

  std::unique_ptr<Expr> lhs;  // child of Negate/Pow/Call, left of binaries
  std::unique_ptr<Expr> rhs;
};

using ExprPtr = std::unique_ptr<Expr>;

ExprPtr parse_operator(std::string_view text);

/// Canonical text form; parse(print(e)) is structurally identical to e.
std::string print_operator(const Expr& expr);

ExprPtr clone(const Expr& expr);
bool structurally_equal(const Expr& a, const Expr& b);

struct ValidationIssue {
  std::string path;     // e.g. "add.lhs.mul.rhs.jetvar"
  std::string message;
  int pos = 0;
  bool fatal = true;    // false for informational notes (log domain restriction)
};

/// Index-bound checks of an AST against a jet spec and operator arity.
std::vector<ValidationIssue> validate(const Expr& expr, const JetSpec& spec,
                                      int arity);

/// True when no fatal issue is found.
bool validate_ok(const Expr& expr, const JetSpec& spec, int arity);

/// Structural dependence of an expression on the jet table.
enum class JetDependence { Zero, Constant, Linear, Nonlinear };

JetDependence classify_jet_dependence(const Expr& expr);

/// Homogeneous C-linear in the jet variables (constants allowed only as
/// coefficients). conj/re/im/abs2 of jet-dependent subtrees are nonlinear.
bool is_linear_in_jet(const Expr& expr);

/// True when evaluation can hit a singularity on jet-dependent input: a
/// division with jet-dependent denominator or a log of a jet-dependent value.
bool has_jet_singularity(const Expr& expr);

/// Value source for jet variables and coordinates during evaluation.
class JetBinding {
 public:
  virtual ~JetBinding() = default;
  virtual cdouble jet_value(const JetVarRef& ref, int pos) const = 0;
  virtual double coordinate(int particle, int component) const = 0;
};

struct EvalOptions {
  /// Division and log throw DomainError when the operand modulus does not
  /// exceed this floor. Zero means only exact singularities are rejected.
  double singular_floor = 0.0;
};

cdouble eval_expr(const Expr& expr, const JetBinding& binding,
                  const EvalOptions& options = {});

}  // namespace sephier
