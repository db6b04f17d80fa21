#include "sephier/opdsl.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace sephier {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ExprPtr run() {
    ExprPtr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& message) const {
    int line = 1, column = 1;
    for (std::size_t k = 0; k < pos_ && k < text_.size(); ++k) {
      if (text_[k] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(message, line, column);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool peek_is(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool consume(char c) {
    if (!peek_is(c)) return false;
    ++pos_;
    return true;
  }

  void expect(char c, const char* what) {
    if (!consume(c)) fail(std::string("expected '") + c + "' " + what);
  }

  int parse_uint() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ == start) fail("expected an unsigned integer");
    int value = 0;
    auto [p, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    (void)p;
    if (ec != std::errc{}) fail("integer out of range");
    return value;
  }

  ExprPtr make(ExprKind kind, int pos) {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->pos = pos;
    return e;
  }

  ExprPtr parse_expr() {
    ExprPtr lhs = parse_term();
    while (true) {
      skip_ws();
      const int at = static_cast<int>(pos_);
      if (consume('+')) {
        ExprPtr node = make(ExprKind::Add, at);
        node->lhs = std::move(lhs);
        node->rhs = parse_term();
        lhs = std::move(node);
      } else if (consume('-')) {
        ExprPtr node = make(ExprKind::Sub, at);
        node->lhs = std::move(lhs);
        node->rhs = parse_term();
        lhs = std::move(node);
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_term() {
    ExprPtr lhs = parse_factor();
    while (true) {
      skip_ws();
      const int at = static_cast<int>(pos_);
      if (consume('*')) {
        ExprPtr node = make(ExprKind::Mul, at);
        node->lhs = std::move(lhs);
        node->rhs = parse_factor();
        lhs = std::move(node);
      } else if (consume('/')) {
        ExprPtr node = make(ExprKind::Div, at);
        node->lhs = std::move(lhs);
        node->rhs = parse_factor();
        lhs = std::move(node);
      } else {
        return lhs;
      }
    }
  }

  ExprPtr parse_factor() {
    ExprPtr base = parse_unary();
    skip_ws();
    const int at = static_cast<int>(pos_);
    if (consume('^')) {
      ExprPtr node = make(ExprKind::Pow, at);
      node->lhs = std::move(base);
      node->exponent = parse_uint();
      return node;
    }
    return base;
  }

  ExprPtr parse_unary() {
    skip_ws();
    const int at = static_cast<int>(pos_);
    if (consume('-')) {
      ExprPtr node = make(ExprKind::Negate, at);
      node->lhs = parse_unary();
      return node;
    }
    return parse_atom();
  }

  ExprPtr parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const int at = static_cast<int>(pos_);
    const char c = text_[pos_];

    if (std::isdigit(static_cast<unsigned char>(c))) return parse_number(at);

    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             std::isalnum(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
      const std::string_view word = text_.substr(start, pos_ - start);
      if (word == "i") return make(ExprKind::ImaginaryUnit, at);
      if (word == "x") return parse_coord(at);
      if (word == "u") return parse_jetvar(at);
      return parse_call(at, word);
    }

    if (consume('(')) {
      ExprPtr inner = parse_expr();
      expect(')', "to close the parenthesized expression");
      return inner;
    }
    fail("expected a number, 'i', coordinate, jet variable, function, or '('");
  }

  ExprPtr parse_number(int at) {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
        ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_])))
          ++pos_;
      } else {
        pos_ = mark;  // bare 'e' belongs to something else; not ours
      }
    }
    double value = 0.0;
    auto [p, ec] =
        std::from_chars(text_.data() + start, text_.data() + pos_, value);
    (void)p;
    if (ec != std::errc{}) fail("malformed number literal");
    ExprPtr node = make(ExprKind::Number, at);
    node->number = value;
    return node;
  }

  ExprPtr parse_coord(int at) {
    ExprPtr node = make(ExprKind::Coordinate, at);
    expect('[', "after 'x'");
    node->particle = parse_uint();
    expect(']', "to close the particle index");
    if (consume('.')) node->component = parse_uint();
    return node;
  }

  MultiIndex parse_midx() {
    expect('(', "to open a multi-index");
    std::vector<int> entries;
    entries.push_back(parse_uint());
    while (consume(',')) entries.push_back(parse_uint());
    expect(')', "to close the multi-index");
    MultiIndex index(static_cast<int>(entries.size()));
    for (std::size_t k = 0; k < entries.size(); ++k)
      index(static_cast<int>(k)) = entries[k];
    return index;
  }

  ExprPtr parse_jetvar(int at) {
    ExprPtr node = make(ExprKind::JetVar, at);
    expect('[', "after 'u'");
    node->jet.internals.push_back(parse_uint());
    while (consume(',')) node->jet.internals.push_back(parse_uint());
    expect(']', "to close the internal indices");
    expect('(', "to open the multi-index list");
    node->jet.orders.push_back(parse_midx());
    while (consume(';')) node->jet.orders.push_back(parse_midx());
    expect(')', "to close the multi-index list");
    return node;
  }

  ExprPtr parse_call(int at, std::string_view word) {
    Builtin func;
    if (word == "conj")
      func = Builtin::Conj;
    else if (word == "re")
      func = Builtin::Re;
    else if (word == "im")
      func = Builtin::Im;
    else if (word == "abs2")
      func = Builtin::Abs2;
    else if (word == "exp")
      func = Builtin::Exp;
    else if (word == "log")
      func = Builtin::Log;
    else
      fail("unknown function name '" + std::string(word) + "'");
    ExprPtr node = make(ExprKind::Call, at);
    node->func = func;
    expect('(', "to open the function argument");
    node->lhs = parse_expr();
    expect(')', "to close the function argument");
    return node;
  }
};

const char* builtin_name(Builtin b) {
  switch (b) {
    case Builtin::Conj: return "conj";
    case Builtin::Re: return "re";
    case Builtin::Im: return "im";
    case Builtin::Abs2: return "abs2";
    case Builtin::Exp: return "exp";
    case Builtin::Log: return "log";
  }
  return "?";
}

// Precedence for printing: additive 1, multiplicative 2, power 3, unary 4,
// atoms 5. A child is parenthesized when its level is below the context.
int precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Add:
    case ExprKind::Sub: return 1;
    case ExprKind::Mul:
    case ExprKind::Div: return 2;
    case ExprKind::Pow: return 3;
    case ExprKind::Negate: return 4;
    default: return 5;
  }
}

void print_number(std::string& out, double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  out += buffer;
}

void print_node(std::string& out, const Expr& e, int min_level) {
  const bool parens = precedence(e) < min_level;
  if (parens) out += '(';
  switch (e.kind) {
    case ExprKind::Number:
      print_number(out, e.number);
      break;
    case ExprKind::ImaginaryUnit:
      out += 'i';
      break;
    case ExprKind::Coordinate:
      out += "x[" + std::to_string(e.particle) + "]";
      if (e.component != 0) out += "." + std::to_string(e.component);
      break;
    case ExprKind::JetVar: {
      out += "u[";
      for (std::size_t k = 0; k < e.jet.internals.size(); ++k) {
        if (k) out += ',';
        out += std::to_string(e.jet.internals[k]);
      }
      out += "](";
      for (std::size_t k = 0; k < e.jet.orders.size(); ++k) {
        if (k) out += ';';
        out += '(';
        const MultiIndex& index = e.jet.orders[k];
        for (int j = 0; j < index.size(); ++j) {
          if (j) out += ',';
          out += std::to_string(index(j));
        }
        out += ')';
      }
      out += ')';
      break;
    }
    case ExprKind::Negate:
      out += '-';
      print_node(out, *e.lhs, 4);
      break;
    case ExprKind::Add:
      print_node(out, *e.lhs, 1);
      out += " + ";
      print_node(out, *e.rhs, 2);
      break;
    case ExprKind::Sub:
      print_node(out, *e.lhs, 1);
      out += " - ";
      print_node(out, *e.rhs, 2);
      break;
    case ExprKind::Mul:
      print_node(out, *e.lhs, 2);
      out += '*';
      print_node(out, *e.rhs, 3);
      break;
    case ExprKind::Div:
      print_node(out, *e.lhs, 2);
      out += '/';
      print_node(out, *e.rhs, 3);
      break;
    case ExprKind::Pow:
      print_node(out, *e.lhs, 4);
      out += '^';
      out += std::to_string(e.exponent);
      break;
    case ExprKind::Call:
      out += builtin_name(e.func);
      out += '(';
      print_node(out, *e.lhs, 1);
      out += ')';
      break;
  }
  if (parens) out += ')';
}

}  // namespace

ExprPtr parse_operator(std::string_view text) { return Parser(text).run(); }

std::string print_operator(const Expr& expr) {
  std::string out;
  print_node(out, expr, 1);
  return out;
}

ExprPtr clone(const Expr& expr) {
  auto out = std::make_unique<Expr>();
  out->kind = expr.kind;
  out->pos = expr.pos;
  out->number = expr.number;
  out->particle = expr.particle;
  out->component = expr.component;
  out->jet = expr.jet;
  out->func = expr.func;
  out->exponent = expr.exponent;
  if (expr.lhs) out->lhs = clone(*expr.lhs);
  if (expr.rhs) out->rhs = clone(*expr.rhs);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprKind::Number:
      if (a.number != b.number) return false;
      break;
    case ExprKind::Coordinate:
      if (a.particle != b.particle || a.component != b.component) return false;
      break;
    case ExprKind::JetVar: {
      if (a.jet.internals != b.jet.internals) return false;
      if (a.jet.orders.size() != b.jet.orders.size()) return false;
      for (std::size_t k = 0; k < a.jet.orders.size(); ++k) {
        if (a.jet.orders[k].size() != b.jet.orders[k].size()) return false;
        if ((a.jet.orders[k].array() != b.jet.orders[k].array()).any()) return false;
      }
      break;
    }
    case ExprKind::Call:
      if (a.func != b.func) return false;
      break;
    case ExprKind::Pow:
      if (a.exponent != b.exponent) return false;
      break;
    default:
      break;
  }
  if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs)) return false;
  if (static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs)) return false;
  if (a.lhs && !structurally_equal(*a.lhs, *b.lhs)) return false;
  if (a.rhs && !structurally_equal(*a.rhs, *b.rhs)) return false;
  return true;
}

namespace {

const char* kind_tag(ExprKind kind) {
  switch (kind) {
    case ExprKind::Number: return "number";
    case ExprKind::ImaginaryUnit: return "i";
    case ExprKind::Coordinate: return "coord";
    case ExprKind::JetVar: return "jetvar";
    case ExprKind::Negate: return "neg";
    case ExprKind::Add: return "add";
    case ExprKind::Sub: return "sub";
    case ExprKind::Mul: return "mul";
    case ExprKind::Div: return "div";
    case ExprKind::Pow: return "pow";
    case ExprKind::Call: return "call";
  }
  return "?";
}

void validate_walk(const Expr& e, const JetSpec& spec, int arity,
                   const std::string& path, std::vector<ValidationIssue>& out) {
  const std::string here = path.empty() ? kind_tag(e.kind) : path + "." + kind_tag(e.kind);
  auto issue = [&](std::string message, bool fatal = true) {
    out.push_back({here, std::move(message), e.pos, fatal});
  };

  switch (e.kind) {
    case ExprKind::Number:
      if (!std::isfinite(e.number)) issue("non-finite literal");
      break;
    case ExprKind::Coordinate:
      if (e.particle < 0 || e.particle >= arity)
        issue("particle index " + std::to_string(e.particle) +
              " out of range for arity " + std::to_string(arity));
      if (e.component < 0 || e.component >= spec.d)
        issue("coordinate component " + std::to_string(e.component) +
              " out of range for dimension " + std::to_string(spec.d));
      break;
    case ExprKind::JetVar: {
      if (e.jet.internals.size() != e.jet.orders.size())
        issue("jet variable has " + std::to_string(e.jet.internals.size()) +
              " internal indices but " + std::to_string(e.jet.orders.size()) +
              " multi-indices");
      if (static_cast<int>(e.jet.internals.size()) != arity)
        issue("jet variable has " + std::to_string(e.jet.internals.size()) +
              " particle slots; operator arity is " + std::to_string(arity));
      for (int a : e.jet.internals)
        if (a < 0 || a >= spec.m) issue("internal index out of range");
      for (const MultiIndex& index : e.jet.orders) {
        if (index.size() != spec.d)
          issue("multi-index length " + std::to_string(index.size()) +
                " does not match dimension " + std::to_string(spec.d));
        else if (order_of(index) > spec.K)
          issue("derivative order exceeds K");
      }
      break;
    }
    case ExprKind::Call:
      if (e.func == Builtin::Log)
        issue("log is domain-restricted: argument must be nonzero at evaluation",
              /*fatal=*/false);
      break;
    case ExprKind::Pow:
      if (e.exponent < 0) issue("negative exponent");
      break;
    default:
      break;
  }
  if (e.lhs) validate_walk(*e.lhs, spec, arity, here, out);
  if (e.rhs) validate_walk(*e.rhs, spec, arity, here, out);
}

}  // namespace

std::vector<ValidationIssue> validate(const Expr& expr, const JetSpec& spec,
                                      int arity) {
  std::vector<ValidationIssue> out;
  validate_walk(expr, spec, arity, "", out);
  return out;
}

bool validate_ok(const Expr& expr, const JetSpec& spec, int arity) {
  for (const ValidationIssue& issue : validate(expr, spec, arity))
    if (issue.fatal) return false;
  return true;
}

JetDependence classify_jet_dependence(const Expr& e) {
  using D = JetDependence;
  auto combine_additive = [](D a, D b) {
    if (a == D::Zero) return b;
    if (b == D::Zero) return a;
    if (a == D::Nonlinear || b == D::Nonlinear) return D::Nonlinear;
    if (a == b) return a;      // Constant+Constant or Linear+Linear
    return D::Nonlinear;       // affine breaks homogeneity
  };
  switch (e.kind) {
    case ExprKind::Number:
      return e.number == 0.0 ? D::Zero : D::Constant;
    case ExprKind::ImaginaryUnit:
    case ExprKind::Coordinate:
      return D::Constant;
    case ExprKind::JetVar:
      return D::Linear;
    case ExprKind::Negate:
      return classify_jet_dependence(*e.lhs);
    case ExprKind::Add:
    case ExprKind::Sub:
      return combine_additive(classify_jet_dependence(*e.lhs),
                              classify_jet_dependence(*e.rhs));
    case ExprKind::Mul: {
      const D a = classify_jet_dependence(*e.lhs);
      const D b = classify_jet_dependence(*e.rhs);
      if (a == D::Nonlinear || b == D::Nonlinear) return D::Nonlinear;
      if (a == D::Zero || b == D::Zero) return D::Zero;
      if (a == D::Constant) return b;
      if (b == D::Constant) return a;
      return D::Nonlinear;  // Linear * Linear
    }
    case ExprKind::Div: {
      const D a = classify_jet_dependence(*e.lhs);
      const D b = classify_jet_dependence(*e.rhs);
      if (b == D::Constant) return a;
      return D::Nonlinear;  // jet-dependent or zero denominator
    }
    case ExprKind::Pow: {
      if (e.exponent == 0) return D::Constant;
      const D a = classify_jet_dependence(*e.lhs);
      if (e.exponent == 1) return a;
      if (a == D::Zero || a == D::Constant) return a;
      return D::Nonlinear;
    }
    case ExprKind::Call: {
      const D a = classify_jet_dependence(*e.lhs);
      if (a == D::Zero || a == D::Constant) return D::Constant;
      return D::Nonlinear;  // conj/re/im are only R-linear; exp/log nonlinear
    }
  }
  return D::Nonlinear;
}

bool is_linear_in_jet(const Expr& expr) {
  const JetDependence d = classify_jet_dependence(expr);
  return d == JetDependence::Zero || d == JetDependence::Linear;
}

bool has_jet_singularity(const Expr& e) {
  auto jet_dependent = [](const Expr& n) {
    const JetDependence d = classify_jet_dependence(n);
    return d == JetDependence::Linear || d == JetDependence::Nonlinear;
  };
  if (e.kind == ExprKind::Div && jet_dependent(*e.rhs)) return true;
  if (e.kind == ExprKind::Call && e.func == Builtin::Log && jet_dependent(*e.lhs))
    return true;
  if (e.lhs && has_jet_singularity(*e.lhs)) return true;
  if (e.rhs && has_jet_singularity(*e.rhs)) return true;
  return false;
}

cdouble eval_expr(const Expr& e, const JetBinding& binding,
                  const EvalOptions& options) {
  switch (e.kind) {
    case ExprKind::Number:
      return cdouble(e.number, 0.0);
    case ExprKind::ImaginaryUnit:
      return kImaginaryUnit;
    case ExprKind::Coordinate:
      return cdouble(binding.coordinate(e.particle, e.component), 0.0);
    case ExprKind::JetVar:
      return binding.jet_value(e.jet, e.pos);
    case ExprKind::Negate:
      return -eval_expr(*e.lhs, binding, options);
    case ExprKind::Add:
      return eval_expr(*e.lhs, binding, options) + eval_expr(*e.rhs, binding, options);
    case ExprKind::Sub:
      return eval_expr(*e.lhs, binding, options) - eval_expr(*e.rhs, binding, options);
    case ExprKind::Mul:
      return eval_expr(*e.lhs, binding, options) * eval_expr(*e.rhs, binding, options);
    case ExprKind::Div: {
      const cdouble num = eval_expr(*e.lhs, binding, options);
      const cdouble den = eval_expr(*e.rhs, binding, options);
      if (std::abs(den) <= options.singular_floor)
        throw DomainError("division by a (near-)zero value", e.pos);
      return num / den;
    }
    case ExprKind::Pow: {
      cdouble base = eval_expr(*e.lhs, binding, options);
      cdouble result = 1.0;
      for (int k = 0; k < e.exponent; ++k) result *= base;
      return result;
    }
    case ExprKind::Call: {
      const cdouble v = eval_expr(*e.lhs, binding, options);
      switch (e.func) {
        case Builtin::Conj: return std::conj(v);
        case Builtin::Re: return cdouble(v.real(), 0.0);
        case Builtin::Im: return cdouble(v.imag(), 0.0);
        case Builtin::Abs2: return cdouble(std::norm(v), 0.0);
        case Builtin::Exp: return std::exp(v);
        case Builtin::Log:
          if (std::abs(v) <= options.singular_floor)
            throw DomainError("log of a zero-modulus value", e.pos);
          return std::log(v);
      }
      break;
    }
  }
  throw std::logic_error("eval_expr: unreachable");
}

}  // namespace sephier
