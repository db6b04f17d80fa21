#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace sephier {

using cdouble = std::complex<double>;

constexpr cdouble kImaginaryUnit{0.0, 1.0};

/// Error raised while turning operator text into an AST.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, int line, int column)
      : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                           std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Evaluation hit a singular point (log of zero, division by zero, amplitude
/// under the configured floor). Carries enough context to locate the node and,
/// for grid evolution, the step and grid point.
class DomainError : public std::runtime_error {
 public:
  DomainError(std::string message, int source_pos)
      : std::runtime_error(std::move(message)), source_pos_(source_pos) {}

  int source_pos() const { return source_pos_; }

  int component = -1;   // operator component that was being evaluated
  long step = -1;       // time step (grid evolution only)
  long point = -1;      // flat grid index (grid evolution only)

 private:
  int source_pos_;
};

/// Incompatible shapes/specs between operands.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace sephier
