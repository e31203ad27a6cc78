#pragma once

// Arithmetic expressions in one free variable `t`.
//
// Grammar (whitespace insignificant):
//   expr    := expr ('+'|'-') expr | expr ('*'|'/') expr | expr '^' expr
//            | ('-'|'+') expr | primary
//   primary := number | 't' | 'pi' | 'e' | name '(' expr [',' expr] ')'
//            | '(' expr ')'
//   name    := sin | cos | exp | log | sqrt | abs   (one argument)
//            | pow | min | max                      (two arguments)
// '^' binds tighter than unary minus and is right-associative; there is no
// implicit multiplication.

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace psidensity::expr {

enum class NodeKind { constant, variable, negate, add, subtract, multiply, divide, power, call };

enum class Builtin { sin, cos, exp, log, sqrt, abs, pow, min, max };

struct Node {
  NodeKind kind = NodeKind::constant;
  double value = 0.0;          // constant nodes
  Builtin builtin = Builtin::sin;  // call nodes
  std::size_t offset = 0;      // byte offset in the source text
  std::vector<std::shared_ptr<const Node>> args;
};

/// Structural equality; source offsets are ignored.
bool same_tree(const Node& a, const Node& b);

std::string_view builtin_name(Builtin b);
std::size_t builtin_arity(Builtin b);

/// An immutable parsed expression. Copies share the tree.
class Expression {
 public:
  Expression(std::shared_ptr<const Node> root, std::string source)
      : root_(std::move(root)), source_(std::move(source)) {}

  const Node& root() const { return *root_; }
  const std::string& source() const { return source_; }

  /// Fully parenthesized text that parses back to the same tree.
  std::string to_string() const;

  /// Half period (in t) of the fastest sin/cos whose argument is affine in t.
  std::optional<double> half_period_hint() const;

 private:
  std::shared_ptr<const Node> root_;
  std::string source_;
};

Expression parse(std::string_view text);

/// Value at t. Throws DomainError naming the offending node on log of a
/// non-positive value, sqrt of a negative, division by zero, or a
/// non-integer power of a negative base.
double evaluate(const Expression& e, double t);

/// A real number held as sign and log-magnitude, so values like e^(e^9)
/// stay representable. `sign` is -1, 0 or +1; zero has log_abs = -inf.
struct LogMagnitude {
  int sign = 0;
  double log_abs = 0.0;

  static LogMagnitude from_value(double v);
  double value() const;
};

/// Evaluates the expression at t = e^x without forming t. Agrees with
/// `evaluate(e, exp(x))` wherever the latter does not overflow.
LogMagnitude evaluate_log(const Expression& e, double x);

}  // namespace psidensity::expr
