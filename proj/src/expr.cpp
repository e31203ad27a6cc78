#include "psidensity/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "psidensity/error.hpp"

namespace psidensity::expr {
namespace {

using NodePtr = std::shared_ptr<const Node>;

constexpr std::array<std::pair<std::string_view, Builtin>, 9> kBuiltins{{
    {"sin", Builtin::sin},
    {"cos", Builtin::cos},
    {"exp", Builtin::exp},
    {"log", Builtin::log},
    {"sqrt", Builtin::sqrt},
    {"abs", Builtin::abs},
    {"pow", Builtin::pow},
    {"min", Builtin::min},
    {"max", Builtin::max},
}};

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, comma, end };

struct Token {
  Tok kind = Tok::end;
  std::size_t offset = 0;
  std::string_view text;
  double number = 0.0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    tok_ = Token{};
    tok_.offset = pos_;
    if (pos_ >= src_.size()) {
      tok_.kind = Tok::end;
      return;
    }
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      lex_number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_'))
        ++end;
      tok_.kind = Tok::ident;
      tok_.text = src_.substr(pos_, end - pos_);
      pos_ = end;
      return;
    }
    switch (c) {
      case '+': tok_.kind = Tok::plus; break;
      case '-': tok_.kind = Tok::minus; break;
      case '*': tok_.kind = Tok::star; break;
      case '/': tok_.kind = Tok::slash; break;
      case '^': tok_.kind = Tok::caret; break;
      case '(': tok_.kind = Tok::lparen; break;
      case ')': tok_.kind = Tok::rparen; break;
      case ',': tok_.kind = Tok::comma; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }
    tok_.text = src_.substr(pos_, 1);
    ++pos_;
  }

  void lex_number() {
    std::size_t end = pos_;
    auto digits = [&] {
      while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
    };
    digits();
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      digits();
    }
    // An exponent needs at least one digit; otherwise `e` is left for the
    // next token (and then rejected, since there is no implicit product).
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t probe = end + 1;
      if (probe < src_.size() && (src_[probe] == '+' || src_[probe] == '-')) ++probe;
      if (probe < src_.size() && std::isdigit(static_cast<unsigned char>(src_[probe]))) {
        end = probe;
        digits();
      }
    }
    const std::string_view text = src_.substr(pos_, end - pos_);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
      throw ParseError("malformed number '" + std::string(text) + "'", pos_);
    tok_.kind = Tok::number;
    tok_.text = text;
    tok_.number = value;
    pos_ = end;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token tok_;
};

int infix_binding(Tok t) {
  switch (t) {
    case Tok::plus:
    case Tok::minus: return 10;
    case Tok::star:
    case Tok::slash: return 20;
    case Tok::caret: return 30;
    default: return 0;
  }
}

constexpr int kPrefixBinding = 25;

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src), src_(src) {}

  NodePtr parse_all() {
    NodePtr root = parse_expr(0);
    if (lex_.peek().kind != Tok::end) unexpected(lex_.peek());
    return root;
  }

 private:
  [[noreturn]] void unexpected(const Token& t) {
    if (t.kind == Tok::end) throw ParseError("unexpected end of input", t.offset);
    throw ParseError("unexpected token '" + std::string(t.text) + "'", t.offset);
  }

  void expect(Tok kind, const char* what) {
    const Token& t = lex_.peek();
    if (t.kind != kind) {
      if (t.kind == Tok::end) throw ParseError(std::string("expected ") + what, t.offset);
      throw ParseError(std::string("expected ") + what + ", found '" + std::string(t.text) + "'",
                       t.offset);
    }
    lex_.take();
  }

  NodePtr parse_expr(int min_binding) {
    NodePtr lhs = parse_prefix();
    for (;;) {
      const Token& op = lex_.peek();
      const int lbp = infix_binding(op.kind);
      if (lbp == 0 || lbp <= min_binding) {
        if (op.kind != Tok::end && op.kind != Tok::rparen && op.kind != Tok::comma && lbp == 0)
          unexpected(op);
        return lhs;
      }
      const Token t = lex_.take();
      // Right associativity for '^': the right operand may contain another '^'.
      const int rbp = t.kind == Tok::caret ? lbp - 1 : lbp;
      NodePtr rhs = parse_expr(rbp);
      auto node = std::make_shared<Node>();
      node->offset = t.offset;
      switch (t.kind) {
        case Tok::plus: node->kind = NodeKind::add; break;
        case Tok::minus: node->kind = NodeKind::subtract; break;
        case Tok::star: node->kind = NodeKind::multiply; break;
        case Tok::slash: node->kind = NodeKind::divide; break;
        default: node->kind = NodeKind::power; break;
      }
      node->args = {std::move(lhs), std::move(rhs)};
      lhs = std::move(node);
    }
  }

  NodePtr parse_prefix() {
    const Token t = lex_.take();
    switch (t.kind) {
      case Tok::number: {
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::constant;
        n->value = t.number;
        n->offset = t.offset;
        return n;
      }
      case Tok::minus: {
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::negate;
        n->offset = t.offset;
        n->args = {parse_expr(kPrefixBinding)};
        return n;
      }
      case Tok::plus:
        return parse_expr(kPrefixBinding);
      case Tok::lparen: {
        NodePtr inner = parse_expr(0);
        expect(Tok::rparen, "')'");
        return inner;
      }
      case Tok::ident:
        return parse_identifier(t);
      default:
        unexpected(t);
    }
  }

  NodePtr parse_identifier(const Token& t) {
    auto n = std::make_shared<Node>();
    n->offset = t.offset;
    if (t.text == "t") {
      n->kind = NodeKind::variable;
      return n;
    }
    if (t.text == "pi") {
      n->value = std::numbers::pi;
      return n;
    }
    if (t.text == "e") {
      n->value = std::numbers::e;
      return n;
    }
    for (const auto& [name, builtin] : kBuiltins) {
      if (name != t.text) continue;
      n->kind = NodeKind::call;
      n->builtin = builtin;
      expect(Tok::lparen, "'(' after function name");
      n->args.push_back(parse_expr(0));
      while (lex_.peek().kind == Tok::comma) {
        lex_.take();
        n->args.push_back(parse_expr(0));
      }
      expect(Tok::rparen, "')'");
      if (n->args.size() != builtin_arity(builtin)) {
        throw ParseError(std::string(name) + " takes " + std::to_string(builtin_arity(builtin)) +
                             " argument(s), got " + std::to_string(n->args.size()),
                         t.offset);
      }
      return n;
    }
    throw ParseError("unknown identifier '" + std::string(t.text) + "'", t.offset);
  }

  Lexer lex_;
  std::string_view src_;
};

std::string describe(const Node& n) {
  std::string what;
  switch (n.kind) {
    case NodeKind::divide: what = "'/'"; break;
    case NodeKind::power: what = "'^'"; break;
    case NodeKind::call: what = std::string(builtin_name(n.builtin)); break;
    default: what = "node"; break;
  }
  return what + " at offset " + std::to_string(n.offset);
}

bool is_integer(double v) { return std::isfinite(v) && std::floor(v) == v; }

double power_checked(const Node& n, double base, double exponent) {
  if (base < 0.0 && !is_integer(exponent))
    throw DomainError("non-integer power of a negative base in " + describe(n));
  if (base == 0.0 && exponent < 0.0) throw DomainError("division by zero in " + describe(n));
  return std::pow(base, exponent);
}

double eval_node(const Node& n, double t) {
  switch (n.kind) {
    case NodeKind::constant: return n.value;
    case NodeKind::variable: return t;
    case NodeKind::negate: return -eval_node(*n.args[0], t);
    case NodeKind::add: return eval_node(*n.args[0], t) + eval_node(*n.args[1], t);
    case NodeKind::subtract: return eval_node(*n.args[0], t) - eval_node(*n.args[1], t);
    case NodeKind::multiply: return eval_node(*n.args[0], t) * eval_node(*n.args[1], t);
    case NodeKind::divide: {
      const double num = eval_node(*n.args[0], t);
      const double den = eval_node(*n.args[1], t);
      if (den == 0.0) throw DomainError("division by zero in " + describe(n));
      return num / den;
    }
    case NodeKind::power:
      return power_checked(n, eval_node(*n.args[0], t), eval_node(*n.args[1], t));
    case NodeKind::call: break;
  }
  const double a = eval_node(*n.args[0], t);
  switch (n.builtin) {
    case Builtin::sin: return std::sin(a);
    case Builtin::cos: return std::cos(a);
    case Builtin::exp: return std::exp(a);
    case Builtin::log:
      if (!(a > 0.0)) throw DomainError("log of non-positive value in " + describe(n));
      return std::log(a);
    case Builtin::sqrt:
      if (a < 0.0) throw DomainError("sqrt of negative value in " + describe(n));
      return std::sqrt(a);
    case Builtin::abs: return std::abs(a);
    case Builtin::pow: return power_checked(n, a, eval_node(*n.args[1], t));
    case Builtin::min: return std::min(a, eval_node(*n.args[1], t));
    case Builtin::max: return std::max(a, eval_node(*n.args[1], t));
  }
  return 0.0;
}

// ---- log-magnitude arithmetic ----------------------------------------------

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

LogMagnitude lm_add(LogMagnitude a, LogMagnitude b) {
  if (a.sign == 0) return b;
  if (b.sign == 0) return a;
  if (a.log_abs < b.log_abs) std::swap(a, b);
  if (std::isinf(a.log_abs) && a.log_abs == b.log_abs) {
    if (a.sign == b.sign) return a;
    return {0, std::numeric_limits<double>::quiet_NaN()};
  }
  const double d = std::exp(b.log_abs - a.log_abs);
  if (a.sign == b.sign) return {a.sign, a.log_abs + std::log1p(d)};
  if (d == 1.0) return {0, kNegInf};
  return {a.sign, a.log_abs + std::log1p(-d)};
}

LogMagnitude lm_negate(LogMagnitude a) { return {-a.sign, a.log_abs}; }

int compare(LogMagnitude a, LogMagnitude b) {
  if (a.sign != b.sign) return a.sign < b.sign ? -1 : 1;
  if (a.sign == 0 || a.log_abs == b.log_abs) return 0;
  const bool larger_mag = a.log_abs > b.log_abs;
  return (larger_mag == (a.sign > 0)) ? 1 : -1;
}

LogMagnitude eval_log_node(const Node& n, double x);

// Exponents are evaluated directly when that stays finite, so e^1e12 has log exactly 1e12.
double exponent_value(const Node& n, double x) {
  const double t = std::exp(x);
  if (std::isfinite(t)) {
    try {
      const double v = eval_node(n, t);
      if (std::isfinite(v)) return v;
    } catch (const DomainError&) {
    }
  }
  return eval_log_node(n, x).value();
}

LogMagnitude lm_power(const Node& n, LogMagnitude base, double p) {
  if (base.sign == 0) {
    if (p > 0.0) return {0, kNegInf};
    if (p == 0.0) return {1, 0.0};
    throw DomainError("division by zero in " + describe(n));
  }
  if (base.sign < 0) {
    if (!is_integer(p)) throw DomainError("non-integer power of a negative base in " + describe(n));
    const bool odd = std::fmod(std::abs(p), 2.0) == 1.0;
    return {odd ? -1 : 1, p * base.log_abs};
  }
  if (p == 0.0) return {1, 0.0};
  return {1, p * base.log_abs};
}

LogMagnitude eval_log_node(const Node& n, double x) {
  switch (n.kind) {
    case NodeKind::constant: return LogMagnitude::from_value(n.value);
    case NodeKind::variable: return {1, x};
    case NodeKind::negate: return lm_negate(eval_log_node(*n.args[0], x));
    case NodeKind::add: return lm_add(eval_log_node(*n.args[0], x), eval_log_node(*n.args[1], x));
    case NodeKind::subtract:
      return lm_add(eval_log_node(*n.args[0], x), lm_negate(eval_log_node(*n.args[1], x)));
    case NodeKind::multiply: {
      const auto a = eval_log_node(*n.args[0], x);
      const auto b = eval_log_node(*n.args[1], x);
      if (a.sign == 0 || b.sign == 0) return {0, kNegInf};
      return {a.sign * b.sign, a.log_abs + b.log_abs};
    }
    case NodeKind::divide: {
      const auto a = eval_log_node(*n.args[0], x);
      const auto b = eval_log_node(*n.args[1], x);
      if (b.sign == 0) throw DomainError("division by zero in " + describe(n));
      if (a.sign == 0) return {0, kNegInf};
      return {a.sign * b.sign, a.log_abs - b.log_abs};
    }
    case NodeKind::power:
      return lm_power(n, eval_log_node(*n.args[0], x), exponent_value(*n.args[1], x));
    case NodeKind::call: break;
  }
  const auto a = eval_log_node(*n.args[0], x);
  switch (n.builtin) {
    case Builtin::sin:
    case Builtin::cos: {
      const double v = a.value();
      if (!std::isfinite(v))
        throw DomainError("argument out of range for " + describe(n));
      return LogMagnitude::from_value(n.builtin == Builtin::sin ? std::sin(v) : std::cos(v));
    }
    case Builtin::exp: return {1, a.value()};
    case Builtin::log:
      if (a.sign <= 0) throw DomainError("log of non-positive value in " + describe(n));
      return LogMagnitude::from_value(a.log_abs);
    case Builtin::sqrt:
      if (a.sign < 0) throw DomainError("sqrt of negative value in " + describe(n));
      return a.sign == 0 ? a : LogMagnitude{1, 0.5 * a.log_abs};
    case Builtin::abs: return a.sign == 0 ? a : LogMagnitude{1, a.log_abs};
    case Builtin::pow: return lm_power(n, a, exponent_value(*n.args[1], x));
    case Builtin::min: {
      const auto b = eval_log_node(*n.args[1], x);
      return compare(a, b) <= 0 ? a : b;
    }
    case Builtin::max: {
      const auto b = eval_log_node(*n.args[1], x);
      return compare(a, b) >= 0 ? a : b;
    }
  }
  return {};
}

// ---- printing and hints -----------------------------------------------------

void print(const Node& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::constant: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    }
    case NodeKind::variable: out += 't'; return;
    case NodeKind::negate:
      out += "(-";
      print(*n.args[0], out);
      out += ')';
      return;
    case NodeKind::call:
      out += builtin_name(n.builtin);
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        print(*n.args[i], out);
      }
      out += ')';
      return;
    default: break;
  }
  static constexpr std::array<const char*, 5> ops{" + ", " - ", " * ", " / ", "^"};
  out += '(';
  print(*n.args[0], out);
  out += ops[static_cast<int>(n.kind) - static_cast<int>(NodeKind::add)];
  print(*n.args[1], out);
  out += ')';
}

// Coefficient a when the subtree is a*t + b with constant a, b.
std::optional<double> affine_slope(const Node& n) {
  switch (n.kind) {
    case NodeKind::constant: return 0.0;
    case NodeKind::variable: return 1.0;
    case NodeKind::negate: {
      auto a = affine_slope(*n.args[0]);
      return a ? std::optional(-*a) : std::nullopt;
    }
    case NodeKind::add:
    case NodeKind::subtract: {
      auto a = affine_slope(*n.args[0]);
      auto b = affine_slope(*n.args[1]);
      if (!a || !b) return std::nullopt;
      return n.kind == NodeKind::add ? *a + *b : *a - *b;
    }
    case NodeKind::multiply: {
      const Node& l = *n.args[0];
      const Node& r = *n.args[1];
      if (l.kind == NodeKind::constant) {
        auto s = affine_slope(r);
        return s ? std::optional(l.value * *s) : std::nullopt;
      }
      if (r.kind == NodeKind::constant) {
        auto s = affine_slope(l);
        return s ? std::optional(r.value * *s) : std::nullopt;
      }
      return std::nullopt;
    }
    case NodeKind::divide: {
      const Node& r = *n.args[1];
      if (r.kind != NodeKind::constant || r.value == 0.0) return std::nullopt;
      auto s = affine_slope(*n.args[0]);
      return s ? std::optional(*s / r.value) : std::nullopt;
    }
    default: return std::nullopt;
  }
}

void collect_half_periods(const Node& n, std::optional<double>& best) {
  if (n.kind == NodeKind::call && (n.builtin == Builtin::sin || n.builtin == Builtin::cos)) {
    if (auto a = affine_slope(*n.args[0]); a && *a != 0.0) {
      const double hp = std::numbers::pi / std::abs(*a);
      if (!best || hp < *best) best = hp;
    }
  }
  for (const auto& c : n.args) collect_half_periods(*c, best);
}

}  // namespace

bool same_tree(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  if (a.kind == NodeKind::constant && a.value != b.value) return false;
  if (a.kind == NodeKind::call && a.builtin != b.builtin) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!same_tree(*a.args[i], *b.args[i])) return false;
  return true;
}

std::string_view builtin_name(Builtin b) {
  for (const auto& [name, builtin] : kBuiltins)
    if (builtin == b) return name;
  return "?";
}

std::size_t builtin_arity(Builtin b) {
  return (b == Builtin::pow || b == Builtin::min || b == Builtin::max) ? 2 : 1;
}

std::string Expression::to_string() const {
  std::string out;
  print(*root_, out);
  return out;
}

std::optional<double> Expression::half_period_hint() const {
  std::optional<double> best;
  collect_half_periods(*root_, best);
  return best;
}

Expression parse(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos)
    throw ParseError("empty expression", 0);
  Parser p(text);
  return Expression(p.parse_all(), std::string(text));
}

double evaluate(const Expression& e, double t) { return eval_node(e.root(), t); }

LogMagnitude LogMagnitude::from_value(double v) {
  if (v == 0.0) return {0, kNegInf};
  if (std::isnan(v)) return {0, v};
  return {v > 0.0 ? 1 : -1, std::log(std::abs(v))};
}

double LogMagnitude::value() const {
  if (sign == 0) return std::isnan(log_abs) ? log_abs : 0.0;
  return sign * std::exp(log_abs);
}

LogMagnitude evaluate_log(const Expression& e, double x) { return eval_log_node(e.root(), x); }

}  // namespace psidensity::expr
