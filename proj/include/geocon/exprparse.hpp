#pragma once

// Expression language for immersion components: variables u1..u4, real
// literals, + - * /, unary minus, ^ with a nonnegative integer literal
// exponent, the constant pi, and one-argument calls to sin cos sinh cosh tan
// tanh exp log sqrt atan. Evaluated over double or Jet.

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "geocon/errors.hpp"
#include "geocon/jet.hpp"

namespace geocon {

inline constexpr int kMaxExprDepth = 256;
inline constexpr int kMaxExprVars = 4;
inline constexpr int kMaxExponent = 64;

enum class Func { sin, cos, sinh, cosh, tan, tanh, exp, log, sqrt, atan };

inline constexpr std::array<std::string_view, 10> kFuncNames{"sin", "cos",  "sinh", "cosh", "tan",
                                                              "tanh", "exp", "log",  "sqrt", "atan"};

constexpr std::string_view to_string(Func f) { return kFuncNames[static_cast<std::size_t>(f)]; }

enum class BinOp { add, sub, mul, div };

class ParseError : public GeoError {
 public:
  // offset is 1-based; offset = size+1 means end of input.
  ParseError(std::size_t offset, std::string message, std::vector<std::string> expected = {})
      : GeoError(ErrorKind::parse, format(offset, message, expected)),
        offset_(offset),
        message_(std::move(message)),
        expected_(std::move(expected)) {}

  [[nodiscard]] std::size_t offset() const noexcept { return offset_; }
  [[nodiscard]] const std::string& message() const noexcept { return message_; }
  [[nodiscard]] const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  static std::string format(std::size_t offset, const std::string& msg, const std::vector<std::string>& exp) {
    std::string s = "offset " + std::to_string(offset) + ": " + msg;
    if (!exp.empty()) {
      s += " (expected one of:";
      for (const auto& e : exp) s += " " + e;
      s += ")";
    }
    return s;
  }

  std::size_t offset_;
  std::string message_;
  std::vector<std::string> expected_;
};

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

class Expr {
 public:
  struct Number {
    double value;
    bool operator==(const Number&) const = default;
  };
  struct Pi {
    bool operator==(const Pi&) const = default;
  };
  struct Variable {
    int index;  // 0-based
    bool operator==(const Variable&) const = default;
  };
  struct Negate {
    ExprPtr arg;
  };
  struct Binary {
    BinOp op;
    ExprPtr lhs;
    ExprPtr rhs;
  };
  struct Power {
    ExprPtr base;
    int exponent;
  };
  struct Call {
    Func func;
    ExprPtr arg;
  };
  using Node = std::variant<Number, Pi, Variable, Negate, Binary, Power, Call>;

  Expr(Node node, std::size_t offset = 0) : node_(std::move(node)), offset_(offset) {  // NOLINT
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Negate> || std::is_same_v<T, Call>) depth_ = 1 + x.arg->depth();
          else if constexpr (std::is_same_v<T, Binary>) depth_ = 1 + std::max(x.lhs->depth(), x.rhs->depth());
          else if constexpr (std::is_same_v<T, Power>) depth_ = 1 + x.base->depth();
        },
        node_);
  }

  [[nodiscard]] const Node& node() const noexcept { return node_; }
  // Height of the tree; a leaf has depth 1.
  [[nodiscard]] int depth() const noexcept { return depth_; }
  // 1-based source offset of the node (0 for synthesized nodes).
  [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

  friend bool operator==(const Expr& a, const Expr& b) {
    if (a.node_.index() != b.node_.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
          using T = std::decay_t<decltype(x)>;
          const auto& y = std::get<T>(b.node_);
          if constexpr (std::is_same_v<T, Negate>) return *x.arg == *y.arg;
          else if constexpr (std::is_same_v<T, Binary>) return x.op == y.op && *x.lhs == *y.lhs && *x.rhs == *y.rhs;
          else if constexpr (std::is_same_v<T, Power>) return x.exponent == y.exponent && *x.base == *y.base;
          else if constexpr (std::is_same_v<T, Call>) return x.func == y.func && *x.arg == *y.arg;
          else return x == y;
        },
        a.node_);
  }

 private:
  Node node_;
  std::size_t offset_;
  int depth_ = 1;
};

inline ExprPtr make_expr(Expr::Node node, std::size_t offset = 0) {
  return std::make_shared<const Expr>(std::move(node), offset);
}

namespace detail {

class Parser {
 public:
  Parser(std::string_view src, int nvars) : src_(src), nvars_(nvars) {}

  ExprPtr parse_all() {
    skip_ws();
    ExprPtr e = parse_sum();
    skip_ws();
    if (pos_ < src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'", {"+", "-", "*", "/", "^", "end of input"});
    return e;
  }

 private:
  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) {
      if (++p.depth_ > kMaxExprDepth) p.fail("expression nested deeper than " + std::to_string(kMaxExprDepth), {});
    }
    ~DepthGuard() { --p.depth_; }
    DepthGuard(const DepthGuard&) = delete;
    DepthGuard& operator=(const DepthGuard&) = delete;
  };

  ExprPtr node(Expr::Node n, std::size_t at) {
    ExprPtr e = make_expr(std::move(n), at);
    if (e->depth() > kMaxExprDepth) {
      pos_ = at - 1;
      fail("expression deeper than " + std::to_string(kMaxExprDepth), {});
    }
    return e;
  }

  [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected) const {
    throw ParseError(pos_ + 1, msg, std::move(expected));
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  [[nodiscard]] char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

  ExprPtr parse_sum() {
    ExprPtr lhs = parse_product();
    for (;;) {
      skip_ws();
      const char c = peek();
      if (c != '+' && c != '-') return lhs;
      const std::size_t at = pos_ + 1;
      ++pos_;
      ExprPtr rhs = parse_product();
      lhs = node(Expr::Binary{c == '+' ? BinOp::add : BinOp::sub, lhs, rhs}, at);
    }
  }

  ExprPtr parse_product() {
    ExprPtr lhs = parse_unary();
    for (;;) {
      skip_ws();
      const char c = peek();
      if (c != '*' && c != '/') return lhs;
      const std::size_t at = pos_ + 1;
      ++pos_;
      ExprPtr rhs = parse_unary();
      lhs = node(Expr::Binary{c == '*' ? BinOp::mul : BinOp::div, lhs, rhs}, at);
    }
  }

  ExprPtr parse_unary() {
    DepthGuard guard(*this);
    skip_ws();
    if (peek() == '-') {
      const std::size_t at = pos_ + 1;
      ++pos_;
      return node(Expr::Negate{parse_unary()}, at);
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_primary();
    skip_ws();
    if (peek() != '^') return base;
    const std::size_t at = pos_ + 1;
    ++pos_;
    const long long e = parse_exponent();
    return node(Expr::Power{base, static_cast<int>(e)}, at);
  }

  // INT ('^' INT)*, right associative, folded to one integer.
  long long parse_exponent() {
    std::vector<std::pair<long long, std::size_t>> chain;
    for (;;) {
      skip_ws();
      const std::size_t start = pos_;
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("exponent must be a nonnegative integer literal", {"integer"});
      long long v = 0;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        v = v * 10 + (src_[pos_] - '0');
        if (v > kMaxExponent) {
          pos_ = start;
          fail("exponent exceeds " + std::to_string(kMaxExponent), {});
        }
        ++pos_;
      }
      if (peek() == '.' || peek() == 'e' || peek() == 'E') fail("exponent must be an integer literal", {"^", "operator"});
      chain.emplace_back(v, start);
      skip_ws();
      if (peek() != '^') break;
      ++pos_;
    }
    long long r = chain.back().first;
    for (auto it = chain.rbegin() + 1; it != chain.rend(); ++it) {
      long long acc = 1;
      for (long long k = 0; k < r; ++k) {
        acc *= it->first;
        if (acc > kMaxExponent) {
          pos_ = it->second;
          fail("exponent exceeds " + std::to_string(kMaxExponent), {});
        }
      }
      r = acc;
    }
    return r;
  }

  ExprPtr parse_primary() {
    skip_ws();
    const char c = peek();
    const std::size_t at = pos_ + 1;
    if (c == '(') {
      ++pos_;
      ExprPtr e = parse_sum();
      skip_ws();
      if (peek() != ')') fail(pos_ < src_.size() ? "expected ')'" : "unbalanced parenthesis", {")"});
      ++pos_;
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier(at);
    if (pos_ >= src_.size()) fail("unexpected end of input", {"number", "variable", "function", "(", "-"});
    fail("unexpected character '" + std::string(1, c) + "'", {"number", "variable", "function", "(", "-"});
  }

  ExprPtr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t k = 0;
      while (std::isdigit(static_cast<unsigned char>(peek()))) {
        ++pos_;
        ++k;
      }
      return k;
    };
    std::size_t mant = digits();
    if (peek() == '.') {
      ++pos_;
      mant += digits();
    }
    if (mant == 0) fail("malformed number", {"digit"});
    if (peek() == 'e' || peek() == 'E') {
      ++pos_;
      if (peek() == '+' || peek() == '-') ++pos_;
      if (digits() == 0) fail("malformed exponent in number", {"digit"});
    }
    double value = 0.0;
    const auto res = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (res.ec != std::errc() || !std::isfinite(value)) {
      pos_ = start;
      fail("number out of range", {});
    }
    return node(Expr::Number{value}, start + 1);
  }

  ExprPtr parse_identifier(std::size_t at) {
    const std::size_t start = pos_;
    while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    if (name.size() == 2 && name[0] == 'u' && name[1] >= '1' && name[1] <= '9') {
      const int idx = name[1] - '1';
      if (idx >= nvars_) {
        pos_ = start;
        fail("variable " + std::string(name) + " outside the chart dimension " + std::to_string(nvars_), {});
      }
      return node(Expr::Variable{idx}, at);
    }
    if (name == "pi") return node(Expr::Pi{}, at);
    for (std::size_t k = 0; k < kFuncNames.size(); ++k) {
      if (name != kFuncNames[k]) continue;
      skip_ws();
      if (peek() != '(') fail("expected '(' after function name", {"("});
      ++pos_;
      std::vector<ExprPtr> args;
      skip_ws();
      if (peek() != ')') {
        args.push_back(parse_sum());
        skip_ws();
        while (peek() == ',') {
          ++pos_;
          args.push_back(parse_sum());
          skip_ws();
        }
      }
      if (peek() != ')') fail(pos_ < src_.size() ? "expected ')'" : "unbalanced parenthesis", {")", ","});
      ++pos_;
      if (args.size() != 1) {
        pos_ = start;
        fail(std::string(name) + " takes 1 argument, got " + std::to_string(args.size()), {});
      }
      return node(Expr::Call{static_cast<Func>(k), args[0]}, at);
    }
    pos_ = start;
    fail("unknown identifier '" + std::string(name) + "'", {"u1..u" + std::to_string(nvars_), "pi", "function name"});
  }

  std::string_view src_;
  int nvars_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

inline int precedence(const Expr& e) {
  return std::visit(
      [](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Expr::Binary>) return (x.op == BinOp::add || x.op == BinOp::sub) ? 1 : 2;
        else if constexpr (std::is_same_v<T, Expr::Negate>) return 3;
        else if constexpr (std::is_same_v<T, Expr::Power>) return 4;
        else return 5;
      },
      e.node());
}

inline void print_to(const Expr& e, std::string& out) {
  auto child = [&](const Expr& c, bool parens) {
    if (parens) out += '(';
    print_to(c, out);
    if (parens) out += ')';
  };
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Expr::Number>) {
          std::array<char, 32> buf{};
          std::snprintf(buf.data(), buf.size(), "%.17g", x.value);
          out += buf.data();
        } else if constexpr (std::is_same_v<T, Expr::Pi>) {
          out += "pi";
        } else if constexpr (std::is_same_v<T, Expr::Variable>) {
          out += "u" + std::to_string(x.index + 1);
        } else if constexpr (std::is_same_v<T, Expr::Negate>) {
          out += '-';
          child(*x.arg, precedence(*x.arg) < 3);
        } else if constexpr (std::is_same_v<T, Expr::Binary>) {
          const int p = precedence(e);
          child(*x.lhs, precedence(*x.lhs) < p);
          static constexpr std::array<const char*, 4> ops{" + ", " - ", " * ", " / "};
          out += ops[static_cast<std::size_t>(x.op)];
          child(*x.rhs, precedence(*x.rhs) <= p);
        } else if constexpr (std::is_same_v<T, Expr::Power>) {
          child(*x.base, precedence(*x.base) < 5);
          out += "^" + std::to_string(x.exponent);
        } else {
          out += to_string(x.func);
          out += '(';
          print_to(*x.arg, out);
          out += ')';
        }
      },
      e.node());
}

[[noreturn]] inline void domain_fail(const Expr& e, const std::string& what) {
  throw GeoError(ErrorKind::domain, what + " at offset " + std::to_string(e.offset()));
}

template <class T>
T eval_node(const Expr& e, std::span<const T> vars) {
  return std::visit(
      [&](const auto& x) -> T {
        using N = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<N, Expr::Number>) {
          return T(x.value);
        } else if constexpr (std::is_same_v<N, Expr::Pi>) {
          return T(std::numbers::pi);
        } else if constexpr (std::is_same_v<N, Expr::Variable>) {
          if (static_cast<std::size_t>(x.index) >= vars.size()) domain_fail(e, "variable not bound");
          return vars[static_cast<std::size_t>(x.index)];
        } else if constexpr (std::is_same_v<N, Expr::Negate>) {
          return -eval_node(*x.arg, vars);
        } else if constexpr (std::is_same_v<N, Expr::Binary>) {
          const T a = eval_node(*x.lhs, vars);
          const T b = eval_node(*x.rhs, vars);
          switch (x.op) {
            case BinOp::add: return a + b;
            case BinOp::sub: return a - b;
            case BinOp::mul: return a * b;
            case BinOp::div:
              if (std::abs(value_of(b)) < 1e-300) domain_fail(e, "division by zero");
              return a / b;
          }
          return a;
        } else if constexpr (std::is_same_v<N, Expr::Power>) {
          const T b = eval_node(*x.base, vars);
          T r(1.0);
          for (int k = 0; k < x.exponent; ++k) r = r * b;
          return r;
        } else {
          using std::sin, std::cos, std::sinh, std::cosh, std::tan, std::tanh, std::exp, std::log, std::sqrt,
              std::atan;
          const T a = eval_node(*x.arg, vars);
          const double v = value_of(a);
          switch (x.func) {
            case Func::sin: return sin(a);
            case Func::cos: return cos(a);
            case Func::sinh: return sinh(a);
            case Func::cosh: return cosh(a);
            case Func::tan:
              if (std::abs(std::cos(v)) < 1e-14) domain_fail(e, "tan at a pole");
              return tan(a);
            case Func::tanh: return tanh(a);
            case Func::exp: return exp(a);
            case Func::log:
              if (!(v > 0.0)) domain_fail(e, "log of a non-positive value");
              return log(a);
            case Func::sqrt:
              if (v < 0.0) domain_fail(e, "sqrt of a negative value");
              if constexpr (std::is_same_v<T, Jet>) {
                if (v == 0.0 && !a.is_constant() && a.order() > 0) domain_fail(e, "sqrt is not differentiable at 0");
              }
              return sqrt(a);
            case Func::atan: return atan(a);
          }
          return a;
        }
      },
      e.node());
}

}  // namespace detail

// Parse src; variables u1..u_nvars are admissible.
inline ExprPtr parse(std::string_view src, int nvars = kMaxExprVars) {
  if (nvars < 1 || nvars > kMaxExprVars) throw GeoError(ErrorKind::invalid_argument, "chart dimension must be 1..4");
  return detail::Parser(src, nvars).parse_all();
}

inline std::string print(const Expr& e) {
  std::string out;
  detail::print_to(e, out);
  return out;
}

inline double eval(const Expr& e, std::span<const double> point) { return detail::eval_node<double>(e, point); }

inline Jet eval_jet(const Expr& e, std::span<const Jet> vars) { return detail::eval_node<Jet>(e, vars); }

inline Jet eval_jet(const Expr& e, std::span<const double> point, int order) {
  if (order < 0 || order > 4) throw GeoError(ErrorKind::invalid_argument, "jet order must be 0..4");
  const auto vars = seed_variables(point, order);
  return eval_jet(e, std::span<const Jet>(vars));
}

}  // namespace geocon
