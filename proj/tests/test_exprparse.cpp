#include <catch_amalgamated.hpp>

#include <cmath>

#include "geocon/exprparse.hpp"
#include "support.hpp"

using namespace geocon;
using Catch::Approx;

namespace {

ExprPtr random_expr(testing::Rng& rng, int depth, int nvars) {
  const int pick = depth <= 0 ? rng.integer(0, 1) : rng.integer(0, 6);
  switch (pick) {
    case 0: {
      static const std::array<double, 6> lits{0.5, 2.0, 3.0, 1e-3, 0.1, 12.75};
      return make_expr(Expr::Number{lits[static_cast<std::size_t>(rng.integer(0, 5))]});
    }
    case 1: return make_expr(Expr::Variable{rng.integer(0, nvars - 1)});
    case 2: return make_expr(Expr::Negate{random_expr(rng, depth - 1, nvars)});
    case 3:
    case 4:
      return make_expr(Expr::Binary{static_cast<BinOp>(rng.integer(0, 3)), random_expr(rng, depth - 1, nvars),
                                    random_expr(rng, depth - 1, nvars)});
    case 5: return make_expr(Expr::Power{random_expr(rng, depth - 1, nvars), rng.integer(0, 4)});
    default:
      return make_expr(Expr::Call{static_cast<Func>(rng.integer(0, 9)), random_expr(rng, depth - 1, nvars)});
  }
}

// Replace every u1 in e by f.
ExprPtr substitute(const ExprPtr& e, const ExprPtr& f) {
  return std::visit(
      [&](const auto& x) -> ExprPtr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Expr::Variable>) return x.index == 0 ? f : e;
        else if constexpr (std::is_same_v<T, Expr::Negate>) return make_expr(Expr::Negate{substitute(x.arg, f)});
        else if constexpr (std::is_same_v<T, Expr::Binary>)
          return make_expr(Expr::Binary{x.op, substitute(x.lhs, f), substitute(x.rhs, f)});
        else if constexpr (std::is_same_v<T, Expr::Power>) return make_expr(Expr::Power{substitute(x.base, f), x.exponent});
        else if constexpr (std::is_same_v<T, Expr::Call>) return make_expr(Expr::Call{x.func, substitute(x.arg, f)});
        else return e;
      },
      e->node());
}

}  // namespace

TEST_CASE("parse examples", "[exprparse]") {
  const auto prod = parse("cos(u1)*sin(u2)");
  const auto& b = std::get<Expr::Binary>(prod->node());
  CHECK(b.op == BinOp::mul);
  CHECK(std::get<Expr::Call>(b.lhs->node()).func == Func::cos);

  const auto prec = parse("1/sqrt(2)*cos(u1)");
  const auto& top = std::get<Expr::Binary>(prec->node());
  CHECK(top.op == BinOp::mul);
  CHECK(std::get<Expr::Binary>(top.lhs->node()).op == BinOp::div);

  try {
    parse("cos(u1");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 7);
    CHECK(e.expected() == std::vector<std::string>{")", ","});
  }
}

TEST_CASE("precedence and associativity", "[exprparse]") {
  CHECK(*parse("-u1^2") == *parse("-(u1^2)"));
  CHECK(*parse("u1 - u2 - u3") == *parse("(u1 - u2) - u3"));
  CHECK(*parse("u1 / u2 / u3") == *parse("(u1 / u2) / u3"));
  CHECK(*parse("  u1*u2 +u3 ") == *parse("(u1*u2)+u3"));
  CHECK(std::get<Expr::Power>(parse("u1^2^3")->node()).exponent == 8);
  CHECK(eval(*parse("2*pi"), std::array<double, 0>{}) == Approx(2 * std::numbers::pi));
}

TEST_CASE("parse errors carry offsets", "[exprparse]") {
  const auto offset_of = [](std::string_view src, int nvars = 4) -> std::size_t {
    try {
      parse(src, nvars);
    } catch (const ParseError& e) {
      return e.offset();
    }
    return 0;
  };
  CHECK(offset_of("u1 +") == 5);
  CHECK(offset_of("u1 u2") == 4);
  CHECK(offset_of("foo(u1)") == 1);
  CHECK(offset_of("sin(u1, u2)") == 1);
  CHECK(offset_of("u1^2.5") == 5);
  CHECK(offset_of("u1^-1") == 4);
  CHECK(offset_of("u3", 2) == 1);
  CHECK(offset_of("u1 $ 2") == 4);
  CHECK(offset_of("1e") == 3);
  CHECK(offset_of("u1^99") == 4);
  std::string deep(300, '(');
  deep += "u1" + std::string(300, ')');
  CHECK(offset_of(deep) > 0);
  std::string flat = "u1";
  for (int i = 0; i < 300; ++i) flat += "+u1";
  CHECK(offset_of(flat) > 0);
  std::string ok = "u1";
  for (int i = 0; i < 200; ++i) ok += "+u1";
  CHECK(parse(ok)->depth() == 201);
}

TEST_CASE("eval_jet examples", "[exprparse]") {
  const std::array<double, 1> at{3.0};
  const Jet sq = eval_jet(*parse("u1^2"), at, 2);
  CHECK(sq.value() == 9.0);
  CHECK(sq.partial({1}) == 6.0);
  CHECK(sq.partial({2}) == 2.0);

  const std::array<double, 2> p{0.3, 0.7};
  const auto e = parse("sin(u1)*cos(u2)");
  const Jet j = eval_jet(*e, p, 3);
  const double h = 1e-4;
  auto f = [&](double a, double b) { return std::sin(a) * std::cos(b); };
  CHECK(j.d(0) == Approx((f(0.3 + h, 0.7) - f(0.3 - h, 0.7)) / (2 * h)).margin(1e-6));
  CHECK(j.d(1) == Approx((f(0.3, 0.7 + h) - f(0.3, 0.7 - h)) / (2 * h)).margin(1e-6));
  CHECK(j.partial({1, 1}) ==
        Approx((f(0.3 + h, 0.7 + h) - f(0.3 + h, 0.7 - h) - f(0.3 - h, 0.7 + h) + f(0.3 - h, 0.7 - h)) / (4 * h * h))
            .margin(1e-6));
  CHECK(j.partial({2, 0}) == Approx((f(0.3 + h, 0.7) - 2 * f(0.3, 0.7) + f(0.3 - h, 0.7)) / (h * h)).margin(1e-6));
  // Third derivative against a central difference of the second.
  const Jet jp = eval_jet(*e, std::array<double, 2>{0.3 + h, 0.7}, 3);
  const Jet jm = eval_jet(*e, std::array<double, 2>{0.3 - h, 0.7}, 3);
  CHECK(j.partial({3, 0}) == Approx((jp.partial({2, 0}) - jm.partial({2, 0})) / (2 * h)).margin(1e-6));

  const Jet one = eval_jet(*parse("cosh(u1)^2 - sinh(u1)^2"), std::array<double, 1>{0.9}, 4);
  CHECK(one.value() == Approx(1.0));
  for (std::size_t i = 1; i < one.coeffs().size(); ++i) CHECK(std::abs(one.coeffs()[i]) < 1e-12);
}

TEST_CASE("eval domain errors", "[exprparse]") {
  const std::array<double, 1> at{-1.0};
  CHECK_THROWS_AS(eval_jet(*parse("log(u1)"), at, 1), GeoError);
  CHECK_THROWS_AS(eval_jet(*parse("sqrt(u1)"), at, 1), GeoError);
  CHECK_THROWS_AS(eval_jet(*parse("1/(u1+1)"), at, 1), GeoError);
  CHECK_THROWS_AS(eval_jet(*parse("u1"), at, 5), GeoError);
  try {
    eval(*parse("2 + log(u1)"), at);
  } catch (const GeoError& e) {
    CHECK(e.kind() == ErrorKind::domain);
    CHECK(std::string(e.what()).find("offset 5") != std::string::npos);
  }
}

TEST_CASE("print then parse is the identity on random trees", "[exprparse][property]") {
  testing::Rng rng(83);
  for (int trial = 0; trial < 1000; ++trial) {
    const ExprPtr e = random_expr(rng, rng.integer(0, 6), 4);
    const std::string text = print(*e);
    INFO(text);
    const ExprPtr back = parse(text);
    REQUIRE(*back == *e);
    REQUIRE(print(*back) == text);
  }
}

TEST_CASE("lower-order evaluation truncates higher-order evaluation", "[exprparse][property]") {
  testing::Rng rng(89);
  int checked = 0;
  for (int trial = 0; trial < 2000 && checked < 300; ++trial) {
    const ExprPtr e = random_expr(rng, 4, 2);
    const std::array<double, 2> at{rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
    try {
      for (int k = 0; k < 4; ++k) {
        const Jet lo = eval_jet(*e, at, k);
        const Jet hi = eval_jet(*e, at, k + 1);
        const Jet t = hi.truncated(k);
        REQUIRE(t.coeffs().size() == lo.coeffs().size());
        for (std::size_t i = 0; i < lo.coeffs().size(); ++i) {
          REQUIRE(std::abs(t.coeffs()[i] - lo.coeffs()[i]) <= 1e-12 * std::max(1.0, std::abs(lo.coeffs()[i])));
        }
      }
      ++checked;
    } catch (const GeoError&) {
    }
  }
  CHECK(checked >= 300);
}

TEST_CASE("jet evaluation obeys the chain rule", "[exprparse][property]") {
  testing::Rng rng(97);
  int checked = 0;
  for (int trial = 0; trial < 3000 && checked < 300; ++trial) {
    const ExprPtr outer = random_expr(rng, 3, 1);
    const ExprPtr inner = random_expr(rng, 3, 2);
    const std::array<double, 2> at{rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
    try {
      INFO(print(*outer) << " with u1 = " << print(*inner));
      const Jet direct = eval_jet(*substitute(outer, inner), at, 3);
      const std::array<Jet, 1> mid{eval_jet(*inner, at, 3)};
      const Jet composed = eval_jet(*outer, mid);
      double scale = 1.0;
      for (double c : direct.coeffs()) scale = std::isfinite(c) ? std::max(scale, std::abs(c)) : HUGE_VAL;
      if (!(scale <= 1e6)) continue;
      for (std::size_t i = 0; i < direct.coeffs().size(); ++i) {
        REQUIRE(std::abs(direct.coeffs()[i] - composed.coeff(i)) <= 1e-12 * scale);
      }
      ++checked;
    } catch (const GeoError&) {
    }
  }
  CHECK(checked >= 300);
}
