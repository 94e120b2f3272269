#include <doctest.h>

#include <cmath>
#include <vector>

#include "aubin/error.hpp"
#include "aubin/expr.hpp"
#include "support.hpp"

using namespace aubin;
using namespace aubin::expr;

namespace {

double eval_at(const Expression& e, std::vector<double> x, std::vector<double> w) { return evaluate(e, x, w); }

ErrorCode parse_error_code(const char* src, int n, int d) {
  try {
    parse(src, n, d);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a parse error for " << src);
  return ErrorCode::Input;
}

}  // namespace

TEST_SUITE("expr") {
  TEST_CASE("parse builds the grammar tree") {
    const Expression x1 = Expression::variable({Axis::X, 1});
    const Expression w1 = Expression::variable({Axis::W, 1});
    const Expression expected = Expression::binary(BinaryOp::Add, Expression::power(x1, 2),
                                                   Expression::binary(BinaryOp::Mul, w1, x1));
    CHECK(parse("x1^2 + w1*x1", 1, 1) == expected);
    CHECK(parse("  x1 ^ 2+w1 * x1 ", 1, 1) == expected);
  }

  TEST_CASE("parse and evaluate the quartic-plane objective") {
    const Expression f0 = parse("0.25*w1*x1^4 - w1*x1 - x2", 2, 1);
    support::Rng rng(7);
    for (int k = 0; k < 20; ++k) {
      const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2), w = rng.uniform(-2, 2);
      CHECK(eval_at(f0, {a, b}, {w}) == doctest::Approx(0.25 * w * std::pow(a, 4) - w * a - b).epsilon(1e-14));
    }
  }

  TEST_CASE("parse errors carry their category") {
    CHECK(parse_error_code("x3", 2, 1) == ErrorCode::Index);
    CHECK(parse_error_code("w2", 2, 1) == ErrorCode::Index);
    CHECK(parse_error_code("x0", 2, 1) == ErrorCode::Index);
    CHECK(parse_error_code("x1^-1", 1, 1) == ErrorCode::Exponent);
    CHECK(parse_error_code("x1^1.5", 1, 1) == ErrorCode::Exponent);
    CHECK(parse_error_code("x1^", 1, 1) == ErrorCode::Exponent);
    CHECK(parse_error_code("x1 +", 1, 1) == ErrorCode::Syntax);
    CHECK(parse_error_code("(x1", 1, 1) == ErrorCode::Syntax);
    CHECK(parse_error_code("tan(x1)", 1, 1) == ErrorCode::Syntax);
    CHECK(parse_error_code("y1", 1, 1) == ErrorCode::Syntax);
    CHECK(parse_error_code("x1 x1", 1, 1) == ErrorCode::Syntax);
    CHECK(parse_error_code("", 1, 1) == ErrorCode::Syntax);
  }

  TEST_CASE("parse error positions point into the source") {
    try {
      parse("x1 + * 2", 1, 1);
      FAIL("expected error");
    } catch (const ParseError& e) {
      CHECK(e.position() == 5);
    }
  }

  TEST_CASE("evaluate on the concave-circle data") {
    const Expression f0 = parse("-x1^2 + (w1-1)*x1", 1, 1);
    const Expression F = parse("x1^2 + w1^2 - 2", 1, 1);
    CHECK(eval_at(f0, {1}, {1}) == -1.0);
    CHECK(eval_at(F, {1}, {1}) == 0.0);
  }

  TEST_CASE("evaluate reports domain errors") {
    const auto domain = [](const char* src, double x) {
      try {
        eval_at(parse(src, 1, 1), {x}, {0});
      } catch (const Error& e) {
        return e.code() == ErrorCode::Domain;
      }
      return false;
    };
    CHECK(domain("ln(x1)", -1));
    CHECK(domain("ln(x1)", 0));
    CHECK(domain("sqrt(x1)", -1));
    CHECK(domain("1/x1", 0));
    CHECK(domain("exp(x1)", 1000));
    CHECK_FALSE(domain("sqrt(x1)", 0));
  }

  TEST_CASE("evaluate rejects short points") {
    const Expression e = parse("x2 + w1", 2, 1);
    CHECK_THROWS_AS(eval_at(e, {1.0}, {1.0}), Error);
  }

  TEST_CASE("differentiate: power rule, mixed variables, constants") {
    const Expression dq = differentiate(parse("0.25*w1*x1^4", 1, 1), {Axis::X, 1});
    const Expression dc = differentiate(parse("x1^3/3 - w1^2*x1", 1, 1), {Axis::W, 1});
    support::Rng rng(11);
    for (int k = 0; k < 20; ++k) {
      const double x = rng.uniform(-2, 2), w = rng.uniform(-2, 2);
      CHECK(eval_at(dq, {x}, {w}) == doctest::Approx(w * x * x * x).epsilon(1e-14));
      CHECK(eval_at(dc, {x}, {w}) == doctest::Approx(-2.0 * w * x).epsilon(1e-14));
    }
    CHECK(differentiate(parse("5", 1, 1), {Axis::X, 1}).is_constant(0.0));
    CHECK(differentiate(parse("w1", 1, 1), {Axis::X, 1}).is_constant(0.0));
    CHECK(differentiate(parse("x1", 1, 1), {Axis::X, 1}).is_constant(1.0));
  }

  TEST_CASE("neutral elements are simplified away") {
    CHECK(render(parse("x1 + 0", 1, 1) + Expression::constant(0.0)) == render(parse("x1 + 0", 1, 1)));
    CHECK(Expression::variable({Axis::X, 1}) * Expression::constant(1.0) == Expression::variable({Axis::X, 1}));
    CHECK((Expression::variable({Axis::X, 1}) * Expression::constant(0.0)).is_constant(0.0));
  }

  TEST_CASE("property: symbolic derivatives match central differences on 200 random expressions") {
    support::Rng rng(2024);
    const double h = 1e-5;
    int checked = 0;
    for (int k = 0; k < 200; ++k) {
      const int n = rng.integer(1, 2), d = rng.integer(1, 2);
      const Expression e = parse(support::random_expression(rng, 4, n, d), n, d);
      const Vector x = rng.vector(n), w = rng.vector(d);
      const auto fx = [&](const Vector& xs) { return evaluate(e, {xs.data(), std::size_t(n)}, {w.data(), std::size_t(d)}); };
      const auto fw = [&](const Vector& ws) { return evaluate(e, {x.data(), std::size_t(n)}, {ws.data(), std::size_t(d)}); };
      for (int i = 0; i < n; ++i) {
        const double sym = evaluate(differentiate(e, {Axis::X, i + 1}), {x.data(), std::size_t(n)}, {w.data(), std::size_t(d)});
        CHECK(std::abs(sym - support::central(fx, x, i, h)) <= 1e-6 * (1.0 + std::abs(sym)));
        ++checked;
      }
      for (int i = 0; i < d; ++i) {
        const double sym = evaluate(differentiate(e, {Axis::W, i + 1}), {x.data(), std::size_t(n)}, {w.data(), std::size_t(d)});
        CHECK(std::abs(sym - support::central(fw, w, i, h)) <= 1e-6 * (1.0 + std::abs(sym)));
      }
    }
    CHECK(checked >= 200);
  }

  TEST_CASE("property: differentiation is linear") {
    support::Rng rng(99);
    for (int k = 0; k < 100; ++k) {
      const Expression a = parse(support::random_expression(rng, 3, 2, 1), 2, 1);
      const Expression b = parse(support::random_expression(rng, 3, 2, 1), 2, 1);
      const Variable v{Axis::X, rng.integer(1, 2)};
      const Expression lhs = differentiate(Expression::binary(BinaryOp::Add, a, b), v);
      const Expression rhs = Expression::binary(BinaryOp::Add, differentiate(a, v), differentiate(b, v));
      const std::vector<double> x = {rng.uniform(-1, 1), rng.uniform(-1, 1)}, w = {rng.uniform(-1, 1)};
      const double l = evaluate(lhs, x, w), r = evaluate(rhs, x, w);
      CHECK(l == doctest::Approx(r).epsilon(1e-12).scale(1.0));
    }
  }

  TEST_CASE("property: render then parse is the identity on trees") {
    support::Rng rng(5);
    for (int k = 0; k < 200; ++k) {
      const Expression e = parse(support::random_expression(rng, 5, 2, 2), 2, 2);
      CHECK(parse(render(e), 2, 2) == e);
      const Expression de = differentiate(e, {Axis::X, 1});
      CHECK(parse(render(de), 2, 2) == de);
    }
    const Expression neg = parse("-2*x1 - (-3.5)", 1, 1);
    CHECK(parse(render(neg), 1, 1) == neg);
  }

  TEST_CASE("make_problem validates dimensions and references") {
    CHECK_THROWS_AS(make_problem(0, 1, "1", "1"), Error);
    CHECK_THROWS_AS(make_problem(1, 1, "x2", "1"), Error);
    const ProblemSpec p = make_problem(2, 1, "x1*w1", "x2");
    CHECK(p.n == 2);
    CHECK(p.f0.max_index(Axis::W) == 1);
    CHECK(p.F.max_index(Axis::X) == 2);
  }
}
