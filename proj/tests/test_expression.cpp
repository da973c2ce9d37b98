#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bsharp/errors.hpp"
#include "rat.hpp"
#include "bsharp/expression.hpp"
#include "bsharp/ode.hpp"

using namespace bsharp;

namespace {

const std::vector<std::string> kPQ{"p", "q"};

Expr parse(std::string_view text) { return parse_expression(text, kPQ); }

std::vector<double> random_point(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.5, 2.0);
  return {u(rng), u(rng)};
}

bool is_normalized(const Expr& e) {
  const auto kind = e.kind();
  for (const auto& a : e.args()) {
    if (kind == ExprKind::sum && (a.kind() == ExprKind::sum || a.is_zero())) return false;
    if (kind == ExprKind::product && (a.kind() == ExprKind::product || a.is_one())) return false;
    if (!is_normalized(a)) return false;
  }
  if (kind == ExprKind::power && (e.exponent() == 0 || e.exponent() == 1)) return false;
  if ((kind == ExprKind::sum || kind == ExprKind::product) && e.args().size() < 2) return false;
  return true;
}

}  // namespace

TEST_CASE("construction simplifies") {
  const Expr p = Expr::variable(0);
  const Expr q = Expr::variable(1);
  CHECK((p + 0) == p);
  CHECK((p * 1) == p);
  CHECK((p * 0).is_zero());
  CHECK((p - p).is_zero());
  CHECK((p + p) == 2 * p);
  CHECK((p * p) == pow(p, 2));
  CHECK(pow(pow(p, 2), 3) == pow(p, 6));
  CHECK((p / p).is_one());
  CHECK((Expr(2) + Expr(3)).value() == 5);
  CHECK(((p + q) + (q + p)) == 2 * p + 2 * q);
  CHECK((p + q) == (q + p));
  CHECK(pow(Expr(rat(2, 3)), -2).value() == rat(9, 4));
  CHECK_THROWS_AS(p / Expr(0), ArithmeticError);
  CHECK(is_normalized(parse("p*(p*q)*(1 + (q + 0)) + (p + 2*p)^2")));
}

TEST_CASE("printing") {
  CHECK(to_string(parse("p*(2-q)"), kPQ) == "p*(-q + 2)");
  CHECK(to_string(parse("-q/(p^2+q^2)"), kPQ) == "-q/(p^2 + q^2)");
  CHECK(to_string(parse("p - q"), kPQ) == "p - q");
  CHECK(to_string(parse("p/(2*q)"), kPQ) == "p/(2*q)");
  CHECK(to_string(parse("p/(2*q)"), kPQ, ExprFormat::latex) == "\\frac{p}{2 q}");
  CHECK(to_string(Expr(rat(-1, 3)), kPQ) == "-1/3");
}

TEST_CASE("differentiation rules") {
  const Expr f = parse("p*(2-q)");
  CHECK(differentiate(f, 0) == parse("2 - q"));
  CHECK(differentiate(f, 1) == parse("-p"));
  const Expr r = parse("(p^2+q^2)^(-1)");
  CHECK(differentiate(r, 0) == parse("-2*p*(p^2+q^2)^(-2)"));
  CHECK(differentiate(parse("p^(-3)"), 0) == parse("-3*p^(-4)"));
  CHECK(differentiate(Expr(7), 0).is_zero());
  CHECK(differentiate(parse("q"), 0).is_zero());
}

TEST_CASE("derivatives agree with central differences") {
  std::mt19937 rng(17);
  const double delta = 1e-5;
  for (const char* text : {"p*(2-q)", "q*(p-1)", "-q/(p^2+q^2)", "p/(p^2+q^2)",
                           "(p^3*q - 1/q)^2/(1+p)"}) {
    CAPTURE(text);
    const Expr e = parse(text);
    for (std::size_t var = 0; var < 2; ++var) {
      const Expr d = differentiate(e, var);
      for (int i = 0; i < 10; ++i) {
        auto x = random_point(rng);
        auto lo = x;
        auto hi = x;
        lo[var] -= delta;
        hi[var] += delta;
        const double fd = (eval_expression(e, std::span<const double>(hi)) -
                           eval_expression(e, std::span<const double>(lo))) /
                          (2 * delta);
        CHECK(std::abs(fd - eval_expression(d, std::span<const double>(x))) <= 1e-6);
      }
    }
  }
}

TEST_CASE("evaluation") {
  const std::vector<BigRational> at{1, 2};
  CHECK(eval_expression(parse("p*(2-q)"), std::span<const BigRational>(at)) == 0);
  CHECK(eval_expression(parse("q*(p-1)"), std::span<const BigRational>(at)) == 0);
  const std::vector<BigRational> unit{0, 1};
  CHECK(eval_expression(parse("-q/(p^2+q^2)"), std::span<const BigRational>(unit)) == -1);
  CHECK(eval_expression(parse("p/(p^2+q^2)"), std::span<const BigRational>(unit)) == 0);
  const std::vector<BigRational> zero{0, 0};
  CHECK(eval_expression(parse("3 + p*q + p^2"), std::span<const BigRational>(zero)) == 3);
  CHECK_THROWS_AS(eval_expression(parse("1/p"), std::span<const BigRational>(zero)),
                  ArithmeticError);
  const std::vector<BigRational> short_point{1};
  CHECK_THROWS_AS(eval_expression(parse("q"), std::span<const BigRational>(short_point)),
                  ContractError);
}

TEST_CASE("compiled evaluation matches tree evaluation") {
  std::mt19937 rng(23);
  const std::vector<Expr> outs{parse("p*(2-q)"), parse("-q/(p^2+q^2)"),
                               parse("(p^2+q^2)^(-3)*p + 1/3")};
  const CompiledExprs prog(outs);
  CHECK(prog.size() == 3);
  CHECK(prog.instruction_count() > 0);
  for (int i = 0; i < 20; ++i) {
    const auto x = random_point(rng);
    std::vector<double> out(3);
    prog.evaluate(x, out);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(out[k] == doctest::Approx(eval_expression(outs[k], std::span<const double>(x)))
                          .epsilon(1e-14));
    }
  }
}

TEST_CASE("hash consing shares structure") {
  const Expr a = parse("p^2 + q^2");
  const Expr b = parse("q^2 + p^2");
  CHECK(a.node() == b.node());
  const Expr big = pow(a, -1) * a * pow(a, -2) + differentiate(pow(a, -1), 0);
  CHECK(expr_dag_size(big) < 20);
}

TEST_CASE("rational function conversion") {
  const Expr e = parse("p/(p^2+q^2) - 1/(2*q)");
  const Coefficient c = to_rational_function(e, kPQ);
  CHECK(c == Coefficient::parse("p/(p^2+q^2) - 1/(2*q)"));
  const Expr back = from_rational_function(c, kPQ);
  std::mt19937 rng(29);
  for (int i = 0; i < 5; ++i) {
    const std::vector<BigRational> x{rat(1 + static_cast<int>(rng() % 7), 3),
                                     rat(1 + static_cast<int>(rng() % 5), 2)};
    CHECK(eval_expression(back, std::span<const BigRational>(x)) ==
          eval_expression(e, std::span<const BigRational>(x)));
  }
  CHECK_THROWS_AS(from_rational_function(Coefficient::parse("z"), kPQ), ValidationError);
}

TEST_CASE("normal form") {
  CHECK(expand(parse("(p+q)^2 - p^2 - q^2"), kPQ) == parse("2*p*q"));
  CHECK(expand(parse("p*(2-q) + p*q"), kPQ) == parse("2*p"));
  // The common factor (p^2+q^2) cancels.
  const Expr e = parse("(p^3 + p*q^2)/(p^2+q^2)^3");
  CHECK(expand(e, kPQ) == parse("p/(p^2+q^2)^2"));
  CHECK(to_string(expand(parse("q/(12*(p^2+q^2)^3)"), kPQ), kPQ) == "q/(12*(p^2 + q^2)^3)");
  CHECK(expand(parse("p/q - p/q"), kPQ).is_zero());
}
