#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "bsharp/butcher.hpp"
#include "rat.hpp"
#include "bsharp/errors.hpp"
#include "bsharp/ode.hpp"
#include "oracles.hpp"

using namespace bsharp;

namespace {

const char* kLotkaVolterra = "vars p,q ; p' = p*(2-q) ; q' = q*(p-1)";
const char* kOscillator = "vars p,q ; p' = -q/(p^2+q^2) ; q' = p/(p^2+q^2)";

std::vector<std::vector<BigRational>> random_points(std::mt19937& rng, int n) {
  std::uniform_int_distribution<int> num(1, 9);
  std::uniform_int_distribution<int> den(1, 4);
  std::vector<std::vector<BigRational>> out;
  for (int i = 0; i < n; ++i) {
    out.push_back({rat(num(rng), den(rng)), rat(-num(rng), den(rng))});
  }
  return out;
}

bool eval_equal(const Expr& a, const Expr& b, const std::vector<std::vector<BigRational>>& pts) {
  for (const auto& x : pts) {
    if (eval_expression(a, std::span<const BigRational>(x)) !=
        eval_expression(b, std::span<const BigRational>(x))) {
      return false;
    }
  }
  return true;
}

// F(τ) straight from the Einstein form: every index tuple, derivatives
// taken in the written order, no memo.
std::vector<Expr> brute_differential(const ODESystem& sys,
                                     const std::vector<std::vector<int>>& ch, int node) {
  const std::size_t n = sys.dimension();
  if (ch[node].empty()) return sys.rhs;
  std::vector<std::vector<Expr>> sub;
  for (int c : ch[node]) sub.push_back(brute_differential(sys, ch, c));
  const std::size_t m = sub.size();
  std::vector<Expr> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::size_t> idx(m, 0);
    Expr total;
    while (true) {
      Expr d = sys.rhs[j];
      for (std::size_t k : idx) d = differentiate(d, k);
      Expr term = d;
      for (std::size_t i = 0; i < m; ++i) term = term * sub[i][idx[i]];
      total = total + term;
      std::size_t k = 0;
      while (k < m && ++idx[k] == n) idx[k++] = 0;
      if (k == m) break;
    }
    out[j] = total;
  }
  return out;
}

std::vector<Expr> brute_differential(const ODESystem& sys, const RootedTree& t) {
  return brute_differential(sys, oracle::child_lists(oracle::parents_from_levels(t.levels())), 0);
}

}  // namespace

TEST_CASE("parsing the fixture systems") {
  const auto lv = parse_ode(kLotkaVolterra);
  CHECK(lv.variables == std::vector<std::string>{"p", "q"});
  CHECK(to_string(lv.rhs[0], lv.variables) == "p*(-q + 2)");
  CHECK(to_string(lv.rhs[1], lv.variables) == "q*(p - 1)");
  const auto nlo = parse_ode(kOscillator);
  const std::vector<double> at{0.0, 1.0};
  CHECK(eval_expression(nlo.rhs[0], std::span<const double>(at)) == -1.0);
  CHECK(eval_expression(nlo.rhs[1], std::span<const double>(at)) == 0.0);
  const auto zero = parse_ode("vars x ; x' = 0");
  CHECK(zero.rhs[0].is_zero());
}

TEST_CASE("multi-line source with parameters and comments") {
  const auto sys = parse_ode(
      "# scaled decay\n"
      "vars x, y\n"
      "param k = 3/2\n"
      "param m = k*2   # derived\n"
      "x' = -k*x\n"
      "y' = m*x - y\n");
  CHECK(sys.parameters.at("k") == rat(3, 2));
  CHECK(sys.parameters.at("m") == 3);
  CHECK(to_string(sys.rhs[0], sys.variables) == "-3*x/2");
  CHECK(sys.dimension() == 2);
}

TEST_CASE("parse errors carry positions") {
  auto error_at = [](const char* src) -> std::pair<std::size_t, std::size_t> {
    try {
      parse_ode(src);
    } catch (const ParseError& e) {
      return {e.line(), e.column()};
    }
    return {0, 0};
  };
  CHECK(error_at("vars p\np' = p*zz") == std::pair<std::size_t, std::size_t>{2, 8});
  CHECK(error_at("vars p,q\np' = q") == std::pair<std::size_t, std::size_t>{1, 1});
  CHECK(error_at("vars p\np' = (p + 1") .first == 2);
  CHECK(error_at("p' = 1\nvars p").first == 1);
  CHECK(error_at("vars p\np' = 1\np' = 2").first == 3);
  CHECK(error_at("vars p, p\np' = 1").first == 1);
  CHECK(error_at("vars p\nparam a = p\np' = a").first == 2);
  CHECK(error_at("vars p\np' = 1/0").first == 2);
  CHECK(error_at("").first == 1);
  CHECK_THROWS_WITH_AS(parse_ode("vars p,q\np' = q"), doctest::Contains("missing equation for variable 'q'"),
                       ParseError);
}

TEST_CASE("system validation") {
  ODESystem bad;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad.variables = {"x"};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad.rhs = {Expr::variable(1)};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("elementary differentials of Lotka-Volterra") {
  const auto sys = parse_ode(kLotkaVolterra);
  DiffCache cache(sys);
  CHECK(elementary_differential(sys, RootedTree{0}, cache) == sys.rhs);
  const auto f01 = elementary_differential(sys, RootedTree{0, 1}, cache);
  std::mt19937 rng(31);
  const auto pts = random_points(rng, 5);
  CHECK(eval_equal(f01[0], parse_expression("p*(2-q)^2 - p*q*(p-1)", sys.variables), pts));
  CHECK_THROWS_AS(cache.elementary_differential(RootedTree::empty()), DomainError);
}

TEST_CASE("elementary differentials agree with the brute-force oracle") {
  std::mt19937 rng(37);
  const auto pts = random_points(rng, 5);
  for (const char* src : {kLotkaVolterra, kOscillator}) {
    const auto sys = parse_ode(src);
    DiffCache cache(sys);
    const std::size_t max_order = src == kLotkaVolterra ? 5 : 4;
    for (std::size_t n = 1; n <= max_order; ++n) {
      for (const auto& t : trees_of_order(n)) {
        CAPTURE(t.to_string());
        const auto fast = cache.elementary_differential(t);
        const auto slow = brute_differential(sys, t);
        for (std::size_t j = 0; j < sys.dimension(); ++j) CHECK(eval_equal(fast[j], slow[j], pts));
      }
    }
  }
}

TEST_CASE("Schwarz symmetry does not change derivative tensors") {
  std::mt19937 rng(41);
  const auto pts = random_points(rng, 5);
  for (const char* src : {kLotkaVolterra, kOscillator}) {
    const auto sys = parse_ode(src);
    DiffCache sym(sys, true);
    DiffCache plain(sys, false);
    CHECK(sym.uses_symmetry());
    CHECK_FALSE(plain.uses_symmetry());
    for (std::size_t order = 1; order <= 4; ++order) {
      for (unsigned bits = 0; bits < (1u << order); ++bits) {
        std::vector<std::size_t> idx(order);
        for (std::size_t k = 0; k < order; ++k) idx[k] = (bits >> k) & 1u;
        for (std::size_t j = 0; j < 2; ++j) {
          CHECK(eval_equal(sym.derivative(j, idx), plain.derivative(j, idx), pts));
        }
      }
    }
    // Sorted multi-indices only: 2+3+4+5 per component instead of 2+4+8+16.
    CHECK(sym.tensor_count() == 2 * (2 + 3 + 4 + 5));
    CHECK(plain.tensor_count() == 2 * (2 + 4 + 8 + 16));
  }
}

TEST_CASE("differentials are computed once per tree") {
  const auto sys = parse_ode(kLotkaVolterra);
  DiffCache cache(sys);
  const auto series = exact_series(5);
  series_for_ode(series, cache);
  for (std::size_t n = 1; n <= 5; ++n) {
    for (const auto& t : trees_of_order(n)) {
      CHECK(cache.has_differential(t));
      CHECK(cache.computations(t) == 1);
    }
  }
  series_for_ode(modified_equation_series(rk_series(euler_tableau(), 5)), cache);
  for (const auto& t : trees_up_to_order(5)) CHECK(cache.computations(t) == 1);
  CHECK_FALSE(cache.has_differential(tall_tree(6)));
  CHECK(cache.computations(tall_tree(6)) == 0);
}

TEST_CASE("exact series at order one reproduces f") {
  const auto sys = parse_ode(kOscillator);
  const auto terms = series_for_ode(exact_series(1), sys);
  REQUIRE(terms.size() == 2);
  REQUIRE(terms[0].size() == 2);
  CHECK(terms[0][0].degree == 0);
  CHECK(terms[0][0].expr == Expr::variable(0));
  CHECK(terms[0][1].degree == 1);
  CHECK(terms[0][1].expr == sys.rhs[0]);
}

TEST_CASE("Euler modified equation for Lotka-Volterra") {
  const auto sys = parse_ode(kLotkaVolterra);
  const auto v = modified_equation_series(rk_series(euler_tableau(), 2));
  const auto terms = series_for_ode(v, sys, 1);
  const auto at_h = series_at_step(terms, rat(1, 7));
  std::mt19937 rng(43);
  const auto pts = random_points(rng, 5);
  const Expr p_ref = parse_expression("p*(1/7*(q*(p-1) - (q-2)^2) - 2*q + 4)/2", sys.variables);
  const Expr q_ref = parse_expression("q*(1/7*(p*(q-2) - (p-1)^2) + 2*p - 2)/2", sys.variables);
  CHECK(eval_equal(at_h[0], p_ref, pts));
  CHECK(eval_equal(at_h[1], q_ref, pts));
  for (const auto& x : pts) {
    const auto vals = eval_series(terms, x, rat(1, 7));
    CHECK(vals[0] == eval_expression(p_ref, std::span<const BigRational>(x)));
  }
}

TEST_CASE("linear system collapses to the logarithm series") {
  const auto sys = parse_ode("vars x ; param lam = 3/2 ; x' = lam*x");
  const auto v = modified_equation_series(rk_series(euler_tableau(), 6));
  const auto terms = series_for_ode(v, sys, 1);
  REQUIRE(terms[0].size() == 6);
  const std::vector<BigRational> at{rat(5, 3)};
  BigRational lam_power = rat(3, 2);
  for (long d = 0; d < 6; ++d) {
    CHECK(terms[0][d].degree == d);
    const BigRational expected = rat(d % 2 == 0 ? 1 : -1, d + 1) * lam_power * at[0];
    CHECK(eval_expression(terms[0][d].expr, std::span<const BigRational>(at)) == expected);
    lam_power *= rat(3, 2);
  }
}

TEST_CASE("series symbols bind through parameters") {
  const auto u = rk_series(rk22_tableau(Coefficient::symbol("alpha")), 3);
  CHECK_THROWS_AS(series_for_ode(u, parse_ode(kLotkaVolterra)), ValidationError);
  const auto sys = parse_ode("vars p,q ; param alpha = 1 ; p' = p*(2-q) ; q' = q*(p-1)");
  const auto a = series_for_ode(u, sys);
  const auto b = series_for_ode(rk_series(midpoint_tableau(), 3), sys);
  std::mt19937 rng(47);
  const auto pts = random_points(rng, 3);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(eval_equal(series_at_step(a, 1)[j], series_at_step(b, 1)[j], pts));
  }
  CHECK_THROWS_AS(series_for_ode(u, sys, 1), ContractError);
}
