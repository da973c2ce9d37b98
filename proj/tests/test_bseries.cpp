#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "bsharp/bseries.hpp"
#include "rat.hpp"
#include "bsharp/butcher.hpp"
#include "bsharp/errors.hpp"
#include "oracles.hpp"

using namespace bsharp;

namespace {

TruncatedBSeries random_series(std::mt19937& rng, std::size_t order, Coefficient empty) {
  TruncatedBSeries s(order, std::move(empty));
  for (std::size_t i = 0; i < s.size(); ++i) s.set_index(i, oracle::random_rational(rng));
  return s;
}

Coefficient sym(const char* name) { return Coefficient::symbol(name); }

}  // namespace

TEST_CASE("exact series") {
  const auto e = exact_series(4);
  CHECK(e.empty_coeff() == Coefficient(1));
  CHECK(e[RootedTree{0}] == Coefficient(1));
  CHECK(e[RootedTree{0, 1, 2}] == Coefficient(1, 6));
  CHECK(e[RootedTree{0, 1, 2, 2}] == Coefficient(1, 12));
  CHECK(e.kind() == SeriesKind::map);
  CHECK(e.size() == 8);
  CHECK_THROWS_AS(e[RootedTree({0, 1, 2, 3, 4})], ContractError);
  CHECK_THROWS_AS(exact_series(0), ValidationError);
}

TEST_CASE("identity and substitution unit") {
  const auto id = identity_series(3);
  CHECK(id[RootedTree{0}].is_zero());
  CHECK(id.empty_coeff() == Coefficient(1));
  const auto d = substitution_unit(3);
  CHECK(d[RootedTree{0}] == Coefficient(1));
  CHECK(d[RootedTree{0, 1}].is_zero());
  CHECK(d.kind() == SeriesKind::flow);
}

TEST_CASE("step scaling") {
  CHECK(scale_step(exact_series(2), Coefficient(1, 2))[RootedTree{0, 1}] == Coefficient(1, 8));
  CHECK(scale_step(exact_series(1), sym("mu"))[RootedTree{0}] == sym("mu"));
  const auto e = exact_series(4);
  CHECK(series_eq(scale_step(e, Coefficient(1)), e));
  CHECK(scale_step(e, Coefficient(3)).empty_coeff() == Coefficient(1));
}

TEST_CASE("composition examples") {
  const auto half = scale_step(exact_series(2), Coefficient(1, 2));
  CHECK(compose(half, half)[RootedTree{0, 1}] == Coefficient(1, 2));

  const auto e = exact_series(3);
  const auto euler = rk_series(euler_tableau(), 3);
  CHECK(compose(e, euler)[RootedTree{0, 1, 1}] == Coefficient(4, 3));
  CHECK(compose(euler, e)[RootedTree{0, 1, 1}] == Coefficient(7, 3));

  const auto a1 = rk_series(rk22_tableau(sym("alpha1")), 3);
  const auto a2 = rk_series(rk22_tableau(sym("alpha2")), 3);
  const auto c = compose(a1, a2, true);
  const RootedTree bushy{0, 1, 1};
  const RootedTree tall{0, 1, 2};
  CHECK(c[bushy] / Coefficient(symmetry(bushy)) ==
        Coefficient::parse("1/8 + 1/(64*alpha1) + 1/(64*alpha2)"));
  CHECK(c[tall] / Coefficient(symmetry(tall)) == Coefficient(1, 8));
}

TEST_CASE("composition contracts") {
  CHECK_THROWS_AS(compose(exact_series(2), exact_series(3)), ContractError);
  CHECK_THROWS_AS(compose(substitution_unit(2), exact_series(2)), ContractError);
  // An outer series with u(∅) ≠ 1 is allowed; the result carries it.
  auto outer = exact_series(2);
  outer.set_empty_coeff(Coefficient(2));
  CHECK(compose(exact_series(2), outer).empty_coeff() == Coefficient(2));
}

TEST_CASE("substitution examples") {
  std::mt19937 rng(7);
  auto u = random_series(rng, 5, Coefficient(1));
  auto v = random_series(rng, 5, Coefficient(0));
  const auto d = substitution_unit(5);
  CHECK(series_eq(substitute(d, u), u));
  CHECK(series_eq(substitute(v, d), v));

  TruncatedBSeries w(2, Coefficient(0));
  w.set(RootedTree{0}, Coefficient(1));
  w.set(RootedTree{0, 1}, sym("x"));
  CHECK(substitute(w, exact_series(2))[RootedTree{0, 1}] == sym("x") + Coefficient(1, 2));

  CHECK_THROWS_AS(substitute(exact_series(2), exact_series(2)), ContractError);
  CHECK_THROWS_AS(substitute(substitution_unit(2), exact_series(3)), ContractError);
}

TEST_CASE("group laws") {
  std::mt19937 rng(11);
  for (int rep = 0; rep < 3; ++rep) {
    const auto s = random_series(rng, 6, Coefficient(1));
    const auto id = identity_series(6);
    CHECK(series_eq(compose(id, s), s));
    CHECK(series_eq(compose(s, id), s));
  }
  const auto e = exact_series(6);
  for (const auto& a : {rat(1, 2), rat(1, 3), rat(2, 5)}) {
    CAPTURE(to_string(a));
    CHECK(series_eq(compose(scale_step(e, a), scale_step(e, BigRational(1 - a))), e));
  }
  for (int rep = 0; rep < 3; ++rep) {
    const auto a = random_series(rng, 5, Coefficient(1));
    const auto b = random_series(rng, 5, Coefficient(1));
    const auto c = random_series(rng, 5, Coefficient(1));
    CHECK(series_eq(compose(compose(a, b), c), compose(a, compose(b, c))));
  }
  // Substitution is associative as well.
  const auto v1 = random_series(rng, 5, Coefficient(0));
  const auto v2 = random_series(rng, 5, Coefficient(0));
  const auto u = random_series(rng, 5, Coefficient(1));
  CHECK(series_eq(substitute(v1, substitute(v2, u)), substitute(substitute(v1, v2), u)));
}

TEST_CASE("RK22 modified equation") {
  const auto u = rk_series(rk22_tableau(sym("alpha")), 4);
  const auto v = modified_equation_series(u);
  CHECK(v.kind() == SeriesKind::flow);
  auto shown = [&](std::initializer_list<int> levels) {
    const RootedTree t(levels);
    return v[t] / Coefficient(symmetry(t));
  };
  CHECK(shown({0}) == Coefficient(1));
  CHECK(shown({0, 1}).is_zero());
  CHECK(shown({0, 1, 2}) == Coefficient(-1, 6));
  CHECK(shown({0, 1, 1}) == Coefficient::parse("-1/6 + 1/(8*alpha)"));
  CHECK(shown({0, 1, 2, 3}) == Coefficient(1, 8));
  CHECK(shown({0, 1, 2, 2}) == Coefficient::parse("1/8 - 1/(16*alpha)"));
  CHECK(shown({0, 1, 2, 1}) == Coefficient::parse("1/8 - 1/(8*alpha)"));
  CHECK(shown({0, 1, 1, 1}) == Coefficient::parse("1/24 - 1/(16*alpha) + 1/(48*alpha^2)"));
}

TEST_CASE("Euler backward error and modifying integrator on tall trees") {
  const auto u = rk_series(euler_tableau(), 6);
  const auto v = modified_equation_series(u);
  const auto w = modifying_integrator_series(u);
  CHECK(v[RootedTree{0, 1}] == Coefficient(-1, 2));
  CHECK(w[RootedTree{0, 1}] == Coefficient(1, 2));
  for (std::size_t n = 1; n <= 6; ++n) {
    CHECK(v[tall_tree(n)] == Coefficient(n % 2 == 1 ? 1 : -1, static_cast<long>(n)));
  }
}

TEST_CASE("modifying integrator of the exact flow") {
  const auto w = modifying_integrator_series(exact_series(5));
  CHECK(w[RootedTree{0}] == Coefficient(1));
  for (std::size_t i = 1; i < w.size(); ++i) CHECK(w.at_index(i).is_zero());
  CHECK(w.empty_coeff().is_zero());
}

TEST_CASE("solver contracts") {
  CHECK_THROWS_AS(modified_equation_series(substitution_unit(3)), ContractError);
  auto singular = identity_series(3);
  CHECK_THROWS_AS(modifying_integrator_series(singular), ArithmeticError);
}

TEST_CASE("round trips on random tableaux") {
  std::mt19937 rng(3);
  for (int rep = 0; rep < 4; ++rep) {
    const auto tab = oracle::random_tableau(rng, 2 + rep % 3);
    const auto u = rk_series(tab, 5);
    const auto e = exact_series(5);
    CHECK(series_eq(substitute(modified_equation_series(u), e), u));
    CHECK(series_eq(substitute(modifying_integrator_series(u), u), e));
  }
}

TEST_CASE("zero-skeleton skipping is invisible") {
  const auto u = rk_series(midpoint_tableau(), 6);
  SubstitutionOptions off;
  off.skip_zero_skeleton = false;
  CHECK(series_eq(modified_equation_series(u), modified_equation_series(u, off)));
  CHECK(series_eq(modifying_integrator_series(u), modifying_integrator_series(u, off)));
  const auto v = modified_equation_series(u);
  CHECK(series_eq(substitute(v, u), substitute(v, u, off)));
}

TEST_CASE("comparison helpers") {
  const auto e = exact_series(4);
  auto f = e;
  CHECK(series_eq(e, f));
  CHECK(first_difference_order(e, f) == 0);
  f.set(RootedTree{0, 1, 2}, Coefficient(0));
  CHECK_FALSE(series_eq(e, f));
  CHECK(first_difference_order(e, f) == 3);
  CHECK(series_sub(e, f)[RootedTree{0, 1, 2}] == Coefficient(1, 6));
  CHECK_THROWS_AS(series_eq(e, exact_series(3)), ContractError);
}

TEST_CASE("symbol binding") {
  const auto u = rk_series(rk22_tableau(sym("alpha")), 3);
  CHECK(u.symbols() == std::vector<std::string>{"alpha"});
  const auto bound = bind_symbols(u, {{"alpha", BigRational(1)}});
  CHECK(series_eq(bound, rk_series(midpoint_tableau(), 3)));
  CHECK(bound.symbols().empty());
}

TEST_CASE("display terms") {
  const auto u = rk_series(rk22_tableau(sym("alpha")), 5);
  const auto terms = display_terms(u);
  REQUIRE(terms.size() == 6);
  CHECK(terms[0].tree.is_empty());
  CHECK(terms[0].h_power == 0);
  CHECK(terms[2].coeff == Coefficient(1, 2));
  CHECK(terms[3].coeff == Coefficient::parse("1/(8*alpha)"));
  CHECK(terms[4].coeff == Coefficient::parse("1/(48*alpha^2)"));
  CHECK(terms[5].coeff == Coefficient::parse("1/(384*alpha^3)"));
  CHECK(terms[5].h_power == 5);

  const auto v = modified_equation_series(rk_series(euler_tableau(), 3));
  const auto reduced = display_terms(v, 1);
  CHECK(reduced.front().h_power == 0);
  CHECK_THROWS_AS(display_terms(u, 1), ContractError);
  CHECK_THROWS_AS(display_terms(v, 2), ContractError);

  const std::string text = format_series(exact_series(1), SeriesFormat::text);
  CHECK(text.find("h^1") != std::string::npos);
  const std::string latex = format_series(exact_series(1), SeriesFormat::latex);
  CHECK(latex.rfind("y + h F_{f}", 0) == 0);
}

TEST_CASE("tree basis") {
  const auto basis = TreeBasis::get(5);
  CHECK(basis == TreeBasis::get(5));
  CHECK(basis->size() == 17);
  const auto [lo, hi] = basis->order_range(4);
  CHECK(hi - lo == 4);
  CHECK(basis->tree(lo) == RootedTree{0, 1, 1, 1});
  CHECK(basis->index(RootedTree{0, 1, 2}) == 3);
  CHECK_THROWS(basis->index(tall_tree(6)));
}
