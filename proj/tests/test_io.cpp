#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "bsharp/errors.hpp"
#include "bsharp/io.hpp"

using namespace bsharp;

TEST_CASE("series JSON round trip") {
  const auto u = rk_series(rk22_tableau(Coefficient::symbol("alpha")), 4);
  const std::string text = series_to_json(u);
  const auto back = series_from_json(text);
  CHECK(series_eq(back, u));
  CHECK(series_to_json(back) == text);

  const auto v = modified_equation_series(u);
  CHECK(series_eq(series_from_json(series_to_json(v, -1)), v));
  CHECK(series_from_json(series_to_json(v)).kind() == SeriesKind::flow);
}

TEST_CASE("series JSON layout") {
  const std::string text = series_to_json(exact_series(2), -1);
  CHECK(text ==
        R"({"kind":"map","max_order":2,"empty":"1","coefficients":{"[0]":"1","[0,1]":"1/2"}})");
}

TEST_CASE("series JSON defaults and validation") {
  auto s = series_from_json(R"({"max_order":2,"coefficients":{"[0]":"1"}})");
  CHECK(s.empty_coeff() == Coefficient(1));
  CHECK(s[RootedTree{0, 1}].is_zero());
  s = series_from_json(R"({"kind":"flow","max_order":2,"coefficients":{"[0]":"1"}})");
  CHECK(s.empty_coeff().is_zero());
  s = series_from_json(R"({"max_order":2,"coefficients":{"{}":"0","[0,1]":"a/2"}})");
  CHECK(s.kind() == SeriesKind::flow);
  CHECK(s[RootedTree{0, 1}] == Coefficient::parse("a/2"));

  CHECK_THROWS_AS(series_from_json("{"), ParseError);
  CHECK_THROWS_AS(series_from_json(R"({"max_order":2})"), ValidationError);
  CHECK_THROWS_AS(
      series_from_json(R"({"kind":"flow","empty":"1","max_order":1,"coefficients":{}})"),
      ValidationError);
  CHECK_THROWS_AS(
      series_from_json(R"({"kind":"map","empty":"0","max_order":1,"coefficients":{}})"),
      ValidationError);
  CHECK_THROWS_AS(series_from_json(R"({"kind":"odd","max_order":1,"coefficients":{}})"),
                  ValidationError);
  CHECK_THROWS_AS(series_from_json(R"({"max_order":1,"coefficients":{"[0,1]":"1"}})"),
                  ValidationError);
  CHECK_THROWS_AS(series_from_json(R"({"max_order":1,"coefficients":{"[0]":[1]}})"),
                  ValidationError);
  CHECK_THROWS_AS(series_from_json(R"({"max_order":"x","coefficients":{}})"), ValidationError);
  CHECK_THROWS_AS(series_from_json(R"({"max_order":1,"coefficients":{"[0,2]":"1"}})"),
                  ValidationError);
}

TEST_CASE("tableau JSON") {
  const auto tab = rk22_tableau(Coefficient::symbol("alpha"));
  const std::string text = tableau_to_json(tab, -1);
  CHECK(text ==
        R"J({"A":[["0","0"],["1/(2*alpha)","0"]],"b":["-alpha + 1","alpha"],"c":["0","1/(2*alpha)"],"symbols":["alpha"]})J");
  const auto back = tableau_from_json(text);
  CHECK(series_eq(rk_series(back, 4), rk_series(tab, 4)));

  const auto no_c = tableau_from_json(R"J({"A":[["0","0"],["2/3","0"]],"b":["1/4","3/4"]})J");
  CHECK(no_c.c()[1] == Coefficient(2, 3));
  CHECK(order_of_accuracy(no_c, 4) == 2);

  CHECK_THROWS_AS(tableau_from_json(R"J({"A":[["0"]]})J"), ValidationError);
  CHECK_THROWS_AS(tableau_from_json(R"J({"A":"x","b":["1"]})J"), ValidationError);
  CHECK_THROWS_AS(tableau_from_json(R"J({"A":[["0",{}]],"b":["1"]})J"), ValidationError);
  CHECK_THROWS_AS(tableau_from_json(R"J({"A":[["0","0"]],"b":["1","0"]})J"), ValidationError);
  CHECK_THROWS_AS(tableau_from_json(R"J({"A":[["1/"]],"b":["1"]})J"), ParseError);
}

TEST_CASE("file reading") {
  const std::string path = "bsharp_io_test.txt";
  {
    std::ofstream out(path);
    out << "content";
  }
  CHECK(read_text_file(path) == "content");
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_text_file("/nonexistent/file"), ValidationError);
}
