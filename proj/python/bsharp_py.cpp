// Python bindings. Coefficients cross the boundary as strings in the
// coefficient grammar ("1/(8*alpha)"), trees as level-sequence lists.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "bsharp/bseries.hpp"
#include "bsharp/butcher.hpp"
#include "bsharp/errors.hpp"
#include "bsharp/io.hpp"
#include "bsharp/ode.hpp"
#include "bsharp/simulate.hpp"
#include "bsharp/tree_splitting.hpp"

namespace py = pybind11;
using namespace bsharp;

namespace {

RootedTree tree_from(const py::object& obj) {
  if (py::isinstance<RootedTree>(obj)) return obj.cast<RootedTree>();
  if (py::isinstance<py::str>(obj)) return RootedTree::parse(obj.cast<std::string>());
  const auto levels = obj.cast<std::vector<int>>();
  if (levels.empty()) return RootedTree::empty();
  return RootedTree(std::span<const int>(levels));
}

py::object big_int(const BigInt& z) {
  return py::reinterpret_steal<py::object>(
      PyLong_FromString(z.get_str().c_str(), nullptr, 10));
}

ButcherTableau tableau_from(const py::object& obj) {
  if (py::isinstance<ButcherTableau>(obj)) return obj.cast<ButcherTableau>();
  const auto spec = obj.cast<std::string>();
  if (is_builtin_tableau_name(spec)) return builtin_tableau(spec);
  return tableau_from_json(spec);
}

std::map<std::string, BigRational> bindings_from(const std::map<std::string, std::string>& m) {
  std::map<std::string, BigRational> out;
  for (const auto& [k, v] : m) out[k] = parse_rational(v);
  return out;
}

}  // namespace

PYBIND11_MODULE(bsharp, m) {
  m.doc() = "Exact B-series computations for Runge-Kutta methods";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ContractError>(m, "ContractError", base.ptr());
  py::register_exception<ArithmeticError>(m, "ArithmeticError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  py::class_<RootedTree>(m, "RootedTree")
      .def(py::init([](const std::vector<int>& levels) {
             if (levels.empty()) return RootedTree::empty();
             return RootedTree(std::span<const int>(levels));
           }),
           py::arg("levels"))
      .def_static("parse", &RootedTree::parse)
      .def_property_readonly("levels", &RootedTree::levels)
      .def_property_readonly("order", &RootedTree::order)
      .def_property_readonly("symmetry", [](const RootedTree& t) { return big_int(symmetry(t)); })
      .def_property_readonly("density", [](const RootedTree& t) { return big_int(density(t)); })
      .def("is_empty", &RootedTree::is_empty)
      .def("children", [](const RootedTree& t) { return children(t); })
      .def("brackets", &RootedTree::to_brackets)
      .def("__str__", [](const RootedTree& t) { return t.to_string(); })
      .def("__repr__", [](const RootedTree& t) { return "RootedTree(" + t.to_string(true) + ")"; })
      .def("__eq__", [](const RootedTree& a, const RootedTree& b) { return a == b; })
      .def("__lt__", [](const RootedTree& a, const RootedTree& b) { return a < b; })
      .def("__hash__", [](const RootedTree& t) { return std::hash<RootedTree>{}(t); });

  m.def("trees", [](std::size_t n) {
    std::vector<RootedTree> out;
    for (const auto& t : trees_of_order(n)) out.push_back(t);
    return out;
  }, py::arg("order"), "Canonical trees with `order` nodes, tall tree first.");
  m.def("count_trees", &count_trees, py::arg("order"));

  m.def("partitions", [](const py::object& t) {
    std::vector<std::pair<std::vector<RootedTree>, RootedTree>> out;
    for (const auto& p : partitions(tree_from(t))) out.emplace_back(p.forest.trees, p.skeleton);
    return out;
  }, "List of (forest, skeleton) pairs.");
  m.def("ordered_subtrees", [](const py::object& t) {
    std::vector<std::pair<RootedTree, std::vector<RootedTree>>> out;
    for (const auto& s : ordered_subtrees(tree_from(t))) out.emplace_back(s.subtree, s.forest.trees);
    return out;
  }, "List of (subtree, forest) pairs.");

  py::class_<ButcherTableau>(m, "Tableau")
      .def_static("builtin", [](const std::string& name) { return builtin_tableau(name); })
      .def_static("from_json", [](const std::string& text) { return tableau_from_json(text); })
      .def(py::init([](const std::vector<std::vector<std::string>>& A,
                       const std::vector<std::string>& b,
                       const std::optional<std::vector<std::string>>& c) {
             ButcherTableau::Matrix mat;
             for (const auto& row : A) {
               mat.emplace_back();
               for (const auto& x : row) mat.back().push_back(Coefficient::parse(x));
             }
             ButcherTableau::Vector bv;
             for (const auto& x : b) bv.push_back(Coefficient::parse(x));
             if (!c) return ButcherTableau(std::move(mat), std::move(bv));
             ButcherTableau::Vector cv;
             for (const auto& x : *c) cv.push_back(Coefficient::parse(x));
             return ButcherTableau(std::move(mat), std::move(bv), std::move(cv));
           }),
           py::arg("A"), py::arg("b"), py::arg("c") = py::none())
      .def_property_readonly("stages", &ButcherTableau::stages)
      .def_property_readonly("symbols", &ButcherTableau::symbols)
      .def_property_readonly("warnings", &ButcherTableau::warnings)
      .def("to_json", [](const ButcherTableau& t) { return tableau_to_json(t); });

  py::class_<TruncatedBSeries>(m, "Series")
      .def_static("from_json", [](const std::string& text) { return series_from_json(text); })
      .def_property_readonly("max_order", &TruncatedBSeries::max_order)
      .def_property_readonly("kind", [](const TruncatedBSeries& s) {
        return s.kind() == SeriesKind::flow ? "flow" : "map";
      })
      .def_property_readonly("symbols", &TruncatedBSeries::symbols)
      .def("__getitem__", [](const TruncatedBSeries& s, const py::object& t) {
        return s[tree_from(t)].to_string();
      })
      .def("__len__", &TruncatedBSeries::size)
      .def("__eq__", [](const TruncatedBSeries& a, const TruncatedBSeries& b) {
        return series_eq(a, b);
      })
      .def("coefficients", [](const TruncatedBSeries& s) {
        std::vector<std::pair<std::string, std::string>> out;
        out.emplace_back(RootedTree::empty().to_string(), s.empty_coeff().to_string());
        for (std::size_t i = 0; i < s.size(); ++i) {
          out.emplace_back(s.basis().tree(i).to_string(), s.at_index(i).to_string());
        }
        return out;
      }, "(tree, coefficient) pairs in (order, lex) order, empty tree first.")
      .def("bind", [](const TruncatedBSeries& s, const std::map<std::string, std::string>& v) {
        return bind_symbols(s, bindings_from(v));
      })
      .def("to_json", [](const TruncatedBSeries& s) { return series_to_json(s); })
      .def("format", [](const TruncatedBSeries& s, const std::string& fmt, std::size_t reduce) {
        const SeriesFormat f = fmt == "latex" ? SeriesFormat::latex
                               : fmt == "json" ? SeriesFormat::json
                                               : SeriesFormat::text;
        return format_series(s, f, reduce);
      }, py::arg("format") = "text", py::arg("reduce_order_by") = 0);

  m.def("rk_series", [](const py::object& tab, std::size_t order) {
    return rk_series(tableau_from(tab), order);
  }, py::arg("tableau"), py::arg("order"));
  m.def("exact_series", &exact_series, py::arg("order"));
  m.def("compose", &compose, py::arg("inner"), py::arg("outer"),
        py::arg("normalize_stepsize") = false);
  m.def("substitute", [](const TruncatedBSeries& flow, const TruncatedBSeries& outer) {
    return substitute(flow, outer);
  }, py::arg("flow"), py::arg("outer"));
  m.def("modified_equation", [](const TruncatedBSeries& s) {
    return modified_equation_series(s);
  });
  m.def("modifying_integrator", [](const TruncatedBSeries& s) {
    return modifying_integrator_series(s);
  });
  m.def("order_of_accuracy", [](const py::object& tab, std::size_t max_check,
                                const std::map<std::string, std::string>& bind) {
    return order_of_accuracy(tableau_from(tab), max_check, bindings_from(bind));
  }, py::arg("tableau"), py::arg("max_check") = 10,
     py::arg("bindings") = std::map<std::string, std::string>{});
  m.def("elementary_weight", [](const py::object& tab, const py::object& t) {
    return elementary_weight(tableau_from(tab), tree_from(t)).to_string();
  });

  py::class_<ODESystem>(m, "ODE")
      .def_static("parse", [](const std::string& text) { return parse_ode(text); })
      .def_property_readonly("variables", [](const ODESystem& s) { return s.variables; })
      .def_property_readonly("rhs", [](const ODESystem& s) {
        std::vector<std::string> out;
        for (const auto& e : s.rhs) out.push_back(to_string(e, s.variables));
        return out;
      })
      .def("evaluate", [](const ODESystem& s, const std::vector<double>& y) {
        std::vector<double> out;
        for (const auto& e : s.rhs) out.push_back(eval_expression(e, std::span<const double>(y)));
        return out;
      });

  m.def("series_for_ode", [](const TruncatedBSeries& s, const ODESystem& sys,
                             std::size_t reduce, bool normal_form) {
    std::vector<std::vector<std::pair<long, std::string>>> out;
    for (const auto& comp : series_for_ode(s, sys, reduce)) {
      out.emplace_back();
      for (const auto& [d, e] : comp) {
        const Expr x = normal_form ? expand(e, sys.variables) : e;
        if (!x.is_zero()) out.back().emplace_back(d, to_string(x, sys.variables));
      }
    }
    return out;
  }, py::arg("series"), py::arg("ode"), py::arg("reduce_order_by") = 0,
     py::arg("normal_form") = true,
     "Per component, (h degree, expression) pairs of the series applied to the ODE.");

  m.def("simulate", [](const ODESystem& sys, const py::object& tab, double h, double t_max,
                       const std::vector<double>& initial, std::optional<std::size_t> modified_order,
                       bool modifying_integrator, bool reference) {
    SimulationConfig cfg;
    cfg.sys = sys;
    cfg.tableau = tableau_from(tab);
    cfg.h = h;
    cfg.t_max = t_max;
    cfg.initial = initial;
    cfg.modified_order = modified_order;
    cfg.modifying_integrator = modifying_integrator;
    cfg.reference = reference;
    const Trajectory tr = simulate(cfg);
    return py::make_tuple(tr.times, tr.states);
  }, py::arg("ode"), py::arg("tableau"), py::arg("h"), py::arg("t_max"), py::arg("initial"),
     py::arg("modified_order") = py::none(), py::arg("modifying_integrator") = false,
     py::arg("reference") = false, "Returns (times, states).");
}
