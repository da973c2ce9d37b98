#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bsharp/bseries.hpp"
#include "bsharp/butcher.hpp"
#include "bsharp/errors.hpp"
#include "bsharp/io.hpp"
#include "bsharp/ode.hpp"
#include "bsharp/simulate.hpp"
#include "bsharp/tree_splitting.hpp"

namespace bsharp::cli {

namespace {

using json = nlohmann::ordered_json;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Options {
  std::string format;
  std::string output;
  std::size_t reduce_order_by = 0;
  bool reduce_given = false;

  int tree_order = 0;
  bool properties = false;
  bool ascii = false;

  std::string tree;
  std::string kind = "partitions";

  std::string tableau;
  std::string series;
  std::string first;
  std::string second;
  int order = 0;
  int max_order = 10;
  bool normalize = false;
  std::vector<std::string> bindings;

  std::string ode_file;
  std::string ode_inline;

  double h = 0.0;
  double t_max = 0.0;
  std::size_t steps = 0;
  std::string initial;
  int modified_order = -1;
  bool modifying = false;
  bool reference = false;
};

SeriesFormat series_format(const std::string& f) {
  if (f == "text") return SeriesFormat::text;
  if (f == "latex") return SeriesFormat::latex;
  return SeriesFormat::json;
}

std::map<std::string, BigRational> parse_bindings(const std::vector<std::string>& items) {
  std::map<std::string, BigRational> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--bind expects name=value, got '" + item + "'");
    out[item.substr(0, eq)] = parse_rational(item.substr(eq + 1));
  }
  return out;
}

ButcherTableau load_tableau(const std::string& spec) {
  if (spec.empty()) throw UsageError("a tableau is required (--tableau NAME|FILE)");
  if (is_builtin_tableau_name(spec)) return builtin_tableau(spec);
  return tableau_from_json(read_text_file(spec));
}

std::size_t required_order(const Options& o, const std::string& what) {
  if (o.order < 1) throw UsageError(what + " needs --order N with N >= 1");
  return static_cast<std::size_t>(o.order);
}

// A series file, a tableau file or a built-in tableau name.
TruncatedBSeries load_series(const std::string& spec, const Options& o) {
  if (is_builtin_tableau_name(spec)) {
    return rk_series(builtin_tableau(spec), required_order(o, "a tableau argument"));
  }
  const std::string text = read_text_file(spec);
  bool is_series = false;
  try {
    const json j = json::parse(text);
    is_series = j.is_object() && j.contains("coefficients");
  } catch (const json::exception&) {
    // reported by the typed parser below
  }
  if (is_series) {
    TruncatedBSeries s = series_from_json(text);
    if (o.order > 0 && static_cast<std::size_t>(o.order) != s.max_order()) {
      throw ContractError("series in '" + spec + "' has max_order " +
                          std::to_string(s.max_order()) + ", --order asks for " +
                          std::to_string(o.order));
    }
    return s;
  }
  return rk_series(tableau_from_json(text), required_order(o, "a tableau argument"));
}

std::optional<ODESystem> load_ode(const Options& o) {
  if (!o.ode_file.empty() && !o.ode_inline.empty()) {
    throw UsageError("give either --ode or --ode-inline, not both");
  }
  if (!o.ode_file.empty()) return parse_ode(read_text_file(o.ode_file));
  if (!o.ode_inline.empty()) return parse_ode(o.ode_inline);
  return std::nullopt;
}

void big_json_number(const BigInt& z, json& slot) {
  if (z.fits_slong_p()) {
    slot = z.get_si();
  } else {
    slot = z.get_str();
  }
}

// ------------------------------------------------------------ commands

void cmd_trees(const Options& o, std::ostream& out) {
  if (o.tree_order < 1) throw UsageError("trees: order must be at least 1");
  const auto n = static_cast<std::size_t>(o.tree_order);
  // Ascending lexicographic order, as in the usual tables of trees.
  std::vector<RootedTree> list;
  for (const RootedTree& t : trees_of_order(n)) list.push_back(t);
  std::reverse(list.begin(), list.end());
  if (o.format == "json") {
    json arr = json::array();
    for (const RootedTree& t : list) {
      json row;
      row["tree"] = t.to_string(o.ascii);
      row["order"] = t.order();
      if (o.properties) {
        big_json_number(symmetry(t), row["sigma"]);
        big_json_number(density(t), row["gamma"]);
      }
      arr.push_back(std::move(row));
    }
    out << arr.dump(2) << '\n';
    return;
  }
  if (o.format == "latex") throw UsageError("trees supports --format text or json");
  for (const RootedTree& t : list) {
    out << t.to_string(o.ascii);
    if (o.properties) {
      const BigInt g = density(t);
      out << "  order=" << t.order() << "  sigma=" << symmetry(t).get_str()
          << "  gamma=" << g.get_str() << "  1/gamma=1/" << g.get_str();
    }
    out << '\n';
  }
}

void cmd_splits(const Options& o, std::ostream& out) {
  const RootedTree t = RootedTree::parse(o.tree);
  if (t.is_empty()) throw UsageError("splits: the tree must not be empty");
  const bool by_subtree = o.kind == "subtrees";
  if (!by_subtree && o.kind != "partitions") {
    throw UsageError("splits: --kind must be subtrees or partitions");
  }
  const bool as_json = o.format == "json";
  json arr = json::array();
  auto forest_json = [&](const Forest& f) {
    json a = json::array();
    for (const auto& x : f.trees) a.push_back(x.to_string(o.ascii));
    return a;
  };
  if (by_subtree) {
    for (const auto& s : ordered_subtrees(t)) {
      if (as_json) {
        arr.push_back({{"subtree", s.subtree.to_string(o.ascii)}, {"forest", forest_json(s.forest)}});
      } else {
        out << "subtree=" << s.subtree.to_string(o.ascii) << "  forest=" << s.forest.to_string()
            << '\n';
      }
    }
  } else {
    for (const auto& p : partitions(t)) {
      if (as_json) {
        arr.push_back({{"forest", forest_json(p.forest)}, {"skeleton", p.skeleton.to_string(o.ascii)}});
      } else {
        out << "forest=" << p.forest.to_string() << "  skeleton=" << p.skeleton.to_string(o.ascii)
            << '\n';
      }
    }
  }
  if (as_json) out << arr.dump(2) << '\n';
}

void emit_series(const TruncatedBSeries& s, const Options& o, std::ostream& out) {
  const SeriesFormat f = series_format(o.format);
  if (f == SeriesFormat::json) {
    out << series_to_json(s) << '\n';
  } else {
    out << format_series(s, f, o.reduce_order_by);
    if (f == SeriesFormat::latex) out << '\n';
  }
}

void emit_ode_series(const TruncatedBSeries& series, const ODESystem& sys, const Options& o,
                     std::ostream& out) {
  const std::size_t reduce =
      o.reduce_given ? o.reduce_order_by : (series.kind() == SeriesKind::flow ? 1 : 0);
  const auto comps = series_for_ode(series, sys, reduce);
  const long next_degree = static_cast<long>(series.max_order() + 1 - reduce);

  struct Line {
    long degree;
    Expr expr;
  };
  std::vector<std::vector<Line>> lines(comps.size());
  for (std::size_t j = 0; j < comps.size(); ++j) {
    for (const auto& [d, e] : comps[j]) {
      Expr nf = expand(e, sys.variables);
      if (!nf.is_zero()) lines[j].push_back({d, nf});
    }
  }

  if (o.format == "json") {
    json j;
    j["variables"] = sys.variables;
    j["max_order"] = series.max_order();
    j["reduce_order_by"] = reduce;
    json cs = json::array();
    for (std::size_t k = 0; k < lines.size(); ++k) {
      json terms = json::array();
      for (const auto& l : lines[k]) {
        terms.push_back({{"h_degree", l.degree},
                         {"expr", to_string(l.expr, sys.variables)},
                         {"latex", to_string(l.expr, sys.variables, ExprFormat::latex)}});
      }
      cs.push_back({{"variable", sys.variables[k]}, {"terms", std::move(terms)}});
    }
    j["components"] = std::move(cs);
    out << j.dump(2) << '\n';
    return;
  }

  if (o.format == "latex") {
    out << "\\begin{aligned}\n";
    for (std::size_t k = 0; k < lines.size(); ++k) {
      out << "\\dot{" << latex_symbol(sys.variables[k]) << "} &\\approx ";
      bool first = true;
      for (const auto& l : lines[k]) {
        if (!first) out << " + ";
        first = false;
        const std::string body = to_string(l.expr, sys.variables, ExprFormat::latex);
        if (l.degree == 0) {
          out << body;
        } else {
          out << (l.degree == 1 ? std::string("h") : "h^{" + std::to_string(l.degree) + "}")
              << " \\left( " << body << " \\right)";
        }
      }
      if (first) out << "0";
      out << " + \\mathcal{O}(h^{" << next_degree << "})";
      out << (k + 1 < lines.size() ? " \\\\\n" : "\n");
    }
    out << "\\end{aligned}\n";
    return;
  }

  for (std::size_t k = 0; k < lines.size(); ++k) {
    out << sys.variables[k] << "':\n";
    if (lines[k].empty()) out << "  0\n";
    for (const auto& l : lines[k]) {
      out << "  h^" << l.degree << ": " << to_string(l.expr, sys.variables) << '\n';
    }
  }
}

TruncatedBSeries method_series(const Options& o, const std::map<std::string, BigRational>& bind,
                               const std::optional<ODESystem>& sys) {
  std::map<std::string, BigRational> all = bind;
  if (sys) all.insert(sys->parameters.begin(), sys->parameters.end());
  if (!o.series.empty() && !o.tableau.empty()) {
    throw UsageError("give either --tableau or --series, not both");
  }
  TruncatedBSeries s = !o.series.empty()
                           ? load_series(o.series, o)
                           : rk_series(load_tableau(o.tableau), required_order(o, "this command"));
  return all.empty() ? s : bind_symbols(s, all);
}

void cmd_bseries(const Options& o, std::ostream& out) {
  if (!o.first.empty() && !o.tableau.empty()) {
    throw UsageError("bseries: give the tableau either positionally or with --tableau");
  }
  const std::string& spec = o.first.empty() ? o.tableau : o.first;
  TruncatedBSeries s = rk_series(load_tableau(spec), required_order(o, "bseries"));
  const auto bind = parse_bindings(o.bindings);
  if (!bind.empty()) s = bind_symbols(s, bind);
  emit_series(s, o, out);
}

void cmd_compose(const Options& o, std::ostream& out) {
  const auto bind = parse_bindings(o.bindings);
  TruncatedBSeries a = load_series(o.first, o);
  TruncatedBSeries b = load_series(o.second, o);
  if (!bind.empty()) {
    a = bind_symbols(a, bind);
    b = bind_symbols(b, bind);
  }
  emit_series(compose(a, b, o.normalize), o, out);
}

void cmd_substitute(const Options& o, std::ostream& out) {
  const auto bind = parse_bindings(o.bindings);
  TruncatedBSeries a = load_series(o.first, o);
  TruncatedBSeries b = load_series(o.second, o);
  if (!bind.empty()) {
    a = bind_symbols(a, bind);
    b = bind_symbols(b, bind);
  }
  emit_series(substitute(a, b), o, out);
}

void cmd_backward(const Options& o, std::ostream& out, bool modifying) {
  const auto sys = load_ode(o);
  const TruncatedBSeries method = method_series(o, parse_bindings(o.bindings), sys);
  const TruncatedBSeries v =
      modifying ? modifying_integrator_series(method) : modified_equation_series(method);
  if (sys) {
    emit_ode_series(v, *sys, o, out);
  } else {
    emit_series(v, o, out);
  }
}

void cmd_order(const Options& o, std::ostream& out) {
  if (o.max_order < 1) throw UsageError("order: --max must be at least 1");
  const ButcherTableau tab = load_tableau(o.tableau);
  const auto bind = parse_bindings(o.bindings);
  const std::size_t p = order_of_accuracy(tab, static_cast<std::size_t>(o.max_order), bind);
  if (o.format == "json") {
    json j{{"order", p}, {"max_checked", o.max_order}};
    out << j.dump(2) << '\n';
  } else {
    out << p << '\n';
  }
}

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    std::string item = text.substr(pos, comma - pos);
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    double v = 0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size()) {
      throw UsageError("--initial expects comma-separated numbers, got '" + text + "'");
    }
    out.push_back(v);
    pos = comma + 1;
  }
  return out;
}

void cmd_simulate(const Options& o, std::ostream& out) {
  const auto sys = load_ode(o);
  if (!sys) throw UsageError("simulate needs --ode FILE or --ode-inline SOURCE");
  if (o.initial.empty()) throw UsageError("simulate needs --initial y1,...,yn");
  if (!(o.h > 0)) throw UsageError("simulate needs --h with a positive step size");
  SimulationConfig cfg;
  cfg.sys = *sys;
  cfg.tableau = load_tableau(o.tableau.empty() ? "euler" : o.tableau);
  const auto bind = parse_bindings(o.bindings);
  if (!bind.empty()) cfg.tableau = cfg.tableau.substitute(bind);
  cfg.h = o.h;
  if (o.steps > 0 && o.t_max > 0) throw UsageError("give either --t-max or --steps");
  cfg.t_max = o.steps > 0 ? static_cast<double>(o.steps) * o.h : o.t_max;
  if (!(cfg.t_max > 0)) throw UsageError("simulate needs --t-max or --steps");
  cfg.initial = parse_point(o.initial);
  if (o.modified_order >= 0) cfg.modified_order = static_cast<std::size_t>(o.modified_order);
  if (o.modifying && !cfg.modified_order) {
    throw UsageError("--modifying-integrator needs --modified-order K");
  }
  if (o.reference && cfg.modified_order) {
    throw UsageError("--reference cannot be combined with --modified-order");
  }
  cfg.modifying_integrator = o.modifying;
  cfg.reference = o.reference;
  write_csv(out, simulate(cfg));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Exact B-series computations for Runge-Kutta methods", "bsharp"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--format", o.format, "Output format: json, text or latex")
      ->check(CLI::IsMember({"json", "text", "latex"}));
  app.add_option("--output,-o", o.output, "Write the result to FILE instead of stdout");
  auto* reduce_opt = app.add_option("--reduce-order-by", o.reduce_order_by,
                                    "Shift displayed powers of h down by N");

  auto* trees = app.add_subcommand("trees", "List the rooted trees with N nodes");
  trees->add_option("order", o.tree_order, "Number of nodes")->required();
  trees->add_flag("--properties", o.properties, "Show order, symmetry and density");
  trees->add_flag("--ascii", o.ascii, "ASCII notation for the empty tree");

  auto* splits = app.add_subcommand("splits", "Ordered subtrees or partitions of a tree");
  splits->add_option("tree", o.tree, "Level sequence, e.g. [0,1,2,1,2]")->required();
  splits->add_option("--kind", o.kind, "subtrees or partitions")
      ->check(CLI::IsMember({"subtrees", "partitions"}));
  splits->add_flag("--ascii", o.ascii, "ASCII notation for the empty tree");

  auto add_bind = [&](CLI::App* c) {
    c->add_option("--bind", o.bindings, "Bind a symbol, e.g. alpha=1/2 (repeatable)");
  };
  auto add_ode = [&](CLI::App* c) {
    c->add_option("--ode", o.ode_file, "ODE source file");
    c->add_option("--ode-inline", o.ode_inline, "ODE source given inline");
  };

  auto* bseries = app.add_subcommand("bseries", "B-series of a Runge-Kutta method");
  bseries->add_option("method", o.first, "Built-in name or tableau JSON file");
  bseries->add_option("--tableau", o.tableau, "Built-in name or tableau JSON file");
  bseries->add_option("--order", o.order, "Truncation order");
  add_bind(bseries);

  auto* comp = app.add_subcommand("compose", "Series of applying FIRST, then SECOND");
  comp->add_option("first", o.first, "Series JSON, tableau JSON or built-in name")->required();
  comp->add_option("second", o.second, "Series JSON, tableau JSON or built-in name")->required();
  comp->add_option("--order", o.order, "Truncation order for tableau arguments");
  comp->add_flag("--normalize-stepsize", o.normalize, "Give each step half the step size");
  add_bind(comp);

  auto* subst = app.add_subcommand("substitute", "Substitute a flow series into a series");
  subst->add_option("flow", o.first, "Flow-kind series JSON")->required();
  subst->add_option("outer", o.second, "Series JSON, tableau JSON or built-in name")->required();
  subst->add_option("--order", o.order, "Truncation order for tableau arguments");
  add_bind(subst);

  auto setup_backward = [&](CLI::App* c) {
    c->add_option("--tableau", o.tableau, "Built-in name or tableau JSON file");
    c->add_option("--series", o.series, "Map-kind series JSON instead of a tableau");
    c->add_option("--order", o.order, "Truncation order");
    add_ode(c);
    add_bind(c);
  };
  auto* modeq = app.add_subcommand("modified-equation", "Modified equation of a method");
  setup_backward(modeq);
  auto* modint = app.add_subcommand("modifying-integrator", "Modifying integrator of a method");
  setup_backward(modint);

  auto* ord = app.add_subcommand("order", "Order of accuracy of a tableau");
  ord->add_option("--tableau", o.tableau, "Built-in name or tableau JSON file")->required();
  ord->add_option("--max", o.max_order, "Highest order to check");
  add_bind(ord);

  auto* sim = app.add_subcommand("simulate", "Fixed-step integration, CSV output");
  sim->set_help_flag("--help", "Print this help message and exit");
  add_ode(sim);
  sim->add_option("--tableau", o.tableau, "Explicit method (default euler)");
  sim->add_option("--h", o.h, "Step size")->required();
  sim->add_option("--t-max", o.t_max, "Final time");
  sim->add_option("--steps", o.steps, "Number of steps instead of --t-max");
  sim->add_option("--initial", o.initial, "Initial point, comma separated")->required();
  sim->add_option("--modified-order", o.modified_order,
                  "Integrate the modified equation keeping terms up to h^K");
  sim->add_flag("--modifying-integrator", o.modifying,
                "With --modified-order: integrate the modifying integrator with the method");
  sim->add_flag("--reference", o.reference, "RK4 with step h/100 on the original system");
  add_bind(sim);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "bsharp: " << e.what() << '\n';
    return kUsage;
  }
  o.reduce_given = reduce_opt->count() > 0;

  std::ostringstream buffer;
  const bool series_cmd = !(trees->parsed() || splits->parsed() || ord->parsed() || sim->parsed());
  if (o.format.empty()) o.format = series_cmd ? "json" : "text";
  try {
    if (trees->parsed()) cmd_trees(o, buffer);
    if (splits->parsed()) cmd_splits(o, buffer);
    if (bseries->parsed()) cmd_bseries(o, buffer);
    if (comp->parsed()) cmd_compose(o, buffer);
    if (subst->parsed()) cmd_substitute(o, buffer);
    if (modeq->parsed()) cmd_backward(o, buffer, false);
    if (modint->parsed()) cmd_backward(o, buffer, true);
    if (ord->parsed()) cmd_order(o, buffer);
    if (sim->parsed()) cmd_simulate(o, buffer);
  } catch (const UsageError& e) {
    err << "bsharp: " << e.what() << '\n';
    return kUsage;
  } catch (const ContractError& e) {
    err << "bsharp: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "bsharp: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericError& e) {
    err << "bsharp: " << e.what() << " (last valid t = " << e.last_valid_time() << ")\n";
    return kNumeric;
  } catch (const ArithmeticError& e) {
    err << "bsharp: " << e.what() << '\n';
    return kNumeric;
  } catch (const Error& e) {
    err << "bsharp: " << e.what() << '\n';
    return kInput;
  }

  if (o.output.empty()) {
    out << buffer.str();
  } else {
    std::ofstream file(o.output, std::ios::binary);
    if (!file) {
      err << "bsharp: cannot write '" << o.output << "'\n";
      return kInput;
    }
    file << buffer.str();
  }
  return kOk;
}

}  // namespace bsharp::cli
