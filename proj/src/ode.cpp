#include "bsharp/ode.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

#include "bsharp/detail/arith_parser.hpp"
#include "bsharp/errors.hpp"

namespace bsharp {

void ODESystem::validate() const {
  if (variables.empty()) throw ValidationError("an ODE system needs at least one variable");
  if (rhs.size() != variables.size()) {
    throw ValidationError("number of right-hand sides differs from number of variables");
  }
  std::function<void(const Expr&)> check = [&](const Expr& e) {
    if (e.kind() == ExprKind::variable && e.var() >= variables.size()) {
      throw ValidationError("right-hand side refers to an undeclared variable");
    }
    for (const auto& a : e.args()) check(a);
  };
  for (const auto& e : rhs) check(e);
}

// ------------------------------------------------------------ parsing

namespace {

struct ExprActions {
  using Value = Expr;

  const std::vector<std::string>& variables;
  const std::map<std::string, BigRational>& parameters;
  std::size_t line;

  Value number(const BigRational& q) { return Expr(q); }

  Value identifier(std::string_view name, std::size_t column) {
    for (std::size_t i = 0; i < variables.size(); ++i) {
      if (variables[i] == name) return Expr::variable(i);
    }
    if (auto it = parameters.find(std::string(name)); it != parameters.end()) {
      return Expr(it->second);
    }
    throw ParseError("unknown identifier '" + std::string(name) + "'", line, column);
  }

  Value add(Value a, Value b) { return a + b; }
  Value sub(Value a, Value b) { return a - b; }
  Value mul(Value a, Value b) { return a * b; }
  Value div(Value a, Value b, std::size_t column) {
    if (b.is_zero()) throw ParseError("division by zero", line, column);
    return a / b;
  }
  Value neg(Value a) { return -a; }
  Value pow(Value a, long e, std::size_t column) {
    if (a.is_zero() && e < 0) throw ParseError("division by zero", line, column);
    return Expr::power(a, e);
  }
};

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) {
    return false;
  }
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

struct Statement {
  std::string_view text;
  std::size_t line;
  std::size_t column;  // 1-based column of text[0]
};

// Trims whitespace, adjusting the column.
Statement trim(Statement s) {
  while (!s.text.empty() && std::isspace(static_cast<unsigned char>(s.text.front()))) {
    s.text.remove_prefix(1);
    ++s.column;
  }
  while (!s.text.empty() && std::isspace(static_cast<unsigned char>(s.text.back()))) {
    s.text.remove_suffix(1);
  }
  return s;
}

std::vector<Statement> split_statements(std::string_view text) {
  std::vector<Statement> out;
  std::size_t line = 1;
  std::size_t line_start = 0;
  std::size_t start = 0;
  bool in_comment = false;
  auto flush = [&](std::size_t end) {
    Statement s = trim({text.substr(start, end - start), line, start - line_start + 1});
    if (!s.text.empty()) out.push_back(s);
  };
  for (std::size_t i = 0; i <= text.size(); ++i) {
    const char c = i < text.size() ? text[i] : '\n';
    if (c == '\n') {
      if (!in_comment) flush(i);
      in_comment = false;
      ++line;
      line_start = i + 1;
      start = i + 1;
    } else if (in_comment) {
      continue;
    } else if (c == '#') {
      flush(i);
      in_comment = true;
    } else if (c == ';') {
      flush(i);
      start = i + 1;
    }
  }
  return out;
}

std::vector<std::string> parse_names(const Statement& s, std::string_view list) {
  std::vector<std::string> names;
  std::size_t pos = 0;
  const std::size_t base = s.column + static_cast<std::size_t>(list.data() - s.text.data());
  while (pos <= list.size()) {
    std::size_t comma = list.find(',', pos);
    if (comma == std::string_view::npos) comma = list.size();
    Statement item = trim({list.substr(pos, comma - pos), s.line, base + pos});
    if (!is_identifier(item.text)) {
      throw ParseError("expected a variable name", s.line, item.column);
    }
    if (std::find(names.begin(), names.end(), item.text) != names.end()) {
      throw ParseError("duplicate variable '" + std::string(item.text) + "'", s.line,
                       item.column);
    }
    names.emplace_back(item.text);
    pos = comma + 1;
  }
  return names;
}

}  // namespace

Expr parse_expression(std::string_view text, const std::vector<std::string>& variables,
                      const std::map<std::string, BigRational>& parameters,
                      std::size_t line, std::size_t column_offset) {
  ExprActions actions{variables, parameters, line};
  detail::ArithParser<ExprActions> parser(text, actions, line, column_offset);
  return parser.parse();
}

ODESystem parse_ode(std::string_view text) {
  ODESystem sys;
  bool have_vars = false;
  std::vector<bool> defined;
  std::size_t vars_line = 1;

  for (const Statement& s : split_statements(text)) {
    const std::string_view t = s.text;
    auto keyword = [&](std::string_view kw) {
      return t.size() > kw.size() && t.substr(0, kw.size()) == kw &&
             std::isspace(static_cast<unsigned char>(t[kw.size()]));
    };

    if (keyword("vars")) {
      if (have_vars) throw ParseError("variables declared twice", s.line, s.column);
      sys.variables = parse_names(s, t.substr(4));
      for (const auto& v : sys.variables) {
        if (sys.parameters.count(v)) {
          throw ParseError("'" + v + "' is already a parameter", s.line, s.column);
        }
      }
      defined.assign(sys.variables.size(), false);
      have_vars = true;
      vars_line = s.line;
      continue;
    }

    if (keyword("param")) {
      const std::size_t eq = t.find('=');
      if (eq == std::string_view::npos) {
        throw ParseError("expected '=' in parameter definition", s.line, s.column + t.size());
      }
      const Statement name = trim({t.substr(5, eq - 5), s.line, s.column + 5});
      if (!is_identifier(name.text)) {
        throw ParseError("expected a parameter name", s.line, name.column);
      }
      const std::string key(name.text);
      if (sys.parameters.count(key) ||
          std::find(sys.variables.begin(), sys.variables.end(), key) != sys.variables.end()) {
        throw ParseError("'" + key + "' is already defined", s.line, name.column);
      }
      const Expr value = parse_expression(t.substr(eq + 1), {}, sys.parameters, s.line,
                                          s.column + eq);
      if (!value.is_constant()) {
        throw ParseError("parameter value must be a constant", s.line, s.column + eq + 1);
      }
      sys.parameters.emplace(key, value.value());
      continue;
    }

    const std::size_t prime = t.find('\'');
    const std::size_t eq = t.find('=');
    if (prime == std::string_view::npos || eq == std::string_view::npos || eq < prime) {
      throw ParseError("expected \"vars\", \"param\" or an equation \"name' = expr\"", s.line,
                       s.column);
    }
    if (!have_vars) {
      throw ParseError("equation before the vars declaration", s.line, s.column);
    }
    const Statement name = trim({t.substr(0, prime), s.line, s.column});
    const Statement between = trim({t.substr(prime + 1, eq - prime - 1), s.line, 0});
    if (!between.text.empty()) {
      throw ParseError("expected '=' after \"" + std::string(name.text) + "'\"", s.line,
                       s.column + prime + 1);
    }
    const auto it = std::find(sys.variables.begin(), sys.variables.end(), name.text);
    if (it == sys.variables.end()) {
      throw ParseError("unknown identifier '" + std::string(name.text) + "'", s.line,
                       name.column);
    }
    const std::size_t index = static_cast<std::size_t>(it - sys.variables.begin());
    if (defined[index]) {
      throw ParseError("second equation for '" + *it + "'", s.line, name.column);
    }
    if (sys.rhs.size() < sys.variables.size()) sys.rhs.resize(sys.variables.size());
    sys.rhs[index] = parse_expression(t.substr(eq + 1), sys.variables, sys.parameters, s.line,
                                      s.column + eq);
    defined[index] = true;
  }

  if (!have_vars) throw ParseError("missing vars declaration", 1, 1);
  for (std::size_t i = 0; i < defined.size(); ++i) {
    if (!defined[i]) {
      throw ParseError("missing equation for variable '" + sys.variables[i] + "'", vars_line,
                       1);
    }
  }
  sys.validate();
  return sys;
}

// ------------------------------------------------- derivatives and F(τ)

DiffCache::DiffCache(const ODESystem& sys, bool use_symmetry)
    : sys_(sys), use_symmetry_(use_symmetry) {
  sys_.validate();
}

const Expr& DiffCache::derivative(std::size_t component, std::vector<std::size_t> indices) {
  if (component >= sys_.dimension()) throw ContractError("component out of range");
  if (indices.empty()) return sys_.rhs[component];
  if (use_symmetry_) std::sort(indices.begin(), indices.end());
  auto key = std::make_pair(component, indices);
  if (auto it = tensors_.find(key); it != tensors_.end()) return it->second;
  const std::size_t last = indices.back();
  if (last >= sys_.dimension()) throw ContractError("derivative index out of range");
  indices.pop_back();
  Expr d = differentiate(derivative(component, std::move(indices)), last);
  return tensors_.emplace(std::move(key), std::move(d)).first->second;
}

const std::vector<Expr>& DiffCache::elementary_differential(const RootedTree& t) {
  if (t.is_empty()) throw DomainError("elementary differential of the empty tree");
  if (auto it = differentials_.find(t); it != differentials_.end()) return it->second;

  const std::size_t n = sys_.dimension();
  std::vector<Expr> result;
  if (t.order() == 1) {
    result = sys_.rhs;
  } else {
    const std::vector<RootedTree> kids = children(t);
    std::vector<const std::vector<Expr>*> child_f;
    child_f.reserve(kids.size());
    for (const auto& k : kids) child_f.push_back(&elementary_differential(k));

    const std::size_t m = kids.size();
    result.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<Expr> terms;
      std::vector<std::size_t> idx(m, 0);
      for (;;) {
        bool zero = false;
        for (std::size_t i = 0; i < m && !zero; ++i) zero = (*child_f[i])[idx[i]].is_zero();
        if (!zero) {
          const Expr& d = derivative(j, idx);
          if (!d.is_zero()) {
            std::vector<Expr> factors{d};
            for (std::size_t i = 0; i < m; ++i) factors.push_back((*child_f[i])[idx[i]]);
            terms.push_back(Expr::product(std::move(factors)));
          }
        }
        std::size_t pos = m;
        while (pos > 0 && ++idx[pos - 1] == n) idx[--pos] = 0;
        if (pos == 0) break;
      }
      result[j] = Expr::sum(std::move(terms));
    }
  }
  ++computations_[t];
  return differentials_.emplace(t, std::move(result)).first->second;
}

std::size_t DiffCache::computations(const RootedTree& t) const {
  auto it = computations_.find(t);
  return it == computations_.end() ? 0 : it->second;
}

std::vector<Expr> elementary_differential(const ODESystem&, const RootedTree& t,
                                          DiffCache& cache) {
  return cache.elementary_differential(t);
}

// ------------------------------------------------------- series on f

std::vector<ComponentSeries> series_for_ode(const TruncatedBSeries& series,
                                            const ODESystem& sys,
                                            std::size_t reduce_order_by) {
  DiffCache cache(sys);
  return series_for_ode(series, cache, reduce_order_by);
}

std::vector<ComponentSeries> series_for_ode(const TruncatedBSeries& series,
                                            DiffCache& cache,
                                            std::size_t reduce_order_by) {
  const ODESystem& sys = cache.system();
  const std::size_t n = sys.dimension();
  auto bind = [&](const Coefficient& c) -> BigRational {
    const Coefficient b = c.substitute(sys.parameters);
    if (!b.is_rational()) {
      throw ValidationError("unbound coefficient symbol '" + b.symbols().front() +
                            "'; define it with a param line");
    }
    return b.rational();
  };

  std::map<long, std::vector<std::vector<Expr>>> grouped;
  auto slot = [&](long degree) -> std::vector<std::vector<Expr>>& {
    auto& g = grouped[degree];
    if (g.empty()) g.resize(n);
    return g;
  };

  const BigRational empty = bind(series.empty_coeff());
  if (empty != 0) {
    if (reduce_order_by > 0) {
      throw ContractError("cannot reduce the order of a series with a nonzero empty coefficient");
    }
    auto& g = slot(0);
    for (std::size_t j = 0; j < n; ++j) g[j].push_back(Expr(empty) * Expr::variable(j));
  }

  const TreeBasis& basis = series.basis();
  for (std::size_t i = 0; i < series.size(); ++i) {
    const BigRational c = bind(series.at_index(i));
    if (c == 0) continue;
    const RootedTree& t = basis.tree(i);
    if (t.order() < reduce_order_by) {
      throw ContractError("reduce_order_by exceeds the order of a nonzero term");
    }
    const BigRational scale = c / BigRational(basis.symmetry(i));
    const auto& f = cache.elementary_differential(t);
    auto& g = slot(static_cast<long>(t.order() - reduce_order_by));
    for (std::size_t j = 0; j < n; ++j) {
      if (!f[j].is_zero()) g[j].push_back(Expr(scale) * f[j]);
    }
  }

  std::vector<ComponentSeries> out(n);
  for (auto& [degree, comps] : grouped) {
    for (std::size_t j = 0; j < n; ++j) {
      Expr e = Expr::sum(std::move(comps[j]));
      if (!e.is_zero()) out[j].push_back({degree, std::move(e)});
    }
  }
  return out;
}

std::vector<Expr> series_at_step(const std::vector<ComponentSeries>& series,
                                 const BigRational& h) {
  std::vector<Expr> out;
  out.reserve(series.size());
  for (const auto& comp : series) {
    std::vector<Expr> terms;
    for (const auto& [degree, e] : comp) {
      BigRational hp(1);
      for (long k = 0; k < std::abs(degree); ++k) hp *= h;
      if (degree < 0) hp = 1 / hp;
      terms.push_back(Expr(hp) * e);
    }
    out.push_back(Expr::sum(std::move(terms)));
  }
  return out;
}

std::vector<BigRational> eval_series(const std::vector<ComponentSeries>& series,
                                     std::span<const BigRational> point,
                                     const BigRational& h) {
  std::vector<BigRational> out;
  for (const auto& e : series_at_step(series, h)) out.push_back(eval_expression(e, point));
  return out;
}

}  // namespace bsharp
