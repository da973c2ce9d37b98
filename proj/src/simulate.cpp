#include "bsharp/simulate.hpp"

#include <charconv>
#include <cmath>

#include "bsharp/errors.hpp"

namespace bsharp {

std::size_t step_count(double h, double t_max) {
  if (!(h > 0) || !std::isfinite(h)) throw ValidationError("step size must be positive");
  if (!(t_max > 0) || !std::isfinite(t_max)) throw ValidationError("t_max must be positive");
  // 66.4/0.1 evaluates to 663.999...; accept ratios within 1e-9 of an integer.
  return static_cast<std::size_t>(std::floor(t_max / h + 1e-9));
}

NumericTableau numeric_tableau(const ButcherTableau& tab) {
  auto value = [](const Coefficient& c) {
    if (!c.is_rational()) {
      throw ValidationError("tableau entry " + c.to_string() + " is not numeric");
    }
    return c.rational().get_d();
  };
  NumericTableau out;
  for (const auto& row : tab.A()) {
    out.A.emplace_back();
    for (const auto& a : row) out.A.back().push_back(value(a));
  }
  for (const auto& x : tab.b()) out.b.push_back(value(x));
  for (const auto& x : tab.c()) out.c.push_back(value(x));
  return out;
}

Trajectory integrate(const std::vector<Expr>& rhs, const NumericTableau& tab,
                     const std::vector<double>& y0, double h, std::size_t steps,
                     std::size_t record_every) {
  const std::size_t n = rhs.size();
  const std::size_t s = tab.b.size();
  if (y0.size() != n) throw ValidationError("initial point has the wrong dimension");
  if (record_every == 0) record_every = 1;
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = i; j < s; ++j) {
      if (tab.A[i][j] != 0.0) throw ValidationError("only explicit tableaux can be simulated");
    }
  }

  const CompiledExprs f(rhs);
  Trajectory out;
  std::vector<double> y = y0;
  std::vector<std::vector<double>> k(s, std::vector<double>(n));
  std::vector<double> stage(n);
  out.times.push_back(0.0);
  out.states.push_back(y);

  for (std::size_t step = 1; step <= steps; ++step) {
    for (std::size_t i = 0; i < s; ++i) {
      stage = y;
      for (std::size_t j = 0; j < i; ++j) {
        if (tab.A[i][j] == 0.0) continue;
        for (std::size_t m = 0; m < n; ++m) stage[m] += h * tab.A[i][j] * k[j][m];
      }
      f.evaluate(stage, k[i]);
    }
    for (std::size_t i = 0; i < s; ++i) {
      if (tab.b[i] == 0.0) continue;
      for (std::size_t m = 0; m < n; ++m) y[m] += h * tab.b[i] * k[i][m];
    }
    for (double v : y) {
      if (!std::isfinite(v)) {
        const double last = static_cast<double>(step - 1) * h;
        throw NumericError("integration produced a non-finite value after t = " +
                               std::to_string(last),
                           last);
      }
    }
    if (step % record_every == 0) {
      out.times.push_back(static_cast<double>(step) * h);
      out.states.push_back(y);
    }
  }
  return out;
}

std::vector<Expr> modified_rhs(const SimulationConfig& config) {
  if (!config.modified_order) return config.sys.rhs;
  const std::size_t k = *config.modified_order;
  const ButcherTableau tab = config.tableau.substitute(config.sys.parameters);
  const TruncatedBSeries method = rk_series(tab, k + 1);
  const TruncatedBSeries v = config.modifying_integrator
                                 ? modifying_integrator_series(method)
                                 : modified_equation_series(method);
  const auto terms = series_for_ode(v, config.sys, 1);
  return series_at_step(terms, BigRational(config.h));
}

Trajectory simulate(const SimulationConfig& config) {
  config.sys.validate();
  if (!config.tableau.is_explicit()) {
    throw ValidationError("only explicit tableaux can be simulated");
  }
  if (config.initial.size() != config.sys.dimension()) {
    throw ValidationError("initial point has " + std::to_string(config.initial.size()) +
                          " entries, the system has " +
                          std::to_string(config.sys.dimension()) + " variables");
  }
  const std::size_t steps = step_count(config.h, config.t_max);
  constexpr std::size_t kRefine = 100;
  const NumericTableau rk4 = numeric_tableau(rk4_tableau());

  Trajectory out;
  if (config.reference) {
    out = integrate(config.sys.rhs, rk4, config.initial, config.h / kRefine, steps * kRefine,
                    kRefine);
  } else if (config.modified_order && !config.modifying_integrator) {
    out = integrate(modified_rhs(config), rk4, config.initial, config.h / kRefine,
                    steps * kRefine, kRefine);
  } else {
    const NumericTableau tab =
        numeric_tableau(config.tableau.substitute(config.sys.parameters));
    out = integrate(modified_rhs(config), tab, config.initial, config.h, steps, 1);
  }
  // Recompute times from the step index so that both paths print i*h.
  for (std::size_t i = 0; i < out.times.size(); ++i) {
    out.times[i] = static_cast<double>(i) * config.h;
  }
  out.names = config.sys.variables;
  return out;
}

namespace {

void put_double(std::ostream& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, res.ptr - buf);
}

}  // namespace

void write_csv(std::ostream& out, const Trajectory& trajectory) {
  out << 't';
  for (const auto& name : trajectory.names) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    put_double(out, trajectory.times[i]);
    for (double v : trajectory.states[i]) {
      out << ',';
      put_double(out, v);
    }
    out << '\n';
  }
}

}  // namespace bsharp
