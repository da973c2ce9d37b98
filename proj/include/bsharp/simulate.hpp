#pragma once

// Fixed-step explicit Runge–Kutta integration of ODE systems, including
// the truncated modified equations and modifying integrators of a method.

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bsharp/butcher.hpp"
#include "bsharp/ode.hpp"

namespace bsharp {

struct SimulationConfig {
  ODESystem sys;
  ButcherTableau tableau = euler_tableau();
  double h = 0.1;
  double t_max = 1.0;
  std::vector<double> initial;
  /// Integrate the modified equation (or modifying integrator) keeping
  /// terms up to h^k instead of the method itself.
  std::optional<std::size_t> modified_order;
  bool modifying_integrator = false;
  /// RK4 at h/100 on the original system.
  bool reference = false;
};

struct Trajectory {
  std::vector<std::string> names;
  std::vector<double> times;
  std::vector<std::vector<double>> states;
};

/// Number of output steps: floor(t_max/h), tolerant to rounding in the ratio.
std::size_t step_count(double h, double t_max);

/// Numeric (double) copy of a tableau; throws for symbolic entries.
struct NumericTableau {
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  std::vector<double> c;
};
NumericTableau numeric_tableau(const ButcherTableau& tab);

/// `steps` steps of size h of an explicit method, recording every
/// `record_every`-th state. Throws NumericError on non-finite values.
Trajectory integrate(const std::vector<Expr>& rhs, const NumericTableau& tab,
                     const std::vector<double>& y0, double h, std::size_t steps,
                     std::size_t record_every = 1);

/// The right-hand side that `simulate` integrates in modified mode.
std::vector<Expr> modified_rhs(const SimulationConfig& config);

Trajectory simulate(const SimulationConfig& config);

/// CSV with header "t,<names...>", shortest round-trip decimal formatting.
void write_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace bsharp
