#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bsharp/bseries.hpp"
#include "bsharp/coefficient.hpp"
#include "bsharp/rooted_tree.hpp"

namespace bsharp {

/// Coefficients (A, b, c) of an s-stage Runge–Kutta method. Entries may be
/// symbolic. `c` is kept as given; `warnings()` reports rows where it
/// disagrees with the row sums of A.
class ButcherTableau {
 public:
  using Matrix = std::vector<std::vector<Coefficient>>;
  using Vector = std::vector<Coefficient>;

  ButcherTableau(Matrix A, Vector b, Vector c);
  /// c is taken as the row sums of A.
  ButcherTableau(Matrix A, Vector b);

  std::size_t stages() const noexcept { return b_.size(); }
  const Matrix& A() const noexcept { return A_; }
  const Vector& b() const noexcept { return b_; }
  const Vector& c() const noexcept { return c_; }
  const Coefficient& a(std::size_t i, std::size_t j) const { return A_[i][j]; }

  bool is_explicit() const;
  std::vector<std::string> symbols() const;
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  ButcherTableau substitute(const std::map<std::string, BigRational>& at) const;

  /// Stages permuted so that new stage k is old stage perm[k].
  ButcherTableau permuted(const std::vector<std::size_t>& perm) const;

 private:
  void validate();

  Matrix A_;
  Vector b_;
  Vector c_;
  std::vector<std::string> warnings_;
};

ButcherTableau euler_tableau();
ButcherTableau midpoint_tableau();
ButcherTableau rk4_tableau();
/// The one-parameter family of two-stage second-order methods.
ButcherTableau rk22_tableau(const Coefficient& alpha);

/// "euler", "midpoint", "rk4", "rk22" (symbol alpha) or "rk22(<coeff>)".
ButcherTableau builtin_tableau(std::string_view name);
bool is_builtin_tableau_name(std::string_view name);

/// Φ(τ) for a single tree.
Coefficient elementary_weight(const ButcherTableau& tab, const RootedTree& t);

/// Map-kind series with coefficients Φ(τ) for every tree up to `max_order`.
TruncatedBSeries rk_series(const ButcherTableau& tab, std::size_t max_order);

/// Φ(τ) − 1/γ(τ) for every tree up to `max_order`, in (order, lex) order.
std::vector<std::pair<RootedTree, Coefficient>> order_condition_residuals(
    const ButcherTableau& tab, std::size_t max_order);

/// Largest p ≤ max_check with all residuals of order ≤ p identically zero.
std::size_t order_of_accuracy(const ButcherTableau& tab, std::size_t max_check);

/// Same, with symbols bound to the given values before checking.
std::size_t order_of_accuracy(const ButcherTableau& tab, std::size_t max_check,
                              const std::map<std::string, BigRational>& bindings);

}  // namespace bsharp
