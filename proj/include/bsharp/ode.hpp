#pragma once

// Autonomous ODE systems y' = f(y), their derivative tensors and elementary
// differentials, and the evaluation of B-series against a concrete f.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bsharp/bseries.hpp"
#include "bsharp/expression.hpp"
#include "bsharp/rooted_tree.hpp"

namespace bsharp {

struct ODESystem {
  std::vector<std::string> variables;
  std::vector<Expr> rhs;
  std::map<std::string, BigRational> parameters;

  std::size_t dimension() const noexcept { return variables.size(); }
  /// Throws ValidationError when rhs and variables disagree.
  void validate() const;
};

/// Parses one right-hand side over `variables` and `parameters`; parameters
/// are substituted by their values. `line` and `column_offset` position
/// error messages inside a larger source.
Expr parse_expression(std::string_view text, const std::vector<std::string>& variables,
                      const std::map<std::string, BigRational>& parameters = {},
                      std::size_t line = 1, std::size_t column_offset = 0);

/// Source format, one statement per line or separated by ';':
///   vars p, q
///   param a = 1/2
///   p' = p*(2 - q)
///   q' = q*(p - 1)
/// '#' starts a comment.
ODESystem parse_ode(std::string_view text);

/// Memo of derivative tensors and elementary differentials for one system.
/// Not thread-safe; use one cache per thread.
class DiffCache {
 public:
  /// With `use_symmetry` off every ordering of a multi-index is computed
  /// independently (test hook for the Schwarz pruning).
  explicit DiffCache(const ODESystem& sys, bool use_symmetry = true);

  const ODESystem& system() const noexcept { return sys_; }
  bool uses_symmetry() const noexcept { return use_symmetry_; }

  /// ∂^m f^j / ∂y_{k1} … ∂y_{km}.
  const Expr& derivative(std::size_t component, std::vector<std::size_t> indices);

  /// F(τ)(y), one expression per component.
  const std::vector<Expr>& elementary_differential(const RootedTree& t);

  bool has_differential(const RootedTree& t) const { return differentials_.count(t) != 0; }
  /// How often F(τ) has been built from scratch (0 or 1 when caching works).
  std::size_t computations(const RootedTree& t) const;
  std::size_t tensor_count() const noexcept { return tensors_.size(); }

 private:
  ODESystem sys_;
  bool use_symmetry_;
  std::map<std::pair<std::size_t, std::vector<std::size_t>>, Expr> tensors_;
  std::unordered_map<RootedTree, std::vector<Expr>> differentials_;
  std::unordered_map<RootedTree, std::size_t> computations_;
};

std::vector<Expr> elementary_differential(const ODESystem& sys, const RootedTree& t,
                                          DiffCache& cache);

/// Coefficient of h^degree in one component of a B-series applied to f.
struct HTerm {
  long degree;
  Expr expr;
};
using ComponentSeries = std::vector<HTerm>;

/// Per component Σ_τ u(τ)/σ(τ) F(τ) grouped by |τ| − reduce_order_by, plus
/// u(∅)·y at degree 0 for map-kind series. Symbols in the coefficients are
/// bound through sys.parameters; an unbound symbol is a ValidationError.
std::vector<ComponentSeries> series_for_ode(const TruncatedBSeries& series,
                                            const ODESystem& sys,
                                            std::size_t reduce_order_by = 0);
std::vector<ComponentSeries> series_for_ode(const TruncatedBSeries& series,
                                            DiffCache& cache,
                                            std::size_t reduce_order_by = 0);

/// Σ_d h^d expr_d for every component.
std::vector<Expr> series_at_step(const std::vector<ComponentSeries>& series,
                                 const BigRational& h);

/// Exact value of every component at a rational point and step.
std::vector<BigRational> eval_series(const std::vector<ComponentSeries>& series,
                                     std::span<const BigRational> point,
                                     const BigRational& h);

}  // namespace bsharp
