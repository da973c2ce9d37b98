#pragma once

// Truncated B-series: dense maps from every canonical tree up to a
// truncation order to exact coefficients, plus the value at the empty tree.
//
// Coefficients follow the convention
//   B(u, hf, y) = u(∅) y + Σ_τ h^|τ| / σ(τ) · u(τ) F(τ)(y),
// so the displayed factor in front of an elementary differential is u(τ)/σ(τ).

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "bsharp/coefficient.hpp"
#include "bsharp/rooted_tree.hpp"

namespace bsharp {

/// Shared, immutable index of all trees with 1..max_order nodes in
/// (order, lex) ascending order.
class TreeBasis {
 public:
  static std::shared_ptr<const TreeBasis> get(std::size_t max_order);

  std::size_t max_order() const noexcept { return max_order_; }
  std::size_t size() const noexcept { return trees_.size(); }
  const std::vector<RootedTree>& trees() const noexcept { return trees_; }
  const RootedTree& tree(std::size_t i) const { return trees_[i]; }
  /// Index of a canonical tree; throws for trees outside the basis.
  std::size_t index(const RootedTree& t) const;
  bool contains(const RootedTree& t) const { return index_.count(t) != 0; }
  /// Half-open index range of the trees with exactly `n` nodes.
  std::pair<std::size_t, std::size_t> order_range(std::size_t n) const;
  const BigInt& symmetry(std::size_t i) const { return symmetry_[i]; }
  const BigInt& density(std::size_t i) const { return density_[i]; }

  explicit TreeBasis(std::size_t max_order);

 private:
  std::size_t max_order_;
  std::vector<RootedTree> trees_;
  std::vector<std::size_t> order_start_;
  std::vector<BigInt> symmetry_;
  std::vector<BigInt> density_;
  std::unordered_map<RootedTree, std::size_t> index_;
};

enum class SeriesKind { map, flow };

class TruncatedBSeries {
 public:
  /// All tree coefficients zero, empty coefficient `empty`.
  TruncatedBSeries(std::size_t max_order, Coefficient empty);

  std::size_t max_order() const noexcept { return basis_->max_order(); }
  const TreeBasis& basis() const noexcept { return *basis_; }
  std::shared_ptr<const TreeBasis> basis_ptr() const noexcept { return basis_; }

  /// Flow-kind iff the empty coefficient is zero.
  SeriesKind kind() const noexcept {
    return empty_.is_zero() ? SeriesKind::flow : SeriesKind::map;
  }

  const Coefficient& empty_coeff() const noexcept { return empty_; }
  void set_empty_coeff(Coefficient c) { empty_ = std::move(c); }

  /// Coefficient of a tree; the empty tree maps to the empty coefficient.
  const Coefficient& operator[](const RootedTree& t) const;
  const Coefficient& at_index(std::size_t i) const { return coeffs_[i]; }
  void set(const RootedTree& t, Coefficient c);
  void set_index(std::size_t i, Coefficient c) { coeffs_[i] = std::move(c); }
  std::size_t size() const noexcept { return coeffs_.size(); }

  /// Every symbol appearing in any coefficient.
  std::vector<std::string> symbols() const;

 private:
  std::shared_ptr<const TreeBasis> basis_;
  Coefficient empty_;
  std::vector<Coefficient> coeffs_;
};

/// Series of the exact flow: coefficient 1/γ(τ), empty coefficient 1.
TruncatedBSeries exact_series(std::size_t max_order);

/// Neutral element of composition: empty coefficient 1, all trees 0.
TruncatedBSeries identity_series(std::size_t max_order);

/// Neutral element of substitution: 1 at the single node, 0 elsewhere,
/// empty coefficient 0.
TruncatedBSeries substitution_unit(std::size_t max_order);

/// coeff(τ) ↦ μ^|τ| coeff(τ); the empty coefficient is unchanged.
TruncatedBSeries scale_step(const TruncatedBSeries& s, const Coefficient& mu);

/// Series of the map "apply `inner`, then `outer`" (both with step h).
/// With `normalize_stepsize` both inputs are first scaled by 1/2 so that the
/// composite covers a single step h.
TruncatedBSeries compose(const TruncatedBSeries& inner,
                         const TruncatedBSeries& outer,
                         bool normalize_stepsize = false);

struct SubstitutionOptions {
  /// Skip partitions whose skeleton coefficient vanishes without evaluating
  /// the forest product. Observationally invisible; exposed for testing.
  bool skip_zero_skeleton = true;
};

/// (flow ⋆ outer)(τ) = Σ_p Π_{t ∈ τ∖p} flow(t) · outer(p_τ).
TruncatedBSeries substitute(const TruncatedBSeries& flow,
                            const TruncatedBSeries& outer,
                            const SubstitutionOptions& options = {});

/// Flow-kind v with v ⋆ exact = method (backward error analysis).
TruncatedBSeries modified_equation_series(const TruncatedBSeries& method,
                                          const SubstitutionOptions& options = {});

/// Flow-kind v with v ⋆ method = exact.
TruncatedBSeries modifying_integrator_series(const TruncatedBSeries& method,
                                             const SubstitutionOptions& options = {});

/// Every coefficient with the given symbols replaced by values.
TruncatedBSeries bind_symbols(const TruncatedBSeries& s,
                              const std::map<std::string, BigRational>& values);

bool series_eq(const TruncatedBSeries& a, const TruncatedBSeries& b);
TruncatedBSeries series_sub(const TruncatedBSeries& a, const TruncatedBSeries& b);

/// First order at which the two series differ, or 0 if they agree fully.
std::size_t first_difference_order(const TruncatedBSeries& a,
                                   const TruncatedBSeries& b);

// ------------------------------------------------------------- display

struct DisplayTerm {
  RootedTree tree;   // empty tree for the u(∅) y term
  Coefficient coeff; // u(τ)/σ(τ)
  long h_power;      // |τ| - reduce_order_by
};

/// Non-zero terms in (order, lex) order, with the empty term first.
std::vector<DisplayTerm> display_terms(const TruncatedBSeries& s,
                                       std::size_t reduce_order_by = 0);

enum class SeriesFormat { json, text, latex };

/// Human-readable rendering of display_terms: one term per line in text
/// mode, a single sum with `F_{f}(\rootedtree[...])` placeholders in LaTeX.
std::string format_series(const TruncatedBSeries& s, SeriesFormat format,
                          std::size_t reduce_order_by = 0);

}  // namespace bsharp
