#include "bsharp/bseries.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <set>

#include "bsharp/errors.hpp"
#include "bsharp/io.hpp"
#include "bsharp/tree_splitting.hpp"

namespace bsharp {

// ---------------------------------------------------------------- TreeBasis

TreeBasis::TreeBasis(std::size_t max_order) : max_order_(max_order) {
  trees_ = trees_up_to_order(max_order);
  order_start_.assign(max_order + 2, 0);
  std::size_t pos = 0;
  for (std::size_t n = 1; n <= max_order + 1; ++n) {
    while (pos < trees_.size() && trees_[pos].order() < n) ++pos;
    order_start_[n] = pos;
  }
  symmetry_.reserve(trees_.size());
  density_.reserve(trees_.size());
  index_.reserve(trees_.size());
  for (std::size_t i = 0; i < trees_.size(); ++i) {
    symmetry_.push_back(bsharp::symmetry(trees_[i]));
    density_.push_back(bsharp::density(trees_[i]));
    index_.emplace(trees_[i], i);
  }
}

std::shared_ptr<const TreeBasis> TreeBasis::get(std::size_t max_order) {
  if (max_order == 0) throw ValidationError("truncation order must be at least 1");
  if (max_order > RootedTree::kMaxOrder) throw ValidationError("truncation order too large");
  static std::mutex mutex;
  static std::map<std::size_t, std::shared_ptr<const TreeBasis>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[max_order];
  if (!slot) slot = std::make_shared<const TreeBasis>(max_order);
  return slot;
}

std::size_t TreeBasis::index(const RootedTree& t) const {
  auto it = index_.find(t);
  if (it == index_.end()) {
    throw ContractError("tree " + t.to_string() + " exceeds truncation order " +
                        std::to_string(max_order_));
  }
  return it->second;
}

std::pair<std::size_t, std::size_t> TreeBasis::order_range(std::size_t n) const {
  if (n == 0 || n > max_order_) return {0, 0};
  return {order_start_[n], order_start_[n + 1]};
}

// ------------------------------------------------------- TruncatedBSeries

TruncatedBSeries::TruncatedBSeries(std::size_t max_order, Coefficient empty)
    : basis_(TreeBasis::get(max_order)),
      empty_(std::move(empty)),
      coeffs_(basis_->size()) {}

const Coefficient& TruncatedBSeries::operator[](const RootedTree& t) const {
  if (t.is_empty()) return empty_;
  return coeffs_[basis_->index(t)];
}

void TruncatedBSeries::set(const RootedTree& t, Coefficient c) {
  if (t.is_empty()) {
    empty_ = std::move(c);
  } else {
    coeffs_[basis_->index(t)] = std::move(c);
  }
}

std::vector<std::string> TruncatedBSeries::symbols() const {
  std::set<std::string> names;
  for (const auto& s : empty_.symbols()) names.insert(s);
  for (const auto& c : coeffs_) {
    for (const auto& s : c.symbols()) names.insert(s);
  }
  return {names.begin(), names.end()};
}

// -------------------------------------------------------- constructions

TruncatedBSeries exact_series(std::size_t max_order) {
  TruncatedBSeries s(max_order, Coefficient(1));
  for (std::size_t i = 0; i < s.size(); ++i) {
    s.set_index(i, Coefficient(BigRational(BigInt(1), s.basis().density(i))));
  }
  return s;
}

TruncatedBSeries identity_series(std::size_t max_order) {
  return TruncatedBSeries(max_order, Coefficient(1));
}

TruncatedBSeries substitution_unit(std::size_t max_order) {
  TruncatedBSeries s(max_order, Coefficient(0));
  s.set(RootedTree{0}, Coefficient(1));
  return s;
}

TruncatedBSeries scale_step(const TruncatedBSeries& s, const Coefficient& mu) {
  TruncatedBSeries out = s;
  std::vector<Coefficient> powers{Coefficient(1)};
  for (std::size_t n = 1; n <= s.max_order(); ++n) powers.push_back(powers.back() * mu);
  for (std::size_t i = 0; i < s.size(); ++i) {
    out.set_index(i, s.at_index(i) * powers[s.basis().tree(i).order()]);
  }
  return out;
}

namespace {

void require_same_order(const TruncatedBSeries& a, const TruncatedBSeries& b,
                        const char* what) {
  if (a.max_order() != b.max_order()) {
    throw ContractError(std::string(what) + ": truncation orders differ (" +
                        std::to_string(a.max_order()) + " vs " +
                        std::to_string(b.max_order()) + ")");
  }
}

// Σ over non-trivial partitions of τ of Π flow(forest) · outer(skeleton).
// The trivial partition (no edge removed) has forest {τ} and skeleton •.
Coefficient partition_sum(const RootedTree& tree, const TruncatedBSeries& flow,
                          const TruncatedBSeries& outer, bool include_trivial,
                          const SubstitutionOptions& options) {
  Coefficient sum;
  for (PartitionCursor cursor(tree); cursor.next();) {
    if (!include_trivial && cursor.is_trivial()) continue;
    const Coefficient& skeleton_coeff = outer[cursor.skeleton()];
    if (options.skip_zero_skeleton && skeleton_coeff.is_zero()) continue;
    Coefficient product = skeleton_coeff;
    for (const auto& t : cursor.forest().trees) {
      const Coefficient& c = flow[t];
      if (c.is_zero()) {
        product = Coefficient();
        break;
      }
      product *= c;
    }
    sum += product;
  }
  return sum;
}

}  // namespace

TruncatedBSeries compose(const TruncatedBSeries& inner_in,
                         const TruncatedBSeries& outer_in,
                         bool normalize_stepsize) {
  require_same_order(inner_in, outer_in, "compose");
  if (!inner_in.empty_coeff().is_one()) {
    throw ContractError("compose: the inner series must be map-kind with u(∅) = 1");
  }
  const Coefficient half(1, 2);
  const TruncatedBSeries inner =
      normalize_stepsize ? scale_step(inner_in, half) : inner_in;
  const TruncatedBSeries outer =
      normalize_stepsize ? scale_step(outer_in, half) : outer_in;

  TruncatedBSeries result(inner.max_order(), outer.empty_coeff());
  for (std::size_t i = 0; i < result.size(); ++i) {
    Coefficient sum;
    for (SubtreeCursor cursor(result.basis().tree(i)); cursor.next();) {
      const auto& split = cursor.current();
      const Coefficient& outer_coeff = outer[split.subtree];
      if (outer_coeff.is_zero()) continue;
      Coefficient product = outer_coeff;
      for (const auto& t : split.forest.trees) product *= inner[t];
      sum += product;
    }
    result.set_index(i, std::move(sum));
  }
  return result;
}

TruncatedBSeries substitute(const TruncatedBSeries& flow,
                            const TruncatedBSeries& outer,
                            const SubstitutionOptions& options) {
  require_same_order(flow, outer, "substitute");
  if (!flow.empty_coeff().is_zero()) {
    throw ContractError("substitute: the inner series must be flow-kind with v(∅) = 0");
  }
  TruncatedBSeries result(flow.max_order(), outer.empty_coeff());
  for (std::size_t i = 0; i < result.size(); ++i) {
    result.set_index(i, partition_sum(result.basis().tree(i), flow, outer,
                                      /*include_trivial=*/true, options));
  }
  return result;
}

TruncatedBSeries modified_equation_series(const TruncatedBSeries& method,
                                          const SubstitutionOptions& options) {
  if (!method.empty_coeff().is_one()) {
    throw ContractError("modified equation: the method series must have u(∅) = 1");
  }
  const TruncatedBSeries exact = exact_series(method.max_order());
  TruncatedBSeries v(method.max_order(), Coefficient(0));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const RootedTree& tree = v.basis().tree(i);
    Coefficient rest = partition_sum(tree, v, exact, false, options);
    v.set_index(i, method.at_index(i) - rest);
  }
  return v;
}

TruncatedBSeries modifying_integrator_series(const TruncatedBSeries& method,
                                             const SubstitutionOptions& options) {
  if (!method.empty_coeff().is_one()) {
    throw ContractError("modifying integrator: the method series must have u(∅) = 1");
  }
  const Coefficient& lead = method[RootedTree{0}];
  if (lead.is_zero()) {
    throw ArithmeticError(
        "modifying integrator: singular method, coefficient of the single node vanishes");
  }
  const TruncatedBSeries exact = exact_series(method.max_order());
  TruncatedBSeries v(method.max_order(), Coefficient(0));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const RootedTree& tree = v.basis().tree(i);
    Coefficient rest = partition_sum(tree, v, method, false, options);
    v.set_index(i, (exact.at_index(i) - rest) / lead);
  }
  return v;
}

TruncatedBSeries bind_symbols(const TruncatedBSeries& s,
                              const std::map<std::string, BigRational>& values) {
  TruncatedBSeries out(s.max_order(), s.empty_coeff().substitute(values));
  for (std::size_t i = 0; i < s.size(); ++i) out.set_index(i, s.at_index(i).substitute(values));
  return out;
}

bool series_eq(const TruncatedBSeries& a, const TruncatedBSeries& b) {
  require_same_order(a, b, "series_eq");
  if (!(a.empty_coeff() == b.empty_coeff())) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a.at_index(i) == b.at_index(i))) return false;
  }
  return true;
}

TruncatedBSeries series_sub(const TruncatedBSeries& a, const TruncatedBSeries& b) {
  require_same_order(a, b, "series_sub");
  TruncatedBSeries out(a.max_order(), a.empty_coeff() - b.empty_coeff());
  for (std::size_t i = 0; i < a.size(); ++i) out.set_index(i, a.at_index(i) - b.at_index(i));
  return out;
}

std::size_t first_difference_order(const TruncatedBSeries& a,
                                   const TruncatedBSeries& b) {
  require_same_order(a, b, "first_difference_order");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a.at_index(i) == b.at_index(i))) return a.basis().tree(i).order();
  }
  return 0;
}

// ---------------------------------------------------------------- display

std::vector<DisplayTerm> display_terms(const TruncatedBSeries& s,
                                       std::size_t reduce_order_by) {
  std::vector<DisplayTerm> terms;
  const auto reduce = static_cast<long>(reduce_order_by);
  if (!s.empty_coeff().is_zero()) {
    if (reduce_order_by > 0) {
      throw ContractError("reduce_order_by is only meaningful for flow-kind series");
    }
    terms.push_back({RootedTree(), s.empty_coeff(), 0});
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Coefficient& c = s.at_index(i);
    if (c.is_zero()) continue;
    const auto order = static_cast<long>(s.basis().tree(i).order());
    if (order < reduce) {
      throw ContractError("reduce_order_by exceeds the smallest tree order present");
    }
    terms.push_back({s.basis().tree(i), c / Coefficient(BigRational(s.basis().symmetry(i))),
                     order - reduce});
  }
  return terms;
}

namespace {

std::string latex_h_power(long k) {
  if (k == 0) return "";
  if (k == 1) return "h";
  return "h^{" + std::to_string(k) + "}";
}

std::string latex_term(const DisplayTerm& term, bool first) {
  std::string factor;
  if (term.tree.is_empty()) {
    factor = "y";
  } else {
    factor = "F_{f}\\left( \\rootedtree" + term.tree.to_brackets() + " \\right)";
  }
  const std::string hp = latex_h_power(term.h_power);
  std::string rest = hp.empty() ? factor : hp + " " + factor;

  std::string coeff = term.coeff.to_string(CoeffFormat::latex);
  bool negative = false;
  const bool compound = !term.coeff.is_rational() &&
                        term.coeff.denominator().is_constant() &&
                        term.coeff.numerator().terms().size() > 1;
  if (!compound && !coeff.empty() && coeff[0] == '-') {
    negative = true;
    coeff.erase(0, 1);
  }
  std::string body;
  if (coeff == "1") {
    body = rest;
  } else if (compound) {
    body = "\\left(" + coeff + "\\right) " + rest;
  } else {
    body = coeff + " " + rest;
  }
  if (first) return (negative ? "-" : "") + body;
  return (negative ? " - " : " + ") + body;
}

}  // namespace

std::string format_series(const TruncatedBSeries& s, SeriesFormat format,
                          std::size_t reduce_order_by) {
  if (format == SeriesFormat::json) return series_to_json(s) + "\n";
  const auto terms = display_terms(s, reduce_order_by);
  std::string out;
  if (format == SeriesFormat::latex) {
    if (terms.empty()) return "0\n";
    for (std::size_t i = 0; i < terms.size(); ++i) out += latex_term(terms[i], i == 0);
    out += " + \\mathcal{O}(h^{" +
           std::to_string(s.max_order() + 1 - reduce_order_by) + "})\n";
    return out;
  }
  std::size_t width = 2;
  for (const auto& t : terms) width = std::max(width, t.tree.to_string().size());
  for (const auto& t : terms) {
    std::string name = t.tree.to_string();
    // The empty-tree glyph is multi-byte; pad by visible width.
    const std::size_t visible = t.tree.is_empty() ? 1 : name.size();
    out += name + std::string(width - visible + 2, ' ') + "h^" +
           std::to_string(t.h_power) + "  " + t.coeff.to_string() + "\n";
  }
  return out;
}

}  // namespace bsharp
