#include "bsharp/butcher.hpp"

#include <set>
#include <unordered_map>

#include "bsharp/errors.hpp"

namespace bsharp {

ButcherTableau::ButcherTableau(Matrix A, Vector b, Vector c)
    : A_(std::move(A)), b_(std::move(b)), c_(std::move(c)) {
  validate();
}

ButcherTableau::ButcherTableau(Matrix A, Vector b) : A_(std::move(A)), b_(std::move(b)) {
  for (const auto& row : A_) {
    Coefficient sum;
    for (const auto& a : row) sum += a;
    c_.push_back(sum);
  }
  validate();
}

void ButcherTableau::validate() {
  const std::size_t s = b_.size();
  if (s == 0) throw ValidationError("a Butcher tableau needs at least one stage");
  if (A_.size() != s || c_.size() != s) {
    throw ValidationError("Butcher tableau dimensions are inconsistent");
  }
  for (const auto& row : A_) {
    if (row.size() != s) throw ValidationError("Butcher tableau matrix A must be square");
  }
  for (std::size_t i = 0; i < s; ++i) {
    Coefficient sum;
    for (const auto& a : A_[i]) sum += a;
    if (!(sum == c_[i])) {
      warnings_.push_back("c[" + std::to_string(i) + "] = " + c_[i].to_string() +
                          " differs from the row sum of A (" + sum.to_string() + ")");
    }
  }
}

bool ButcherTableau::is_explicit() const {
  for (std::size_t i = 0; i < stages(); ++i) {
    for (std::size_t j = i; j < stages(); ++j) {
      if (!A_[i][j].is_zero()) return false;
    }
  }
  return true;
}

std::vector<std::string> ButcherTableau::symbols() const {
  std::set<std::string> names;
  auto add = [&](const Coefficient& x) {
    for (auto& s : x.symbols()) names.insert(s);
  };
  for (const auto& row : A_) {
    for (const auto& a : row) add(a);
  }
  for (const auto& x : b_) add(x);
  for (const auto& x : c_) add(x);
  return {names.begin(), names.end()};
}

ButcherTableau ButcherTableau::substitute(
    const std::map<std::string, BigRational>& at) const {
  Matrix A = A_;
  Vector b = b_;
  Vector c = c_;
  for (auto& row : A) {
    for (auto& a : row) a = a.substitute(at);
  }
  for (auto& x : b) x = x.substitute(at);
  for (auto& x : c) x = x.substitute(at);
  return ButcherTableau(std::move(A), std::move(b), std::move(c));
}

ButcherTableau ButcherTableau::permuted(const std::vector<std::size_t>& perm) const {
  const std::size_t s = stages();
  if (perm.size() != s) throw ValidationError("permutation size mismatch");
  Matrix A(s, Vector(s));
  Vector b(s);
  Vector c(s);
  for (std::size_t i = 0; i < s; ++i) {
    b[i] = b_[perm[i]];
    c[i] = c_[perm[i]];
    for (std::size_t j = 0; j < s; ++j) A[i][j] = A_[perm[i]][perm[j]];
  }
  return ButcherTableau(std::move(A), std::move(b), std::move(c));
}

ButcherTableau euler_tableau() { return ButcherTableau({{0}}, {1}, {0}); }

ButcherTableau midpoint_tableau() {
  return ButcherTableau({{0, 0}, {Coefficient(1, 2), 0}}, {0, 1}, {0, Coefficient(1, 2)});
}

ButcherTableau rk4_tableau() {
  const Coefficient half(1, 2);
  return ButcherTableau({{0, 0, 0, 0}, {half, 0, 0, 0}, {0, half, 0, 0}, {0, 0, 1, 0}},
                        {Coefficient(1, 6), Coefficient(1, 3), Coefficient(1, 3),
                         Coefficient(1, 6)},
                        {0, half, half, 1});
}

ButcherTableau rk22_tableau(const Coefficient& alpha) {
  const Coefficient node = Coefficient(1) / (Coefficient(2) * alpha);
  return ButcherTableau({{0, 0}, {node, 0}}, {Coefficient(1) - alpha, alpha}, {0, node});
}

bool is_builtin_tableau_name(std::string_view name) {
  return name == "euler" || name == "midpoint" || name == "rk4" || name == "rk22" ||
         (name.rfind("rk22(", 0) == 0 && name.back() == ')');
}

ButcherTableau builtin_tableau(std::string_view name) {
  if (name == "euler") return euler_tableau();
  if (name == "midpoint") return midpoint_tableau();
  if (name == "rk4") return rk4_tableau();
  if (name == "rk22") return rk22_tableau(Coefficient::symbol("alpha"));
  if (name.rfind("rk22(", 0) == 0 && name.back() == ')') {
    return rk22_tableau(Coefficient::parse(name.substr(5, name.size() - 6)));
  }
  throw ValidationError("unknown built-in tableau '" + std::string(name) + "'");
}

namespace {

class WeightEvaluator {
 public:
  explicit WeightEvaluator(const ButcherTableau& tab) : tab_(tab) {}

  // Product over the children of τ of the per-stage child factors.
  const std::vector<Coefficient>& stage_product(const RootedTree& t) {
    if (auto it = products_.find(t); it != products_.end()) return it->second;
    const std::size_t s = tab_.stages();
    std::vector<Coefficient> g(s, Coefficient(1));
    for (const auto& child : children(t)) {
      const auto& h = child_factor(child);
      for (std::size_t j = 0; j < s; ++j) g[j] *= h[j];
    }
    return products_.emplace(t, std::move(g)).first->second;
  }

  Coefficient weight(const RootedTree& t) {
    const auto& g = stage_product(t);
    Coefficient phi;
    for (std::size_t j = 0; j < tab_.stages(); ++j) phi += tab_.b()[j] * g[j];
    return phi;
  }

 private:
  // Leaves contribute c_j; larger subtrees Σ_l a_jl g_l(child).
  const std::vector<Coefficient>& child_factor(const RootedTree& child) {
    if (auto it = factors_.find(child); it != factors_.end()) return it->second;
    const std::size_t s = tab_.stages();
    std::vector<Coefficient> h(s);
    if (child.order() == 1) {
      h = tab_.c();
    } else {
      const auto g = stage_product(child);
      for (std::size_t j = 0; j < s; ++j) {
        for (std::size_t l = 0; l < s; ++l) {
          if (!tab_.a(j, l).is_zero()) h[j] += tab_.a(j, l) * g[l];
        }
      }
    }
    return factors_.emplace(child, std::move(h)).first->second;
  }

  const ButcherTableau& tab_;
  std::unordered_map<RootedTree, std::vector<Coefficient>> products_;
  std::unordered_map<RootedTree, std::vector<Coefficient>> factors_;
};

}  // namespace

Coefficient elementary_weight(const ButcherTableau& tab, const RootedTree& t) {
  if (t.is_empty()) throw DomainError("elementary weight of the empty tree");
  WeightEvaluator eval(tab);
  return eval.weight(t);
}

TruncatedBSeries rk_series(const ButcherTableau& tab, std::size_t max_order) {
  TruncatedBSeries series(max_order, Coefficient(1));
  WeightEvaluator eval(tab);
  for (std::size_t i = 0; i < series.size(); ++i) {
    series.set_index(i, eval.weight(series.basis().tree(i)));
  }
  return series;
}

std::vector<std::pair<RootedTree, Coefficient>> order_condition_residuals(
    const ButcherTableau& tab, std::size_t max_order) {
  const TruncatedBSeries series = rk_series(tab, max_order);
  std::vector<std::pair<RootedTree, Coefficient>> out;
  out.reserve(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const Coefficient exact(BigRational(BigInt(1), series.basis().density(i)));
    out.emplace_back(series.basis().tree(i), series.at_index(i) - exact);
  }
  return out;
}

std::size_t order_of_accuracy(const ButcherTableau& tab, std::size_t max_check) {
  if (max_check == 0) throw ValidationError("max_check must be at least 1");
  const auto residuals = order_condition_residuals(tab, max_check);
  std::size_t order = max_check;
  for (const auto& [tree, r] : residuals) {
    if (!r.is_zero() && tree.order() - 1 < order) order = tree.order() - 1;
  }
  return order;
}

std::size_t order_of_accuracy(const ButcherTableau& tab, std::size_t max_check,
                              const std::map<std::string, BigRational>& bindings) {
  return order_of_accuracy(tab.substitute(bindings), max_check);
}

}  // namespace bsharp
