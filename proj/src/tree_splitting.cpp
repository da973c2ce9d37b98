#include "bsharp/tree_splitting.hpp"

#include <algorithm>

#include "bsharp/errors.hpp"

namespace bsharp {

std::size_t Forest::total_order() const noexcept {
  std::size_t total = 0;
  for (const auto& t : trees) total += t.order();
  return total;
}

std::string Forest::to_string() const {
  std::string out = "{";
  for (std::size_t i = 0; i < trees.size(); ++i) {
    if (i > 0) out += ',';
    out += trees[i].to_string();
  }
  out += '}';
  return out;
}

namespace detail {

std::vector<int> parent_indices(std::string_view levels) {
  std::vector<int> parent(levels.size(), -1);
  std::vector<int> stack;  // stack[l] = most recent node at level l
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto l = static_cast<std::size_t>(levels[i]);
    stack.resize(l);
    parent[i] = l == 0 ? -1 : stack[l - 1];
    stack.push_back(static_cast<int>(i));
  }
  return parent;
}

}  // namespace detail

SubtreeCursor::SubtreeCursor(const RootedTree& tree)
    : levels_(tree.bytes()) {
  if (tree.is_empty()) throw DomainError("ordered subtrees of the empty tree");
  parent_ = detail::parent_indices(levels_);
  in_.assign(levels_.size(), 0);
  subtree_end_.assign(levels_.size(), levels_.size());
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    std::size_t j = i + 1;
    while (j < levels_.size() && levels_[j] > levels_[i]) ++j;
    subtree_end_[i] = j;
  }
}

bool SubtreeCursor::next() {
  if (done_) return false;
  if (!started_) {
    started_ = true;
    split_.subtree = RootedTree();
    split_.forest.trees.assign(1, RootedTree::from_canonical_bytes(levels_));
    return true;
  }
  if (empty_turn_) {
    empty_turn_ = false;
    in_[0] = 1;
    build();
    return true;
  }
  std::size_t i = levels_.size();
  while (i > 1) {
    --i;
    if (!in_[i] && in_[static_cast<std::size_t>(parent_[i])]) {
      in_[i] = 1;
      std::fill(in_.begin() + static_cast<std::ptrdiff_t>(i) + 1, in_.end(), 0);
      build();
      return true;
    }
  }
  done_ = true;
  return false;
}

void SubtreeCursor::build() {
  scratch_.clear();
  auto& forest = split_.forest.trees;
  forest.clear();
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (in_[i]) {
      scratch_.push_back(levels_[i]);
    } else if (in_[static_cast<std::size_t>(parent_[i])]) {
      std::string part = levels_.substr(i, subtree_end_[i] - i);
      const char base = part[0];
      for (auto& c : part) c = static_cast<char>(c - base);
      forest.push_back(RootedTree::from_canonical_bytes(std::move(part)));
    }
  }
  canonicalize_bytes(scratch_);
  split_.subtree = RootedTree::from_canonical_bytes(scratch_);
  std::sort(forest.begin(), forest.end());
}

PartitionCursor::PartitionCursor(const RootedTree& tree)
    : levels_(tree.bytes()) {
  if (tree.is_empty()) throw DomainError("partitions of the empty tree");
  parent_ = detail::parent_indices(levels_);
  limit_ = std::uint64_t{1} << (levels_.size() - 1);
  component_.resize(levels_.size());
}

bool PartitionCursor::next() {
  if (done_) return false;
  if (!started_) {
    started_ = true;
    mask_ = 0;
  } else if (++mask_ >= limit_) {
    done_ = true;
    return false;
  }
  components_ready_ = skeleton_ready_ = forest_ready_ = false;
  return true;
}

void PartitionCursor::assign_components() {
  if (components_ready_) return;
  const std::size_t n = levels_.size();
  component_root_.clear();
  component_root_.push_back(0);
  component_[0] = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if ((mask_ >> (n - 1 - i)) & 1u) {
      component_[i] = static_cast<int>(component_root_.size());
      component_root_.push_back(i);
    } else {
      component_[i] = component_[static_cast<std::size_t>(parent_[i])];
    }
  }
  components_ready_ = true;
}

const RootedTree& PartitionCursor::skeleton() {
  if (skeleton_ready_) return skeleton_;
  assign_components();
  scratch_.assign(component_root_.size(), 0);
  for (std::size_t c = 1; c < component_root_.size(); ++c) {
    const auto above = parent_[component_root_[c]];
    const auto parent_component =
        static_cast<std::size_t>(component_[static_cast<std::size_t>(above)]);
    scratch_[c] = static_cast<char>(scratch_[parent_component] + 1);
  }
  canonicalize_bytes(scratch_);
  skeleton_ = RootedTree::from_canonical_bytes(scratch_);
  skeleton_ready_ = true;
  return skeleton_;
}

const Forest& PartitionCursor::forest() {
  if (forest_ready_) return forest_;
  assign_components();
  auto& trees = forest_.trees;
  trees.clear();
  for (std::size_t c = 0; c < component_root_.size(); ++c) {
    const std::size_t root = component_root_[c];
    std::string part;
    for (std::size_t i = root; i < levels_.size(); ++i) {
      if (i > root && levels_[i] <= levels_[root]) break;
      if (static_cast<std::size_t>(component_[i]) == c) {
        part.push_back(static_cast<char>(levels_[i] - levels_[root]));
      }
    }
    canonicalize_bytes(part);
    trees.push_back(RootedTree::from_canonical_bytes(std::move(part)));
  }
  std::sort(trees.begin(), trees.end());
  forest_ready_ = true;
  return forest_;
}

}  // namespace bsharp
