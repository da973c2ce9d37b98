#pragma once

// Ordered subtrees (composition law) and edge partitions (substitution law).
//
// Both enumerations are lazy cursors. A cursor owns scratch buffers that are
// reused between steps, so a reference returned by a cursor is only valid
// until the cursor advances.

#include <cstdint>
#include <string>
#include <vector>

#include "bsharp/rooted_tree.hpp"

namespace bsharp {

/// Multiset of non-empty canonical trees, sorted ascending by (order, lex).
struct Forest {
  std::vector<RootedTree> trees;

  bool empty() const noexcept { return trees.empty(); }
  std::size_t size() const noexcept { return trees.size(); }
  std::size_t total_order() const noexcept;

  /// "{[0],[0,1]}"; the empty forest is "{}".
  std::string to_string() const;

  friend bool operator==(const Forest&, const Forest&) = default;
  friend auto operator<=>(const Forest&, const Forest&) = default;
};

struct SubtreeSplit {
  RootedTree subtree;  // s_τ, possibly empty
  Forest forest;       // τ ∖ s

  friend bool operator==(const SubtreeSplit&, const SubtreeSplit&) = default;
  friend auto operator<=>(const SubtreeSplit&, const SubtreeSplit&) = default;
};

struct PartitionSplit {
  Forest forest;        // τ ∖ p
  RootedTree skeleton;  // p_τ

  friend bool operator==(const PartitionSplit&, const PartitionSplit&) = default;
  friend auto operator<=>(const PartitionSplit&, const PartitionSplit&) = default;
};

namespace detail {

// Preorder parent indices of a level sequence; parent[0] = -1.
std::vector<int> parent_indices(std::string_view levels);

}  // namespace detail

/// Enumerates every rooted connected node subset of a tree (including the
/// empty subset). Positionally distinct subsets are produced separately even
/// when they are isomorphic.
///
/// The empty subset comes first, then the subsets in binary-counter order
/// where the last node of the level sequence is the least significant digit.
class SubtreeCursor {
 public:
  explicit SubtreeCursor(const RootedTree& tree);

  bool next();
  const SubtreeSplit& current() const noexcept { return split_; }

 private:
  void build();

  std::string levels_;
  std::vector<int> parent_;
  std::vector<char> in_;
  std::vector<std::size_t> subtree_end_;
  bool started_ = false;
  bool empty_turn_ = true;
  bool done_ = false;
  SubtreeSplit split_;
  std::string scratch_;
};

/// Enumerates all 2^(n-1) edge subsets of a tree. The edge subset is the set
/// of removed edges; `forest()` holds the remaining components and
/// `skeleton()` the tree obtained by contracting every component.
///
/// Skeleton and forest are materialized on first access after each step, so
/// callers may inspect the skeleton and skip the forest entirely.
class PartitionCursor {
 public:
  explicit PartitionCursor(const RootedTree& tree);

  bool next();

  /// Bit k set means the edge above node n-1-k is removed, so the binary
  /// counter starts removing edges at the end of the level sequence.
  std::uint64_t removed_edges() const noexcept { return mask_; }
  bool is_trivial() const noexcept { return mask_ == 0; }

  const RootedTree& skeleton();
  const Forest& forest();
  PartitionSplit split() { return PartitionSplit{forest(), skeleton()}; }

 private:
  void assign_components();

  std::string levels_;
  std::vector<int> parent_;
  std::uint64_t mask_ = 0;
  std::uint64_t limit_ = 0;
  bool started_ = false;
  bool done_ = false;
  bool components_ready_ = false;
  bool skeleton_ready_ = false;
  bool forest_ready_ = false;
  std::vector<int> component_;
  std::vector<std::size_t> component_root_;
  RootedTree skeleton_;
  Forest forest_;
  std::string scratch_;
};

/// Range adaptor yielding SubtreeSplit values by reference.
class OrderedSubtreeRange {
 public:
  class iterator {
   public:
    using value_type = SubtreeSplit;
    using difference_type = std::ptrdiff_t;
    iterator() = default;
    explicit iterator(SubtreeCursor* c) : cursor_(c) { ++*this; }
    const SubtreeSplit& operator*() const { return cursor_->current(); }
    const SubtreeSplit* operator->() const { return &cursor_->current(); }
    iterator& operator++() {
      if (!cursor_->next()) cursor_ = nullptr;
      return *this;
    }
    void operator++(int) { ++*this; }
    friend bool operator==(const iterator& a, const iterator& b) {
      return a.cursor_ == b.cursor_;
    }

   private:
    SubtreeCursor* cursor_ = nullptr;
  };

  explicit OrderedSubtreeRange(const RootedTree& t) : cursor_(t) {}
  iterator begin() { return iterator(&cursor_); }
  iterator end() { return iterator(); }

 private:
  SubtreeCursor cursor_;
};

/// Range adaptor yielding fully materialized PartitionSplit values.
class PartitionRange {
 public:
  class iterator {
   public:
    using value_type = PartitionSplit;
    using difference_type = std::ptrdiff_t;
    iterator() = default;
    explicit iterator(PartitionCursor* c) : cursor_(c) { ++*this; }
    PartitionSplit operator*() const { return cursor_->split(); }
    iterator& operator++() {
      if (!cursor_->next()) cursor_ = nullptr;
      return *this;
    }
    void operator++(int) { ++*this; }
    friend bool operator==(const iterator& a, const iterator& b) {
      return a.cursor_ == b.cursor_;
    }

   private:
    PartitionCursor* cursor_ = nullptr;
  };

  explicit PartitionRange(const RootedTree& t) : cursor_(t) {}
  iterator begin() { return iterator(&cursor_); }
  iterator end() { return iterator(); }

 private:
  PartitionCursor cursor_;
};

inline OrderedSubtreeRange ordered_subtrees(const RootedTree& t) {
  return OrderedSubtreeRange(t);
}

inline PartitionRange partitions(const RootedTree& t) {
  return PartitionRange(t);
}

}  // namespace bsharp
