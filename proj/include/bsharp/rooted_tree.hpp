#pragma once

// Unordered rooted trees stored as canonical level sequences.
//
// A level sequence lists the depth of every node in depth-first order with
// the root at level 0. Among all level sequences describing the same
// unordered tree the lexicographically greatest one is canonical; all
// RootedTree values hold canonical sequences only.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace bsharp {

using BigInt = mpz_class;

class RootedTree {
 public:
  using Level = std::uint8_t;
  static constexpr std::size_t kMaxOrder = 62;

  /// The empty tree.
  RootedTree() = default;

  /// Canonicalizes and validates an arbitrary level sequence.
  RootedTree(std::initializer_list<int> levels);
  explicit RootedTree(std::span<const int> levels);

  static RootedTree empty() { return RootedTree(); }

  /// Adopts an already canonical sequence stored one byte per level. No checks.
  static RootedTree from_canonical_bytes(std::string bytes);

  bool is_empty() const noexcept { return levels_.empty(); }
  std::size_t order() const noexcept { return levels_.size(); }

  Level level(std::size_t i) const noexcept {
    return static_cast<Level>(levels_[i]);
  }
  std::vector<int> levels() const;

  /// Raw storage, one byte per node. Lexicographic order on the bytes is the
  /// lexicographic order on the level sequence.
  std::string_view bytes() const noexcept { return levels_; }

  /// "[0,1,2,1]"; the empty tree prints as "∅" or, in ASCII mode, "{}".
  std::string to_string(bool ascii = false) const;

  /// Nested bracket notation used by LaTeX output, e.g. "[[[]],[]]".
  std::string to_brackets() const;

  /// Parses the textual notation produced by to_string (either mode).
  static RootedTree parse(std::string_view text);

  friend bool operator==(const RootedTree&, const RootedTree&) = default;

  /// Orders by number of nodes first, then lexicographically by levels.
  friend std::strong_ordering operator<=>(const RootedTree& a,
                                          const RootedTree& b) noexcept {
    if (auto c = a.order() <=> b.order(); c != 0) return c;
    const int r = a.levels_.compare(b.levels_);
    return r < 0 ? std::strong_ordering::less
                 : (r > 0 ? std::strong_ordering::greater
                          : std::strong_ordering::equal);
  }

 private:
  explicit RootedTree(std::string bytes) : levels_(std::move(bytes)) {}

  std::string levels_;
};

/// Shifts the root to level 0, validates, and returns the canonical form.
RootedTree canonicalize(std::span<const int> levels);

/// Canonicalizes a byte level sequence in place. The root must be at level
/// `levels[0]` and all other entries must be strictly greater; no checks.
void canonicalize_bytes(std::string& levels);

std::size_t order(const RootedTree& t) noexcept;
BigInt symmetry(const RootedTree& t);
BigInt density(const RootedTree& t);

/// Subtrees hanging off the root, in canonically descending order.
std::vector<RootedTree> children(const RootedTree& t);

RootedTree tall_tree(std::size_t n);
RootedTree bushy_tree(std::size_t n);

/// Lazy enumeration of all canonical trees of a fixed order.
///
/// Successive trees are produced by the constant-time successor rule on
/// canonical level sequences, starting from the tall tree and ending at the
/// bushy tree (lexicographically decreasing).
class TreeGenerator {
 public:
  explicit TreeGenerator(std::size_t order, bool include_empty = false);

  /// Moves to the next tree; returns false once exhausted.
  bool next();
  const RootedTree& current() const noexcept { return current_; }

 private:
  std::size_t order_;
  bool started_ = false;
  bool done_ = false;
  bool include_empty_;
  std::string scratch_;
  RootedTree current_;
};

class TreeRange {
 public:
  class iterator {
   public:
    using value_type = RootedTree;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    explicit iterator(TreeGenerator* gen) : gen_(gen) { ++*this; }

    const RootedTree& operator*() const { return gen_->current(); }
    const RootedTree* operator->() const { return &gen_->current(); }
    iterator& operator++() {
      if (!gen_->next()) gen_ = nullptr;
      return *this;
    }
    void operator++(int) { ++*this; }
    friend bool operator==(const iterator& a, const iterator& b) {
      return a.gen_ == b.gen_;
    }

   private:
    TreeGenerator* gen_ = nullptr;
  };

  explicit TreeRange(std::size_t order, bool include_empty = false)
      : gen_(order, include_empty) {}

  iterator begin() { return iterator(&gen_); }
  iterator end() { return iterator(); }

 private:
  TreeGenerator gen_;
};

/// All canonical trees with exactly `n` nodes. With `include_empty`, n = 0
/// yields the empty tree once; otherwise n = 0 yields nothing.
inline TreeRange trees_of_order(std::size_t n, bool include_empty = false) {
  return TreeRange(n, include_empty);
}

std::size_t count_trees(std::size_t n);

/// All trees with 1..max_order nodes sorted by (order, lex) ascending.
std::vector<RootedTree> trees_up_to_order(std::size_t max_order);

}  // namespace bsharp

template <>
struct std::hash<bsharp::RootedTree> {
  std::size_t operator()(const bsharp::RootedTree& t) const noexcept {
    return std::hash<std::string_view>{}(t.bytes());
  }
};
