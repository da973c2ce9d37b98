#include "bsharp/rooted_tree.hpp"

#include <algorithm>
#include <cctype>
#include <utility>

#include "bsharp/errors.hpp"

namespace bsharp {
namespace {

// Splits [first, last) into the ranges of the root's children.
template <class Fn>
void for_each_child(std::string_view s, std::size_t first, std::size_t last,
                    Fn&& fn) {
  const char child_level = static_cast<char>(s[first] + 1);
  std::size_t i = first + 1;
  while (i < last) {
    std::size_t j = i + 1;
    while (j < last && s[j] > child_level) ++j;
    fn(i, j);
    i = j;
  }
}

void canonicalize_range(std::string& s, std::size_t first, std::size_t last) {
  if (last - first <= 2) return;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for_each_child(s, first, last, [&](std::size_t a, std::size_t b) {
    ranges.emplace_back(a, b);
  });
  for (auto [a, b] : ranges) canonicalize_range(s, a, b);
  if (ranges.size() < 2) return;

  std::string_view view(s);
  bool sorted = true;
  for (std::size_t k = 1; k < ranges.size() && sorted; ++k) {
    auto prev = view.substr(ranges[k - 1].first,
                            ranges[k - 1].second - ranges[k - 1].first);
    auto cur = view.substr(ranges[k].first, ranges[k].second - ranges[k].first);
    sorted = prev >= cur;
  }
  if (sorted) return;

  std::vector<std::string> parts;
  parts.reserve(ranges.size());
  for (auto [a, b] : ranges) parts.emplace_back(s.substr(a, b - a));
  std::sort(parts.begin(), parts.end(), std::greater<>());
  std::size_t pos = first + 1;
  for (const auto& part : parts) {
    s.replace(pos, part.size(), part);
    pos += part.size();
  }
}

BigInt symmetry_range(std::string_view s, std::size_t first, std::size_t last) {
  BigInt result = 1;
  std::string_view previous;
  unsigned long multiplicity = 0;
  for_each_child(s, first, last, [&](std::size_t a, std::size_t b) {
    auto child = s.substr(a, b - a);
    result *= symmetry_range(s, a, b);
    if (child == previous) {
      ++multiplicity;
      result *= multiplicity;
    } else {
      previous = child;
      multiplicity = 1;
    }
  });
  return result;
}

BigInt density_range(std::string_view s, std::size_t first, std::size_t last) {
  BigInt result = static_cast<unsigned long>(last - first);
  for_each_child(s, first, last, [&](std::size_t a, std::size_t b) {
    result *= density_range(s, a, b);
  });
  return result;
}

}  // namespace

void canonicalize_bytes(std::string& levels) {
  canonicalize_range(levels, 0, levels.size());
  const char root = levels.empty() ? 0 : levels[0];
  if (root != 0) {
    for (auto& c : levels) c = static_cast<char>(c - root);
  }
}

RootedTree canonicalize(std::span<const int> levels) {
  if (levels.empty()) {
    throw ValidationError("level sequence must not be empty");
  }
  if (levels.size() > RootedTree::kMaxOrder) {
    throw ValidationError("trees with more than " +
                          std::to_string(RootedTree::kMaxOrder) +
                          " nodes are not supported");
  }
  const int root = levels[0];
  std::string bytes;
  bytes.reserve(levels.size());
  bytes.push_back(0);
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (levels[i] <= root) {
      throw ValidationError("level sequence has more than one root (index " +
                            std::to_string(i) + ")");
    }
    if (levels[i] > levels[i - 1] + 1) {
      throw ValidationError("level sequence jumps by more than one at index " +
                            std::to_string(i));
    }
    bytes.push_back(static_cast<char>(levels[i] - root));
  }
  canonicalize_bytes(bytes);
  return RootedTree::from_canonical_bytes(std::move(bytes));
}

RootedTree::RootedTree(std::initializer_list<int> levels)
    : RootedTree(std::span<const int>(levels.begin(), levels.size())) {}

RootedTree::RootedTree(std::span<const int> levels)
    : levels_(canonicalize(levels).levels_) {}

RootedTree RootedTree::from_canonical_bytes(std::string bytes) {
  return RootedTree(std::move(bytes));
}

std::vector<int> RootedTree::levels() const {
  return std::vector<int>(levels_.begin(), levels_.end());
}

std::string RootedTree::to_string(bool ascii) const {
  if (is_empty()) return ascii ? "{}" : "∅";
  std::string out = "[";
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(static_cast<int>(levels_[i]));
  }
  out += ']';
  return out;
}

std::string RootedTree::to_brackets() const {
  std::string out;
  int depth = -1;
  for (char c : levels_) {
    const int l = c;
    while (depth >= l) {
      out += ']';
      --depth;
    }
    if (!out.empty() && out.back() == ']') out += ',';
    out += '[';
    depth = l;
  }
  while (depth-- >= 0) out += ']';
  return out;
}

RootedTree RootedTree::parse(std::string_view text) {
  auto trim = [](std::string_view v) {
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front())))
      v.remove_prefix(1);
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back())))
      v.remove_suffix(1);
    return v;
  };
  text = trim(text);
  if (text == "∅" || text == "{}") return RootedTree();
  if (text.size() < 2 || text.front() != '[' || text.back() != ']') {
    throw ValidationError("malformed tree notation: '" + std::string(text) +
                          "'");
  }
  std::vector<int> levels;
  std::string_view body = text.substr(1, text.size() - 2);
  while (!trim(body).empty()) {
    auto comma = body.find(',');
    auto item = trim(body.substr(0, comma));
    if (item.empty()) {
      throw ValidationError("malformed tree notation: '" + std::string(text) +
                            "'");
    }
    int value = 0;
    bool negative = false;
    std::size_t k = 0;
    if (item[0] == '-') {
      negative = true;
      k = 1;
    }
    if (k == item.size()) {
      throw ValidationError("malformed level '" + std::string(item) + "'");
    }
    for (; k < item.size(); ++k) {
      if (!std::isdigit(static_cast<unsigned char>(item[k])) || value > 1000) {
        throw ValidationError("malformed level '" + std::string(item) + "'");
      }
      value = value * 10 + (item[k] - '0');
    }
    levels.push_back(negative ? -value : value);
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return canonicalize(levels);
}

std::size_t order(const RootedTree& t) noexcept { return t.order(); }

BigInt symmetry(const RootedTree& t) {
  if (t.is_empty()) throw DomainError("symmetry of the empty tree");
  return symmetry_range(t.bytes(), 0, t.order());
}

BigInt density(const RootedTree& t) {
  if (t.is_empty()) throw DomainError("density of the empty tree");
  return density_range(t.bytes(), 0, t.order());
}

std::vector<RootedTree> children(const RootedTree& t) {
  if (t.is_empty()) throw DomainError("children of the empty tree");
  std::vector<RootedTree> result;
  std::string_view s = t.bytes();
  for_each_child(s, 0, s.size(), [&](std::size_t a, std::size_t b) {
    std::string child(s.substr(a, b - a));
    for (auto& c : child) --c;
    result.push_back(RootedTree::from_canonical_bytes(std::move(child)));
  });
  return result;
}

RootedTree tall_tree(std::size_t n) {
  if (n == 0) return RootedTree();
  if (n > RootedTree::kMaxOrder) throw ValidationError("tree order too large");
  std::string bytes(n, 0);
  for (std::size_t i = 0; i < n; ++i) bytes[i] = static_cast<char>(i);
  return RootedTree::from_canonical_bytes(std::move(bytes));
}

RootedTree bushy_tree(std::size_t n) {
  if (n == 0) return RootedTree();
  if (n > RootedTree::kMaxOrder) throw ValidationError("tree order too large");
  std::string bytes(n, 1);
  bytes[0] = 0;
  return RootedTree::from_canonical_bytes(std::move(bytes));
}

TreeGenerator::TreeGenerator(std::size_t order, bool include_empty)
    : order_(order), include_empty_(include_empty) {
  if (order > RootedTree::kMaxOrder) {
    throw ValidationError("tree order too large");
  }
}

bool TreeGenerator::next() {
  if (done_) return false;
  if (!started_) {
    started_ = true;
    if (order_ == 0) {
      done_ = !include_empty_;
      current_ = RootedTree();
      return include_empty_;
    }
    current_ = tall_tree(order_);
    scratch_ = std::string(current_.bytes());
    return true;
  }
  if (order_ == 0) {
    done_ = true;
    return false;
  }
  std::string& s = scratch_;
  std::size_t p = s.size();
  while (p > 0 && s[p - 1] <= 1) --p;
  if (p == 0) {
    done_ = true;
    return false;
  }
  --p;
  std::size_t q = p;
  while (s[q] != s[p] - 1) --q;
  const std::size_t shift = p - q;
  for (std::size_t i = p; i < s.size(); ++i) s[i] = s[i - shift];
  current_ = RootedTree::from_canonical_bytes(s);
  return true;
}

std::size_t count_trees(std::size_t n) {
  std::size_t count = 0;
  for (TreeGenerator gen(n); gen.next();) ++count;
  return count;
}

std::vector<RootedTree> trees_up_to_order(std::size_t max_order) {
  std::vector<RootedTree> result;
  for (std::size_t n = 1; n <= max_order; ++n) {
    const std::size_t start = result.size();
    for (const auto& t : trees_of_order(n)) result.push_back(t);
    std::reverse(result.begin() + static_cast<std::ptrdiff_t>(start),
                 result.end());
  }
  return result;
}

}  // namespace bsharp
