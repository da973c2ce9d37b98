#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "bsharp/errors.hpp"
#include "bsharp/tree_splitting.hpp"
#include "oracles.hpp"
#include "reference_tables.hpp"

using namespace bsharp;

namespace {

std::vector<std::string> sorted_ahu(const std::vector<std::string>& levels) {
  std::vector<std::string> out;
  for (const auto& l : levels) out.push_back(oracle::ahu(RootedTree::parse(l)));
  std::sort(out.begin(), out.end());
  return out;
}

std::string ahu_or_empty(const std::string& t) {
  const RootedTree tree = RootedTree::parse(t);
  return tree.is_empty() ? std::string() : oracle::ahu(tree);
}

}  // namespace

TEST_CASE("partitions of a single edge") {
  std::vector<PartitionSplit> splits;
  for (const auto& p : partitions(RootedTree{0, 1})) splits.push_back(p);
  REQUIRE(splits.size() == 2);
  CHECK(splits[0].forest.trees == std::vector<RootedTree>{RootedTree{0, 1}});
  CHECK(splits[0].skeleton == RootedTree{0});
  CHECK(splits[1].forest.trees == std::vector<RootedTree>{RootedTree{0}, RootedTree{0}});
  CHECK(splits[1].skeleton == RootedTree{0, 1});
}

TEST_CASE("partition table of [0,1,2,1,2]") {
  const RootedTree t{0, 1, 2, 1, 2};
  std::multiset<oracle::SplitKey> expected;
  std::multiset<std::vector<std::string>> listed_forests;
  for (const auto& row : fixtures::partition_table()) {
    expected.emplace(ahu_or_empty(row.skeleton_correct), sorted_ahu(row.forest));
    listed_forests.insert(sorted_ahu(row.forest));
  }
  const auto produced = oracle::library_partitions(t);
  CHECK(produced.size() == 16);
  CHECK(produced == expected);
  std::multiset<std::vector<std::string>> forests;
  for (const auto& [_, f] : produced) forests.insert(f);
  CHECK(forests == listed_forests);
}

TEST_CASE("ordered subtree table of [0,1,2,1,2]") {
  const RootedTree t{0, 1, 2, 1, 2};
  std::multiset<oracle::SplitKey> expected;
  for (const auto& row : fixtures::subtree_table()) {
    expected.emplace(ahu_or_empty(row.subtree), sorted_ahu(row.forest));
  }
  CHECK(oracle::library_subtrees(t) == expected);
}

TEST_CASE("splits agree with the adjacency-list oracles") {
  for (std::size_t n = 1; n <= 7; ++n) {
    for (const auto& t : trees_of_order(n)) {
      CAPTURE(t.to_string());
      const auto parents = oracle::parents_from_levels(t.levels());
      CHECK(oracle::library_partitions(t) == oracle::partitions(parents));
      CHECK(oracle::library_subtrees(t) == oracle::ordered_subtrees(parents));
    }
  }
}

TEST_CASE("node conservation") {
  for (std::size_t n = 1; n <= 8; ++n) {
    for (const auto& t : trees_of_order(n)) {
      std::size_t count = 0;
      for (const auto& p : partitions(t)) {
        CHECK(p.forest.total_order() == n);
        CHECK(p.skeleton.order() == p.forest.size());
        CHECK(std::is_sorted(p.forest.trees.begin(), p.forest.trees.end()));
        ++count;
      }
      CHECK(count == (std::size_t{1} << (n - 1)));
      for (const auto& s : ordered_subtrees(t)) {
        CHECK(s.subtree.order() + s.forest.total_order() == n);
      }
    }
  }
}

TEST_CASE("partition cursor exposes the skeleton lazily") {
  const RootedTree t{0, 1, 2, 1};
  PartitionCursor cursor(t);
  REQUIRE(cursor.next());
  CHECK(cursor.is_trivial());
  CHECK(cursor.skeleton() == RootedTree{0});
  CHECK(cursor.forest().trees == std::vector<RootedTree>{t});
  // Inspect only skeletons for the rest; the forest for the final, all-cut
  // partition is still correct when requested afterwards.
  std::size_t steps = 1;
  while (cursor.next()) {
    ++steps;
    CHECK(cursor.skeleton().order() == static_cast<std::size_t>(__builtin_popcountll(cursor.removed_edges())) + 1);
    if (steps == 8) CHECK(cursor.forest().size() == 4);
  }
  CHECK(steps == 8);
}

TEST_CASE("subtree cursor starts with the empty subtree") {
  SubtreeCursor cursor(RootedTree{0, 1});
  REQUIRE(cursor.next());
  CHECK(cursor.current().subtree.is_empty());
  CHECK(cursor.current().forest.trees == std::vector<RootedTree>{RootedTree{0, 1}});
  std::size_t count = 1;
  while (cursor.next()) ++count;
  CHECK(count == 3);
}

TEST_CASE("forest printing") {
  Forest f{{RootedTree{0}, RootedTree{0, 1}}};
  CHECK(f.to_string() == "{[0],[0,1]}");
  CHECK(Forest{}.to_string() == "{}");
}

TEST_CASE("empty tree has no splits") {
  CHECK_THROWS_AS(PartitionCursor(RootedTree::empty()), DomainError);
  CHECK_THROWS_AS(SubtreeCursor(RootedTree::empty()), DomainError);
}
