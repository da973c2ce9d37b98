#pragma once

// Reference listings of the partitions and ordered subtrees of [0,1,2,1,2],
// every tree written as a level sequence.

#include <string>
#include <vector>

namespace fixtures {

struct PartitionRow {
  std::vector<std::string> forest;
  std::string skeleton;          // as listed
  std::string skeleton_correct;  // differs only where the listing is inconsistent
};

// Columns in listed order.
inline const std::vector<PartitionRow>& partition_table() {
  static const std::vector<PartitionRow> rows = {
      {{"[0,1,2,1,2]"}, "[0]", "[0]"},
      {{"[0,1]", "[0,1,2]"}, "[0,1]", "[0,1]"},
      {{"[0]", "[0,1]", "[0,1]"}, "[0,1,1]", "[0,1,1]"},
      {{"[0]", "[0,1]", "[0,1]"}, "[0,1,1]", "[0,1,1]"},
      {{"[0]", "[0]", "[0,1,2]"}, "[0,1,2]", "[0,1,2]"},
      {{"[0]", "[0]", "[0]", "[0,1]"}, "[0,1,2,1]", "[0,1,2,1]"},
      {{"[0]", "[0]", "[0]", "[0,1]"}, "[0,1,2,1]", "[0,1,2,1]"},
      {{"[0]", "[0]", "[0]", "[0,1]"}, "[0,1,2,1]", "[0,1,2,1]"},
      {{"[0]", "[0]", "[0]", "[0]", "[0]"}, "[0,1,2,1,2]", "[0,1,2,1,2]"},
      // Two components cannot contract to a single node.
      {{"[0,1]", "[0,1,2]"}, "[0]", "[0,1]"},
      // Three components cannot contract to two nodes; removing the chain
      // root-child-grandchild edges leaves a path.
      {{"[0]", "[0]", "[0,1,2]"}, "[0,1]", "[0,1,2]"},
      {{"[0]", "[0,1]", "[0,1]"}, "[0,1,1]", "[0,1,1]"},
      {{"[0]", "[0]", "[0]", "[0,1]"}, "[0,1,2,1]", "[0,1,2,1]"},
      {{"[0]", "[0,1,2,1]"}, "[0,1]", "[0,1]"},
      {{"[0]", "[0,1,2,1]"}, "[0,1]", "[0,1]"},
      {{"[0]", "[0]", "[0,1,1]"}, "[0,1,1]", "[0,1,1]"},
  };
  return rows;
}

struct SubtreeRow {
  std::string subtree;  // "{}" for the empty subtree
  std::vector<std::string> forest;
};

inline const std::vector<SubtreeRow>& subtree_table() {
  static const std::vector<SubtreeRow> rows = {
      {"[0,1,2,1,2]", {}},
      {"[0,1,2,1]", {"[0]"}},
      {"[0,1,2,1]", {"[0]"}},
      {"[0,1,2]", {"[0,1]"}},
      {"[0,1,2]", {"[0,1]"}},
      {"[0,1,1]", {"[0]", "[0]"}},
      {"[0,1]", {"[0]", "[0,1]"}},
      {"[0,1]", {"[0]", "[0,1]"}},
      {"[0]", {"[0,1]", "[0,1]"}},
      {"{}", {"[0,1,2,1,2]"}},
  };
  return rows;
}

}  // namespace fixtures
