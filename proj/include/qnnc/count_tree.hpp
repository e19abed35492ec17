#pragma once

#include <cstdint>
#include <vector>

namespace qnnc {

// Binary count tree produced by the unlabeled codecs. `value` is the node's
// size when created; `removed` counts vertices selected out of it before it
// was divided, so left + right == value - removed for every inner node.
struct CountTreeNode {
  std::uint32_t value = 0;
  std::uint32_t removed = 0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::uint32_t depth = 0;

  bool is_leaf() const { return left < 0; }
};

// nodes[0] is the root.
using CountTree = std::vector<CountTreeNode>;

}  // namespace qnnc
