#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qnnc/count_tree.hpp"

namespace qnnc::detail {

// Ordered partition of each vertex layer into leaves of a count tree.
// Only nonempty leaves are tracked; leaf order is the tree's left-to-right
// order. Each leaf carries the encoder's vertex ids plus a "shadow" list of
// the ids the decoder assigns to the same positions, so the encoder knows
// how the decoder will label every vertex.
class Refinement {
 public:
  explicit Refinement(const std::vector<std::uint32_t>& layer_sizes);

  std::size_t layers() const { return layers_.size(); }
  const CountTree& tree(std::size_t layer) const { return layers_[layer].tree; }

  // Members of the leftmost nonempty leaf.
  std::span<const std::uint32_t> front(std::size_t layer) const;
  bool exhausted(std::size_t layer) const { return layers_[layer].leaves.empty(); }

  // Removes the member at `pos` of the leftmost nonempty leaf. Returns
  // {encoder id, decoder id}.
  std::pair<std::uint32_t, std::uint32_t> select(std::size_t layer, std::size_t pos = 0);

  // Divides every nonempty leaf of `layer`, left to right. `split(ids)` may
  // reorder `ids` (never `shadow`) so the left group comes first, and
  // returns the left group's size.
  template <class Split>
  void divide(std::size_t layer, Split&& split);

  // leaf position of every vertex, -1 once selected.
  std::vector<std::int32_t> leaf_positions(std::size_t layer, std::uint32_t layer_size) const;

 private:
  struct Leaf {
    std::int32_t node;
    std::vector<std::uint32_t> ids;
    std::vector<std::uint32_t> shadow;
  };
  struct Layer {
    CountTree tree;
    std::vector<Leaf> leaves;
  };

  std::vector<Layer> layers_;
};

template <class Split>
void Refinement::divide(std::size_t layer, Split&& split) {
  Layer& L = layers_[layer];
  std::vector<Leaf> next;
  next.reserve(L.leaves.size() * 2);
  for (Leaf& leaf : L.leaves) {
    const auto size = static_cast<std::uint32_t>(leaf.ids.size());
    const std::uint32_t left = split(leaf.ids, std::as_const(leaf.shadow));
    const auto depth = L.tree[leaf.node].depth + 1;
    const auto left_idx = static_cast<std::int32_t>(L.tree.size());
    L.tree.push_back({left, 0, -1, -1, depth});
    L.tree.push_back({size - left, 0, -1, -1, depth});
    L.tree[leaf.node].left = left_idx;
    L.tree[leaf.node].right = left_idx + 1;

    if (left > 0) {
      next.push_back({left_idx, {leaf.ids.begin(), leaf.ids.begin() + left},
                      {leaf.shadow.begin(), leaf.shadow.begin() + left}});
    }
    if (size - left > 0) {
      next.push_back({left_idx + 1, {leaf.ids.begin() + left, leaf.ids.end()},
                      {leaf.shadow.begin() + left, leaf.shadow.end()}});
    }
  }
  L.leaves.swap(next);
}

}  // namespace qnnc::detail
