#include "refinement.hpp"

#include <numeric>
#include <stdexcept>

namespace qnnc::detail {

Refinement::Refinement(const std::vector<std::uint32_t>& layer_sizes) {
  layers_.reserve(layer_sizes.size());
  for (auto n : layer_sizes) {
    Layer layer;
    layer.tree.push_back({n, 0, -1, -1, 0});
    if (n > 0) {
      std::vector<std::uint32_t> ids(n);
      std::iota(ids.begin(), ids.end(), 0u);
      layer.leaves.push_back({0, ids, ids});
    }
    layers_.push_back(std::move(layer));
  }
}

std::span<const std::uint32_t> Refinement::front(std::size_t layer) const {
  const auto& leaves = layers_[layer].leaves;
  if (leaves.empty()) return {};
  return leaves.front().ids;
}

std::pair<std::uint32_t, std::uint32_t> Refinement::select(std::size_t layer, std::size_t pos) {
  Layer& L = layers_[layer];
  if (L.leaves.empty()) throw std::logic_error("Refinement::select on exhausted layer");
  Leaf& leaf = L.leaves.front();
  std::swap(leaf.ids[0], leaf.ids.at(pos));
  const std::pair<std::uint32_t, std::uint32_t> chosen{leaf.ids.front(), leaf.shadow.front()};
  leaf.ids.erase(leaf.ids.begin());
  leaf.shadow.erase(leaf.shadow.begin());
  ++L.tree[leaf.node].removed;
  if (leaf.ids.empty()) L.leaves.erase(L.leaves.begin());
  return chosen;
}

std::vector<std::int32_t> Refinement::leaf_positions(std::size_t layer, std::uint32_t layer_size) const {
  std::vector<std::int32_t> pos(layer_size, -1);
  const auto& leaves = layers_[layer].leaves;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    for (auto id : leaves[i].ids) pos[id] = static_cast<std::int32_t>(i);
  }
  return pos;
}

}  // namespace qnnc::detail
