#pragma once

#include <cstdint>
#include <vector>

#include "qnnc/bitio.hpp"
#include "qnnc/count_tree.hpp"
#include "qnnc/model.hpp"

namespace qnnc {

// Square 0/1 adjacency matrix of a bipartite graph.
class BinaryAdjacency {
 public:
  explicit BinaryAdjacency(std::size_t n);
  BinaryAdjacency(std::size_t n, std::vector<std::uint8_t> cells);

  static BinaryAdjacency from_rows(const std::vector<std::vector<int>>& rows);
  // Requires a square matrix; any nonzero color becomes an edge.
  static BinaryAdjacency from_colors(const ColorMatrix& matrix);

  std::size_t size() const { return n_; }
  bool at(std::size_t r, std::size_t c) const { return cells_[r * n_ + c] != 0; }
  void set(std::size_t r, std::size_t c, bool v) { cells_[r * n_ + c] = v ? 1 : 0; }
  std::uint64_t edges() const;

  BinaryAdjacency permuted(const std::vector<std::uint32_t>& row_perm,
                           const std::vector<std::uint32_t>& col_perm) const;

  friend bool operator==(const BinaryAdjacency&, const BinaryAdjacency&) = default;

 private:
  std::size_t n_;
  std::vector<std::uint8_t> cells_;
};

// The two count trees: `rows` partitions the row vertices, `cols` the
// column vertices. `divisions` lists every coded (node value, left count)
// pair in stream order.
struct TwoTrees {
  CountTree rows;
  CountTree cols;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> divisions;
};

// Stream: elias(N) then the left-child counts of both trees, interleaved in
// division order, each arithmetic-coded with Binomial(node value, p) where p
// is the model's edge probability. The output depends only on the graph's
// isomorphism class: selections inside a leaf are made by an
// isomorphism-invariant vertex colouring.
BitString ubg_encode(const BinaryAdjacency& adj, const EdgeModel& model);
TwoTrees ubg_trees(const BinaryAdjacency& adj, const EdgeModel& model);

// Reconstructs a canonical representative; encode(decode(s)) == s.
BinaryAdjacency ubg_decode(const BitString& stream, const EdgeModel& model, std::size_t n);

// Literal two-stage form: each left-child count stored in
// ceil(log2(value + 1)) raw bits, in the same order as the coded stream.
BitString ubg_two_stage_bits(const BinaryAdjacency& adj, const EdgeModel& model);

// Exhaustive check for row and column permutations mapping a onto b. N <= 8.
bool bipartite_iso(const BinaryAdjacency& a, const BinaryAdjacency& b);

inline constexpr std::size_t kMaxIsoSearch = 8;

}  // namespace qnnc
