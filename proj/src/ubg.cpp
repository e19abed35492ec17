#include "qnnc/ubg.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>

#include "qnnc/arith.hpp"
#include "refinement.hpp"

namespace qnnc {

BinaryAdjacency::BinaryAdjacency(std::size_t n) : n_(n), cells_(n * n, 0) {
  if (n == 0) throw std::invalid_argument("BinaryAdjacency: empty");
}

BinaryAdjacency::BinaryAdjacency(std::size_t n, std::vector<std::uint8_t> cells) : n_(n), cells_(std::move(cells)) {
  if (n == 0 || cells_.size() != n * n) throw std::invalid_argument("BinaryAdjacency: bad shape");
  for (auto& c : cells_) c = c ? 1 : 0;
}

BinaryAdjacency BinaryAdjacency::from_rows(const std::vector<std::vector<int>>& rows) {
  BinaryAdjacency out(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows.size()) throw std::invalid_argument("BinaryAdjacency: not square");
    for (std::size_t c = 0; c < rows.size(); ++c) out.set(r, c, rows[r][c] != 0);
  }
  return out;
}

BinaryAdjacency BinaryAdjacency::from_colors(const ColorMatrix& matrix) {
  if (matrix.rows() != matrix.cols()) throw std::invalid_argument("BinaryAdjacency: not square");
  BinaryAdjacency out(matrix.rows());
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (std::size_t c = 0; c < matrix.cols(); ++c) out.set(r, c, matrix.at(r, c) != 0);
  }
  return out;
}

std::uint64_t BinaryAdjacency::edges() const {
  return static_cast<std::uint64_t>(std::count(cells_.begin(), cells_.end(), 1));
}

BinaryAdjacency BinaryAdjacency::permuted(const std::vector<std::uint32_t>& row_perm,
                                          const std::vector<std::uint32_t>& col_perm) const {
  BinaryAdjacency out(n_);
  for (std::size_t r = 0; r < n_; ++r) {
    for (std::size_t c = 0; c < n_; ++c) out.set(row_perm.at(r), col_perm.at(c), at(r, c));
  }
  return out;
}

namespace {

constexpr std::size_t kCols = 0;
constexpr std::size_t kRows = 1;
constexpr std::size_t kMaxUbgSize = 4096;

struct EdgeProbability {
  std::uint64_t ones;
  std::uint64_t total;
};

EdgeProbability binary_model(const EdgeModel& model) {
  if (model.colors() != 1) throw std::invalid_argument("ubg: model must be binary");
  return {model.counts()[1], model.total()};
}

// Isomorphism-invariant colouring used to pick one vertex out of a leaf.
// Starts from (side, leaf position) for unselected vertices and
// (side, selection order) for selected ones, then refines by neighbour
// colour multisets until stable.
class Colouring {
 public:
  explicit Colouring(const BinaryAdjacency& adj) : n_(adj.size()), neighbours_(2 * adj.size()) {
    for (std::size_t r = 0; r < n_; ++r) {
      for (std::size_t c = 0; c < n_; ++c) {
        if (adj.at(r, c)) {
          neighbours_[c].push_back(static_cast<std::uint32_t>(n_ + r));
          neighbours_[n_ + r].push_back(static_cast<std::uint32_t>(c));
        }
      }
    }
    selected_.assign(2 * n_, -1);
  }

  void mark_selected(std::size_t side, std::uint32_t v) { selected_[vertex(side, v)] = order_++; }
  std::size_t degree(std::size_t side, std::uint32_t v) const { return neighbours_[vertex(side, v)].size(); }

  std::vector<std::uint32_t> stable(const detail::Refinement& state) const {
    using Key = std::vector<std::int64_t>;
    std::vector<Key> keys(2 * n_);
    for (std::size_t side : {kCols, kRows}) {
      const auto pos = state.leaf_positions(side, static_cast<std::uint32_t>(n_));
      for (std::uint32_t v = 0; v < n_; ++v) {
        const auto g = vertex(side, v);
        keys[g] = {static_cast<std::int64_t>(side), pos[v] < 0 ? 1 : 0, pos[v] < 0 ? selected_[g] : pos[v]};
      }
    }
    auto colours = rank(keys);
    std::size_t classes = count_classes(colours);
    while (true) {
      for (std::size_t g = 0; g < keys.size(); ++g) {
        Key sig{colours[g]};
        for (auto nb : neighbours_[g]) sig.push_back(colours[nb]);
        std::sort(sig.begin() + 1, sig.end());
        keys[g] = std::move(sig);
      }
      auto refined = rank(keys);
      const std::size_t refined_classes = count_classes(refined);
      colours.swap(refined);
      if (refined_classes == classes) break;
      classes = refined_classes;
    }
    return colours;
  }

  std::size_t vertex(std::size_t side, std::uint32_t v) const { return side == kCols ? v : n_ + v; }

 private:
  static std::vector<std::uint32_t> rank(const std::vector<std::vector<std::int64_t>>& keys) {
    std::vector<std::uint32_t> order(keys.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return keys[a] < keys[b]; });
    std::vector<std::uint32_t> out(keys.size());
    std::uint32_t next = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i > 0 && keys[order[i]] != keys[order[i - 1]]) ++next;
      out[order[i]] = next;
    }
    return out;
  }
  static std::size_t count_classes(const std::vector<std::uint32_t>& colours) {
    return colours.empty() ? 0 : *std::max_element(colours.begin(), colours.end()) + 1;
  }

  std::size_t n_;
  std::vector<std::vector<std::uint32_t>> neighbours_;
  std::vector<std::int64_t> selected_;
  std::int64_t order_ = 0;
};

struct EncodeRun {
  BitString bits;
  TwoTrees trees;
};

std::size_t choose(const detail::Refinement& state, const Colouring& colouring, std::size_t side, bool first) {
  const auto cands = state.front(side);
  std::vector<std::size_t> pool(cands.size());
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  if (first) {
    // Seed with a column that holds a 1-cell whenever one exists.
    std::vector<std::size_t> with_edge;
    for (auto i : pool) {
      if (colouring.degree(side, cands[i]) > 0) with_edge.push_back(i);
    }
    if (!with_edge.empty()) pool.swap(with_edge);
  }
  if (pool.size() == 1) return pool.front();

  const auto colours = state.layers() ? colouring.stable(state) : std::vector<std::uint32_t>{};
  return *std::min_element(pool.begin(), pool.end(), [&](auto a, auto b) {
    const auto ca = colours[colouring.vertex(side, cands[a])];
    const auto cb = colours[colouring.vertex(side, cands[b])];
    return ca != cb ? ca < cb : cands[a] < cands[b];
  });
}

EncodeRun run_encoder(const BinaryAdjacency& adj, const EdgeModel& model) {
  const auto prob = binary_model(model);
  const std::size_t n = adj.size();
  if (n > kMaxUbgSize) throw std::invalid_argument("ubg_encode: graph too large");
  const std::uint64_t ones = adj.edges();
  if ((ones > 0 && prob.ones == 0) || (ones < n * n && prob.ones == prob.total)) {
    throw FormatError("ubg: graph has an edge value the model gives zero probability");
  }

  EncodeRun run;
  BitWriter out;
  elias_encode(out, n);
  ArithEncoder enc(out);
  detail::Refinement state({static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(n)});
  Colouring colouring(adj);

  auto code = [&](std::vector<std::uint32_t>& ids, auto&& connected) {
    const auto size = static_cast<std::uint32_t>(ids.size());
    auto mid = std::stable_partition(ids.begin(), ids.end(), connected);
    const auto left = static_cast<std::uint32_t>(mid - ids.begin());
    enc.encode(binomial_table(size, prob.ones, prob.total), left);
    run.trees.divisions.emplace_back(size, left);
    return left;
  };

  for (std::size_t step = 0; step < n; ++step) {
    const auto col_pos = choose(state, colouring, kCols, step == 0);
    const auto col = state.select(kCols, col_pos).first;
    colouring.mark_selected(kCols, col);
    state.divide(kRows, [&](std::vector<std::uint32_t>& ids, const auto&) {
      return code(ids, [&](std::uint32_t r) { return adj.at(r, col); });
    });

    const auto row_pos = choose(state, colouring, kRows, false);
    const auto row = state.select(kRows, row_pos).first;
    colouring.mark_selected(kRows, row);
    state.divide(kCols, [&](std::vector<std::uint32_t>& ids, const auto&) {
      return code(ids, [&](std::uint32_t c) { return adj.at(row, c); });
    });
  }
  enc.finish();
  run.bits = out.take();
  run.trees.rows = state.tree(kRows);
  run.trees.cols = state.tree(kCols);
  return run;
}

}  // namespace

BitString ubg_encode(const BinaryAdjacency& adj, const EdgeModel& model) { return run_encoder(adj, model).bits; }

TwoTrees ubg_trees(const BinaryAdjacency& adj, const EdgeModel& model) { return run_encoder(adj, model).trees; }

BinaryAdjacency ubg_decode(const BitString& stream, const EdgeModel& model, std::size_t n) {
  const auto prob = binary_model(model);
  BitReader in(stream);
  const std::uint64_t coded_n = elias_decode(in);
  if (coded_n != n || n == 0 || n > kMaxUbgSize) throw FormatError("ubg: size prefix mismatch");

  BinaryAdjacency out(n);
  ArithDecoder dec(in);
  detail::Refinement state({static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(n)});

  auto decode_left = [&](const std::vector<std::uint32_t>& ids) {
    return dec.decode(binomial_table(static_cast<std::uint32_t>(ids.size()), prob.ones, prob.total));
  };

  for (std::size_t step = 0; step < n; ++step) {
    const auto col = state.select(kCols).first;
    state.divide(kRows, [&](std::vector<std::uint32_t>& ids, const auto&) {
      const auto left = decode_left(ids);
      for (std::uint32_t i = 0; i < left; ++i) out.set(ids[i], col, true);
      return left;
    });
    const auto row = state.select(kRows).first;
    state.divide(kCols, [&](std::vector<std::uint32_t>& ids, const auto&) {
      const auto left = decode_left(ids);
      for (std::uint32_t i = 0; i < left; ++i) out.set(row, ids[i], true);
      return left;
    });
  }

  if (ubg_encode(out, model) != stream) throw FormatError("ubg: stream inconsistent with decoded graph");
  return out;
}

BitString ubg_two_stage_bits(const BinaryAdjacency& adj, const EdgeModel& model) {
  BitWriter out;
  for (auto [value, left] : ubg_trees(adj, model).divisions) {
    out.write_bits(left, static_cast<unsigned>(std::bit_width(value)));
  }
  return out.take();
}

bool bipartite_iso(const BinaryAdjacency& a, const BinaryAdjacency& b) {
  const std::size_t n = a.size();
  if (b.size() != n) return false;
  if (n > kMaxIsoSearch) throw std::invalid_argument("bipartite_iso: exhaustive search limited to N <= 8");
  if (a.edges() != b.edges()) return false;

  auto column_masks = [n](const BinaryAdjacency& g, const std::vector<std::uint32_t>& rows) {
    std::vector<std::uint32_t> masks(n, 0);
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t i = 0; i < n; ++i) masks[c] |= static_cast<std::uint32_t>(g.at(rows[i], c)) << i;
    }
    std::sort(masks.begin(), masks.end());
    return masks;
  };

  std::vector<std::uint32_t> identity(n);
  std::iota(identity.begin(), identity.end(), 0u);
  const auto target = column_masks(b, identity);
  std::vector<std::uint32_t> perm = identity;
  do {
    if (column_masks(a, perm) == target) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

}  // namespace qnnc
