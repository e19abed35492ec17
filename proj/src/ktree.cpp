#include <algorithm>
#include <bit>
#include <stdexcept>

#include "qnnc/arith.hpp"
#include "qnnc/network.hpp"
#include "refinement.hpp"

namespace qnnc {

namespace {

constexpr std::size_t kMaxKtreeWidth = 4096;

// The K matrices seen as K+1 node layers; matrix a joins node layer a
// (its columns) to node layer a+1 (its rows).
class LayeredGraph {
 public:
  explicit LayeredGraph(std::vector<ColorMatrix> w) : w_(std::move(w)) {}

  std::size_t node_layers() const { return w_.size() + 1; }
  const std::vector<ColorMatrix>& matrices() const { return w_; }

  bool connected(std::size_t a, std::uint32_t u, std::size_t b, std::uint32_t v) const {
    return b == a + 1 ? w_[a].at(v, u) != 0 : w_[b].at(u, v) != 0;
  }
  void connect(std::size_t a, std::uint32_t u, std::size_t b, std::uint32_t v) {
    if (b == a + 1) {
      w_[a].set(v, u, 1);
    } else {
      w_[b].set(u, v, 1);
    }
  }

 private:
  std::vector<ColorMatrix> w_;
};

struct PooledModel {
  std::uint64_t zeros;
  std::uint64_t total;
};

struct KtreeRun {
  BitString arith;
  std::vector<CountTree> trees;
  // decoder id of every node in the first and last node layers
  std::vector<std::uint32_t> input_ids;
  std::vector<std::uint32_t> output_ids;
};

unsigned perm_width(std::size_t n) { return static_cast<unsigned>(std::bit_width(n - 1)); }

std::vector<std::size_t> neighbours(std::size_t j, std::size_t layers) {
  std::vector<std::size_t> out;
  if (j > 0) out.push_back(j - 1);
  if (j + 1 < layers) out.push_back(j + 1);
  return out;
}

KtreeRun run_encoder(const LayeredGraph& g, std::size_t n, PooledModel model) {
  const std::size_t layers = g.node_layers();
  KtreeRun run;
  BitWriter out;
  ArithEncoder enc(out);
  detail::Refinement state(std::vector<std::uint32_t>(layers, static_cast<std::uint32_t>(n)));
  std::vector<std::vector<std::uint32_t>> dec_of(layers, std::vector<std::uint32_t>(n));

  for (std::size_t step = 0; step < n; ++step) {
    for (std::size_t j = 0; j < layers; ++j) {
      const auto front = state.front(j);
      const auto pos = static_cast<std::size_t>(std::min_element(front.begin(), front.end()) - front.begin());
      const auto [u, dec] = state.select(j, pos);
      dec_of[j][u] = dec;
      for (auto nb : neighbours(j, layers)) {
        state.divide(nb, [&](std::vector<std::uint32_t>& ids, const auto&) {
          const auto size = static_cast<std::uint32_t>(ids.size());
          auto mid = std::stable_partition(ids.begin(), ids.end(),
                                           [&](std::uint32_t v) { return !g.connected(j, u, nb, v); });
          const auto left = static_cast<std::uint32_t>(mid - ids.begin());
          enc.encode(binomial_table(size, model.zeros, model.total), left);
          return left;
        });
      }
    }
  }
  enc.finish();
  run.arith = out.take();
  for (std::size_t j = 0; j < layers; ++j) run.trees.push_back(state.tree(j));
  run.input_ids = dec_of.front();
  run.output_ids = dec_of.back();
  return run;
}

std::size_t check_shape(const QuantizedNetwork& net) {
  const std::size_t n = net.input_width();
  if (n > kMaxKtreeWidth) throw std::invalid_argument("ktree: width too large");
  for (const auto& L : net.layers()) {
    if (L.weights.rows() != n || L.weights.cols() != n) throw std::invalid_argument("ktree: every layer must be N x N");
    if (L.weights.colors() != 1) throw std::invalid_argument("ktree: network must be binary");
  }
  return n;
}

PooledModel pool(const std::vector<EdgeModel>& models) {
  PooledModel p{0, 0};
  for (const auto& m : models) {
    p.zeros += m.counts()[0];
    p.total += m.total();
  }
  return p;
}

BitString assemble(std::size_t n, const std::vector<std::uint32_t>& in_ids, const std::vector<std::uint32_t>& out_ids,
                   const BitString& arith) {
  BitWriter out;
  elias_encode(out, n);
  const unsigned w = perm_width(n);
  for (auto v : in_ids) out.write_bits(v, w);
  for (auto v : out_ids) out.write_bits(v, w);
  out.append(arith);
  return out.take();
}

LayeredGraph layered(const QuantizedNetwork& net) {
  std::vector<ColorMatrix> w;
  for (const auto& L : net.layers()) w.push_back(L.weights);
  return LayeredGraph(std::move(w));
}

std::vector<EdgeModel> layer_models(const QuantizedNetwork& net) {
  std::vector<EdgeModel> models;
  for (const auto& L : net.layers()) models.push_back(empirical_model(L.weights));
  return models;
}

}  // namespace

NetworkContainer compress_network_ktree(const QuantizedNetwork& net) {
  const std::size_t n = check_shape(net);
  const auto models = layer_models(net);
  const auto run = run_encoder(layered(net), n, pool(models));

  NetworkContainer out;
  out.mode = StorageMode::ktree;
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const auto& L = net.layer(l);
    out.layers.push_back(LayerRecord{static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(n), L.codebook,
                                     models[l], BitString{}});
  }
  out.layers.front().payload = assemble(n, run.input_ids, run.output_ids, run.arith);
  return out;
}

std::vector<CountTree> ktree_trees(const QuantizedNetwork& net) {
  const std::size_t n = check_shape(net);
  return run_encoder(layered(net), n, pool(layer_models(net))).trees;
}

QuantizedNetwork decompress_ktree(const NetworkContainer& container) {
  if (container.mode != StorageMode::ktree || container.layers.empty()) {
    throw std::invalid_argument("decompress_ktree: not a ktree container");
  }
  const auto& recs = container.layers;
  const std::size_t n = recs.front().rows;
  for (const auto& rec : recs) {
    if (rec.rows != n || rec.cols != n || rec.colors() != 1) throw FormatError("ktree: layer shape mismatch");
  }
  if (n == 0 || n > kMaxKtreeWidth) throw FormatError("ktree: width out of range");
  std::vector<EdgeModel> models;
  for (const auto& rec : recs) models.push_back(rec.model);
  const PooledModel model = pool(models);

  const BitString& stream = recs.front().payload;
  BitReader in(stream);
  if (elias_decode(in) != n) throw FormatError("ktree: width prefix mismatch");
  const unsigned w = perm_width(n);
  auto read_perm = [&] {
    std::vector<std::uint32_t> ids(n);
    for (auto& v : ids) v = static_cast<std::uint32_t>(in.read_bits(w));
    try {
      return RowPermutation(std::move(ids));
    } catch (const std::invalid_argument&) {
      throw FormatError("ktree: stored permutation is not a bijection");
    }
  };
  const RowPermutation perm_in = read_perm();
  const RowPermutation perm_out = read_perm();

  std::vector<ColorMatrix> blank(recs.size(), ColorMatrix(n, n, 1));
  LayeredGraph g(std::move(blank));
  const std::size_t layers = g.node_layers();
  ArithDecoder dec(in);
  detail::Refinement state(std::vector<std::uint32_t>(layers, static_cast<std::uint32_t>(n)));
  for (std::size_t step = 0; step < n; ++step) {
    for (std::size_t j = 0; j < layers; ++j) {
      const auto u = state.select(j).first;
      for (auto nb : neighbours(j, layers)) {
        state.divide(nb, [&](std::vector<std::uint32_t>& ids, const auto&) {
          const auto size = static_cast<std::uint32_t>(ids.size());
          const auto left = dec.decode(binomial_table(size, model.zeros, model.total));
          for (auto i = left; i < size; ++i) g.connect(j, u, nb, ids[i]);
          return left;
        });
      }
    }
  }

  // The decoder's labelling is a fixed point of the encoder, so re-encoding
  // it must reproduce the stored stream exactly.
  const auto check = run_encoder(g, n, model);
  if (assemble(n, perm_in.map(), perm_out.map(), check.arith) != stream) {
    throw FormatError("ktree: stream inconsistent with decoded network");
  }

  std::vector<NetworkLayer> layers_out;
  const auto& w_dec = g.matrices();
  for (std::size_t l = 0; l < w_dec.size(); ++l) {
    ColorMatrix m = w_dec[l];
    if (l == 0) m = permute_columns(m, perm_in.inverse());
    if (l + 1 == w_dec.size()) m = permute_rows(m, perm_out.inverse());
    if (empirical_model(m) != recs[l].model) throw FormatError("ktree: decoded edges differ from header counts");
    layers_out.push_back({std::move(m), recs[l].codebook});
  }
  return QuantizedNetwork(std::move(layers_out));
}

}  // namespace qnnc
