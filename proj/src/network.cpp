#include "qnnc/network.hpp"

#include <stdexcept>

#include "qnnc/plbg.hpp"

namespace qnnc {

QuantizedNetwork::QuantizedNetwork(std::vector<NetworkLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw std::invalid_argument("QuantizedNetwork: no layers");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& L = layers_[l];
    if (L.codebook.colors() != L.weights.colors()) throw std::invalid_argument("QuantizedNetwork: codebook/matrix color mismatch");
    if (l > 0 && L.weights.cols() != layers_[l - 1].weights.rows()) {
      throw std::invalid_argument("QuantizedNetwork: layer dimensions do not chain");
    }
  }
}

namespace {

std::vector<double> dense_layer(const ColorMatrix& w, const Codebook& codebook, std::span<const double> x,
                                Activation activation) {
  if (x.size() != w.cols()) throw std::invalid_argument("width mismatch");
  std::vector<double> y(w.rows(), 0.0);
  for (std::size_t r = 0; r < w.rows(); ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < w.cols(); ++c) sum += codebook[w.at(r, c)] * x[c];
    y[r] = sum;
  }
  apply_activation(activation, y);
  return y;
}

}  // namespace

std::vector<double> dense_forward(const QuantizedNetwork& net, std::span<const double> x, Activation hidden,
                                  Activation final) {
  std::vector<double> v(x.begin(), x.end());
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const auto& L = net.layer(l);
    v = dense_layer(L.weights, L.codebook, v, l + 1 == net.depth() ? final : hidden);
  }
  return v;
}

QuantizedNetwork network_from_container(const NetworkContainer& raw) {
  if (raw.mode != StorageMode::raw) throw std::invalid_argument("network_from_container: not a raw container");
  std::vector<NetworkLayer> layers;
  for (const auto& rec : raw.layers) layers.push_back({unpack_raw(rec), rec.codebook});
  return QuantizedNetwork(std::move(layers));
}

NetworkContainer raw_container(const QuantizedNetwork& net) {
  NetworkContainer out;
  out.mode = StorageMode::raw;
  for (const auto& L : net.layers()) out.layers.push_back(raw_record(L.weights, L.codebook));
  return out;
}

NetworkContainer compress_network_plbg(const QuantizedNetwork& net) {
  NetworkContainer out;
  out.mode = StorageMode::plbg;
  RowPermutation carried = RowPermutation::identity(net.input_width());
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const auto& L = net.layer(l);
    const ColorMatrix aligned = permute_columns(L.weights, carried);
    if (l + 1 == net.depth()) {
      out.layers.push_back(raw_record(aligned, L.codebook));
      break;
    }
    if (aligned.rows() > kMaxPlbgRows) throw std::invalid_argument("compress_network_plbg: layer too tall");
    auto [sorted, perm] = canonical_sort_rows(aligned);
    const EdgeModel model = empirical_model(sorted);
    out.layers.push_back(LayerRecord{static_cast<std::uint32_t>(sorted.rows()),
                                     static_cast<std::uint32_t>(sorted.cols()), L.codebook, model,
                                     plbg_encode(sorted, model)});
    carried = std::move(perm);
  }
  return out;
}

std::vector<double> infer_network(const NetworkContainer& container, std::span<const double> x, Activation hidden,
                                  Activation final, NetworkInferenceStats* stats) {
  if (container.layers.empty()) throw std::invalid_argument("infer_network: empty container");
  if (x.size() != container.layers.front().cols) throw std::invalid_argument("infer_network: input width mismatch");

  if (container.mode == StorageMode::raw) return dense_forward(network_from_container(container), x, hidden, final);
  if (container.mode == StorageMode::ktree) return dense_forward(decompress_ktree(container), x, hidden, final);

  std::vector<double> v(x.begin(), x.end());
  const std::size_t k = container.layers.size();
  for (std::size_t l = 0; l + 1 < k; ++l) {
    const auto& rec = container.layers[l];
    auto result = infer_layer(rec.payload, rec.model, rec.codebook, v, hidden, stats ? &stats->times : nullptr);
    if (result.y.size() != rec.rows) throw FormatError("infer_network: decoded row count differs from header");
    if (stats) {
      stats->queues.push_back(result.queue);
      stats->streams_out.push_back(std::move(result.stream_out));
    }
    v = std::move(result.y);
  }
  const auto start = std::chrono::steady_clock::now();
  const auto& last = container.layers.back();
  v = dense_layer(unpack_raw(last), last.codebook, v, final);
  if (stats) stats->final_layer += std::chrono::steady_clock::now() - start;
  return v;
}

QuantizedNetwork decompress_network(const NetworkContainer& container) {
  switch (container.mode) {
    case StorageMode::raw:
      return network_from_container(container);
    case StorageMode::ktree:
      return decompress_ktree(container);
    case StorageMode::plbg:
      break;
  }
  std::vector<NetworkLayer> layers;
  const std::size_t k = container.layers.size();
  for (std::size_t l = 0; l + 1 < k; ++l) {
    const auto& rec = container.layers[l];
    ColorMatrix w = plbg_decode(rec.payload, rec.model, rec.cols);
    if (w.rows() != rec.rows) throw FormatError("decompress: decoded row count differs from header");
    if (empirical_model(w) != rec.model) throw FormatError("decompress: decoded colors differ from header counts");
    layers.push_back({std::move(w), rec.codebook});
  }
  layers.push_back({unpack_raw(container.layers.back()), container.layers.back().codebook});
  return QuantizedNetwork(std::move(layers));
}

}  // namespace qnnc
