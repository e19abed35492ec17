#pragma once

#include <span>
#include <vector>

#include "qnnc/container.hpp"
#include "qnnc/count_tree.hpp"
#include "qnnc/infer.hpp"
#include "qnnc/model.hpp"

namespace qnnc {

// Layer l maps width cols() to width rows(); inputs feed layer 0.
struct NetworkLayer {
  ColorMatrix weights;
  Codebook codebook;
};

class QuantizedNetwork {
 public:
  explicit QuantizedNetwork(std::vector<NetworkLayer> layers);

  std::size_t depth() const { return layers_.size(); }
  const NetworkLayer& layer(std::size_t l) const { return layers_[l]; }
  const std::vector<NetworkLayer>& layers() const { return layers_; }
  std::size_t input_width() const { return layers_.front().weights.cols(); }
  std::size_t output_width() const { return layers_.back().weights.rows(); }

 private:
  std::vector<NetworkLayer> layers_;
};

// Uncompressed forward pass; `hidden` after every layer but the last.
std::vector<double> dense_forward(const QuantizedNetwork& net, std::span<const double> x, Activation hidden,
                                  Activation final);

QuantizedNetwork network_from_container(const NetworkContainer& raw);
NetworkContainer raw_container(const QuantizedNetwork& net);

// Hidden layers are plbg-coded in canonical row order; the next layer's
// columns follow that order, and the last matrix is stored raw.
NetworkContainer compress_network_plbg(const QuantizedNetwork& net);

struct NetworkInferenceStats {
  std::vector<QueueMetrics> queues;
  std::vector<BitString> streams_out;
  PhaseTimes times;
  std::chrono::nanoseconds final_layer{0};
};

// Runs inference on the stored form: plbg layers through infer_layer, raw
// layers densely. ktree containers are decoded first.
std::vector<double> infer_network(const NetworkContainer& container, std::span<const double> x, Activation hidden,
                                  Activation final, NetworkInferenceStats* stats = nullptr);

// Inverse of the compressors up to hidden-node order.
QuantizedNetwork decompress_network(const NetworkContainer& container);

// Binary networks with every width equal to N. One arithmetic stream
// covering all node layers goes into layer 0's payload:
// elias(N), input permutation, output permutation (N fixed-width
// ceil(log2 N)-bit entries each), then the coded left-child counts.
NetworkContainer compress_network_ktree(const QuantizedNetwork& net);
// Inputs and outputs come back in their original order.
QuantizedNetwork decompress_ktree(const NetworkContainer& container);
// Count tree of each node layer (K matrices give K+1 trees).
std::vector<CountTree> ktree_trees(const QuantizedNetwork& net);

}  // namespace qnnc
