#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "qnnc/bitio.hpp"
#include "qnnc/model.hpp"

namespace qnnc {

enum class Activation { identity, relu, sigmoid, softmax };

Activation parse_activation(std::string_view name);
std::string_view activation_name(Activation a);
void apply_activation(Activation a, std::span<double> values);

// Dynamic-space statistics of the live node queue, measured as the total
// elias-coded size of its entries, sampled after every dequeue.
struct QueueMetrics {
  double avg_bits = 0.0;
  std::uint64_t max_bits = 0;
  std::size_t entries_max = 0;
  std::size_t samples = 0;
};

// Wall time spent in each phase of compressed inference.
struct PhaseTimes {
  std::chrono::nanoseconds pmf{0};
  std::chrono::nanoseconds coding{0};
  std::chrono::nanoseconds accumulate{0};

  PhaseTimes& operator+=(const PhaseTimes& o) {
    pmf += o.pmf;
    coding += o.coding;
    accumulate += o.accumulate;
    return *this;
  }
};

struct LayerInference {
  std::vector<double> y;
  BitString stream_out;
  QueueMetrics queue;
};

// Evaluates y = g(W x) straight from a plbg stream, where W is the layer in
// canonical row order. Each decoded child count is re-encoded into
// stream_out, which must come out bit-identical to `stream`. Pass `times`
// to collect the per-phase breakdown.
LayerInference infer_layer(const BitString& stream, const EdgeModel& model, const Codebook& codebook,
                           std::span<const double> x, Activation activation, PhaseTimes* times = nullptr);

// 2N(m+1) + 4N(m+1) log2((m+2)/(m+1)).
double queue_space_bound(std::uint64_t rows, unsigned m);

}  // namespace qnnc
