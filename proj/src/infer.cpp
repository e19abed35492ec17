#include "qnnc/infer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>

#include "qnnc/arith.hpp"
#include "qnnc/plbg.hpp"

namespace qnnc {

Activation parse_activation(std::string_view name) {
  if (name == "identity") return Activation::identity;
  if (name == "relu") return Activation::relu;
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "softmax") return Activation::softmax;
  throw std::invalid_argument("unknown activation: " + std::string(name));
}

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::softmax: return "softmax";
  }
  return "?";
}

void apply_activation(Activation a, std::span<double> values) {
  switch (a) {
    case Activation::identity:
      return;
    case Activation::relu:
      for (double& v : values) v = std::max(v, 0.0);
      return;
    case Activation::sigmoid:
      for (double& v : values) v = 1.0 / (1.0 + std::exp(-v));
      return;
    case Activation::softmax: {
      if (values.empty()) return;
      const double peak = *std::max_element(values.begin(), values.end());
      double sum = 0.0;
      for (double& v : values) {
        v = std::exp(v - peak);
        sum += v;
      }
      for (double& v : values) v /= sum;
      return;
    }
  }
}

double queue_space_bound(std::uint64_t rows, unsigned m) {
  const double n = static_cast<double>(rows);
  const double k = static_cast<double>(m) + 1.0;
  return 2.0 * n * k + 4.0 * n * k * std::log2((k + 1.0) / k);
}

namespace {

using Clock = std::chrono::steady_clock;

class Stopwatch {
 public:
  explicit Stopwatch(bool enabled) : enabled_(enabled) {
    if (enabled_) start_ = Clock::now();
  }
  void lap(std::chrono::nanoseconds& into) {
    if (!enabled_) return;
    const auto now = Clock::now();
    into += now - start_;
    start_ = now;
  }

 private:
  bool enabled_;
  Clock::time_point start_;
};

class LiveQueue {
 public:
  void push(std::uint32_t v) {
    q_.push_back(v);
    bits_ += elias_length(v);
  }
  std::uint32_t pop() {
    const std::uint32_t v = q_.front();
    q_.pop_front();
    bits_ -= elias_length(v);
    return v;
  }
  bool empty() const { return q_.empty(); }

  void sample(QueueMetrics& m, double& sum) const {
    ++m.samples;
    sum += static_cast<double>(bits_);
    m.max_bits = std::max(m.max_bits, bits_);
    m.entries_max = std::max(m.entries_max, q_.size());
  }

 private:
  std::deque<std::uint32_t> q_;
  std::uint64_t bits_ = 0;
};

}  // namespace

LayerInference infer_layer(const BitString& stream, const EdgeModel& model, const Codebook& codebook,
                           std::span<const double> x, Activation activation, PhaseTimes* times) {
  if (codebook.colors() != model.colors()) throw std::invalid_argument("infer_layer: codebook/model color mismatch");
  if (x.empty()) throw std::invalid_argument("infer_layer: empty input");
  const unsigned m = model.colors();
  const std::size_t cols = x.size();

  BitReader in(stream);
  const std::uint64_t n = elias_decode(in);
  if (n == 0 || n > kMaxPlbgRows) throw FormatError("infer_layer: implausible row count");
  ArithDecoder dec(in);

  BitWriter out;
  elias_encode(out, n);
  ArithEncoder enc(out);

  const auto suffix = detail::suffix_counts(model);
  LayerInference result;
  result.y.assign(n, 0.0);
  std::vector<double>& y = result.y;

  LiveQueue queue;
  double sample_sum = 0.0;
  queue.push(static_cast<std::uint32_t>(n));

  std::size_t d = 0;
  std::uint64_t j = 0;
  bool nonzero_at_depth = false;
  Stopwatch watch(times != nullptr);
  PhaseTimes local;

  while (!queue.empty() && d < cols) {
    const std::uint32_t f = queue.pop();
    queue.sample(result.queue, sample_sum);
    std::uint32_t remaining = f;
    for (unsigned i = 0; i <= m && f > 0; ++i) {
      std::uint32_t c = remaining;
      if (i < m && remaining > 0) {
        watch.lap(local.accumulate);
        const auto table = detail::child_table(model, suffix, remaining, i);
        watch.lap(local.pmf);
        c = dec.decode(table);
        enc.encode(table, c);
        watch.lap(local.coding);
      } else if (i < m) {
        c = 0;
      }
      remaining -= c;
      queue.push(c);

      if (c > 0) {
        if (j + c > n || d >= cols) throw FormatError("infer_layer: block overruns output");
        const double w = codebook[i];
        if (w != 0.0) {
          const double contribution = x[d] * w;
          for (std::uint64_t r = j; r < j + c; ++r) y[r] += contribution;
        }
        nonzero_at_depth = true;
      }
      j = (j + c) % n;
      if (j == 0 && nonzero_at_depth) {
        ++d;
        nonzero_at_depth = false;
      }
    }
  }
  watch.lap(local.accumulate);

  if (d != cols) throw FormatError("infer_layer: stream ended before all columns were consumed");
  enc.finish();
  result.stream_out = out.take();
  if (result.stream_out != stream) throw FormatError("infer_layer: re-encoded stream differs from input");

  if (result.queue.samples > 0) result.queue.avg_bits = sample_sum / static_cast<double>(result.queue.samples);
  apply_activation(activation, y);
  if (times) *times += local;
  return result;
}

}  // namespace qnnc
