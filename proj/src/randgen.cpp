#include "qnnc/randgen.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qnnc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

Rng Rng::substream(std::uint64_t seed, std::uint64_t index) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ull)));
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: empty range");
  // Rejection keeps the result identical across standard libraries.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
  std::uint64_t x = engine_();
  while (x > limit) x = engine_();
  return x % n;
}

ColorSampler::ColorSampler(const std::vector<double>& probs) {
  if (probs.size() < 2) throw std::invalid_argument("ColorSampler: need at least two colors");
  double sum = 0.0;
  for (double p : probs) sum += p;
  double acc = 0.0;
  for (double p : probs) {
    acc += p / sum;
    cdf_.push_back(acc);
  }
  cdf_.back() = 2.0;
  const auto first_live = std::find_if(probs.begin(), probs.end(), [](double p) { return p > 0.0; });
  if (first_live == probs.end()) throw std::invalid_argument("ColorSampler: all probabilities are zero");
  // Rounding may land a draw on a zero-probability color; redirect it to
  // the nearest live color below, or the first live one.
  auto live = static_cast<Color>(first_live - probs.begin());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0) live = static_cast<Color>(i);
    fallback_.push_back(live);
  }
}

Color ColorSampler::operator()(Rng& rng) const {
  const double u = rng.uniform();
  const auto idx = static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
  return fallback_[idx];
}

void validate(const GenSpec& spec) {
  if (spec.rows == 0 || spec.cols == 0) throw std::invalid_argument("GenSpec: empty shape");
  if (spec.probs.size() < 2 || spec.probs.size() > 0x10000) throw std::invalid_argument("GenSpec: need 2..65536 colors");
  double sum = 0.0;
  for (double p : spec.probs) {
    if (!std::isfinite(p) || p < 0.0) throw std::invalid_argument("GenSpec: probabilities must be finite and >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("GenSpec: probabilities must sum to 1");
  if (spec.kind == GenKind::unlabeled && (spec.rows != spec.cols || spec.probs.size() != 2)) {
    throw std::invalid_argument("GenSpec: unlabeled graphs are square and binary");
  }
}

std::vector<double> parse_probs(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(',', start), text.size());
    const std::string item(text.substr(start, end - start));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad probability: '" + item + "'");
    }
    if (used != item.size()) throw std::invalid_argument("bad probability: '" + item + "'");
    out.push_back(v);
    start = end + 1;
  }
  return out;
}

std::string format_probs(const std::vector<double>& probs) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < probs.size(); ++i) out << (i ? "," : "") << probs[i];
  return out.str();
}

GenKind parse_gen_kind(std::string_view name) {
  if (name == "labeled") return GenKind::labeled;
  if (name == "partially-labeled") return GenKind::partially_labeled;
  if (name == "unlabeled") return GenKind::unlabeled;
  if (name == "network") return GenKind::network;
  throw std::invalid_argument("unknown model kind: " + std::string(name));
}

std::string_view gen_kind_name(GenKind kind) {
  switch (kind) {
    case GenKind::labeled: return "labeled";
    case GenKind::partially_labeled: return "partially-labeled";
    case GenKind::unlabeled: return "unlabeled";
    case GenKind::network: return "network";
  }
  return "?";
}

ColorMatrix gen_matrix(std::size_t rows, std::size_t cols, const std::vector<double>& probs, Rng& rng) {
  const ColorSampler sample(probs);
  std::vector<Color> cells(rows * cols);
  for (auto& c : cells) c = sample(rng);
  return ColorMatrix(rows, cols, static_cast<unsigned>(probs.size() - 1), std::move(cells));
}

ColorMatrix gen_matrix(const GenSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  return gen_matrix(spec.rows, spec.cols, spec.probs, rng);
}

QuantizedNetwork gen_network(const GenSpec& spec, const std::vector<std::size_t>& widths) {
  GenSpec check = spec;
  check.kind = GenKind::network;
  validate(check);
  if (widths.size() < 2) throw std::invalid_argument("gen_network: need at least two widths");
  const auto m = static_cast<unsigned>(spec.probs.size() - 1);
  std::vector<NetworkLayer> layers;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    Rng rng = Rng::substream(spec.seed, l);
    layers.push_back({gen_matrix(widths[l + 1], widths[l], spec.probs, rng), Codebook::uniform(m)});
  }
  return QuantizedNetwork(std::move(layers));
}

}  // namespace qnnc
