#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "qnnc/model.hpp"
#include "qnnc/network.hpp"

namespace qnnc {

// Generator recorded in benchmark output so runs can be reproduced.
inline constexpr std::string_view kRngName = "mt19937_64";

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream derived from (seed, index) through SplitMix64.
  static Rng substream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next() { return engine_(); }
  // 53-bit uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

// Samples colors from (p_0..p_m); zero-probability colors never occur.
class ColorSampler {
 public:
  explicit ColorSampler(const std::vector<double>& probs);
  Color operator()(Rng& rng) const;

 private:
  std::vector<double> cdf_;
  std::vector<Color> fallback_;
};

enum class GenKind { labeled, partially_labeled, unlabeled, network };

struct GenSpec {
  std::size_t rows = 1;
  std::size_t cols = 1;
  std::vector<double> probs{0.5, 0.5};
  std::uint64_t seed = 0;
  GenKind kind = GenKind::partially_labeled;
};

// Throws std::invalid_argument for negative, non-finite or unnormalised
// probabilities (tolerance 1e-9), or an unlabeled spec that is not square
// and binary.
void validate(const GenSpec& spec);

std::vector<double> parse_probs(std::string_view text);
std::string format_probs(const std::vector<double>& probs);
GenKind parse_gen_kind(std::string_view name);
std::string_view gen_kind_name(GenKind kind);

ColorMatrix gen_matrix(const GenSpec& spec);
ColorMatrix gen_matrix(std::size_t rows, std::size_t cols, const std::vector<double>& probs, Rng& rng);

// widths w_0..w_K give K matrices; each gets Codebook::uniform(m).
QuantizedNetwork gen_network(const GenSpec& spec, const std::vector<std::size_t>& widths);

}  // namespace qnnc
