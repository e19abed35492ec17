#pragma once

#include <cstdint>
#include <vector>

#include "qnnc/bitio.hpp"

namespace qnnc {

// Static frequency table over the contiguous symbol range
// [first, first + size). Every admissible symbol has frequency >= 1.
class FrequencyTable {
 public:
  FrequencyTable(std::uint32_t first, const std::vector<std::uint32_t>& freqs);

  static FrequencyTable single(std::uint32_t symbol) { return FrequencyTable(symbol, {1}); }

  std::uint32_t first() const { return first_; }
  std::uint32_t size() const { return static_cast<std::uint32_t>(cum_.size() - 1); }
  std::uint32_t last() const { return first_ + size() - 1; }
  std::uint64_t total() const { return cum_.back(); }
  std::uint64_t low(std::uint32_t symbol) const { return cum_[symbol - first_]; }
  std::uint64_t high(std::uint32_t symbol) const { return cum_[symbol - first_ + 1]; }
  std::uint64_t frequency(std::uint32_t symbol) const { return high(symbol) - low(symbol); }
  bool admits(std::uint32_t symbol) const { return symbol >= first_ && symbol <= last(); }
  // Symbol whose cumulative interval contains `value` (value < total()).
  std::uint32_t find(std::uint64_t value) const;

 private:
  std::uint32_t first_;
  std::vector<std::uint64_t> cum_;
};

// Quantized tables sum to exactly this.
inline constexpr std::uint64_t kTableTotal = std::uint64_t{1} << 30;

// Binomial(n, num/den) over 0..n. Degenerate parameters (num == 0 or
// num == den) give a single-symbol table at 0 or n.
FrequencyTable binomial_table(std::uint32_t n, std::uint64_t num, std::uint64_t den);

// Finite-precision termination allowance per stream, in bits.
inline constexpr unsigned kTerminationBudget = 64;

// Binary arithmetic coder with 62-bit low/high registers. Straddles of the
// midpoint are deferred as pending bits and resolved on the next decided bit.
class ArithEncoder {
 public:
  explicit ArithEncoder(BitWriter& out) : out_(out) {}

  void encode(const FrequencyTable& table, std::uint32_t symbol);
  // Emits the terminating bit; the decoder reads zeros past the end.
  void finish();

 private:
  void emit(unsigned bit);

  BitWriter& out_;
  std::uint64_t low_ = 0;
  std::uint64_t high_ = kMask;
  std::uint64_t pending_ = 0;

 public:
  static constexpr unsigned kStateBits = 62;
  static constexpr std::uint64_t kMask = (std::uint64_t{1} << kStateBits) - 1;
  static constexpr std::uint64_t kHalf = std::uint64_t{1} << (kStateBits - 1);
  static constexpr std::uint64_t kQuarter = kHalf >> 1;
};

class ArithDecoder {
 public:
  explicit ArithDecoder(BitReader& in);

  std::uint32_t decode(const FrequencyTable& table);

 private:
  BitReader& in_;
  std::uint64_t low_ = 0;
  std::uint64_t high_ = ArithEncoder::kMask;
  std::uint64_t code_ = 0;
};

}  // namespace qnnc
