#include "qnnc/arith.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qnnc/model.hpp"

namespace qnnc {

__extension__ typedef unsigned __int128 u128;

FrequencyTable::FrequencyTable(std::uint32_t first, const std::vector<std::uint32_t>& freqs)
    : first_(first) {
  if (freqs.empty()) throw std::invalid_argument("FrequencyTable: no symbols");
  cum_.reserve(freqs.size() + 1);
  cum_.push_back(0);
  for (auto f : freqs) {
    if (f == 0) throw std::invalid_argument("FrequencyTable: zero frequency");
    cum_.push_back(cum_.back() + f);
  }
  if (cum_.back() > ArithEncoder::kQuarter) throw std::invalid_argument("FrequencyTable: total overflow");
}

std::uint32_t FrequencyTable::find(std::uint64_t value) const {
  auto it = std::upper_bound(cum_.begin(), cum_.end(), value);
  return first_ + static_cast<std::uint32_t>(it - cum_.begin() - 1);
}

FrequencyTable binomial_table(std::uint32_t n, std::uint64_t num, std::uint64_t den) {
  if (den == 0 || num > den) throw std::invalid_argument("binomial_table: bad probability");
  if (n == 0 || num == 0) return FrequencyTable::single(0);
  if (num == den) return FrequencyTable::single(n);
  if (n + std::uint64_t{1} >= (std::uint64_t{1} << 15)) {
    throw std::invalid_argument("binomial_table: too many trials for table precision");
  }

  // Unnormalised pmf via the ratio recurrence, anchored at the mode so the
  // largest term is 1 and nothing overflows.
  const double ratio = static_cast<double>(num) / static_cast<double>(den - num);
  const std::uint64_t mode64 = std::min<std::uint64_t>(
      n, static_cast<std::uint64_t>((static_cast<u128>(n) + 1) * num / den));
  const std::uint32_t mode = static_cast<std::uint32_t>(mode64);
  std::vector<double> w(n + 1, 0.0);
  w[mode] = 1.0;
  for (std::uint32_t k = mode; k < n; ++k) {
    w[k + 1] = w[k] * (static_cast<double>(n - k) / static_cast<double>(k + 1)) * ratio;
  }
  for (std::uint32_t k = mode; k > 0; --k) {
    w[k - 1] = w[k] * (static_cast<double>(k) / static_cast<double>(n - k + 1)) / ratio;
  }
  double sum = 0.0;
  for (double v : w) sum += v;

  const double scale = static_cast<double>(kTableTotal) / sum;
  std::vector<std::uint32_t> freqs(n + 1);
  std::int64_t assigned = 0;
  std::uint32_t largest = 0;
  for (std::uint32_t k = 0; k <= n; ++k) {
    auto f = static_cast<std::uint32_t>(std::floor(w[k] * scale));
    if (f == 0) f = 1;
    freqs[k] = f;
    assigned += f;
    if (f > freqs[largest]) largest = k;
  }
  const std::int64_t adjusted = static_cast<std::int64_t>(freqs[largest]) +
                                (static_cast<std::int64_t>(kTableTotal) - assigned);
  if (adjusted < 1) throw std::invalid_argument("binomial_table: quantization overflow");
  freqs[largest] = static_cast<std::uint32_t>(adjusted);
  return FrequencyTable(0, freqs);
}

void ArithEncoder::emit(unsigned bit) {
  out_.write_bit(bit);
  for (; pending_ > 0; --pending_) out_.write_bit(bit ^ 1u);
}

void ArithEncoder::encode(const FrequencyTable& table, std::uint32_t symbol) {
  if (!table.admits(symbol)) throw std::invalid_argument("ArithEncoder: symbol not in table");
  const std::uint64_t range = high_ - low_ + 1;
  const std::uint64_t total = table.total();
  const std::uint64_t new_low = low_ + static_cast<std::uint64_t>(static_cast<u128>(range) * table.low(symbol) / total);
  const std::uint64_t new_high =
      low_ + static_cast<std::uint64_t>(static_cast<u128>(range) * table.high(symbol) / total) - 1;
  low_ = new_low;
  high_ = new_high;

  while (((low_ ^ high_) & kHalf) == 0) {
    emit(static_cast<unsigned>(low_ >> (kStateBits - 1)));
    low_ = (low_ << 1) & kMask;
    high_ = ((high_ << 1) & kMask) | 1;
  }
  while ((low_ & ~high_ & kQuarter) != 0) {
    ++pending_;
    low_ = (low_ << 1) ^ kHalf;
    high_ = ((high_ ^ kHalf) << 1) | kHalf | 1;
  }
}

void ArithEncoder::finish() { emit(1); }

ArithDecoder::ArithDecoder(BitReader& in) : in_(in) {
  for (unsigned i = 0; i < ArithEncoder::kStateBits; ++i) code_ = (code_ << 1) | in_.read_bit_or_zero();
}

std::uint32_t ArithDecoder::decode(const FrequencyTable& table) {
  constexpr auto kMask = ArithEncoder::kMask;
  constexpr auto kHalf = ArithEncoder::kHalf;
  constexpr auto kQuarter = ArithEncoder::kQuarter;

  // A valid stream holds at least one bit per decoder shift, so zero fill
  // never exceeds the register width. Anything more is a corrupt stream.
  if (in_.position() > in_.length() + ArithEncoder::kStateBits) {
    throw FormatError("arithmetic decoder: read past end of stream");
  }
  const std::uint64_t range = high_ - low_ + 1;
  const std::uint64_t total = table.total();
  const std::uint64_t offset = code_ - low_;
  const auto value =
      static_cast<std::uint64_t>(((static_cast<u128>(offset) + 1) * total - 1) / range);
  // `value` can only reach total on a corrupt stream.
  if (code_ < low_ || value >= total) throw FormatError("arithmetic decoder: code out of range");
  const std::uint32_t symbol = table.find(value);

  const std::uint64_t base = low_;
  low_ = base + static_cast<std::uint64_t>(static_cast<u128>(range) * table.low(symbol) / total);
  high_ = base + static_cast<std::uint64_t>(static_cast<u128>(range) * table.high(symbol) / total) - 1;

  while (((low_ ^ high_) & kHalf) == 0) {
    code_ = ((code_ << 1) & kMask) | in_.read_bit_or_zero();
    low_ = (low_ << 1) & kMask;
    high_ = ((high_ << 1) & kMask) | 1;
  }
  while ((low_ & ~high_ & kQuarter) != 0) {
    code_ = (code_ & kHalf) | ((code_ << 1) & (kMask >> 1)) | in_.read_bit_or_zero();
    low_ = (low_ << 1) ^ kHalf;
    high_ = ((high_ ^ kHalf) << 1) | kHalf | 1;
  }
  return symbol;
}

}  // namespace qnnc
