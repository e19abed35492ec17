#include "qnnc/bitio.hpp"

#include <bit>
#include <stdexcept>

#include "qnnc/model.hpp"

namespace qnnc {

void BitWriter::write_bit(unsigned bit) {
  const std::uint64_t pos = bits_.bit_length;
  if (pos % 8 == 0) bits_.bytes.push_back(0);
  if (bit) bits_.bytes.back() |= static_cast<std::uint8_t>(0x80u >> (pos % 8));
  ++bits_.bit_length;
}

void BitWriter::write_bits(std::uint64_t value, unsigned count) {
  for (unsigned i = count; i-- > 0;) write_bit(static_cast<unsigned>((value >> i) & 1u));
}

void BitWriter::append(const BitString& bits) {
  BitReader in(bits);
  for (std::uint64_t i = 0; i < bits.bit_length; ++i) write_bit(in.read_bit());
}

unsigned BitReader::read_bit() {
  if (pos_ >= length_) throw FormatError("truncated bit stream");
  return read_bit_or_zero();
}

std::uint64_t BitReader::read_bits(unsigned count) {
  std::uint64_t v = 0;
  for (unsigned i = 0; i < count; ++i) v = (v << 1) | read_bit();
  return v;
}

unsigned BitReader::read_bit_or_zero() {
  if (pos_ >= length_) {
    ++pos_;
    return 0;
  }
  const unsigned bit = (data_[pos_ / 8] >> (7 - pos_ % 8)) & 1u;
  ++pos_;
  return bit;
}

unsigned elias_length(std::uint64_t x) {
  if (x == UINT64_MAX) throw std::invalid_argument("elias: value too large");
  return 2 * static_cast<unsigned>(std::bit_width(x + 1) - 1) + 1;
}

void elias_encode(BitWriter& out, std::uint64_t x) {
  if (x == UINT64_MAX) throw std::invalid_argument("elias: value too large");
  const std::uint64_t v = x + 1;
  const unsigned width = static_cast<unsigned>(std::bit_width(v));
  out.write_bits(0, width - 1);
  out.write_bits(v, width);
}

std::uint64_t elias_decode(BitReader& in) {
  unsigned zeros = 0;
  while (in.read_bit() == 0) {
    if (++zeros > 63) throw FormatError("elias: malformed prefix");
  }
  const std::uint64_t v = (std::uint64_t{1} << zeros) | in.read_bits(zeros);
  return v - 1;
}

}  // namespace qnnc
