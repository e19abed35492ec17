#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qnnc {

// A bit sequence packed MSB-first into bytes; the final partial byte is
// zero-padded. bit_length is authoritative.
struct BitString {
  std::vector<std::uint8_t> bytes;
  std::uint64_t bit_length = 0;

  friend bool operator==(const BitString&, const BitString&) = default;
};

class BitWriter {
 public:
  void write_bit(unsigned bit);
  // Writes the low `count` bits of value, most significant first.
  void write_bits(std::uint64_t value, unsigned count);
  void append(const BitString& bits);

  std::uint64_t size() const { return bits_.bit_length; }
  const BitString& bits() const { return bits_; }
  BitString take() { return std::move(bits_); }

 private:
  BitString bits_;
};

class BitReader {
 public:
  explicit BitReader(const BitString& bits, std::uint64_t start = 0)
      : data_(bits.bytes), length_(bits.bit_length), pos_(start) {}

  // Throws FormatError past the end.
  unsigned read_bit();
  std::uint64_t read_bits(unsigned count);
  // Past the end yields zeros; used by the arithmetic decoder.
  unsigned read_bit_or_zero();

  std::uint64_t position() const { return pos_; }
  std::uint64_t length() const { return length_; }

 private:
  std::span<const std::uint8_t> data_;
  std::uint64_t length_;
  std::uint64_t pos_;
};

// Elias gamma over x+1, so zero is representable: floor(log2(x+1)) zeros
// followed by the binary form of x+1. Length is 2*floor(log2(x+1)) + 1.
void elias_encode(BitWriter& out, std::uint64_t x);
std::uint64_t elias_decode(BitReader& in);
unsigned elias_length(std::uint64_t x);

}  // namespace qnnc
