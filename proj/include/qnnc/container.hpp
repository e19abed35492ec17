#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "qnnc/bitio.hpp"
#include "qnnc/model.hpp"

namespace qnnc {

enum class StorageMode : std::uint8_t { raw = 0, plbg = 1, ktree = 2 };

// One weight matrix as stored on disk. Raw payloads hold packed color
// indices in row-major order, one byte each when m < 256, else u16 LE.
struct LayerRecord {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  Codebook codebook;
  EdgeModel model;
  BitString payload;

  unsigned colors() const { return codebook.colors(); }
  friend bool operator==(const LayerRecord&, const LayerRecord&) = default;
};

// Little-endian layout: "QNNC", version u16, mode u8, K u16, then per layer
// rows u32, cols u32, m u16, (m+1) f64 codebook, (m+1) u64 counts,
// payload_bits u64, payload bytes.
struct NetworkContainer {
  StorageMode mode = StorageMode::raw;
  std::vector<LayerRecord> layers;

  friend bool operator==(const NetworkContainer&, const NetworkContainer&) = default;
};

inline constexpr std::uint16_t kContainerVersion = 1;

BitString pack_raw(const ColorMatrix& matrix);
// Throws FormatError on a size mismatch or an out-of-range color.
ColorMatrix unpack_raw(const LayerRecord& record);
LayerRecord raw_record(const ColorMatrix& matrix, const Codebook& codebook);

std::vector<std::uint8_t> serialize(const NetworkContainer& container);
// Validates structure, dimension chaining and mode-specific layout; never
// trusts a length field without checking it against the buffer.
NetworkContainer parse_container(std::span<const std::uint8_t> bytes);

void write_container(const std::filesystem::path& path, const NetworkContainer& container);
NetworkContainer read_container(const std::filesystem::path& path);

}  // namespace qnnc
