#include "qnnc/container.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>

#include "qnnc/plbg.hpp"

namespace qnnc {

namespace {

constexpr std::uint64_t kMaxCells = std::uint64_t{1} << 30;
constexpr std::uint64_t kMaxModelTotal = std::uint64_t{1} << 62;

std::size_t raw_width(unsigned m) { return m < 256 ? 1 : 2; }

class ByteWriter {
 public:
  template <class T>
  void put(T value) {
    const auto u = static_cast<std::uint64_t>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
  }
  void put_f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  template <class T>
  T get() {
    need(sizeof(T));
    std::uint64_t u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  double get_f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  std::span<const std::uint8_t> bytes(std::uint64_t n) {
    need(n);
    auto out = in_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::uint64_t n) const {
    if (n > remaining()) throw FormatError("container: truncated");
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

LayerRecord parse_layer(ByteReader& in) {
  const auto rows = in.get<std::uint32_t>();
  const auto cols = in.get<std::uint32_t>();
  const auto m = in.get<std::uint16_t>();
  if (rows == 0 || cols == 0) throw FormatError("container: empty layer");
  if (static_cast<std::uint64_t>(rows) * cols > kMaxCells) throw FormatError("container: layer too large");
  if (m == 0) throw FormatError("container: layer has no nonzero colors");
  // Codebook and counts alone need 16 bytes per color.
  if (in.remaining() < (static_cast<std::uint64_t>(m) + 1) * 16) throw FormatError("container: truncated");

  std::vector<double> weights(m + 1);
  for (auto& w : weights) w = in.get_f64();
  if (weights[0] != 0.0) throw FormatError("container: codebook entry 0 is not zero");
  for (double w : weights) {
    if (!std::isfinite(w)) throw FormatError("container: non-finite codebook entry");
  }

  std::vector<std::uint64_t> counts(m + 1);
  std::uint64_t total = 0;
  for (auto& c : counts) {
    c = in.get<std::uint64_t>();
    if (c > kMaxModelTotal - total) throw FormatError("container: color counts overflow");
    total += c;
  }
  // Counts are the layer's color histogram, so they account for every cell.
  if (total != static_cast<std::uint64_t>(rows) * cols) throw FormatError("container: color counts do not match shape");

  const auto bits = in.get<std::uint64_t>();
  if (bits > static_cast<std::uint64_t>(in.remaining()) * 8) throw FormatError("container: payload overruns file");
  BitString payload;
  payload.bit_length = bits;
  const auto raw = in.bytes((bits + 7) / 8);
  payload.bytes.assign(raw.begin(), raw.end());
  if (bits % 8 != 0 && (payload.bytes.back() & (0xFFu >> (bits % 8))) != 0) {
    throw FormatError("container: nonzero payload padding");
  }
  return LayerRecord{rows, cols, Codebook(std::move(weights)), EdgeModel(std::move(counts)), std::move(payload)};
}

void check_raw(const LayerRecord& rec) {
  if (empirical_model(unpack_raw(rec)) != rec.model) throw FormatError("container: color counts do not match raw payload");
}

void check_layout(const NetworkContainer& c) {
  const auto& L = c.layers;
  for (std::size_t l = 0; l + 1 < L.size(); ++l) {
    if (L[l + 1].cols != L[l].rows) throw FormatError("container: layer dimensions do not chain");
  }
  switch (c.mode) {
    case StorageMode::raw:
      for (const auto& rec : L) check_raw(rec);
      break;
    case StorageMode::plbg:
      for (std::size_t l = 0; l + 1 < L.size(); ++l) {
        if (L[l].rows > kMaxPlbgRows) throw FormatError("container: plbg layer too tall");
        if (L[l].payload.bit_length == 0) throw FormatError("container: empty plbg payload");
      }
      check_raw(L.back());
      break;
    case StorageMode::ktree:
      for (std::size_t l = 0; l < L.size(); ++l) {
        if (L[l].rows != L[0].rows || L[l].cols != L[0].rows) throw FormatError("container: ktree layers must be N x N");
        if (L[l].colors() != 1) throw FormatError("container: ktree layers must be binary");
        if (l > 0 && L[l].payload.bit_length != 0) throw FormatError("container: ktree payload outside layer 0");
      }
      if (L[0].payload.bit_length == 0) throw FormatError("container: empty ktree payload");
      break;
  }
}

}  // namespace

BitString pack_raw(const ColorMatrix& matrix) {
  BitString out;
  const bool wide = raw_width(matrix.colors()) == 2;
  out.bytes.reserve(matrix.cells().size() * (wide ? 2 : 1));
  for (Color c : matrix.cells()) {
    out.bytes.push_back(static_cast<std::uint8_t>(c & 0xFF));
    if (wide) out.bytes.push_back(static_cast<std::uint8_t>(c >> 8));
  }
  out.bit_length = out.bytes.size() * 8;
  return out;
}

ColorMatrix unpack_raw(const LayerRecord& record) {
  const unsigned m = record.colors();
  const std::size_t width = raw_width(m);
  const std::size_t cells = static_cast<std::size_t>(record.rows) * record.cols;
  if (record.payload.bit_length != cells * width * 8 || record.payload.bytes.size() != cells * width) {
    throw FormatError("container: raw payload size does not match shape");
  }
  std::vector<Color> out(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    unsigned v = record.payload.bytes[i * width];
    if (width == 2) v |= static_cast<unsigned>(record.payload.bytes[i * width + 1]) << 8;
    if (v > m) throw FormatError("container: raw color exceeds m");
    out[i] = static_cast<Color>(v);
  }
  return ColorMatrix(record.rows, record.cols, m, std::move(out));
}

LayerRecord raw_record(const ColorMatrix& matrix, const Codebook& codebook) {
  if (codebook.colors() != matrix.colors()) throw std::invalid_argument("raw_record: codebook/matrix color mismatch");
  return LayerRecord{static_cast<std::uint32_t>(matrix.rows()), static_cast<std::uint32_t>(matrix.cols()), codebook,
                     empirical_model(matrix), pack_raw(matrix)};
}

std::vector<std::uint8_t> serialize(const NetworkContainer& container) {
  if (container.layers.empty() || container.layers.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw std::invalid_argument("serialize: layer count out of range");
  }
  ByteWriter out;
  for (char ch : {'Q', 'N', 'N', 'C'}) out.put(static_cast<std::uint8_t>(ch));
  out.put(kContainerVersion);
  out.put(static_cast<std::uint8_t>(container.mode));
  out.put(static_cast<std::uint16_t>(container.layers.size()));
  for (const auto& rec : container.layers) {
    if (rec.model.colors() != rec.colors()) throw std::invalid_argument("serialize: model/codebook color mismatch");
    out.put(rec.rows);
    out.put(rec.cols);
    out.put(static_cast<std::uint16_t>(rec.colors()));
    for (double w : rec.codebook.weights()) out.put_f64(w);
    for (auto c : rec.model.counts()) out.put(c);
    out.put(rec.payload.bit_length);
    out.bytes(std::span(rec.payload.bytes).first((rec.payload.bit_length + 7) / 8));
  }
  return out.take();
}

NetworkContainer parse_container(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  const auto magic = in.bytes(4);
  if (magic[0] != 'Q' || magic[1] != 'N' || magic[2] != 'N' || magic[3] != 'C') {
    throw FormatError("container: bad magic");
  }
  if (in.get<std::uint16_t>() != kContainerVersion) throw FormatError("container: unsupported version");
  const auto mode = in.get<std::uint8_t>();
  if (mode > static_cast<std::uint8_t>(StorageMode::ktree)) throw FormatError("container: unknown mode");
  const auto k = in.get<std::uint16_t>();
  if (k == 0) throw FormatError("container: no layers");

  NetworkContainer out;
  out.mode = static_cast<StorageMode>(mode);
  for (unsigned l = 0; l < k; ++l) out.layers.push_back(parse_layer(in));
  if (in.remaining() != 0) throw FormatError("container: trailing bytes");
  check_layout(out);
  return out;
}

void write_container(const std::filesystem::path& path, const NetworkContainer& container) {
  const auto bytes = serialize(container);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

NetworkContainer read_container(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return parse_container(bytes);
}

}  // namespace qnnc
