#include "qnnc/plbg.hpp"

#include <algorithm>
#include <cmath>

#include "qnnc/arith.hpp"

namespace qnnc {

namespace detail {

std::vector<std::uint64_t> suffix_counts(const EdgeModel& model) {
  const auto& counts = model.counts();
  std::vector<std::uint64_t> suffix(counts.size() + 1, 0);
  for (std::size_t i = counts.size(); i-- > 0;) suffix[i] = suffix[i + 1] + counts[i];
  return suffix;
}

FrequencyTable child_table(const EdgeModel& model, const std::vector<std::uint64_t>& suffix,
                           std::uint32_t remaining, unsigned color) {
  if (suffix[color] == 0) return FrequencyTable::single(0);
  return binomial_table(remaining, model.counts()[color], suffix[color]);
}

}  // namespace detail

namespace {

constexpr std::uint64_t kMaxCells = std::uint64_t{1} << 31;

struct Node {
  std::uint32_t start;
  std::uint32_t count;
};

}  // namespace

void check_model_covers(const ColorMatrix& matrix, const EdgeModel& model) {
  if (model.colors() != matrix.colors()) throw FormatError("model/matrix color count mismatch");
  for (Color c : matrix.cells()) {
    if (model.counts()[c] == 0) throw FormatError("matrix uses a color with zero model probability");
  }
}

MultisetStats multiset_stats(const ColorMatrix& matrix, const EdgeModel& model) {
  check_model_covers(matrix, model);
  MultisetStats stats;
  for (auto& row : sorted_rows(matrix)) {
    if (!stats.rows.empty() && stats.rows.back() == row) {
      ++stats.multiplicity.back();
      continue;
    }
    double lp = 0.0;
    for (Color c : row) lp += std::log2(model.probability(c));
    stats.rows.push_back(std::move(row));
    stats.multiplicity.push_back(1);
    stats.log2_prob.push_back(lp);
  }
  return stats;
}

namespace {

double log2_factorial(std::uint64_t n) { return std::lgamma(static_cast<double>(n) + 1.0) / std::log(2.0); }

}  // namespace

double multiset_log_prob(const ColorMatrix& matrix, const EdgeModel& model) {
  const auto stats = multiset_stats(matrix, model);
  double log2_p = log2_factorial(matrix.rows());
  for (std::size_t i = 0; i < stats.rows.size(); ++i) {
    log2_p -= log2_factorial(stats.multiplicity[i]);
    log2_p += static_cast<double>(stats.multiplicity[i]) * stats.log2_prob[i];
  }
  return -log2_p;
}

BitString plbg_encode(const ColorMatrix& matrix, const EdgeModel& model) {
  if (matrix.rows() > kMaxPlbgRows) throw std::invalid_argument("plbg_encode: too many rows");
  check_model_covers(matrix, model);
  const auto canonical = canonical_sort_rows(matrix).first;
  const auto suffix = detail::suffix_counts(model);
  const unsigned m = model.colors();

  BitWriter out;
  elias_encode(out, canonical.rows());
  ArithEncoder enc(out);

  std::vector<Node> level{{0, static_cast<std::uint32_t>(canonical.rows())}};
  std::vector<Node> next;
  std::vector<std::uint32_t> split(m + 1);
  for (std::size_t d = 0; d < canonical.cols(); ++d) {
    next.clear();
    for (const Node& node : level) {
      std::fill(split.begin(), split.end(), 0);
      for (std::uint32_t r = node.start; r < node.start + node.count; ++r) ++split[canonical.at(r, d)];

      std::uint32_t remaining = node.count;
      for (unsigned i = 0; i < m && remaining > 0; ++i) {
        enc.encode(detail::child_table(model, suffix, remaining, i), split[i]);
        remaining -= split[i];
      }
      std::uint32_t start = node.start;
      for (unsigned i = 0; i <= m; ++i) {
        if (split[i] > 0) next.push_back({start, split[i]});
        start += split[i];
      }
    }
    level.swap(next);
  }
  enc.finish();
  return out.take();
}

ColorMatrix plbg_decode(const BitString& stream, const EdgeModel& model, std::size_t cols) {
  if (cols == 0) throw std::invalid_argument("plbg_decode: zero columns");
  BitReader in(stream);
  const std::uint64_t rows = elias_decode(in);
  if (rows == 0 || rows > kMaxPlbgRows || rows > kMaxCells / cols) {
    throw FormatError("plbg: implausible row count");
  }

  const auto suffix = detail::suffix_counts(model);
  const unsigned m = model.colors();
  ColorMatrix out(rows, cols, m);
  ArithDecoder dec(in);

  std::vector<Node> level{{0, static_cast<std::uint32_t>(rows)}};
  std::vector<Node> next;
  for (std::size_t d = 0; d < cols; ++d) {
    next.clear();
    for (const Node& node : level) {
      std::uint32_t remaining = node.count;
      std::uint32_t start = node.start;
      for (unsigned i = 0; i <= m && remaining > 0; ++i) {
        const std::uint32_t c = i < m ? dec.decode(detail::child_table(model, suffix, remaining, i)) : remaining;
        if (c > remaining) throw FormatError("plbg: child counts exceed parent");
        for (std::uint32_t r = start; r < start + c; ++r) out.set(r, d, static_cast<Color>(i));
        if (c > 0) next.push_back({start, c});
        start += c;
        remaining -= c;
      }
    }
    level.swap(next);
  }

  if (plbg_encode(out, model) != stream) throw FormatError("plbg: stream inconsistent with decoded tree");
  return out;
}

std::uint64_t plbg_arithmetic_bits(const BitString& stream) {
  BitReader in(stream);
  const std::uint64_t rows = elias_decode(in);
  return stream.bit_length - elias_length(rows);
}

}  // namespace qnnc
