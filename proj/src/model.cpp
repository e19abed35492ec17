#include "qnnc/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qnnc {

ColorMatrix::ColorMatrix(std::size_t rows, std::size_t cols, unsigned m)
    : ColorMatrix(rows, cols, m, std::vector<Color>(rows * cols, 0)) {}

ColorMatrix::ColorMatrix(std::size_t rows, std::size_t cols, unsigned m, std::vector<Color> cells)
    : rows_(rows), cols_(cols), m_(m), cells_(std::move(cells)) {
  if (rows == 0 || cols == 0) throw std::invalid_argument("ColorMatrix: empty shape");
  if (m == 0 || m > 0xFFFF) throw std::invalid_argument("ColorMatrix: m out of range");
  if (cells_.size() != rows * cols) throw std::invalid_argument("ColorMatrix: cell count mismatch");
  for (Color c : cells_) {
    if (c > m) throw std::invalid_argument("ColorMatrix: color exceeds m");
  }
}

ColorMatrix ColorMatrix::from_rows(const std::vector<std::vector<Color>>& rows, unsigned m) {
  if (rows.empty()) throw std::invalid_argument("ColorMatrix: empty shape");
  const std::size_t cols = rows.front().size();
  std::vector<Color> cells;
  cells.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw std::invalid_argument("ColorMatrix: ragged rows");
    cells.insert(cells.end(), r.begin(), r.end());
  }
  return ColorMatrix(rows.size(), cols, m, std::move(cells));
}

void ColorMatrix::set(std::size_t r, std::size_t c, Color v) {
  if (v > m_) throw std::invalid_argument("ColorMatrix: color exceeds m");
  cells_[r * cols_ + c] = v;
}

EdgeModel::EdgeModel(std::vector<std::uint64_t> counts) : counts_(std::move(counts)) {
  if (counts_.size() < 2) throw std::invalid_argument("EdgeModel: need at least two colors");
  total_ = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
  if (total_ == 0) throw std::invalid_argument("EdgeModel: zero total");
}

std::vector<double> EdgeModel::probabilities() const {
  std::vector<double> p(counts_.size());
  for (unsigned i = 0; i < counts_.size(); ++i) p[i] = probability(i);
  return p;
}

Codebook::Codebook(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.size() < 2) throw std::invalid_argument("Codebook: need at least two entries");
  if (weights_[0] != 0.0) throw std::invalid_argument("Codebook: entry 0 must be zero");
  for (double w : weights_) {
    if (!std::isfinite(w)) throw std::invalid_argument("Codebook: non-finite weight");
  }
}

Codebook Codebook::uniform(unsigned m, double half_range) {
  // Grid of m+1 points; the point closest to zero becomes color 0.
  std::vector<double> grid(m + 1);
  for (unsigned t = 0; t <= m; ++t) {
    grid[t] = -half_range + 2.0 * half_range * static_cast<double>(t) / static_cast<double>(m);
  }
  std::size_t drop = 0;
  for (std::size_t t = 1; t < grid.size(); ++t) {
    if (std::abs(grid[t]) < std::abs(grid[drop])) drop = t;
  }
  std::vector<double> w{0.0};
  for (std::size_t t = 0; t < grid.size(); ++t) {
    if (t != drop) w.push_back(grid[t]);
  }
  return Codebook(std::move(w));
}

RowPermutation::RowPermutation(std::vector<std::uint32_t> perm) : perm_(std::move(perm)) {
  std::vector<bool> seen(perm_.size(), false);
  for (auto v : perm_) {
    if (v >= perm_.size() || seen[v]) throw std::invalid_argument("RowPermutation: not a bijection");
    seen[v] = true;
  }
}

RowPermutation RowPermutation::identity(std::size_t n) {
  std::vector<std::uint32_t> p(n);
  std::iota(p.begin(), p.end(), 0u);
  return RowPermutation(std::move(p));
}

RowPermutation RowPermutation::inverse() const {
  std::vector<std::uint32_t> inv(perm_.size());
  for (std::uint32_t i = 0; i < perm_.size(); ++i) inv[perm_[i]] = i;
  return RowPermutation(std::move(inv));
}

std::pair<ColorMatrix, RowPermutation> canonical_sort_rows(const ColorMatrix& matrix) {
  std::vector<std::uint32_t> order(matrix.rows());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    auto ra = matrix.row(a);
    auto rb = matrix.row(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  });

  std::vector<Color> cells;
  cells.reserve(matrix.cells().size());
  std::vector<std::uint32_t> perm(matrix.rows());
  for (std::uint32_t pos = 0; pos < order.size(); ++pos) {
    auto r = matrix.row(order[pos]);
    cells.insert(cells.end(), r.begin(), r.end());
    perm[order[pos]] = pos;
  }
  return {ColorMatrix(matrix.rows(), matrix.cols(), matrix.colors(), std::move(cells)),
          RowPermutation(std::move(perm))};
}

ColorMatrix permute_columns(const ColorMatrix& matrix, const RowPermutation& perm) {
  if (perm.size() != matrix.cols()) throw std::invalid_argument("permute_columns: size mismatch");
  ColorMatrix out(matrix.rows(), matrix.cols(), matrix.colors());
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (std::size_t c = 0; c < matrix.cols(); ++c) out.set(r, perm[c], matrix.at(r, c));
  }
  return out;
}

ColorMatrix permute_rows(const ColorMatrix& matrix, const RowPermutation& perm) {
  if (perm.size() != matrix.rows()) throw std::invalid_argument("permute_rows: size mismatch");
  ColorMatrix out(matrix.rows(), matrix.cols(), matrix.colors());
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (std::size_t c = 0; c < matrix.cols(); ++c) out.set(perm[r], c, matrix.at(r, c));
  }
  return out;
}

EdgeModel empirical_model(const ColorMatrix& matrix) {
  std::vector<std::uint64_t> counts(matrix.colors() + 1, 0);
  for (Color c : matrix.cells()) ++counts[c];
  return EdgeModel(std::move(counts));
}

std::vector<std::vector<Color>> sorted_rows(const ColorMatrix& matrix) {
  std::vector<std::vector<Color>> rows;
  rows.reserve(matrix.rows());
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    auto s = matrix.row(r);
    rows.emplace_back(s.begin(), s.end());
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace qnnc
