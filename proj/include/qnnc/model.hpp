#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qnnc {

// Raised when a stream, container or model fails validation. Callers that
// accept untrusted bytes catch this; programming errors use std::invalid_argument.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Color = std::uint16_t;

// Adjacency view of one layer. Rows are the unlabeled destination nodes,
// columns the labeled source nodes; a cell holds a color in 0..m where
// color 0 means "no edge".
class ColorMatrix {
 public:
  ColorMatrix(std::size_t rows, std::size_t cols, unsigned m);
  ColorMatrix(std::size_t rows, std::size_t cols, unsigned m, std::vector<Color> cells);

  // Builds from nested rows; every row must have the same length.
  static ColorMatrix from_rows(const std::vector<std::vector<Color>>& rows, unsigned m);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  unsigned colors() const { return m_; }

  Color at(std::size_t r, std::size_t c) const { return cells_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, Color v);

  std::span<const Color> row(std::size_t r) const {
    return {cells_.data() + r * cols_, cols_};
  }
  const std::vector<Color>& cells() const { return cells_; }

  friend bool operator==(const ColorMatrix&, const ColorMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  unsigned m_;
  std::vector<Color> cells_;
};

// Color occurrence counts; p_i = counts[i] / total.
class EdgeModel {
 public:
  explicit EdgeModel(std::vector<std::uint64_t> counts);

  unsigned colors() const { return static_cast<unsigned>(counts_.size() - 1); }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t total() const { return total_; }
  double probability(unsigned color) const {
    return static_cast<double>(counts_[color]) / static_cast<double>(total_);
  }
  std::vector<double> probabilities() const;

  friend bool operator==(const EdgeModel&, const EdgeModel&) = default;

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

// Color index -> synaptic weight. Entry 0 is the zero weight.
class Codebook {
 public:
  explicit Codebook(std::vector<double> weights);

  // m nonzero levels on a uniform grid over [-half_range, half_range],
  // ordered from most negative to most positive.
  static Codebook uniform(unsigned m, double half_range = 0.16);

  unsigned colors() const { return static_cast<unsigned>(weights_.size() - 1); }
  double operator[](unsigned color) const { return weights_[color]; }
  const std::vector<double>& weights() const { return weights_; }

  friend bool operator==(const Codebook&, const Codebook&) = default;

 private:
  std::vector<double> weights_;
};

// perm[original_row] = canonical position.
class RowPermutation {
 public:
  RowPermutation() = default;
  explicit RowPermutation(std::vector<std::uint32_t> perm);

  static RowPermutation identity(std::size_t n);

  std::size_t size() const { return perm_.size(); }
  std::uint32_t operator[](std::size_t i) const { return perm_[i]; }
  const std::vector<std::uint32_t>& map() const { return perm_; }
  RowPermutation inverse() const;

  friend bool operator==(const RowPermutation&, const RowPermutation&) = default;

 private:
  std::vector<std::uint32_t> perm_;
};

// Sorts rows into ascending lexicographic order (color 0 smallest). The
// order is the one every plbg decoder reproduces.
std::pair<ColorMatrix, RowPermutation> canonical_sort_rows(const ColorMatrix& matrix);

// Moves column c to position perm[c]; used to keep the next layer's inputs
// aligned with a canonicalised previous layer.
ColorMatrix permute_columns(const ColorMatrix& matrix, const RowPermutation& perm);
ColorMatrix permute_rows(const ColorMatrix& matrix, const RowPermutation& perm);

EdgeModel empirical_model(const ColorMatrix& matrix);

// Rows as a sorted list, for order-insensitive comparisons.
std::vector<std::vector<Color>> sorted_rows(const ColorMatrix& matrix);

}  // namespace qnnc
