#pragma once

#include <cstdint>
#include <vector>

#include "qnnc/arith.hpp"
#include "qnnc/bitio.hpp"
#include "qnnc/model.hpp"

namespace qnnc {

// Distinct rows of a matrix with their multiplicities k_i and the log2
// probability of each row under the edge model.
struct MultisetStats {
  std::vector<std::vector<Color>> rows;
  std::vector<std::uint64_t> multiplicity;
  std::vector<double> log2_prob;
};

MultisetStats multiset_stats(const ColorMatrix& matrix, const EdgeModel& model);

// -log2 of the probability of the matrix's row multiset:
// N! / prod(k_i!) * prod(pi_i^k_i). Throws FormatError if a present color has
// zero probability.
double multiset_log_prob(const ColorMatrix& matrix, const EdgeModel& model);

// Binomial tables keep 2^30 total precision up to this many trials.
inline constexpr std::size_t kMaxPlbgRows = 32766;

// Stream: elias(N) then the arithmetic-coded child counts of the (m+1)-ary
// count tree, breadth first, colors 0..m, last child of each node implied.
BitString plbg_encode(const ColorMatrix& matrix, const EdgeModel& model);

// Returns the rows in canonical (ascending lexicographic) order. The decoded
// tree is re-encoded and compared against the input, so corrupt or
// truncated streams raise FormatError instead of yielding a wrong matrix.
ColorMatrix plbg_decode(const BitString& stream, const EdgeModel& model, std::size_t cols);

// Bits after the elias(N) prefix.
std::uint64_t plbg_arithmetic_bits(const BitString& stream);

// Throws FormatError when the matrix uses a color the model gives zero mass,
// or when the model and matrix disagree on m.
void check_model_covers(const ColorMatrix& matrix, const EdgeModel& model);

namespace detail {

// Chained-binomial split of a node across colors 0..m: the count for color i
// is Binomial(remaining, p_i / (p_i + ... + p_m)); color m takes the rest.
// Encoder, decoder and the inference engine all build tables through here.
std::vector<std::uint64_t> suffix_counts(const EdgeModel& model);
FrequencyTable child_table(const EdgeModel& model, const std::vector<std::uint64_t>& suffix,
                           std::uint32_t remaining, unsigned color);

}  // namespace detail

}  // namespace qnnc
