#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "oracle.hpp"
#include "qnnc/arith.hpp"
#include "qnnc/plbg.hpp"
#include "qnnc/randgen.hpp"

using namespace qnnc;

namespace {

const EdgeModel kHalf({1, 1});

ColorMatrix M(const std::vector<std::vector<Color>>& rows, unsigned m) { return ColorMatrix::from_rows(rows, m); }

std::vector<double> probs_of(const EdgeModel& model) { return model.probabilities(); }

}  // namespace

TEST(Plbg, SmallestInstance) {
  const auto w = M({{0}}, 1);
  const auto s = plbg_encode(w, kHalf);
  BitReader in(s);
  EXPECT_EQ(elias_decode(in), 1u);
  EXPECT_EQ(plbg_decode(s, kHalf, 1), w);
}

TEST(Plbg, DecodeReturnsCanonicalOrder) {
  EXPECT_EQ(plbg_decode(plbg_encode(M({{0}, {1}}, 1), kHalf), kHalf, 1), M({{0}, {1}}, 1));
  EXPECT_EQ(plbg_decode(plbg_encode(M({{1}, {0}}, 1), kHalf), kHalf, 1), M({{0}, {1}}, 1));
}

TEST(MultisetLogProb, HandValues) {
  EXPECT_NEAR(multiset_log_prob(M({{1}, {0}}, 1), kHalf), 1.0, 1e-12);
  EXPECT_NEAR(multiset_log_prob(M({{1}, {1}}, 1), kHalf), 2.0, 1e-12);
  // One row of M uniform colors over m+1 values.
  const EdgeModel uniform4({1, 1, 1, 1});
  EXPECT_NEAR(multiset_log_prob(M({{3, 0, 2, 1, 1}}, 3), uniform4), 5 * 2.0, 1e-12);
}

TEST(MultisetLogProb, MatchesEnumerationOracle) {
  Rng rng(77);
  const EdgeModel model({3, 1, 2});
  for (int t = 0; t < 40; ++t) {
    const auto rows = 1 + rng.below(4);
    const auto cols = 1 + rng.below(3);
    if (rows * cols > 8) continue;
    const auto w = gen_matrix(rows, cols, probs_of(model), rng);
    EXPECT_NEAR(multiset_log_prob(w, model), oracle::multiset_bits_by_enumeration(w, probs_of(model)), 1e-9);
  }
}

TEST(MultisetLogProb, ZeroProbabilityColorIsModelMismatch) {
  EXPECT_THROW(multiset_log_prob(M({{1}}, 1), EdgeModel({1, 0})), FormatError);
  EXPECT_THROW(plbg_encode(M({{1}}, 1), EdgeModel({1, 0})), FormatError);
  EXPECT_THROW(plbg_encode(M({{1}}, 1), EdgeModel({1, 1, 1})), FormatError);
}

TEST(Plbg, ArithmeticPortionOfWorkedExample) {
  // Split (1, 1) of two rows at p = 1/2 has probability 1/2.
  const auto s = plbg_encode(M({{1}, {0}}, 1), kHalf);
  EXPECT_LE(plbg_arithmetic_bits(s), 1u + kTerminationBudget);
  EXPECT_EQ(s.bit_length, plbg_arithmetic_bits(s) + elias_length(2));
}

TEST(Plbg, RandomRoundTripRateAndInvariance) {
  Rng rng(99);
  for (int t = 0; t < 500; ++t) {
    const auto rows = 1 + rng.below(8);
    const auto cols = 1 + rng.below(8);
    const unsigned m = 1 + static_cast<unsigned>(rng.below(4));
    std::vector<double> p(m + 1);
    for (auto& v : p) v = 0.1 + rng.uniform();
    const double sum = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& v : p) v /= sum;
    const auto w = gen_matrix(rows, cols, p, rng);
    const auto model = empirical_model(w);
    const auto s = plbg_encode(w, model);
    ASSERT_EQ(oracle::rows_sorted(plbg_decode(s, model, cols)), oracle::rows_sorted(w));
    ASSERT_LE(static_cast<double>(plbg_arithmetic_bits(s)), multiset_log_prob(w, model) + kTerminationBudget);

    std::vector<std::uint32_t> perm(rows);
    std::iota(perm.begin(), perm.end(), 0u);
    for (std::size_t i = rows; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    ASSERT_EQ(plbg_encode(permute_rows(w, RowPermutation(perm)), model), s);
  }
}

TEST(Plbg, RejectsCorruptStreams) {
  Rng rng(8);
  const auto w = gen_matrix(12, 6, {0.5, 0.3, 0.2}, rng);
  const auto model = empirical_model(w);
  const auto s = plbg_encode(w, model);
  for (std::uint64_t bit = 0; bit < s.bit_length; ++bit) {
    auto bad = s;
    bad.bytes[bit / 8] ^= static_cast<std::uint8_t>(0x80u >> (bit % 8));
    try {
      // A flip may land on another valid stream; it must then be that matrix's exact encoding.
      const auto out = plbg_decode(bad, model, 6);
      EXPECT_EQ(plbg_encode(out, model), bad) << bit;
      EXPECT_NE(out, canonical_sort_rows(w).first) << bit;
    } catch (const FormatError&) {
    }
  }
  auto cut = s;
  cut.bit_length -= 5;
  EXPECT_THROW(plbg_decode(cut, model, 6), FormatError);
}

TEST(Plbg, WrongColumnCountIsDetected) {
  const auto w = M({{0, 1, 1}, {1, 1, 0}}, 1);
  const auto s = plbg_encode(w, kHalf);
  EXPECT_THROW(plbg_decode(s, kHalf, 4), FormatError);
}
