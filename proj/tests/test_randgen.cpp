#include <gtest/gtest.h>

#include <cmath>

#include "qnnc/randgen.hpp"

using namespace qnnc;

TEST(Rng, SeedDeterminism) {
  const GenSpec spec{20, 30, {0.5, 0.2, 0.3}, 99, GenKind::partially_labeled};
  EXPECT_EQ(gen_matrix(spec), gen_matrix(spec));
  GenSpec other = spec;
  other.seed = 100;
  EXPECT_NE(gen_matrix(other), gen_matrix(spec));
  EXPECT_EQ(gen_network(spec, {4, 5, 6}).layer(1).weights, gen_network(spec, {4, 5, 6}).layer(1).weights);
}

TEST(Rng, FrozenFirstDraws) {
  // mt19937_64 with the default seed produces this as its 10000th output.
  std::mt19937_64 ref;
  ref.discard(9999);
  EXPECT_EQ(ref(), 9981545732273789042ull);
  Rng a(5489);
  EXPECT_EQ(a.next(), std::mt19937_64(5489)());
}

TEST(Rng, SubstreamsDiffer) {
  Rng a = Rng::substream(1, 0), b = Rng::substream(1, 1), c = Rng::substream(1, 0);
  const auto x = a.next();
  EXPECT_NE(x, b.next());
  EXPECT_EQ(x, c.next());
}

TEST(Rng, BelowStaysInRange) {
  Rng rng(3);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 70000; ++i) ++hits[rng.below(7)];
  for (int h : hits) EXPECT_NEAR(h, 10000, 500);
}

TEST(GenMatrix, DegenerateDistributions) {
  const auto zeros = gen_matrix({8, 8, {1.0, 0.0}, 1, GenKind::labeled});
  for (auto c : zeros.cells()) EXPECT_EQ(c, 0);
  const auto ones = gen_matrix({8, 8, {0.0, 1.0}, 1, GenKind::labeled});
  for (auto c : ones.cells()) EXPECT_EQ(c, 1);
  const auto mid = gen_matrix({50, 50, {0.5, 0.0, 0.5}, 2, GenKind::partially_labeled});
  for (auto c : mid.cells()) EXPECT_NE(c, 1);
}

TEST(GenMatrix, OneFractionConcentrates) {
  const auto w = gen_matrix({64, 64, {0.5, 0.5}, 7, GenKind::labeled});
  double ones = 0;
  for (auto c : w.cells()) ones += c;
  EXPECT_NEAR(ones / w.cells().size(), 0.5, 0.02);
}

TEST(GenMatrix, ChiSquareSanity) {
  const std::vector<double> p{0.4, 0.3, 0.2, 0.1};
  const auto w = gen_matrix({200, 100, p, 13, GenKind::partially_labeled});
  std::vector<double> counts(p.size(), 0.0);
  for (auto c : w.cells()) counts[c] += 1;
  double chi2 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double e = p[i] * 20000;
    chi2 += (counts[i] - e) * (counts[i] - e) / e;
  }
  EXPECT_LT(chi2, 16.27);  // 0.999 quantile, 3 degrees of freedom
}

TEST(GenSpec, Validation) {
  EXPECT_THROW(validate({2, 2, {0.5, 0.6}, 0, GenKind::labeled}), std::invalid_argument);
  EXPECT_THROW(validate({2, 2, {-0.5, 1.5}, 0, GenKind::labeled}), std::invalid_argument);
  EXPECT_THROW(validate({2, 2, {1.0}, 0, GenKind::labeled}), std::invalid_argument);
  EXPECT_THROW(validate({2, 3, {0.5, 0.5}, 0, GenKind::unlabeled}), std::invalid_argument);
  EXPECT_THROW(validate({2, 2, {0.5, 0.25, 0.25}, 0, GenKind::unlabeled}), std::invalid_argument);
  EXPECT_NO_THROW(validate({3, 3, {0.5, 0.5}, 0, GenKind::unlabeled}));
}

TEST(GenSpec, ProbabilityText) {
  EXPECT_EQ(parse_probs("0.5,0.25,0.25"), (std::vector<double>{0.5, 0.25, 0.25}));
  EXPECT_THROW(parse_probs("0.5,,0.5"), std::invalid_argument);
  EXPECT_THROW(parse_probs("0.5;0.5"), std::invalid_argument);
  const std::vector<double> p{0.1, 0.7, 0.2};
  EXPECT_EQ(parse_probs(format_probs(p)), p);
  EXPECT_EQ(parse_gen_kind(gen_kind_name(GenKind::unlabeled)), GenKind::unlabeled);
}

TEST(GenNetwork, ShapesAndCodebooks) {
  const auto net = gen_network({1, 1, {0.5, 0.25, 0.25}, 4, GenKind::network}, {6, 5, 3});
  ASSERT_EQ(net.depth(), 2u);
  EXPECT_EQ(net.layer(0).weights.rows(), 5u);
  EXPECT_EQ(net.layer(0).weights.cols(), 6u);
  EXPECT_EQ(net.layer(1).weights.rows(), 3u);
  EXPECT_EQ(net.layer(1).codebook, Codebook::uniform(2));
}
