#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "oracle.hpp"
#include "qnnc/container.hpp"
#include "qnnc/network.hpp"
#include "qnnc/plbg.hpp"
#include "qnnc/randgen.hpp"
#include "qnnc/ubg.hpp"

using namespace qnnc;

namespace {

std::vector<double> random_vector(std::size_t n, Rng& rng) {
  std::vector<double> x(n);
  for (auto& v : x) v = 2.0 * rng.uniform() - 1.0;
  return x;
}

std::vector<double> random_probs(unsigned m, Rng& rng) {
  std::vector<double> p(m + 1);
  double sum = 0.0;
  for (auto& v : p) sum += (v = rng.uniform() + 0.05);
  for (auto& v : p) v /= sum;
  return p;
}

QuantizedNetwork random_net(const std::vector<std::size_t>& widths, unsigned m, Rng& rng) {
  GenSpec spec;
  spec.probs = random_probs(m, rng);
  spec.seed = rng.next();
  return gen_network(spec, widths);
}

std::vector<std::uint32_t> shuffled(std::size_t n, Rng& rng) {
  std::vector<std::uint32_t> v(n);
  std::iota(v.begin(), v.end(), 0u);
  for (std::size_t i = n; i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
  return v;
}

void expect_near(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol) << i;
}

}  // namespace

TEST(Network, ChainIsValidated) {
  const auto cb = Codebook::uniform(1);
  EXPECT_THROW(QuantizedNetwork({}), std::invalid_argument);
  EXPECT_THROW(QuantizedNetwork({{ColorMatrix(3, 2, 1), cb}, {ColorMatrix(2, 4, 1), cb}}), std::invalid_argument);
  EXPECT_THROW(QuantizedNetwork({{ColorMatrix(3, 2, 2), cb}}), std::invalid_argument);
}

TEST(Network, SingleMatrixIsStoredRaw) {
  Rng rng(1);
  const auto net = random_net({5, 4}, 3, rng);
  const auto c = compress_network_plbg(net);
  ASSERT_EQ(c.layers.size(), 1u);
  EXPECT_EQ(unpack_raw(c.layers[0]), net.layer(0).weights);
  EXPECT_EQ(serialize(parse_container(serialize(c))), serialize(c));
  EXPECT_EQ(decompress_network(c).layer(0).weights, net.layer(0).weights);
}

TEST(Network, TwoMatricesGiveOnePlbgPayload) {
  Rng rng(2);
  const auto net = random_net({7, 6, 3}, 4, rng);
  const auto c = compress_network_plbg(net);
  ASSERT_EQ(c.layers.size(), 2u);
  const auto sorted = canonical_sort_rows(net.layer(0).weights);
  EXPECT_EQ(c.layers[0].payload, plbg_encode(sorted.first, empirical_model(sorted.first)));
  EXPECT_EQ(unpack_raw(c.layers[1]), permute_columns(net.layer(1).weights, sorted.second));
}

TEST(Network, ThreeLayerInferenceMatchesOracle) {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto net = random_net({6, 5, 4, 3}, 4, rng);
    const auto c = compress_network_plbg(net);
    const auto x = random_vector(6, rng);
    NetworkInferenceStats stats;
    const auto y = infer_network(c, x, Activation::relu, Activation::identity, &stats);
    expect_near(y, oracle::forward(net, x, Activation::relu, Activation::identity), 1e-9);
    ASSERT_EQ(stats.streams_out.size(), 2u);
    for (std::size_t l = 0; l < 2; ++l) EXPECT_EQ(stats.streams_out[l], c.layers[l].payload);
  }
}

TEST(Network, ArgmaxAgreesOnDeeperNets) {
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    std::vector<std::size_t> widths(5);
    for (auto& w : widths) w = 1 + rng.below(24);
    const auto net = random_net(widths, 1 + static_cast<unsigned>(rng.below(16)), rng);
    const auto x = random_vector(widths[0], rng);
    const auto y = infer_network(compress_network_plbg(net), x, Activation::sigmoid, Activation::softmax);
    const auto ref = oracle::forward(net, x, Activation::sigmoid, Activation::softmax);
    expect_near(y, ref, 1e-9);
    EXPECT_EQ(oracle::argmax(y), oracle::argmax(ref));
  }
}

TEST(Network, AllZeroNetwork) {
  const auto cb = Codebook::uniform(2);
  const QuantizedNetwork net({{ColorMatrix(4, 3, 2), cb}, {ColorMatrix(5, 4, 2), cb}, {ColorMatrix(2, 5, 2), cb}});
  const auto y = infer_network(compress_network_plbg(net), std::vector<double>{1, 2, 3}, Activation::identity,
                               Activation::identity);
  EXPECT_EQ(y, (std::vector<double>{0.0, 0.0}));
}

TEST(Network, IdentityLayersPreserveOutputOrder) {
  const Codebook one({0.0, 1.0});
  ColorMatrix eye(4, 4, 1);
  for (std::size_t i = 0; i < 4; ++i) eye.set(i, i, 1);
  const QuantizedNetwork net({{eye, one}, {eye, one}});
  const std::vector<double> x{0.5, -1.0, 2.0, 0.25};
  EXPECT_EQ(infer_network(compress_network_plbg(net), x, Activation::identity, Activation::identity), x);
}

TEST(Network, HiddenPermutationLeavesPayloadsUnchanged) {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const auto net = random_net({8, 10, 9, 4}, 3, rng);
    const auto base = compress_network_plbg(net);
    // Relabel hidden layer 1 (rows of W0, columns of W1) consistently.
    const RowPermutation perm(shuffled(10, rng));
    const QuantizedNetwork moved({{permute_rows(net.layer(0).weights, perm), net.layer(0).codebook},
                                  {permute_columns(net.layer(1).weights, perm), net.layer(1).codebook},
                                  net.layer(2)});
    const auto other = compress_network_plbg(moved);
    EXPECT_EQ(other.layers[0].payload, base.layers[0].payload);
    EXPECT_EQ(other.layers[1].payload, base.layers[1].payload);
  }
}

TEST(Network, DecompressIsFunctionallyEquivalent) {
  Rng rng(6);
  const auto net = random_net({9, 7, 7, 5}, 6, rng);
  const auto back = decompress_network(compress_network_plbg(net));
  const auto x = random_vector(9, rng);
  expect_near(dense_forward(back, x, Activation::relu, Activation::identity),
              oracle::forward(net, x, Activation::relu, Activation::identity), 1e-9);
}

TEST(Container, RoundTripIsByteExact) {
  Rng rng(7);
  for (int t = 0; t < 30; ++t) {
    const auto net = random_net({1 + rng.below(9), 1 + rng.below(9), 1 + rng.below(9)},
                                t % 3 == 0 ? 300 : 1 + static_cast<unsigned>(rng.below(16)), rng);
    for (const auto& c : {raw_container(net), compress_network_plbg(net)}) {
      const auto bytes = serialize(c);
      const auto parsed = parse_container(bytes);
      EXPECT_EQ(parsed, c);
      EXPECT_EQ(serialize(parsed), bytes);
    }
  }
}

TEST(Container, HeaderLayout) {
  const Codebook cb({0.0, 0.5});
  const QuantizedNetwork net({{ColorMatrix::from_rows({{1, 0}}, 1), cb}});
  const auto bytes = serialize(raw_container(net));
  const std::vector<std::uint8_t> head{'Q', 'N', 'N', 'C', 1, 0, 0, 1, 0, 1, 0, 0, 0, 2, 0, 0, 0, 1, 0};
  ASSERT_GE(bytes.size(), head.size());
  EXPECT_TRUE(std::equal(head.begin(), head.end(), bytes.begin()));
  // 19 header bytes, 2 codebook doubles, 2 counts, payload_bits, 2 payload bytes.
  EXPECT_EQ(bytes.size(), 19u + 16 + 16 + 8 + 2);
  EXPECT_EQ(bytes[bytes.size() - 2], 1);
  EXPECT_EQ(bytes[bytes.size() - 1], 0);
}

TEST(Container, WideColorsUseTwoBytes) {
  ColorMatrix w(1, 2, 300);
  w.set(0, 1, 299);
  const auto bits = pack_raw(w);
  EXPECT_EQ(bits.bytes, (std::vector<std::uint8_t>{0, 0, 43, 1}));
}

TEST(Container, CorruptInputNeverCrashes) {
  Rng rng(8);
  const auto net = random_net({6, 5, 4}, 4, rng);
  const auto bytes = serialize(compress_network_plbg(net));
  for (std::size_t cut = 0; cut < bytes.size(); ++cut) {
    EXPECT_THROW(parse_container(std::span(bytes).first(cut)), FormatError) << cut;
  }
  auto longer = bytes;
  longer.push_back(0);
  EXPECT_THROW(parse_container(longer), FormatError);
  for (int t = 0; t < 2000; ++t) {
    auto bad = bytes;
    const auto n = 1 + rng.below(4);
    for (std::uint64_t i = 0; i < n; ++i) bad[rng.below(bad.size())] ^= static_cast<std::uint8_t>(1 + rng.below(255));
    try {
      const auto c = parse_container(bad);
      infer_network(c, std::vector<double>(c.layers.front().cols, 1.0), Activation::relu, Activation::identity);
      decompress_network(c);
    } catch (const FormatError&) {
    }
  }
}

TEST(Container, ModeSpecificChecks) {
  Rng rng(9);
  const auto net = random_net({4, 4, 4}, 1, rng);
  auto c = compress_network_plbg(net);
  c.mode = StorageMode::raw;
  EXPECT_THROW(parse_container(serialize(c)), FormatError);
  auto k = compress_network_ktree(net);
  k.layers[1].payload = k.layers[0].payload;
  EXPECT_THROW(parse_container(serialize(k)), FormatError);

  // Counts must be the layer histogram; a grown dimension breaks that.
  auto wide = compress_network_plbg(net);
  wide.layers[0].cols *= 1000;
  EXPECT_THROW(parse_container(serialize(wide)), FormatError);
  auto shifted = raw_container(net);
  auto counts = shifted.layers[1].model.counts();
  if (counts[0] > 0) {
    --counts[0];
    ++counts[1];
  } else {
    ++counts[0];
    --counts[1];
  }
  shifted.layers[1].model = EdgeModel(counts);
  EXPECT_THROW(parse_container(serialize(shifted)), FormatError);
}

TEST(Container, FileRoundTrip) {
  Rng rng(10);
  const auto c = compress_network_plbg(random_net({5, 5, 2}, 2, rng));
  const auto path = std::filesystem::temp_directory_path() / "qnnc_container_test.qnnc";
  write_container(path, c);
  EXPECT_EQ(read_container(path), c);
  std::filesystem::remove(path);
}

TEST(Ktree, RequiresSquareBinaryLayers) {
  Rng rng(11);
  EXPECT_THROW(compress_network_ktree(random_net({4, 5}, 1, rng)), std::invalid_argument);
  EXPECT_THROW(compress_network_ktree(random_net({4, 4}, 2, rng)), std::invalid_argument);
}

TEST(Ktree, TwoNodeLayersFormTheTwoTreeStructure) {
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    const auto net = random_net({8, 8}, 1, rng);
    const auto trees = ktree_trees(net);
    ASSERT_EQ(trees.size(), 2u);
    // Input nodes (columns) are selected before their tree is divided; output
    // nodes (rows) are divided first.
    EXPECT_EQ(trees[0][0].removed, 1u);
    EXPECT_EQ(trees[1][0].removed, 0u);
    EXPECT_FALSE(trees[1][0].is_leaf());
    for (const auto& tree : trees) {
      EXPECT_EQ(tree[0].value, 8u);
      for (const auto& node : tree) {
        if (!node.is_leaf()) {
          EXPECT_EQ(tree[node.left].value + tree[node.right].value, node.value - node.removed);
      }
      }
    }
  }
}

TEST(Ktree, AllZeroNetworkGivesLeftOnlyChains) {
  const Codebook cb({0.0, 1.0});
  const QuantizedNetwork net({{ColorMatrix(5, 5, 1), cb}, {ColorMatrix(5, 5, 1), cb}});
  for (const auto& tree : ktree_trees(net)) {
    for (const auto& node : tree) {
      if (!node.is_leaf()) {
        EXPECT_EQ(tree[node.right].value, 0u);
      }
    }
  }
  const auto c = compress_network_ktree(net);
  const std::vector<double> x{1, 2, 3, 4, 5};
  EXPECT_EQ(infer_network(c, x, Activation::identity, Activation::identity), std::vector<double>(5, 0.0));
}

TEST(Ktree, EndToEndFunctionIsPreserved) {
  Rng rng(13);
  for (int t = 0; t < 50; ++t) {
    const auto net = random_net({8, 8, 8}, 1, rng);
    const auto c = parse_container(serialize(compress_network_ktree(net)));
    const auto back = decompress_ktree(c);
    for (int v = 0; v < 3; ++v) {
      const auto x = random_vector(8, rng);
      expect_near(dense_forward(back, x, Activation::relu, Activation::identity),
                  oracle::forward(net, x, Activation::relu, Activation::identity), 1e-9);
    }
    // Each hidden layer is the same bipartite graph up to relabelling.
    for (std::size_t l = 0; l < 2; ++l) {
      EXPECT_TRUE(bipartite_iso(BinaryAdjacency::from_colors(back.layer(l).weights),
                                BinaryAdjacency::from_colors(net.layer(l).weights)));
    }
  }
}

TEST(Ktree, SavesAgainstLabeledCoding) {
  Rng rng(14);
  double total = 0.0, labeled = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto net = random_net({16, 16, 16, 16}, 1, rng);
    total += static_cast<double>(compress_network_ktree(net).layers[0].payload.bit_length);
    for (const auto& L : net.layers()) {
      const auto p = empirical_model(L.weights).probabilities();
      double h = 0.0;
      for (double v : p) h -= v > 0 ? v * std::log2(v) : 0.0;
      labeled += 256.0 * h;
    }
  }
  EXPECT_LT(total, labeled);
}

TEST(Ktree, RejectsCorruptPayload) {
  Rng rng(15);
  const auto c = compress_network_ktree(random_net({6, 6, 6}, 1, rng));
  const auto& s = c.layers[0].payload;
  for (std::uint64_t bit = 0; bit < s.bit_length; ++bit) {
    auto bad = c;
    bad.layers[0].payload.bytes[bit / 8] ^= static_cast<std::uint8_t>(0x80u >> (bit % 8));
    try {
      decompress_ktree(bad);
    } catch (const FormatError&) {
    }
  }
}
