// qnnc: compress, inspect and run quantized feedforward networks.
#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "qnnc/bench.hpp"
#include "qnnc/bounds.hpp"
#include "qnnc/container.hpp"
#include "qnnc/network.hpp"
#include "qnnc/plbg.hpp"
#include "qnnc/randgen.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitFormat = 2;
constexpr int kExitVerify = 3;

struct VerificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> read_vector(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw qnnc::FormatError("cannot open " + path);
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string item = line.substr(first, last - first + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || !std::isfinite(v)) {
      throw qnnc::FormatError(path + ":" + std::to_string(lineno) + ": not a number");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<std::size_t> parse_dims(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || v == 0) throw std::invalid_argument("bad width in --dims: '" + item + "'");
    out.push_back(v);
  }
  if (out.size() < 2) throw std::invalid_argument("--dims needs at least two widths");
  return out;
}

void print_layers(const qnnc::NetworkContainer& c) {
  std::printf("layer,shape,m,storage,payload_bits,table_bound_bits\n");
  for (std::size_t l = 0; l < c.layers.size(); ++l) {
    const auto& rec = c.layers[l];
    const char* storage = "raw";
    if (c.mode == qnnc::StorageMode::plbg && l + 1 < c.layers.size()) storage = "plbg";
    if (c.mode == qnnc::StorageMode::ktree) storage = "ktree";
    const double bound = qnnc::table_bound(rec.rows, rec.cols, rec.model.probabilities());
    std::printf("%zu,%ux%u,%u,%s,%llu,%.1f\n", l, rec.cols, rec.rows, rec.colors(), storage,
                static_cast<unsigned long long>(rec.payload.bit_length), bound);
  }
}

int cmd_compress(const std::string& in, const std::string& out, const std::string& mode) {
  const auto raw = qnnc::read_container(in);
  if (raw.mode != qnnc::StorageMode::raw) throw std::invalid_argument("compress expects a raw container");
  const auto net = qnnc::network_from_container(raw);
  const auto packed = mode == "ktree" ? qnnc::compress_network_ktree(net) : qnnc::compress_network_plbg(net);
  qnnc::write_container(out, packed);
  print_layers(packed);
  return 0;
}

int cmd_decompress(const std::string& in, const std::string& out) {
  const auto c = qnnc::read_container(in);
  qnnc::write_container(out, qnnc::raw_container(qnnc::decompress_network(c)));
  return 0;
}

int cmd_infer(const std::string& model, const std::string& input, const std::string& hidden,
              const std::string& final, bool argmax, bool stats) {
  const auto c = qnnc::read_container(model);
  const auto x = read_vector(input);
  if (x.size() != c.layers.front().cols) {
    throw qnnc::FormatError("input has " + std::to_string(x.size()) + " values, network expects " +
                            std::to_string(c.layers.front().cols));
  }
  qnnc::NetworkInferenceStats st;
  const auto y = qnnc::infer_network(c, x, qnnc::parse_activation(hidden), qnnc::parse_activation(final), &st);
  if (argmax) {
    std::printf("%td\n", std::max_element(y.begin(), y.end()) - y.begin());
  } else {
    for (double v : y) std::printf("%.17g\n", v);
  }
  if (stats) {
    for (std::size_t l = 0; l < st.queues.size(); ++l) {
      const auto& q = st.queues[l];
      std::fprintf(stderr, "layer %zu: avg_queue_bits=%.1f max_queue_bits=%llu queue_bound_bits=%.1f\n", l, q.avg_bits,
                   static_cast<unsigned long long>(q.max_bits),
                   qnnc::queue_space_bound(c.layers[l].rows, c.layers[l].colors()));
    }
  }
  return 0;
}

int cmd_entropy(std::size_t rows, std::size_t cols, const std::string& probs, std::uint64_t trials,
                std::uint64_t seed) {
  const auto p = qnnc::parse_probs(probs);
  std::fputs(qnnc::bound_report(rows, cols, p, trials, seed).to_text().c_str(), stdout);
  return 0;
}

int cmd_bench(const qnnc::BenchConfig& cfg, const std::string& csv) {
  const auto rows = qnnc::run_bench(cfg);
  std::ofstream f;
  std::ostream* out = &std::cout;
  if (!csv.empty()) {
    f.open(csv);
    if (!f) throw std::runtime_error("cannot open " + csv + " for writing");
    out = &f;
  }
  out->precision(10);
  qnnc::write_csv_header(*out);
  for (const auto& r : rows) qnnc::write_csv_row(*out, r, cfg.seed);

  const auto n = static_cast<double>(rows.size());
  auto mean = [&](auto field) {
    return std::accumulate(rows.begin(), rows.end(), 0.0, [&](double s, const auto& r) { return s + field(r); }) / n;
  };
  const bool ok = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.verified; });
  if (!csv.empty()) {
    std::printf("trials=%zu rng=%s seed=%llu\n", rows.size(), std::string(qnnc::kRngName).c_str(),
                static_cast<unsigned long long>(cfg.seed));
    std::printf("mean_observed_bits=%.2f\n", mean([](const auto& r) { return double(r.observed_bits); }));
    std::printf("mean_ideal_bits=%.2f\n", mean([](const auto& r) { return r.ideal_bits; }));
    std::printf("mean_table_bound_bits=%.2f\n", mean([](const auto& r) { return r.table_bound_bits; }));
    std::printf("mean_pct_pmf=%.1f mean_pct_coding=%.1f\n", mean([](const auto& r) { return r.pct_pmf; }),
                mean([](const auto& r) { return r.pct_coding; }));
    std::printf("verified=%s\n", ok ? "true" : "false");
  }
  if (!ok) throw VerificationFailure("compressed inference disagrees with the dense product");
  return 0;
}

int cmd_gen(const qnnc::GenSpec& spec, const std::string& dims, const std::string& out) {
  qnnc::validate(spec);
  const auto m = static_cast<unsigned>(spec.probs.size() - 1);
  if (!dims.empty()) {
    qnnc::write_container(out, qnnc::raw_container(qnnc::gen_network(spec, parse_dims(dims))));
    return 0;
  }
  const qnnc::QuantizedNetwork net({{qnnc::gen_matrix(spec), qnnc::Codebook::uniform(m)}});
  qnnc::write_container(out, qnnc::raw_container(net));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lossless compression and compressed-domain inference for quantized feedforward networks"};
  app.require_subcommand(1);

  std::string in, out, mode = "plbg";
  auto* compress = app.add_subcommand("compress", "Compress a raw network container");
  compress->add_option("--in", in, "Raw QNNC network")->required();
  compress->add_option("--out", out, "Compressed container")->required();
  compress->add_option("--mode", mode, "plbg or ktree")->check(CLI::IsMember({"plbg", "ktree"}));

  auto* decompress = app.add_subcommand("decompress", "Expand a container to raw form");
  decompress->add_option("--in", in, "Container")->required();
  decompress->add_option("--out", out, "Raw QNNC network")->required();

  std::string input, hidden = "identity", final = "identity";
  bool argmax = false, stats = false;
  auto* infer = app.add_subcommand("infer", "Run inference on a container");
  infer->add_option("--model", in, "Container")->required();
  infer->add_option("--input", input, "Input vector, one number per line")->required();
  infer->add_option("--activation", hidden, "Hidden activation")
      ->check(CLI::IsMember({"relu", "sigmoid", "identity"}));
  infer->add_option("--final", final, "Output activation")->check(CLI::IsMember({"softmax", "identity"}));
  infer->add_flag("--argmax", argmax, "Print the index of the largest output");
  infer->add_flag("--stats", stats, "Report queue statistics on stderr");

  qnnc::GenSpec spec;
  std::string probs = "0.5,0.5", kind = "partially-labeled", dims, csv;
  std::uint64_t trials = 1000;
  auto add_spec = [&](CLI::App* cmd) {
    cmd->add_option("--rows", spec.rows, "N, destination nodes")->check(CLI::PositiveNumber);
    cmd->add_option("--cols", spec.cols, "M, source nodes")->check(CLI::PositiveNumber);
    cmd->add_option("--probs", probs, "Color probabilities p0,p1,...");
    cmd->add_option("--seed", spec.seed, "Seed");
  };

  auto* entropy = app.add_subcommand("entropy", "Print every bound for a random model");
  add_spec(entropy);
  entropy->add_option("--mc-trials", trials, "Monte-Carlo trials")->check(CLI::PositiveNumber);

  auto* bench = app.add_subcommand("bench", "Generate, compress, infer and verify random layers");
  add_spec(bench);
  bench->add_option("--trials", trials, "Trials")->check(CLI::PositiveNumber);
  bench->add_option("--csv", csv, "CSV output (stdout when omitted)");

  auto* gen = app.add_subcommand("gen", "Write a random raw network container");
  add_spec(gen);
  gen->add_option("--kind", kind, "labeled, partially-labeled, unlabeled or network");
  gen->add_option("--dims", dims, "Layer widths w0,w1,...; overrides --rows/--cols");
  gen->add_option("--out", out, "Raw QNNC file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*compress) return cmd_compress(in, out, mode);
    if (*decompress) return cmd_decompress(in, out);
    if (*infer) return cmd_infer(in, input, hidden, final, argmax, stats);
    spec.probs = qnnc::parse_probs(probs);
    spec.kind = qnnc::parse_gen_kind(kind);
    if (*entropy) return cmd_entropy(spec.rows, spec.cols, probs, trials, spec.seed);
    if (*bench) return cmd_bench({spec.rows, spec.cols, spec.probs, trials, spec.seed}, csv);
    if (*gen) return cmd_gen(spec, dims, out);
  } catch (const VerificationFailure& e) {
    std::fprintf(stderr, "qnnc: verification failed: %s\n", e.what());
    return kExitVerify;
  } catch (const qnnc::FormatError& e) {
    std::fprintf(stderr, "qnnc: %s\n", e.what());
    return kExitFormat;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "qnnc: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "qnnc: %s\n", e.what());
    return kExitFormat;
  }
  return kExitUsage;
}
