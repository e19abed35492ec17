#include "qnnc/bench.hpp"

#include <chrono>
#include <cmath>

#include "qnnc/bounds.hpp"
#include "qnnc/infer.hpp"
#include "qnnc/plbg.hpp"
#include "qnnc/randgen.hpp"

namespace qnnc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds(Clock::duration d) { return std::chrono::duration<double>(d).count(); }

std::vector<double> dense_multiply(const ColorMatrix& w, const Codebook& codebook, const std::vector<double>& x) {
  std::vector<double> y(w.rows(), 0.0);
  for (std::size_t r = 0; r < w.rows(); ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < w.cols(); ++c) sum += codebook[w.at(r, c)] * x[c];
    y[r] = sum;
  }
  return y;
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchConfig& config) {
  GenSpec spec{config.rows, config.cols, config.probs, config.seed, GenKind::partially_labeled};
  validate(spec);
  const auto m = static_cast<unsigned>(config.probs.size() - 1);
  const Codebook codebook = Codebook::uniform(m);

  std::vector<BenchRow> rows;
  for (std::uint64_t t = 0; t < config.trials; ++t) {
    Rng rng = Rng::substream(config.seed, t);
    const ColorMatrix w = gen_matrix(config.rows, config.cols, config.probs, rng);
    std::vector<double> x(config.cols);
    for (auto& v : x) v = 2.0 * rng.uniform() - 1.0;

    const EdgeModel model = empirical_model(w);
    const BitString stream = plbg_encode(w, model);

    BenchRow row;
    row.shape = std::to_string(config.cols) + "x" + std::to_string(config.rows);
    row.m = m;
    row.trial = t;
    const auto p_hat = model.probabilities();
    row.table_bound_bits = table_bound(config.rows, config.cols, p_hat);
    row.observed_bits = stream.bit_length;
    row.ideal_bits = multiset_log_prob(w, model);
    row.queue_bound_bits = queue_space_bound(config.rows, m);

    PhaseTimes phases;
    auto start = Clock::now();
    const auto result = infer_layer(stream, model, codebook, x, Activation::identity, &phases);
    row.compressed_time_s = seconds(Clock::now() - start);

    start = Clock::now();
    const auto dense = dense_multiply(w, codebook, x);
    row.uncompressed_time_s = seconds(Clock::now() - start);

    row.avg_queue_bits = result.queue.avg_bits;
    row.max_queue_bits = result.queue.max_bits;
    const double total = seconds(phases.pmf + phases.coding + phases.accumulate);
    if (total > 0.0) {
      row.pct_pmf = 100.0 * seconds(phases.pmf) / total;
      row.pct_coding = 100.0 * seconds(phases.coding) / total;
    }

    // Compressed outputs come in canonical row order.
    const auto [sorted, perm] = canonical_sort_rows(w);
    row.verified = result.stream_out == stream && result.y.size() == dense.size();
    for (std::size_t r = 0; row.verified && r < dense.size(); ++r) {
      const double err = std::abs(result.y[perm[r]] - dense[r]);
      row.max_abs_error = std::max(row.max_abs_error, err);
      if (!(err <= kBenchTolerance)) row.verified = false;
    }
    rows.push_back(row);
  }
  return rows;
}

void write_csv_header(std::ostream& out) {
  out << "shape,m,trial,table_bound_bits,observed_bits,ideal_bits,avg_queue_bits,max_queue_bits,queue_bound_bits,"
         "compressed_time_s,uncompressed_time_s,pct_pmf,pct_coding,max_abs_error,verified,rng,seed\n";
}

void write_csv_row(std::ostream& out, const BenchRow& r, std::uint64_t seed) {
  out << r.shape << ',' << r.m << ',' << r.trial << ',' << r.table_bound_bits << ',' << r.observed_bits << ','
      << r.ideal_bits << ',' << r.avg_queue_bits << ',' << r.max_queue_bits << ',' << r.queue_bound_bits << ','
      << r.compressed_time_s << ',' << r.uncompressed_time_s << ',' << r.pct_pmf << ',' << r.pct_coding << ','
      << r.max_abs_error << ',' << (r.verified ? "true" : "false") << ',' << kRngName << ',' << seed << '\n';
}

}  // namespace qnnc
