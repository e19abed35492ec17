#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace qnnc {

struct BenchConfig {
  std::size_t rows = 16;  // N, unlabeled destination nodes
  std::size_t cols = 16;  // M, labeled source nodes
  std::vector<double> probs{0.5, 0.5};
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
};

// One generate -> compress -> infer -> verify trial.
struct BenchRow {
  std::string shape;  // "MxN"
  unsigned m = 0;
  std::uint64_t trial = 0;
  double table_bound_bits = 0.0;  // M N H(p_hat) - N log2 N
  std::uint64_t observed_bits = 0;
  double ideal_bits = 0.0;  // multiset codelength under the empirical model
  double avg_queue_bits = 0.0;
  std::uint64_t max_queue_bits = 0;
  double queue_bound_bits = 0.0;
  double compressed_time_s = 0.0;
  double uncompressed_time_s = 0.0;
  double pct_pmf = 0.0;
  double pct_coding = 0.0;
  double max_abs_error = 0.0;
  bool verified = false;
};

// Tolerance between compressed and dense inference used by verification.
inline constexpr double kBenchTolerance = 1e-9;

std::vector<BenchRow> run_bench(const BenchConfig& config);

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const BenchRow& row, std::uint64_t seed);

}  // namespace qnnc
