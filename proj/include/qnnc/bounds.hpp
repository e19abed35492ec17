#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qnnc/model.hpp"

namespace qnnc {

// Shannon entropy in bits; zero entries contribute nothing.
double entropy_H(std::span<const double> p);
double log2_factorial(std::uint64_t n);

// M N H(p) - log2 N!
double plbg_bound(std::uint64_t n, std::uint64_t m_cols, std::span<const double> p);
// M N H(p) - N log2 N, the form reported by the benchmark tables.
double table_bound(std::uint64_t n, std::uint64_t m_cols, std::span<const double> p);
// N^2 H(p) - 2 log2 N!, binary p = edge probability.
double ubg_bound(std::uint64_t n, double p);

// A bound with terms the analysis leaves as unevaluated constants. The
// constants are set to zero, so `value` underestimates the true bound.
struct SlackBound {
  double value = 0.0;
  double slack = 0.0;
  bool lower_estimate = true;
  double mc_stderr = 0.0;
  std::uint64_t mc_trials = 0;
};

// K node layers of width N: (K-1) N^2 H + (K-2) N H - (K-2) N log2 N.
SlackBound ktree_bound(std::uint64_t k, std::uint64_t n, double p);

// widths = node layer widths w_0..w_K. Sums, over matrices, w_l w_{l+1} H -
// log2 w_{l+1}! + E[sum log2 k_i!], then adds log2 w_K! for the output
// order. The expectation is estimated by Monte Carlo.
SlackBound iterative_bound(const std::vector<std::uint64_t>& widths, std::span<const double> p,
                           std::uint64_t trials, std::uint64_t seed);

struct Estimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::uint64_t trials = 0;
};

// E[sum log2 k_i!] over row multiplicities of a random N x M matrix.
Estimate mc_log_multiplicity(std::uint64_t n, std::uint64_t m_cols, std::span<const double> p, std::uint64_t trials,
                             std::uint64_t seed);
// Entropy of the row multiset: mean of multiset_log_prob over samples.
Estimate mc_multiset_entropy(std::uint64_t n, std::uint64_t m_cols, std::span<const double> p, std::uint64_t trials,
                             std::uint64_t seed);

// Exact values by enumerating all (m+1)^(N M) matrices; N M log2(m+1) <= 20.
double exact_multiset_entropy(std::size_t n, std::size_t m_cols, std::span<const double> p);
double exact_log_multiplicity(std::size_t n, std::size_t m_cols, std::span<const double> p);

// Every bound for one (N, M, p) setting.
struct BoundReport {
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  double entropy = 0.0;
  double plbg = 0.0;
  double table = 0.0;
  double ubg = 0.0;  // rows == cols only; binary edge probability 1 - p0
  SlackBound ktree;
  SlackBound iterative;
  double queue = 0.0;
  Estimate mc_entropy;

  // One key=value pair per line.
  std::string to_text() const;
};

BoundReport bound_report(std::uint64_t n, std::uint64_t m_cols, std::span<const double> p, std::uint64_t mc_trials,
                         std::uint64_t seed);

struct RecursionTable {
  double p = 0.0;
  std::vector<double> x;
  std::vector<double> y;
};

// x_n with the k in {0, n} self-terms moved to the left side; y_n by
// forward recursion. Binomial weights are evaluated in log space.
RecursionTable xy_recursion(std::size_t n_max, double p);

}  // namespace qnnc
