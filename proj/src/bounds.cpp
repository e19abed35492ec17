#include "qnnc/bounds.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qnnc/infer.hpp"
#include "qnnc/randgen.hpp"

namespace qnnc {

namespace {

void check_probs(std::span<const double> p) {
  if (p.size() < 2) throw std::invalid_argument("bounds: need at least two probabilities");
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("bounds: probabilities must be finite and >= 0");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("bounds: probabilities must sum to 1");
}

double binary_entropy(double p) {
  const double pp[2] = {1.0 - p, p};
  return entropy_H(pp);
}

// Row multiplicities of a sampled or enumerated matrix, keyed by row.
template <class RowAt>
std::map<std::vector<Color>, std::uint64_t> row_counts(std::size_t n, RowAt&& row_at) {
  std::map<std::vector<Color>, std::uint64_t> counts;
  for (std::size_t r = 0; r < n; ++r) ++counts[row_at(r)];
  return counts;
}

double sum_log2_factorials(const std::map<std::vector<Color>, std::uint64_t>& counts) {
  double s = 0.0;
  for (const auto& [row, k] : counts) s += log2_factorial(k);
  return s;
}

// -log2 P(row multiset) = -(log2 N! - sum log2 k_i! + sum over rows log2 pi).
double multiset_bits(const ColorMatrix& w, std::span<const double> p) {
  auto counts = row_counts(w.rows(), [&](std::size_t r) {
    auto row = w.row(r);
    return std::vector<Color>(row.begin(), row.end());
  });
  double log_pi = 0.0;
  for (Color c : w.cells()) log_pi += std::log2(p[c]);
  return -(log2_factorial(w.rows()) - sum_log2_factorials(counts) + log_pi);
}

template <class Sample>
Estimate monte_carlo(std::uint64_t trials, Sample&& sample) {
  if (trials == 0) throw std::invalid_argument("monte carlo: need at least one trial");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const double v = sample(t);
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(trials);
  const double mean = sum / n;
  const double var = trials > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
  return Estimate{mean, std::sqrt(var / n), trials};
}

// Visits every matrix with its probability, passing row multiplicities.
template <class Visit>
void enumerate(std::size_t n, std::size_t m_cols, std::span<const double> p, Visit&& visit) {
  check_probs(p);
  const std::size_t base = p.size();
  const std::size_t cells = n * m_cols;
  if (static_cast<double>(cells) * std::log2(static_cast<double>(base)) > 20.0 + 1e-9) {
    throw std::invalid_argument("exact enumeration limited to 2^20 matrices");
  }
  std::vector<Color> w(cells, 0);
  while (true) {
    double prob = 1.0;
    for (Color c : w) prob *= p[c];
    if (prob > 0.0) {
      visit(prob, row_counts(n, [&](std::size_t r) {
              return std::vector<Color>(w.begin() + static_cast<std::ptrdiff_t>(r * m_cols),
                                        w.begin() + static_cast<std::ptrdiff_t>((r + 1) * m_cols));
            }));
    }
    std::size_t i = 0;
    while (i < cells && ++w[i] == base) w[i++] = 0;
    if (i == cells) break;
  }
}

}  // namespace

double entropy_H(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

double log2_factorial(std::uint64_t n) { return std::lgamma(static_cast<double>(n) + 1.0) / std::numbers::ln2; }

double plbg_bound(std::uint64_t n, std::uint64_t m_cols, std::span<const double> p) {
  return static_cast<double>(m_cols) * static_cast<double>(n) * entropy_H(p) - log2_factorial(n);
}

double table_bound(std::uint64_t n, std::uint64_t m_cols, std::span<const double> p) {
  const double nn = static_cast<double>(n);
  return static_cast<double>(m_cols) * nn * entropy_H(p) - nn * std::log2(nn);
}

double ubg_bound(std::uint64_t n, double p) {
  const double nn = static_cast<double>(n);
  return nn * nn * binary_entropy(p) - 2.0 * log2_factorial(n);
}

SlackBound ktree_bound(std::uint64_t k, std::uint64_t n, double p) {
  if (k < 2) throw std::invalid_argument("ktree_bound: need at least two node layers");
  const double kk = static_cast<double>(k);
  const double nn = static_cast<double>(n);
  const double h = binary_entropy(p);
  SlackBound out;
  out.value = (kk - 1.0) * nn * nn * h + (kk - 2.0) * nn * h - (kk - 2.0) * nn * std::log2(nn);
  return out;
}

SlackBound iterative_bound(const std::vector<std::uint64_t>& widths, std::span<const double> p,
                           std::uint64_t trials, std::uint64_t seed) {
  if (widths.size() < 2) throw std::invalid_argument("iterative_bound: need at least two widths");
  SlackBound out;
  double var = 0.0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const auto mc = mc_log_multiplicity(widths[l + 1], widths[l], p, trials, seed + l);
    out.value += plbg_bound(widths[l + 1], widths[l], p) + mc.mean;
    var += mc.stderr_ * mc.stderr_;
  }
  out.value += log2_factorial(widths.back());
  out.mc_stderr = std::sqrt(var);
  out.mc_trials = trials;
  return out;
}

Estimate mc_log_multiplicity(std::uint64_t n, std::uint64_t m_cols, std::span<const double> p, std::uint64_t trials,
                             std::uint64_t seed) {
  check_probs(p);
  const std::vector<double> probs(p.begin(), p.end());
  Rng rng(seed);
  return monte_carlo(trials, [&](std::uint64_t) {
    const auto w = gen_matrix(n, m_cols, probs, rng);
    return sum_log2_factorials(row_counts(n, [&](std::size_t r) {
      auto row = w.row(r);
      return std::vector<Color>(row.begin(), row.end());
    }));
  });
}

Estimate mc_multiset_entropy(std::uint64_t n, std::uint64_t m_cols, std::span<const double> p, std::uint64_t trials,
                             std::uint64_t seed) {
  check_probs(p);
  const std::vector<double> probs(p.begin(), p.end());
  Rng rng(seed);
  return monte_carlo(trials, [&](std::uint64_t) { return multiset_bits(gen_matrix(n, m_cols, probs, rng), p); });
}

double exact_multiset_entropy(std::size_t n, std::size_t m_cols, std::span<const double> p) {
  std::map<std::map<std::vector<Color>, std::uint64_t>, double> classes;
  enumerate(n, m_cols, p, [&](double prob, auto&& counts) { classes[std::move(counts)] += prob; });
  double h = 0.0;
  for (const auto& [key, prob] : classes) h -= prob * std::log2(prob);
  return h;
}

double exact_log_multiplicity(std::size_t n, std::size_t m_cols, std::span<const double> p) {
  double e = 0.0;
  enumerate(n, m_cols, p, [&](double prob, const auto& counts) { e += prob * sum_log2_factorials(counts); });
  return e;
}

std::string BoundReport::to_text() const {
  std::ostringstream out;
  out.precision(12);
  out << "rows=" << rows << '\n'
      << "cols=" << cols << '\n'
      << "entropy_H=" << entropy << '\n'
      << "plbg_bound=" << plbg << '\n'
      << "table_bound=" << table << '\n';
  if (rows == cols) out << "ubg_bound=" << ubg << '\n';
  out << "ktree_bound=" << ktree.value << '\n'
      << "ktree_slack=" << ktree.slack << '\n'
      << "ktree_lower_estimate=" << (ktree.lower_estimate ? "true" : "false") << '\n'
      << "iterative_bound=" << iterative.value << '\n'
      << "iterative_slack=" << iterative.slack << '\n'
      << "iterative_lower_estimate=" << (iterative.lower_estimate ? "true" : "false") << '\n'
      << "iterative_mc_stderr=" << iterative.mc_stderr << '\n'
      << "queue_bound=" << queue << '\n'
      << "mc_multiset_entropy=" << mc_entropy.mean << '\n'
      << "mc_multiset_entropy_stderr=" << mc_entropy.stderr_ << '\n'
      << "mc_trials=" << mc_entropy.trials << '\n';
  return out.str();
}

BoundReport bound_report(std::uint64_t n, std::uint64_t m_cols, std::span<const double> p, std::uint64_t mc_trials,
                         std::uint64_t seed) {
  check_probs(p);
  if (n == 0 || m_cols == 0) throw std::invalid_argument("bound_report: empty shape");
  BoundReport r;
  r.rows = n;
  r.cols = m_cols;
  r.entropy = entropy_H(p);
  r.plbg = plbg_bound(n, m_cols, p);
  r.table = table_bound(n, m_cols, p);
  // Unlabeled and K-tree forms treat any nonzero color as an edge.
  const double edge = 1.0 - p[0];
  if (n == m_cols) r.ubg = ubg_bound(n, edge);
  r.ktree = ktree_bound(3, n, edge);
  r.iterative = iterative_bound({m_cols, n}, p, mc_trials, seed);
  r.queue = queue_space_bound(n, static_cast<unsigned>(p.size() - 1));
  r.mc_entropy = mc_multiset_entropy(n, m_cols, p, mc_trials, seed ^ 0x5bd1e995u);
  return r;
}

RecursionTable xy_recursion(std::size_t n_max, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("xy_recursion: p must lie in (0, 1)");
  const double q = 1.0 - p;
  const double lp = std::log(p);
  const double lq = std::log(q);
  auto weight = [&](std::size_t n, std::size_t k) {
    const double nn = static_cast<double>(n);
    const double kk = static_cast<double>(k);
    return std::exp(std::lgamma(nn + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0) + kk * lp +
                    (nn - kk) * lq);
  };

  RecursionTable t;
  t.p = p;
  t.x.assign(n_max + 1, 0.0);
  for (std::size_t n = 2; n <= n_max; ++n) {
    double s = std::ceil(std::log2(static_cast<double>(n) + 1.0));
    for (std::size_t k = 1; k < n; ++k) s += weight(n, k) * (t.x[k] + t.x[n - k]);
    t.x[n] = s / (1.0 - std::pow(p, static_cast<double>(n)) - std::pow(q, static_cast<double>(n)));
  }
  t.y.assign(n_max + 1, 0.0);
  for (std::size_t n = 0; n + 1 <= n_max; ++n) {
    double s = static_cast<double>(n);
    for (std::size_t k = 0; k <= n; ++k) s += weight(n, k) * (t.y[k] + t.y[n - k]);
    t.y[n + 1] = s;
  }
  return t;
}

}  // namespace qnnc
