#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cbcw/dataset.hpp"
#include "cbcw/estimate.hpp"
#include "cbcw/rng.hpp"

namespace cbcw {

inline constexpr int kDefaultBootstrapReplicates = 10000;

enum class CiFlavor { Basic, Percentile };

struct TermSummary {
  std::string term;
  double observed = 0.0;
  double boot_mean = 0.0;
  double boot_se = 0.0;
  double z = 0.0;        // NaN when degenerate
  double p_value = 0.0;  // NaN when degenerate
  std::pair<double, double> ci_percentile{0.0, 0.0};
  std::pair<double, double> ci_basic{0.0, 0.0};
  bool degenerate = false;  // all replicates equal, zero SE
};

struct BootstrapSummary {
  std::vector<TermSummary> terms;
  int B = 0;
  int failed_replicates = 0;
  double alpha = 0.05;
  // False when more than 20% of replicates failed to converge; the summary
  // then still carries the partial results.
  bool reliable = true;
};

// Respondent indices drawn with replacement within each demographic cell;
// every cell keeps its original count. All 8 cells must be populated.
std::vector<std::size_t> stratified_resample_indices(const Dataset& dataset, Rng& rng);

// Materialized resample; duplicated respondents get #k id suffixes so the
// dataset invariants keep holding.
Dataset stratified_resample(const Dataset& dataset, Rng& rng);

// Mean, sample-SD standard error, z = observed/SE, two-sided p, percentile
// CI at (alpha/2, 1-alpha/2) and the reflected (basic) CI.
TermSummary summarize_term(std::string term, double observed,
                           std::span<const double> replicate_values, double alpha);

// Significant when the chosen interval excludes zero.
bool bootstrap_significance(const TermSummary& term, CiFlavor flavor = CiFlavor::Basic);

struct BootstrapOptions {
  double alpha = 0.05;
  int threads = 0;  // 0 = hardware concurrency
  FitSettings fit;
};

// Fits `fixed_spec` on B stratified resamples (replicate r draws from a
// stream derived from (seed, r), so runs are reproducible and thread-count
// independent). Non-convergent replicates are counted and excluded.
BootstrapSummary block_bootstrap(const Dataset& dataset, const ModelSpec& fixed_spec, int B,
                                 std::uint64_t seed, const BootstrapOptions& options = {});

}  // namespace cbcw
