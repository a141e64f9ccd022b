#include "cbcw/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <unordered_map>

#include "cbcw/error.hpp"
#include "cbcw/stats.hpp"
#include "estimate_internal.hpp"

namespace cbcw {

namespace {

std::vector<std::vector<std::size_t>> respondents_by_cell(const Dataset& dataset) {
  std::vector<std::vector<std::size_t>> cells(kCellCount);
  for (std::size_t i = 0; i < dataset.respondents.size(); ++i) {
    cells[static_cast<std::size_t>(cell_index(cell_of(dataset.respondents[i])))].push_back(i);
  }
  for (int c = 0; c < kCellCount; ++c) {
    require(!cells[static_cast<std::size_t>(c)].empty(), ErrorCode::InvalidArgument,
            "stratified resample: cell " + cell_label(cell_from_index(c)) + " is empty");
  }
  return cells;
}

}  // namespace

std::vector<std::size_t> stratified_resample_indices(const Dataset& dataset, Rng& rng) {
  const auto cells = respondents_by_cell(dataset);
  std::vector<std::size_t> drawn;
  drawn.reserve(dataset.respondents.size());
  for (const auto& members : cells) {
    for (std::size_t k = 0; k < members.size(); ++k) {
      drawn.push_back(members[rng.index(members.size())]);
    }
  }
  return drawn;
}

Dataset stratified_resample(const Dataset& dataset, Rng& rng) {
  const std::vector<std::size_t> drawn = stratified_resample_indices(dataset, rng);

  std::unordered_map<std::string, std::vector<const Observation*>> observations_of;
  for (const auto& observation : dataset.observations) {
    observations_of[observation.respondent_id].push_back(&observation);
  }

  std::vector<Respondent> respondents;
  std::vector<Observation> observations;
  std::unordered_map<std::string, int> copies;
  for (const std::size_t index : drawn) {
    Respondent clone = dataset.respondents[index];
    const int copy = copies[clone.id]++;
    if (copy > 0) clone.id += "#" + std::to_string(copy);
    for (const Observation* original : observations_of[dataset.respondents[index].id]) {
      observations.push_back({clone.id, original->pair_id, original->choice});
    }
    respondents.push_back(std::move(clone));
  }
  return make_dataset(dataset.catalog, dataset.design, std::move(respondents),
                      std::move(observations));
}

TermSummary summarize_term(std::string term, double observed,
                           std::span<const double> replicate_values, double alpha) {
  require(replicate_values.size() >= 2, ErrorCode::InvalidArgument,
          "term summary needs at least 2 replicate values");
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidArgument, "alpha out of (0,1)");

  TermSummary summary;
  summary.term = std::move(term);
  summary.observed = observed;
  summary.boot_mean = mean(replicate_values);
  summary.boot_se = sample_sd(replicate_values);

  std::vector<double> sorted(replicate_values.begin(), replicate_values.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = quantile_sorted(sorted, alpha / 2.0);
  const double hi = quantile_sorted(sorted, 1.0 - alpha / 2.0);
  summary.ci_percentile = {lo, hi};
  summary.ci_basic = {2.0 * observed - hi, 2.0 * observed - lo};

  if (summary.boot_se > 0.0) {
    summary.z = observed / summary.boot_se;
    summary.p_value = two_sided_p(summary.z);
  } else {
    summary.degenerate = true;
    summary.z = std::numeric_limits<double>::quiet_NaN();
    summary.p_value = std::numeric_limits<double>::quiet_NaN();
  }
  return summary;
}

bool bootstrap_significance(const TermSummary& term, CiFlavor flavor) {
  const auto& [lo, hi] = flavor == CiFlavor::Basic ? term.ci_basic : term.ci_percentile;
  return lo > 0.0 || hi < 0.0;
}

BootstrapSummary block_bootstrap(const Dataset& dataset, const ModelSpec& fixed_spec, int B,
                                 std::uint64_t seed, const BootstrapOptions& options) {
  require(B >= 2, ErrorCode::InvalidArgument, "bootstrap needs at least 2 replicates");
  fixed_spec.validate_for(dataset.design.n_attributes);
  const auto cells = respondents_by_cell(dataset);
  const int q = fixed_spec.term_count();

  // Per-pair difference vectors and per-respondent answer lists, computed once.
  const std::size_t n_pairs = dataset.design.pairs.size();
  Eigen::MatrixXd d(q, static_cast<Eigen::Index>(n_pairs));
  std::unordered_map<std::string, std::size_t> pair_slot;
  for (std::size_t j = 0; j < n_pairs; ++j) {
    const std::vector<double> diff = feature_difference(dataset.design.pairs[j], fixed_spec);
    d.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const Eigen::VectorXd>(diff.data(), q);
    pair_slot.emplace(dataset.design.pairs[j].id, j);
  }
  std::unordered_map<std::string, std::size_t> respondent_slot;
  for (std::size_t i = 0; i < dataset.respondents.size(); ++i) {
    respondent_slot.emplace(dataset.respondents[i].id, i);
  }
  // answers[i] lists (pair slot, chose a) for respondent i.
  std::vector<std::vector<std::pair<std::size_t, bool>>> answers(dataset.respondents.size());
  for (const auto& observation : dataset.observations) {
    answers[respondent_slot.at(observation.respondent_id)].emplace_back(
        pair_slot.at(observation.pair_id), observation.choice == Choice::A);
  }

  // Observed fit on the original sample.
  internal::CompactData base;
  base.d = d;
  base.total = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_pairs));
  base.chose_a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_pairs));
  for (const auto& list : answers) {
    for (const auto& [slot, chose_a] : list) {
      base.total[static_cast<Eigen::Index>(slot)] += 1.0;
      if (chose_a) base.chose_a[static_cast<Eigen::Index>(slot)] += 1.0;
    }
  }
  const FitResult observed_fit = internal::fit_compact(base, fixed_spec, options.fit);

  // Replicates, each on its own derived stream; results land in replicate
  // order so the aggregation is independent of the thread count.
  std::vector<std::vector<double>> replicate_estimates(static_cast<std::size_t>(B));
  std::vector<char> replicate_ok(static_cast<std::size_t>(B), 0);

  FitSettings replicate_settings = options.fit;
  replicate_settings.log_lik_trace = nullptr;  // a shared trace would race

  const auto run_replicate = [&](int r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    internal::CompactData resampled;
    resampled.d = d;
    resampled.total = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_pairs));
    resampled.chose_a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_pairs));
    for (const auto& members : cells) {
      for (std::size_t k = 0; k < members.size(); ++k) {
        const std::size_t pick = members[rng.index(members.size())];
        for (const auto& [slot, chose_a] : answers[pick]) {
          resampled.total[static_cast<Eigen::Index>(slot)] += 1.0;
          if (chose_a) resampled.chose_a[static_cast<Eigen::Index>(slot)] += 1.0;
        }
      }
    }
    const FitResult fit = internal::fit_compact(resampled, fixed_spec, replicate_settings);
    if (fit.converged) {
      replicate_estimates[static_cast<std::size_t>(r)] = fit.estimates;
      replicate_ok[static_cast<std::size_t>(r)] = 1;
    }
  };

  int n_threads = options.threads > 0 ? options.threads
                                      : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::clamp(n_threads, 1, B);
  if (n_threads == 1) {
    for (int r = 0; r < B; ++r) run_replicate(r);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
      workers.emplace_back([&, t] {
        for (int r = t; r < B; r += n_threads) run_replicate(r);
      });
    }
    for (auto& worker : workers) worker.join();
  }

  BootstrapSummary summary;
  summary.B = B;
  summary.alpha = options.alpha;
  for (int r = 0; r < B; ++r) {
    if (!replicate_ok[static_cast<std::size_t>(r)]) summary.failed_replicates += 1;
  }
  summary.reliable = summary.failed_replicates <= B / 5;

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(B));
  for (int term = 0; term < q; ++term) {
    values.clear();
    for (int r = 0; r < B; ++r) {
      if (replicate_ok[static_cast<std::size_t>(r)]) {
        values.push_back(replicate_estimates[static_cast<std::size_t>(r)][static_cast<std::size_t>(term)]);
      }
    }
    require(values.size() >= 2, ErrorCode::Unreliable,
            "fewer than 2 convergent bootstrap replicates");
    summary.terms.push_back(summarize_term(fixed_spec.term_name(dataset.catalog, term),
                                           observed_fit.estimates[static_cast<std::size_t>(term)],
                                           values, options.alpha));
  }
  return summary;
}

}  // namespace cbcw
