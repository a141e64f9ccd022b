#include "cbcw/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "cbcw/error.hpp"
#include "cbcw/rng.hpp"

namespace cbcw {

namespace {

int active_count(const Profile& profile) {
  int count = 0;
  for (auto flag : profile.active) count += flag;
  return count;
}

double weight_at(const ChoicePair& pair, std::span<const double> theta, const ModelSpec& spec) {
  const double p = choice_probability(pair, theta, spec);
  return p * (1.0 - p);
}

}  // namespace

void Design::validate() const {
  require(n_attributes >= 2, ErrorCode::InvalidArgument, "design needs at least 2 attributes");
  require(strength >= 1 && strength <= n_attributes, ErrorCode::InvalidArgument,
          "design strength out of range");
  std::unordered_set<std::string> ids;
  for (const auto& pair : pairs) {
    require(!pair.id.empty(), ErrorCode::InvalidArgument, "empty pair id");
    require(ids.insert(pair.id).second, ErrorCode::InvalidArgument,
            "duplicate pair id '" + pair.id + "'");
    require(pair.a.size() == n_attributes && pair.b.size() == n_attributes,
            ErrorCode::InvalidArgument, "pair '" + pair.id + "' has wrong profile length");
    require(pair.a.active == pair.b.active, ErrorCode::InvalidArgument,
            "pair '" + pair.id + "' shows different attributes in its two alternatives");
    require(active_count(pair.a) == strength, ErrorCode::InvalidArgument,
            "pair '" + pair.id + "' does not show exactly " + std::to_string(strength) +
                " attributes");
    for (int i = 0; i < n_attributes; ++i) {
      const auto k = static_cast<std::size_t>(i);
      require(pair.a.active[k] || (pair.a.levels[k] == 0 && pair.b.levels[k] == 0),
              ErrorCode::InvalidArgument,
              "pair '" + pair.id + "' carries a nonzero level on a hidden attribute");
    }
  }
}

Eigen::MatrixXd information_matrix(const Design& design, std::span<const double> theta,
                                   const ModelSpec& spec) {
  require(!design.pairs.empty(), ErrorCode::InvalidArgument,
          "information matrix of an empty design");
  spec.validate_for(design.n_attributes);
  const int q = spec.term_count();
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(q, q);
  for (const auto& pair : design.pairs) {
    const std::vector<double> diff = feature_difference(pair, spec);
    const Eigen::Map<const Eigen::VectorXd> d(diff.data(), q);
    info += weight_at(pair, theta, spec) * (d * d.transpose());
  }
  return info;
}

double d_criterion(const Design& design, std::span<const double> theta, const ModelSpec& spec) {
  require(spec.term_count() > 0, ErrorCode::InvalidArgument, "criterion of an empty term set");
  const int q = spec.term_count();
  const Eigen::MatrixXd scaled =
      information_matrix(design, theta, spec) / static_cast<double>(design.pairs.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(scaled);
  const Eigen::VectorXd& eigenvalues = solver.eigenvalues();
  const double largest = eigenvalues.maxCoeff();
  if (largest <= 0.0) return 0.0;
  const double tolerance = largest * static_cast<double>(q) *
                           std::numeric_limits<double>::epsilon();
  double log_det = 0.0;
  for (int i = 0; i < q; ++i) {
    if (eigenvalues[i] <= tolerance) return 0.0;
    log_det += std::log(eigenvalues[i]);
  }
  return std::exp(log_det / static_cast<double>(q));
}

double relative_efficiency(const Design& a, const Design& b, std::span<const double> theta,
                           const ModelSpec& spec) {
  const double benchmark = d_criterion(b, theta, spec);
  require(benchmark > 0.0, ErrorCode::InvalidArgument,
          "benchmark design has zero criterion value");
  return d_criterion(a, theta, spec) / benchmark;
}

bool is_dominated(const ChoicePair& pair) {
  bool a_at_least = true;
  bool b_at_least = true;
  for (std::size_t i = 0; i < pair.a.levels.size(); ++i) {
    if (!pair.a.active[i]) continue;
    if (pair.a.levels[i] < pair.b.levels[i]) a_at_least = false;
    if (pair.b.levels[i] < pair.a.levels[i]) b_at_least = false;
  }
  return a_at_least || b_at_least;
}

Design prune_dominated(const Design& design) {
  Design pruned;
  pruned.n_attributes = design.n_attributes;
  pruned.strength = design.strength;
  for (const auto& pair : design.pairs) {
    if (!is_dominated(pair)) pruned.pairs.push_back(pair);
  }
  return pruned;
}

std::size_t dominated_count(const Design& design) {
  std::size_t count = 0;
  for (const auto& pair : design.pairs) count += is_dominated(pair) ? 1 : 0;
  return count;
}

BlockedDesign block_design(const Design& design, int k, std::uint64_t seed) {
  require(k >= 1, ErrorCode::InvalidArgument, "block count must be positive");
  const auto n = design.pairs.size();
  require(static_cast<std::size_t>(k) <= n, ErrorCode::InvalidArgument,
          "more blocks than pairs");

  // Balanced capacities: the first n % k blocks take one extra pair.
  const std::size_t base = n / static_cast<std::size_t>(k);
  std::vector<std::size_t> capacity(static_cast<std::size_t>(k), base);
  for (std::size_t b = 0; b < n % static_cast<std::size_t>(k); ++b) capacity[b] += 1;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[rng.index(i)]);
  }

  // Greedy: put each pair into the open block where its shown attributes are
  // least represented so far.
  const auto p = static_cast<std::size_t>(design.n_attributes);
  std::vector<std::vector<int>> exposure(static_cast<std::size_t>(k), std::vector<int>(p, 0));
  std::vector<std::vector<std::string>> members(static_cast<std::size_t>(k));
  for (const std::size_t pair_index : order) {
    const auto& pair = design.pairs[pair_index];
    int best_block = -1;
    long best_cost = std::numeric_limits<long>::max();
    for (int b = 0; b < k; ++b) {
      const auto bi = static_cast<std::size_t>(b);
      if (members[bi].size() >= capacity[bi]) continue;
      long cost = 0;
      for (std::size_t i = 0; i < p; ++i) {
        if (pair.a.active[i]) cost += exposure[bi][i];
      }
      // Prefer emptier blocks on equal exposure for even fill.
      cost = cost * static_cast<long>(n + 1) + static_cast<long>(members[bi].size());
      if (cost < best_cost) {
        best_cost = cost;
        best_block = b;
      }
    }
    const auto bi = static_cast<std::size_t>(best_block);
    members[bi].push_back(pair.id);
    for (std::size_t i = 0; i < p; ++i) {
      if (pair.a.active[i]) exposure[bi][i] += 1;
    }
  }

  BlockedDesign blocked;
  for (int b = 0; b < k; ++b) {
    blocked.blocks.emplace_back(std::to_string(b + 1), std::move(members[static_cast<std::size_t>(b)]));
  }
  return blocked;
}

Design with_blocks(Design design, const BlockedDesign& blocks) {
  std::unordered_map<std::string, std::string> label_of;
  for (const auto& [label, ids] : blocks.blocks) {
    for (const auto& id : ids) {
      require(label_of.emplace(id, label).second, ErrorCode::InvalidArgument,
              "pair '" + id + "' assigned to two blocks");
    }
  }
  for (auto& pair : design.pairs) {
    const auto found = label_of.find(pair.id);
    require(found != label_of.end(), ErrorCode::InvalidArgument,
            "pair '" + pair.id + "' missing from the block partition");
    pair.block = found->second;
  }
  require(label_of.size() == design.pairs.size(), ErrorCode::InvalidArgument,
          "block partition references unknown pairs");
  return design;
}

std::vector<std::string> block_labels(const Design& design) {
  std::vector<std::string> labels;
  for (const auto& pair : design.pairs) {
    if (pair.block.empty()) continue;
    if (std::find(labels.begin(), labels.end(), pair.block) == labels.end()) {
      labels.push_back(pair.block);
    }
  }
  return labels;
}

namespace {

// Search score: nonsingular designs compare by log det of the information
// matrix, singular ones by a ridge-regularized log det so the exchange still
// climbs toward full rank.
struct SearchScore {
  bool nonsingular = false;
  double value = -std::numeric_limits<double>::infinity();

  bool operator>(const SearchScore& rhs) const {
    if (nonsingular != rhs.nonsingular) return nonsingular;
    return value > rhs.value;
  }
};

SearchScore score_information(const Eigen::MatrixXd& info) {
  const Eigen::LLT<Eigen::MatrixXd> llt(info);
  if (llt.info() == Eigen::Success) {
    const Eigen::MatrixXd& l = llt.matrixLLT();
    double log_det = 0.0;
    bool positive = true;
    for (int i = 0; i < info.rows(); ++i) {
      if (l(i, i) <= 0.0) {
        positive = false;
        break;
      }
      log_det += 2.0 * std::log(l(i, i));
    }
    if (positive) return {true, log_det};
  }
  const double ridge = 1e-8 * std::max(1.0, info.trace() / static_cast<double>(info.rows()));
  const Eigen::MatrixXd padded =
      info + ridge * Eigen::MatrixXd::Identity(info.rows(), info.cols());
  const Eigen::LLT<Eigen::MatrixXd> fallback(padded);
  double log_det = 0.0;
  const Eigen::MatrixXd& l = fallback.matrixLLT();
  for (int i = 0; i < info.rows(); ++i) log_det += 2.0 * std::log(std::max(l(i, i), 1e-300));
  return {false, log_det};
}

ChoicePair random_pair(int n_attributes, int strength, Rng& rng) {
  const auto p = static_cast<std::size_t>(n_attributes);
  ChoicePair pair;
  pair.a = Profile::hidden(n_attributes);
  pair.b = Profile::hidden(n_attributes);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::fill(pair.a.active.begin(), pair.a.active.end(), 0);
    std::vector<std::size_t> positions(p);
    std::iota(positions.begin(), positions.end(), 0);
    for (int drawn = 0; drawn < strength; ++drawn) {
      const std::size_t j = rng.index(positions.size());
      pair.a.active[positions[j]] = 1;
      positions.erase(positions.begin() + static_cast<std::ptrdiff_t>(j));
    }
    pair.b.active = pair.a.active;
    for (std::size_t i = 0; i < p; ++i) {
      pair.a.levels[i] = pair.a.active[i] ? static_cast<std::uint8_t>(rng.coin()) : 0;
      pair.b.levels[i] = pair.b.active[i] ? static_cast<std::uint8_t>(rng.coin()) : 0;
    }
    if (!is_dominated(pair)) return pair;
  }
  fail(ErrorCode::Internal, "could not draw a non-dominated pair");
}

Eigen::VectorXd difference_vector(const ChoicePair& pair, const ModelSpec& spec) {
  const std::vector<double> diff = feature_difference(pair, spec);
  return Eigen::Map<const Eigen::VectorXd>(diff.data(), static_cast<Eigen::Index>(diff.size()));
}

}  // namespace

Design generate_design(int n_attributes, int strength, int n_pairs, const ModelSpec& spec,
                       std::uint64_t seed, const GenerateOptions& options) {
  require(n_attributes >= 2, ErrorCode::InvalidArgument, "need at least 2 attributes");
  require(strength >= 2 && strength <= n_attributes, ErrorCode::InvalidArgument,
          "profile strength must lie in [2, attribute count]");
  require(n_pairs >= 1, ErrorCode::InvalidArgument, "need at least one pair");
  require(options.restarts >= 1 && options.iterations >= 0, ErrorCode::InvalidArgument,
          "invalid search options");
  spec.validate_for(n_attributes);

  const auto p = static_cast<std::size_t>(n_attributes);
  // At theta = 0 every pair weighs 1/4.
  constexpr double kWeight = 0.25;

  std::vector<ChoicePair> best_pairs;
  SearchScore best_score;

  for (int restart = 0; restart < options.restarts; ++restart) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(restart)));
    std::vector<ChoicePair> pairs;
    pairs.reserve(static_cast<std::size_t>(n_pairs));
    std::vector<Eigen::VectorXd> diffs;
    for (int i = 0; i < n_pairs; ++i) {
      pairs.push_back(random_pair(n_attributes, strength, rng));
      diffs.push_back(difference_vector(pairs.back(), spec));
    }
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(spec.term_count(), spec.term_count());
    for (const auto& d : diffs) info += kWeight * (d * d.transpose());
    SearchScore score = score_information(info);

    for (int iteration = 0; iteration < options.iterations; ++iteration) {
      const std::size_t target = rng.index(pairs.size());
      ChoicePair candidate = pairs[target];
      if (rng.uniform01() < 0.7) {
        // Flip one level of one alternative at a shown position.
        std::vector<std::size_t> shown;
        for (std::size_t i = 0; i < p; ++i) {
          if (candidate.a.active[i]) shown.push_back(i);
        }
        const std::size_t position = shown[rng.index(shown.size())];
        Profile& side = rng.coin() ? candidate.a : candidate.b;
        side.levels[position] = static_cast<std::uint8_t>(1 - side.levels[position]);
      } else if (strength < n_attributes) {
        // Swap one shown attribute for a hidden one.
        std::vector<std::size_t> shown;
        std::vector<std::size_t> off;
        for (std::size_t i = 0; i < p; ++i) {
          (candidate.a.active[i] ? shown : off).push_back(i);
        }
        const std::size_t from = shown[rng.index(shown.size())];
        const std::size_t to = off[rng.index(off.size())];
        candidate.a.active[from] = candidate.b.active[from] = 0;
        candidate.a.levels[from] = candidate.b.levels[from] = 0;
        candidate.a.active[to] = candidate.b.active[to] = 1;
        candidate.a.levels[to] = static_cast<std::uint8_t>(rng.coin());
        candidate.b.levels[to] = static_cast<std::uint8_t>(rng.coin());
      } else {
        continue;
      }
      if (is_dominated(candidate)) continue;

      const Eigen::VectorXd d_new = difference_vector(candidate, spec);
      Eigen::MatrixXd trial = info;
      trial -= kWeight * (diffs[target] * diffs[target].transpose());
      trial += kWeight * (d_new * d_new.transpose());
      const SearchScore trial_score = score_information(trial);
      if (trial_score > score) {
        pairs[target] = std::move(candidate);
        diffs[target] = d_new;
        info = std::move(trial);
        score = trial_score;
      }
    }

    if (score > best_score) {
      best_score = score;
      best_pairs = std::move(pairs);
    }
  }

  Design design;
  design.n_attributes = n_attributes;
  design.strength = strength;
  design.pairs = std::move(best_pairs);
  int width = 1;
  for (int value = n_pairs; value >= 10; value /= 10) ++width;
  for (std::size_t i = 0; i < design.pairs.size(); ++i) {
    std::string number = std::to_string(i + 1);
    design.pairs[i].id = "p" + std::string(static_cast<std::size_t>(width) - number.size(), '0') + number;
  }
  design.validate();
  return design;
}

}  // namespace cbcw
