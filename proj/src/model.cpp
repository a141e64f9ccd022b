#include "cbcw/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "cbcw/error.hpp"

namespace cbcw {

namespace {

void check_profile(const Profile& profile) {
  require(profile.levels.size() == profile.active.size(), ErrorCode::InvalidArgument,
          "profile level/mask length mismatch");
  for (std::size_t i = 0; i < profile.levels.size(); ++i) {
    require(profile.levels[i] <= 1 && profile.active[i] <= 1, ErrorCode::InvalidArgument,
            "profile entries must be 0/1");
  }
}

void check_alignment(std::span<const double> theta, const ModelSpec& spec) {
  require(static_cast<int>(theta.size()) == spec.term_count(), ErrorCode::InvalidArgument,
          "coefficient vector length " + std::to_string(theta.size()) +
              " does not match term count " + std::to_string(spec.term_count()));
}

// Numerically stable logistic and log-logistic.
double logistic(double x) {
  double p;
  if (x >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    p = e / (1.0 + e);
  }
  return p;
}

double log_logistic(double x) {
  // log(1/(1+exp(-x))) = -softplus(-x)
  const double t = -x;
  return -(std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))));
}

}  // namespace

Profile Profile::full(std::vector<std::uint8_t> levels) {
  Profile profile;
  profile.active.assign(levels.size(), 1);
  profile.levels = std::move(levels);
  return profile;
}

Profile Profile::hidden(int n_attributes) {
  Profile profile;
  profile.levels.assign(static_cast<std::size_t>(n_attributes), 0);
  profile.active.assign(static_cast<std::size_t>(n_attributes), 0);
  return profile;
}

ModelSpec ModelSpec::mains(std::vector<int> attribute_indices) {
  std::sort(attribute_indices.begin(), attribute_indices.end());
  const auto last = std::unique(attribute_indices.begin(), attribute_indices.end());
  attribute_indices.erase(last, attribute_indices.end());
  require(!attribute_indices.empty(), ErrorCode::InvalidArgument, "spec needs at least one main");
  require(attribute_indices.front() >= 0, ErrorCode::InvalidArgument,
          "negative attribute index in spec");
  ModelSpec spec;
  spec.mains_ = std::move(attribute_indices);
  return spec;
}

ModelSpec ModelSpec::with_all_interactions() const {
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < mains_.size(); ++i) {
    for (std::size_t j = i + 1; j < mains_.size(); ++j) {
      pairs.emplace_back(mains_[i], mains_[j]);
    }
  }
  return with_interactions(std::move(pairs));
}

ModelSpec ModelSpec::with_interactions(std::vector<std::pair<int, int>> pairs) const {
  const std::set<int> main_set(mains_.begin(), mains_.end());
  for (auto& [lo, hi] : pairs) {
    if (lo > hi) std::swap(lo, hi);
    require(lo != hi, ErrorCode::InvalidArgument, "interaction must join two distinct attributes");
    require(main_set.count(lo) && main_set.count(hi), ErrorCode::InvalidArgument,
            "interaction references an attribute that is not a main term");
  }
  std::sort(pairs.begin(), pairs.end());
  const auto last = std::unique(pairs.begin(), pairs.end());
  pairs.erase(last, pairs.end());
  ModelSpec spec = *this;
  spec.interactions_ = std::move(pairs);
  return spec;
}

std::string ModelSpec::term_name(const AttributeCatalog& catalog, int term) const {
  require(term >= 0 && term < term_count(), ErrorCode::InvalidArgument, "term index out of range");
  const auto t = static_cast<std::size_t>(term);
  if (t < mains_.size()) return catalog.at(mains_[t]).code;
  const auto& [lo, hi] = interactions_[t - mains_.size()];
  return catalog.at(lo).code + "*" + catalog.at(hi).code;
}

std::vector<std::string> ModelSpec::term_names(const AttributeCatalog& catalog) const {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(term_count()));
  for (int t = 0; t < term_count(); ++t) names.push_back(term_name(catalog, t));
  return names;
}

void ModelSpec::validate_for(int n_attributes) const {
  for (int index : mains_) {
    require(index >= 0 && index < n_attributes, ErrorCode::InvalidArgument,
            "spec references attribute index " + std::to_string(index) +
                " outside the catalog range");
  }
}

ModelSpec spec_from_terms(const AttributeCatalog& catalog, std::span<const std::string> terms) {
  std::vector<int> mains;
  std::vector<std::pair<int, int>> interactions;
  for (const auto& term : terms) {
    const auto star = term.find('*');
    if (star == std::string::npos) {
      const int index = catalog.index_of(term);
      require(index >= 0, ErrorCode::InvalidArgument, "unknown attribute '" + term + "'");
      mains.push_back(index);
    } else {
      const int lo = catalog.index_of(term.substr(0, star));
      const int hi = catalog.index_of(term.substr(star + 1));
      require(lo >= 0 && hi >= 0, ErrorCode::InvalidArgument,
              "unknown attribute in interaction '" + term + "'");
      interactions.emplace_back(lo, hi);
    }
  }
  require(!mains.empty(), ErrorCode::InvalidArgument, "term list carries no main effects");
  return ModelSpec::mains(std::move(mains)).with_interactions(std::move(interactions));
}

std::vector<double> expand_features(const Profile& profile, const ModelSpec& spec) {
  check_profile(profile);
  spec.validate_for(profile.size());
  std::vector<double> features;
  features.reserve(static_cast<std::size_t>(spec.term_count()));
  const auto value = [&](int attribute) -> double {
    const auto i = static_cast<std::size_t>(attribute);
    return profile.active[i] ? static_cast<double>(profile.levels[i]) : 0.0;
  };
  for (int attribute : spec.main_terms()) features.push_back(value(attribute));
  for (const auto& [lo, hi] : spec.interaction_terms()) features.push_back(value(lo) * value(hi));
  return features;
}

double utility(const Profile& profile, std::span<const double> theta, const ModelSpec& spec) {
  check_alignment(theta, spec);
  const std::vector<double> features = expand_features(profile, spec);
  double v = 0.0;
  for (std::size_t k = 0; k < features.size(); ++k) v += theta[k] * features[k];
  return v;
}

std::vector<double> feature_difference(const ChoicePair& pair, const ModelSpec& spec) {
  std::vector<double> d = expand_features(pair.a, spec);
  const std::vector<double> fb = expand_features(pair.b, spec);
  for (std::size_t k = 0; k < d.size(); ++k) d[k] -= fb[k];
  return d;
}

double choice_probability(const ChoicePair& pair, std::span<const double> theta,
                          const ModelSpec& spec) {
  const double va = utility(pair.a, theta, spec);
  const double vb = utility(pair.b, theta, spec);
  const double p = logistic(va - vb);
  return std::clamp(p, std::numeric_limits<double>::min(),
                    1.0 - std::numeric_limits<double>::epsilon() / 2.0);
}

double log_likelihood(std::span<const ChoiceObservation> data, std::span<const double> theta,
                      const ModelSpec& spec) {
  require(!data.empty(), ErrorCode::InvalidArgument, "log-likelihood of empty data");
  check_alignment(theta, spec);
  double total = 0.0;
  for (const auto& observation : data) {
    require(observation.pair != nullptr, ErrorCode::InvalidArgument, "null pair in observation");
    const double va = utility(observation.pair->a, theta, spec);
    const double vb = utility(observation.pair->b, theta, spec);
    const double margin = observation.choice == Choice::A ? va - vb : vb - va;
    total += log_logistic(margin);
  }
  return total;
}

ScoreHessian score_and_hessian(std::span<const ChoiceObservation> data,
                               std::span<const double> theta, const ModelSpec& spec) {
  require(!data.empty(), ErrorCode::InvalidArgument, "score of empty data");
  check_alignment(theta, spec);
  const int q = spec.term_count();
  ScoreHessian result{Eigen::VectorXd::Zero(q), Eigen::MatrixXd::Zero(q, q)};
  for (const auto& observation : data) {
    require(observation.pair != nullptr, ErrorCode::InvalidArgument, "null pair in observation");
    const std::vector<double> diff = feature_difference(*observation.pair, spec);
    const Eigen::Map<const Eigen::VectorXd> d(diff.data(), q);
    double margin = 0.0;
    for (int k = 0; k < q; ++k) margin += theta[static_cast<std::size_t>(k)] * diff[static_cast<std::size_t>(k)];
    const double p = logistic(margin);
    const double y = observation.choice == Choice::A ? 1.0 : 0.0;
    result.score += (y - p) * d;
    result.hessian -= p * (1.0 - p) * (d * d.transpose());
  }
  return result;
}

Choice sample_choice(const ChoicePair& pair, std::span<const double> theta, const ModelSpec& spec,
                     Rng& rng) {
  const double ua = utility(pair.a, theta, spec) + rng.gumbel();
  const double ub = utility(pair.b, theta, spec) + rng.gumbel();
  return ua >= ub ? Choice::A : Choice::B;
}

}  // namespace cbcw
