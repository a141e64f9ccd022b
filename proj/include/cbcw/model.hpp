#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "cbcw/catalog.hpp"
#include "cbcw/rng.hpp"

namespace cbcw {

// One alternative of a choice pair. `active[i]` says whether attribute i is
// shown; hidden attributes sit at the reference level 0 and contribute
// nothing to any utility difference.
struct Profile {
  std::vector<std::uint8_t> levels;
  std::vector<std::uint8_t> active;

  int size() const { return static_cast<int>(levels.size()); }

  // All attributes shown.
  static Profile full(std::vector<std::uint8_t> levels);
  // Nothing shown, everything at the reference level.
  static Profile hidden(int n_attributes);

  bool operator==(const Profile&) const = default;
};

// Which main-effect and two-factor interaction terms the utility carries.
// Term order is fixed: mains in catalog order, then interactions in
// lexicographic order. Interactions may only join attributes that are
// themselves main terms.
class ModelSpec {
 public:
  ModelSpec() = default;

  static ModelSpec mains(std::vector<int> attribute_indices);
  ModelSpec with_all_interactions() const;
  ModelSpec with_interactions(std::vector<std::pair<int, int>> pairs) const;

  const std::vector<int>& main_terms() const { return mains_; }
  const std::vector<std::pair<int, int>>& interaction_terms() const { return interactions_; }

  int term_count() const { return static_cast<int>(mains_.size() + interactions_.size()); }

  std::string term_name(const AttributeCatalog& catalog, int term) const;
  std::vector<std::string> term_names(const AttributeCatalog& catalog) const;

  // Throws when a term references an attribute index outside [0, n_attributes).
  void validate_for(int n_attributes) const;

  bool operator==(const ModelSpec&) const = default;

 private:
  std::vector<int> mains_;
  std::vector<std::pair<int, int>> interactions_;
};

// Builds a spec from term names like "N" or "N*MH". Every interaction
// endpoint must also appear as a main term.
ModelSpec spec_from_terms(const AttributeCatalog& catalog, std::span<const std::string> terms);

enum class Choice : std::uint8_t { A = 0, B = 1 };

inline Choice other(Choice c) { return c == Choice::A ? Choice::B : Choice::A; }

// A choice set of two alternatives sharing one active-attribute mask.
struct ChoicePair {
  std::string id;
  std::string block;  // empty until the design is blocked
  Profile a;
  Profile b;
};

struct ChoiceObservation {
  const ChoicePair* pair = nullptr;
  Choice choice = Choice::A;
};

// Model matrix row for one profile: x_r per main term followed by
// x_r * x_r' per interaction term. Hidden attributes contribute 0.
std::vector<double> expand_features(const Profile& profile, const ModelSpec& spec);

// Deterministic utility v = sum_r beta_r x_r + sum_{r<r'} gamma_rr' x_r x_r'.
double utility(const Profile& profile, std::span<const double> theta, const ModelSpec& spec);

// P(choose a) = 1 / (1 + exp(v_b - v_a)), clamped into the open unit interval.
double choice_probability(const ChoicePair& pair, std::span<const double> theta,
                          const ModelSpec& spec);

// Sum of log-probabilities of the observed choices; always <= 0.
double log_likelihood(std::span<const ChoiceObservation> data, std::span<const double> theta,
                      const ModelSpec& spec);

struct ScoreHessian {
  Eigen::VectorXd score;
  Eigen::MatrixXd hessian;
};

// Gradient sum (y - p) d and Hessian -sum p(1-p) d d^T of the log-likelihood,
// where d = expand_features(a) - expand_features(b) and y = 1 when a chosen.
ScoreHessian score_and_hessian(std::span<const ChoiceObservation> data,
                               std::span<const double> theta, const ModelSpec& spec);

// Random-utility draw: adds independent Gumbel noise to both utilities and
// picks the larger. Ties resolve to A.
Choice sample_choice(const ChoicePair& pair, std::span<const double> theta, const ModelSpec& spec,
                     Rng& rng);

// expand_features(a) - expand_features(b).
std::vector<double> feature_difference(const ChoicePair& pair, const ModelSpec& spec);

}  // namespace cbcw
