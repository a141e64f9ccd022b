#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "cbcw/model.hpp"

namespace cbcw {

// A partial-profile paired-comparison design: every pair shows exactly
// `strength` of the `n_attributes` attributes.
struct Design {
  int n_attributes = 0;
  int strength = 0;
  std::vector<ChoicePair> pairs;

  std::size_t size() const { return pairs.size(); }

  // Throws unless masks are uniform-strength, shared within each pair, ids
  // unique and profiles well formed.
  void validate() const;
};

// Partition of a design's pair ids into questionnaire blocks.
struct BlockedDesign {
  std::vector<std::pair<std::string, std::vector<std::string>>> blocks;
};

// Fisher information M = sum_pairs p(1-p) d d^T at the given coefficients.
Eigen::MatrixXd information_matrix(const Design& design, std::span<const double> theta,
                                   const ModelSpec& spec);

// det(M/n)^(1/q); 0 when M is singular. q = number of model terms.
double d_criterion(const Design& design, std::span<const double> theta, const ModelSpec& spec);

// d_criterion(a) / d_criterion(b); errors when the benchmark b scores 0.
double relative_efficiency(const Design& a, const Design& b, std::span<const double> theta,
                           const ModelSpec& spec);

// True when one alternative is componentwise >= the other on the shown
// attributes; equal profiles count as dominated (degenerate, no information).
bool is_dominated(const ChoicePair& pair);

// Keeps exactly the non-dominated pairs, order and ids untouched.
Design prune_dominated(const Design& design);

std::size_t dominated_count(const Design& design);

// Splits the design into k blocks whose sizes differ by at most one,
// greedily balancing each attribute's active-appearance count.
BlockedDesign block_design(const Design& design, int k, std::uint64_t seed);

// Stamps block labels from a partition onto the design's pairs.
Design with_blocks(Design design, const BlockedDesign& blocks);

std::vector<std::string> block_labels(const Design& design);

struct GenerateOptions {
  int iterations = 20000;  // coordinate-exchange proposals per restart
  int restarts = 4;
};

// Coordinate-exchange search for a high-D-criterion design at theta = 0.
// Starts from random non-dominated pairs, proposes level flips and
// active-mask swaps, and keeps the best restart (ties to the lowest restart
// index). The result never contains dominated pairs.
Design generate_design(int n_attributes, int strength, int n_pairs, const ModelSpec& spec,
                       std::uint64_t seed, const GenerateOptions& options = {});

}  // namespace cbcw
