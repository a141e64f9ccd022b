#pragma once

#include <span>

#include <Eigen/Core>

#include "cbcw/estimate.hpp"
#include "cbcw/model.hpp"

namespace cbcw::internal {

// Observation groups shared between fit_mnl and the bootstrap loop; see
// estimate.cpp.
struct CompactData {
  Eigen::MatrixXd d;
  Eigen::VectorXd total;
  Eigen::VectorXd chose_a;
};

CompactData compact_observations(std::span<const ChoiceObservation> data, const ModelSpec& spec);

FitResult fit_compact(const CompactData& data, const ModelSpec& spec, const FitSettings& settings);

}  // namespace cbcw::internal
