#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "cbcw/dataset.hpp"
#include "cbcw/model.hpp"

namespace cbcw {

struct FitSettings {
  int max_iterations = 100;
  double gradient_tolerance = 1e-8;
  double separation_magnitude = 10.0;
  double separation_z = 0.5;
  // When set, receives the log-likelihood after every accepted Newton step.
  std::vector<double>* log_lik_trace = nullptr;
};

struct FitResult {
  ModelSpec spec;
  std::vector<double> estimates;
  Eigen::MatrixXd covariance;
  std::vector<double> z;         // NaN where the covariance diagonal vanishes
  std::vector<double> p_values;  // two-sided normal
  double log_lik = 0.0;
  double aic = 0.0;
  bool converged = false;
  bool covariance_rank_deficient = false;
  std::vector<bool> separation_flags;
  int iterations = 0;
};

// Newton maximum-likelihood fit from theta = 0 with step halving and a ridge
// fallback on singular Hessians. Non-convergence is reported in the result,
// never thrown; a non-finite likelihood throws a numeric error.
FitResult fit_mnl(std::span<const ChoiceObservation> data, const ModelSpec& spec,
                  const FitSettings& settings = {});

// |z| >= Phi^-1(1 - alpha/2), the boundary counting as significant.
std::vector<bool> wald_significance(const FitResult& fit, double alpha = 0.05);

// Quasi-separation pattern: huge estimate with a tiny Wald z.
std::vector<bool> detect_separation(std::span<const double> estimates, std::span<const double> z,
                                    double magnitude_threshold = 10.0, double z_threshold = 0.5);
std::vector<bool> detect_separation(const FitResult& fit, double magnitude_threshold = 10.0,
                                    double z_threshold = 0.5);

double compute_aic(int term_count, double log_lik);
double compute_aic(const FitResult& fit);

struct PipelineResult {
  FitResult linear_full;
  std::vector<int> dropped;  // attribute indices removed after the full fit
  FitResult linear_reduced;
  std::optional<FitResult> interaction_fit;
};

// Attribute indices whose main effects are insignificant in a mains-only fit.
std::vector<int> insignificant_mains(const FitResult& linear_fit, double alpha = 0.05);

// Fits all mains, drops every insignificant attribute in one batch, refits.
PipelineResult backward_eliminate(std::span<const ChoiceObservation> data,
                                  const AttributeCatalog& catalog, double alpha = 0.05,
                                  const FitSettings& settings = {});

// Retained mains plus all their pairwise interactions.
FitResult fit_interactions(std::span<const ChoiceObservation> data,
                           const std::vector<int>& retained_mains,
                           const FitSettings& settings = {});

// Linear fit, one-batch elimination, then the interaction fit.
PipelineResult run_pipeline(std::span<const ChoiceObservation> data,
                            const AttributeCatalog& catalog, double alpha = 0.05,
                            const FitSettings& settings = {});

PipelineResult run_segment_pipeline(const Dataset& dataset, const SegmentFilter& filter,
                                    double alpha = 0.05, const FitSettings& settings = {});

}  // namespace cbcw
