#include "cbcw/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "cbcw/error.hpp"
#include "cbcw/stats.hpp"
#include "estimate_internal.hpp"

namespace cbcw {

namespace internal {

// Observations grouped by distinct difference vector: the likelihood only
// depends on d = expand(a) - expand(b) and the choice counts, which keeps
// repeated fits (bootstrap replicates, segment runs) cheap.
CompactData compact_observations(std::span<const ChoiceObservation> data, const ModelSpec& spec) {
  require(!data.empty(), ErrorCode::InvalidArgument, "fit on empty data");
  const int q = spec.term_count();
  std::unordered_map<const ChoicePair*, std::size_t> slot_of;
  std::vector<Eigen::VectorXd> columns;
  std::vector<double> total;
  std::vector<double> chose_a;
  for (const auto& observation : data) {
    require(observation.pair != nullptr, ErrorCode::InvalidArgument, "null pair in observation");
    auto [it, inserted] = slot_of.emplace(observation.pair, columns.size());
    if (inserted) {
      const std::vector<double> diff = feature_difference(*observation.pair, spec);
      columns.emplace_back(Eigen::Map<const Eigen::VectorXd>(diff.data(), q));
      total.push_back(0.0);
      chose_a.push_back(0.0);
    }
    total[it->second] += 1.0;
    if (observation.choice == Choice::A) chose_a[it->second] += 1.0;
  }
  CompactData compact;
  compact.d.resize(q, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t s = 0; s < columns.size(); ++s) {
    compact.d.col(static_cast<Eigen::Index>(s)) = columns[s];
  }
  compact.total = Eigen::Map<const Eigen::VectorXd>(total.data(), static_cast<Eigen::Index>(total.size()));
  compact.chose_a =
      Eigen::Map<const Eigen::VectorXd>(chose_a.data(), static_cast<Eigen::Index>(chose_a.size()));
  return compact;
}

namespace {

double log_sigmoid(double x) {
  const double t = -x;
  return -(std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double compact_log_lik(const CompactData& data, const Eigen::VectorXd& theta) {
  const Eigen::VectorXd margins = data.d.transpose() * theta;
  double total = 0.0;
  for (Eigen::Index s = 0; s < margins.size(); ++s) {
    total += data.chose_a[s] * log_sigmoid(margins[s]) +
             (data.total[s] - data.chose_a[s]) * log_sigmoid(-margins[s]);
  }
  return total;
}

void compact_score(const CompactData& data, const Eigen::VectorXd& theta, Eigen::VectorXd& grad,
                   Eigen::MatrixXd& hessian) {
  const Eigen::VectorXd margins = data.d.transpose() * theta;
  Eigen::VectorXd residual(margins.size());
  Eigen::VectorXd weight(margins.size());
  for (Eigen::Index s = 0; s < margins.size(); ++s) {
    const double p = sigmoid(margins[s]);
    residual[s] = data.chose_a[s] - data.total[s] * p;
    weight[s] = data.total[s] * p * (1.0 - p);
  }
  grad = data.d * residual;
  hessian = -(data.d * weight.asDiagonal() * data.d.transpose());
}

// Inverse of the negative Hessian; falls back to the eigen pseudo-inverse on
// rank deficiency.
Eigen::MatrixXd covariance_from_hessian(const Eigen::MatrixXd& hessian, bool& rank_deficient) {
  const Eigen::MatrixXd neg = -hessian;
  const Eigen::LLT<Eigen::MatrixXd> llt(neg);
  if (llt.info() == Eigen::Success) {
    bool positive = true;
    for (Eigen::Index i = 0; i < neg.rows(); ++i) {
      if (llt.matrixLLT()(i, i) <= 0.0) {
        positive = false;
        break;
      }
    }
    if (positive) {
      rank_deficient = false;
      return llt.solve(Eigen::MatrixXd::Identity(neg.rows(), neg.cols()));
    }
  }
  rank_deficient = true;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(neg);
  const Eigen::VectorXd& values = solver.eigenvalues();
  const double tolerance = std::max(values.maxCoeff(), 0.0) * static_cast<double>(neg.rows()) *
                           std::numeric_limits<double>::epsilon();
  Eigen::VectorXd inverted = Eigen::VectorXd::Zero(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] > tolerance) inverted[i] = 1.0 / values[i];
  }
  return solver.eigenvectors() * inverted.asDiagonal() * solver.eigenvectors().transpose();
}

}  // namespace

FitResult fit_compact(const CompactData& data, const ModelSpec& spec,
                      const FitSettings& settings) {
  const int q = spec.term_count();
  require(q > 0, ErrorCode::InvalidArgument, "fit on an empty term set");

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(q);
  double log_lik = compact_log_lik(data, theta);
  require(std::isfinite(log_lik), ErrorCode::Numeric, "non-finite likelihood at start");
  if (settings.log_lik_trace) settings.log_lik_trace->push_back(log_lik);

  Eigen::VectorXd grad(q);
  Eigen::MatrixXd hessian(q, q);
  bool converged = false;
  int iterations = 0;

  for (int iteration = 0; iteration < settings.max_iterations; ++iteration) {
    compact_score(data, theta, grad, hessian);
    if (grad.lpNorm<Eigen::Infinity>() < settings.gradient_tolerance) {
      converged = true;
      break;
    }
    // Newton direction, with an escalating ridge when the Hessian is singular.
    Eigen::VectorXd direction;
    double ridge = 0.0;
    for (;;) {
      Eigen::MatrixXd system = -hessian;
      if (ridge > 0.0) system += ridge * Eigen::MatrixXd::Identity(q, q);
      const Eigen::LLT<Eigen::MatrixXd> llt(system);
      if (llt.info() == Eigen::Success) {
        direction = llt.solve(grad);
        if (direction.allFinite()) break;
      }
      ridge = ridge == 0.0 ? 1e-8 : ridge * 10.0;
      require(ridge < 1e16, ErrorCode::Numeric, "Hessian unusable even with ridge");
    }

    // Step halving accepts any non-decreasing step: close to the optimum the
    // gain falls below the likelihood's floating-point resolution while the
    // gradient still needs one more Newton contraction.
    double step = 1.0;
    double next_log_lik = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd next_theta;
    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      next_theta = theta + step * direction;
      next_log_lik = compact_log_lik(data, next_theta);
      require(!std::isnan(next_log_lik), ErrorCode::Numeric, "likelihood became NaN");
      if (next_log_lik >= log_lik) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    theta = std::move(next_theta);
    log_lik = next_log_lik;
    iterations = iteration + 1;
    if (settings.log_lik_trace) settings.log_lik_trace->push_back(log_lik);
  }

  if (!converged) {
    compact_score(data, theta, grad, hessian);
    converged = grad.lpNorm<Eigen::Infinity>() < settings.gradient_tolerance;
  } else {
    compact_score(data, theta, grad, hessian);
  }

  FitResult fit;
  fit.spec = spec;
  fit.estimates.assign(theta.data(), theta.data() + q);
  fit.covariance = covariance_from_hessian(hessian, fit.covariance_rank_deficient);
  fit.z.resize(static_cast<std::size_t>(q));
  fit.p_values.resize(static_cast<std::size_t>(q));
  for (int k = 0; k < q; ++k) {
    const double variance = fit.covariance(k, k);
    const auto uk = static_cast<std::size_t>(k);
    if (variance > 0.0) {
      fit.z[uk] = fit.estimates[uk] / std::sqrt(variance);
    } else {
      fit.z[uk] = std::numeric_limits<double>::quiet_NaN();
    }
    fit.p_values[uk] = two_sided_p(fit.z[uk]);
  }
  fit.log_lik = log_lik;
  fit.aic = compute_aic(q, log_lik);
  fit.converged = converged;
  fit.iterations = iterations;
  fit.separation_flags =
      detect_separation(fit.estimates, fit.z, settings.separation_magnitude, settings.separation_z);
  return fit;
}

}  // namespace internal

FitResult fit_mnl(std::span<const ChoiceObservation> data, const ModelSpec& spec,
                  const FitSettings& settings) {
  return internal::fit_compact(internal::compact_observations(data, spec), spec, settings);
}

std::vector<bool> wald_significance(const FitResult& fit, double alpha) {
  require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidArgument, "alpha out of (0,1)");
  const double critical = normal_quantile(1.0 - alpha / 2.0);
  std::vector<bool> significant(fit.z.size());
  for (std::size_t i = 0; i < fit.z.size(); ++i) {
    significant[i] = std::abs(fit.z[i]) >= critical;  // NaN compares false
  }
  return significant;
}

std::vector<bool> detect_separation(std::span<const double> estimates, std::span<const double> z,
                                    double magnitude_threshold, double z_threshold) {
  require(estimates.size() == z.size(), ErrorCode::InvalidArgument,
          "estimate/z length mismatch");
  std::vector<bool> flags(estimates.size());
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    flags[i] = std::abs(estimates[i]) > magnitude_threshold && std::abs(z[i]) < z_threshold;
  }
  return flags;
}

std::vector<bool> detect_separation(const FitResult& fit, double magnitude_threshold,
                                    double z_threshold) {
  return detect_separation(fit.estimates, fit.z, magnitude_threshold, z_threshold);
}

double compute_aic(int term_count, double log_lik) {
  return 2.0 * static_cast<double>(term_count) - 2.0 * log_lik;
}

double compute_aic(const FitResult& fit) { return compute_aic(fit.spec.term_count(), fit.log_lik); }

std::vector<int> insignificant_mains(const FitResult& linear_fit, double alpha) {
  require(linear_fit.spec.interaction_terms().empty(), ErrorCode::InvalidArgument,
          "elimination expects a mains-only fit");
  const std::vector<bool> significant = wald_significance(linear_fit, alpha);
  std::vector<int> dropped;
  for (std::size_t i = 0; i < significant.size(); ++i) {
    if (!significant[i]) dropped.push_back(linear_fit.spec.main_terms()[i]);
  }
  return dropped;
}

PipelineResult backward_eliminate(std::span<const ChoiceObservation> data,
                                  const AttributeCatalog& catalog, double alpha,
                                  const FitSettings& settings) {
  std::vector<int> all(static_cast<std::size_t>(catalog.size()));
  for (int i = 0; i < catalog.size(); ++i) all[static_cast<std::size_t>(i)] = i;

  PipelineResult result;
  result.linear_full = fit_mnl(data, ModelSpec::mains(all), settings);
  result.dropped = insignificant_mains(result.linear_full, alpha);
  require(result.dropped.size() < all.size(), ErrorCode::EmptyModel,
          "every attribute is insignificant; nothing to retain");

  if (result.dropped.empty()) {
    result.linear_reduced = result.linear_full;
    return result;
  }
  std::vector<int> retained;
  for (int i : all) {
    if (std::find(result.dropped.begin(), result.dropped.end(), i) == result.dropped.end()) {
      retained.push_back(i);
    }
  }
  result.linear_reduced = fit_mnl(data, ModelSpec::mains(retained), settings);
  return result;
}

FitResult fit_interactions(std::span<const ChoiceObservation> data,
                           const std::vector<int>& retained_mains, const FitSettings& settings) {
  require(retained_mains.size() >= 2, ErrorCode::InvalidArgument,
          "interaction fit needs at least 2 retained attributes");
  return fit_mnl(data, ModelSpec::mains(retained_mains).with_all_interactions(), settings);
}

PipelineResult run_pipeline(std::span<const ChoiceObservation> data,
                            const AttributeCatalog& catalog, double alpha,
                            const FitSettings& settings) {
  PipelineResult result = backward_eliminate(data, catalog, alpha, settings);
  result.interaction_fit =
      fit_interactions(data, result.linear_reduced.spec.main_terms(), settings);
  return result;
}

PipelineResult run_segment_pipeline(const Dataset& dataset, const SegmentFilter& filter,
                                    double alpha, const FitSettings& settings) {
  const Dataset filtered = filter_dataset(dataset, filter);
  require(!filtered.observations.empty(), ErrorCode::InvalidArgument,
          "segment filter selects no observations");
  const std::vector<ChoiceObservation> observations = choice_observations(filtered);
  return run_pipeline(observations, filtered.catalog, alpha, settings);
}

}  // namespace cbcw
