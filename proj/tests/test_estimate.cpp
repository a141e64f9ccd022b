#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cbcw/error.hpp"
#include "cbcw/estimate.hpp"
#include "cbcw/rng.hpp"
#include "cbcw/stats.hpp"
#include "helpers.hpp"

using namespace cbcw;
using testutil::pair;

namespace {

// Observations with both outcomes on every distinct pair, so the MLE is
// interior and unique.
struct GridInstance {
  std::vector<ChoicePair> pairs;
  std::vector<int> chose_a;  // per pair
  std::vector<int> chose_b;
  ModelSpec spec;

  std::vector<ChoiceObservation> observations() const {
    std::vector<ChoiceObservation> data;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      for (int k = 0; k < chose_a[i]; ++k) data.push_back({&pairs[i], Choice::A});
      for (int k = 0; k < chose_b[i]; ++k) data.push_back({&pairs[i], Choice::B});
    }
    return data;
  }
};

// Independent log-likelihood for the oracle: plain loops, no library calls.
double oracle_ll(const GridInstance& inst, const std::vector<double>& theta) {
  double total = 0.0;
  for (std::size_t i = 0; i < inst.pairs.size(); ++i) {
    const auto& cp = inst.pairs[i];
    double margin = 0.0;
    std::size_t k = 0;
    for (int r : inst.spec.main_terms()) {
      const auto ur = static_cast<std::size_t>(r);
      const double da = cp.a.active[ur] ? cp.a.levels[ur] : 0;
      const double db = cp.b.active[ur] ? cp.b.levels[ur] : 0;
      margin += theta[k++] * (da - db);
    }
    for (const auto& [r, s] : inst.spec.interaction_terms()) {
      const auto ur = static_cast<std::size_t>(r);
      const auto us = static_cast<std::size_t>(s);
      const double da = (cp.a.active[ur] ? cp.a.levels[ur] : 0) *
                        (cp.a.active[us] ? cp.a.levels[us] : 0);
      const double db = (cp.b.active[ur] ? cp.b.levels[ur] : 0) *
                        (cp.b.active[us] ? cp.b.levels[us] : 0);
      margin += theta[k++] * (da - db);
    }
    const double p = 1.0 / (1.0 + std::exp(-margin));
    total += inst.chose_a[i] * std::log(p) + inst.chose_b[i] * std::log(1.0 - p);
  }
  return total;
}

// Exhaustive grid search over [-10, 10] refined down to step 1e-3. The
// log-likelihood is concave, so each coarse stage localizes the maximizer for
// the next one; every scanned point lies on the 1e-3 lattice.
std::vector<double> grid_mle(const GridInstance& inst) {
  const int q = inst.spec.term_count();
  if (q == 1) {
    double best_value = 0.0;
    double best_ll = -1e300;
    std::vector<double> trial(1);
    for (long i = -10000; i <= 10000; ++i) {
      trial[0] = static_cast<double>(i) * 1e-3;
      const double ll = oracle_ll(inst, trial);
      if (ll > best_ll) {
        best_ll = ll;
        best_value = trial[0];
      }
    }
    return {best_value};
  }

  REQUIRE(q == 2);
  const auto scan = [&](double step, double c1, double c2, double half) {
    const auto lo = [&](double center) {
      return std::max(-10.0, center - half);
    };
    const auto hi = [&](double center) { return std::min(10.0, center + half); };
    double best_ll = -1e300;
    std::pair<double, double> best{c1, c2};
    std::vector<double> trial(2);
    for (long i = std::lround(std::ceil(lo(c1) / step)); i <= std::lround(std::floor(hi(c1) / step)); ++i) {
      trial[0] = static_cast<double>(i) * step;
      for (long j = std::lround(std::ceil(lo(c2) / step)); j <= std::lround(std::floor(hi(c2) / step)); ++j) {
        trial[1] = static_cast<double>(j) * step;
        const double ll = oracle_ll(inst, trial);
        if (ll > best_ll) {
          best_ll = ll;
          best = {trial[0], trial[1]};
        }
      }
    }
    return best;
  };
  auto [c1, c2] = scan(0.1, 0.0, 0.0, 10.0);
  std::tie(c1, c2) = scan(0.01, c1, c2, 1.5);
  std::tie(c1, c2) = scan(1e-3, c1, c2, 0.15);
  return {c1, c2};
}

GridInstance one_term_instance(Rng& rng) {
  GridInstance inst;
  inst.spec = ModelSpec::mains({0});
  inst.pairs.push_back(pair("q0", {1, 0}, {0, 0}));
  inst.chose_a.push_back(1 + static_cast<int>(rng.index(9)));
  inst.chose_b.push_back(1 + static_cast<int>(rng.index(9)));
  return inst;
}

GridInstance two_term_instance(Rng& rng) {
  GridInstance inst;
  inst.spec = testutil::mains_upto(2);
  inst.pairs.push_back(pair("q0", {1, 0}, {0, 0}));
  // Second pair either decoupled from or coupled to the first coordinate.
  if (rng.coin()) {
    inst.pairs.push_back(pair("q1", {0, 1}, {0, 0}));
  } else {
    inst.pairs.push_back(pair("q1", {1, 1}, {0, 0}));
  }
  for (int i = 0; i < 2; ++i) {
    inst.chose_a.push_back(1 + static_cast<int>(rng.index(5)));
    inst.chose_b.push_back(1 + static_cast<int>(rng.index(5)));
  }
  return inst;
}

FitResult fit_with_stats(std::vector<double> estimates, std::vector<double> z) {
  FitResult fit;
  std::vector<int> mains;
  for (std::size_t i = 0; i < estimates.size(); ++i) mains.push_back(static_cast<int>(i));
  fit.spec = ModelSpec::mains(mains);
  fit.estimates = std::move(estimates);
  fit.z = std::move(z);
  fit.p_values.resize(fit.z.size());
  for (std::size_t i = 0; i < fit.z.size(); ++i) fit.p_values[i] = two_sided_p(fit.z[i]);
  fit.separation_flags.assign(fit.z.size(), false);
  fit.converged = true;
  return fit;
}

}  // namespace

TEST_CASE("fit_mnl matches the closed form and the grid oracle on one term") {
  GridInstance inst;
  inst.spec = ModelSpec::mains({0});
  inst.pairs.push_back(pair("q0", {1, 0}, {0, 0}));
  inst.chose_a = {2};
  inst.chose_b = {1};
  const auto data = inst.observations();
  const FitResult fit = fit_mnl(data, inst.spec);
  CHECK(fit.converged);
  CHECK(fit.estimates[0] == doctest::Approx(std::log(2.0)).epsilon(1e-8));
  const auto grid = grid_mle(inst);
  CHECK(std::abs(fit.estimates[0] - grid[0]) <= 1e-3);
}

TEST_CASE("fit_mnl matches the grid oracle on random small instances") {
  Rng rng(404);
  double worst = 0.0;
  for (int round = 0; round < 20; ++round) {
    const GridInstance inst = round % 2 == 0 ? one_term_instance(rng) : two_term_instance(rng);
    const auto data = inst.observations();
    REQUIRE(data.size() <= 20);
    const FitResult fit = fit_mnl(data, inst.spec);
    REQUIRE(fit.converged);
    const auto grid = grid_mle(inst);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      worst = std::max(worst, std::abs(fit.estimates[k] - grid[k]));
      CHECK(std::abs(fit.estimates[k] - grid[k]) <= 1e-3);
    }
  }
  MESSAGE("largest grid/Newton gap: ", worst);
}

TEST_CASE("fit_mnl on balanced data keeps estimates near zero") {
  Rng rng(7);
  const ModelSpec spec = testutil::mains_upto(2);
  std::vector<ChoicePair> pairs{pair("q0", {1, 0}, {0, 1}), pair("q1", {1, 1}, {0, 0})};
  std::vector<ChoiceObservation> data;
  const std::vector<double> zero{0.0, 0.0};
  for (int i = 0; i < 2000; ++i) {
    const auto& cp = pairs[static_cast<std::size_t>(i % 2)];
    data.push_back({&cp, sample_choice(cp, zero, spec, rng)});
  }
  const FitResult fit = fit_mnl(data, spec);
  REQUIRE(fit.converged);
  for (std::size_t k = 0; k < 2; ++k) {
    const double se = std::sqrt(fit.covariance(static_cast<int>(k), static_cast<int>(k)));
    CHECK(std::abs(fit.estimates[k]) < 3.0 * se);
  }
}

TEST_CASE("perfectly predictive data is flagged as separated") {
  const ModelSpec spec = ModelSpec::mains({0});
  auto cp = pair("q0", {1, 0}, {0, 0});
  std::vector<ChoiceObservation> data(30, {&cp, Choice::A});
  const FitResult fit = fit_mnl(data, spec);
  const bool flagged = !fit.separation_flags.empty() && fit.separation_flags[0];
  CHECK((!fit.converged || flagged));
}

TEST_CASE("relabeling alternatives leaves estimates unchanged") {
  Rng rng(55);
  const ModelSpec spec = testutil::mains_upto(2);
  std::vector<ChoicePair> pairs{pair("q0", {1, 0}, {0, 1}), pair("q1", {1, 1}, {0, 0}),
                                pair("q2", {1, 0}, {0, 0})};
  std::vector<ChoicePair> swapped = pairs;
  for (auto& cp : swapped) std::swap(cp.a, cp.b);

  const std::vector<double> truth{0.7, -0.4};
  std::vector<ChoiceObservation> data;
  std::vector<ChoiceObservation> relabeled;
  for (int i = 0; i < 300; ++i) {
    const std::size_t which = static_cast<std::size_t>(i % 3);
    const Choice choice = sample_choice(pairs[which], truth, spec, rng);
    data.push_back({&pairs[which], choice});
    if (i % 2 == 0) {
      relabeled.push_back({&swapped[which], other(choice)});
    } else {
      relabeled.push_back({&pairs[which], choice});
    }
  }
  const FitResult base = fit_mnl(data, spec);
  const FitResult flipped = fit_mnl(relabeled, spec);
  REQUIRE(base.converged);
  REQUIRE(flipped.converged);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(std::abs(base.estimates[k] - flipped.estimates[k]) < 1e-8);
  }
}

TEST_CASE("estimates do not depend on observation order") {
  Rng rng(56);
  const ModelSpec spec = testutil::mains_upto(2);
  std::vector<ChoicePair> pairs{pair("q0", {1, 0}, {0, 1}), pair("q1", {1, 1}, {0, 0})};
  std::vector<ChoiceObservation> data;
  for (int i = 0; i < 200; ++i) {
    const auto& cp = pairs[static_cast<std::size_t>(i % 2)];
    data.push_back({&cp, rng.coin() ? Choice::A : Choice::B});
  }
  std::vector<ChoiceObservation> shuffled = data;
  for (std::size_t i = shuffled.size(); i > 1; --i) {
    std::swap(shuffled[i - 1], shuffled[rng.index(i)]);
  }
  const FitResult a = fit_mnl(data, spec);
  const FitResult b = fit_mnl(shuffled, spec);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(std::abs(a.estimates[k] - b.estimates[k]) < 1e-8);
  }
}

TEST_CASE("accepted Newton steps never decrease the log-likelihood") {
  Rng rng(57);
  const ModelSpec spec = testutil::mains_upto(2);
  std::vector<ChoicePair> pairs{pair("q0", {1, 0}, {0, 1}), pair("q1", {1, 1}, {0, 0})};
  const std::vector<double> truth{1.5, -0.8};
  std::vector<ChoiceObservation> data;
  for (int i = 0; i < 150; ++i) {
    const auto& cp = pairs[static_cast<std::size_t>(i % 2)];
    data.push_back({&cp, sample_choice(cp, truth, spec, rng)});
  }
  std::vector<double> trace;
  FitSettings settings;
  settings.log_lik_trace = &trace;
  const FitResult fit = fit_mnl(data, spec, settings);
  REQUIRE(trace.size() >= 2);
  CHECK(std::is_sorted(trace.begin(), trace.end()));
  CHECK(fit.log_lik == doctest::Approx(trace.back()));
}

TEST_CASE("covariance diagonal is positive at convergence") {
  Rng rng(58);
  const ModelSpec spec = testutil::mains_upto(2);
  std::vector<ChoicePair> pairs{pair("q0", {1, 0}, {0, 1}), pair("q1", {1, 1}, {0, 0})};
  const std::vector<double> truth{0.9, 0.4};
  std::vector<ChoiceObservation> data;
  for (int i = 0; i < 240; ++i) {
    const auto& cp = pairs[static_cast<std::size_t>(i % 2)];
    data.push_back({&cp, sample_choice(cp, truth, spec, rng)});
  }
  const FitResult fit = fit_mnl(data, spec);
  REQUIRE(fit.converged);
  CHECK_FALSE(fit.covariance_rank_deficient);
  for (int k = 0; k < 2; ++k) {
    CHECK(fit.covariance(k, k) > 0.0);
    CHECK(std::isfinite(fit.z[static_cast<std::size_t>(k)]));
  }
}

TEST_CASE("wald_significance applies the two-sided normal cutoff") {
  const FitResult fit = fit_with_stats({0.1012, 0.5691, 1.0, -1.0},
                                       {0.655, 4.468, 1.96, -1.96});
  const auto sig = wald_significance(fit, 0.05);
  CHECK_FALSE(sig[0]);  // z = 0.655
  CHECK(sig[1]);        // z = 4.468
  CHECK(sig[2]);        // the 1.96 boundary counts as significant
  CHECK(sig[3]);
}

TEST_CASE("detect_separation flags huge estimates with tiny z") {
  const std::vector<double> estimates{-20.6751, 13.65828, 1.24043, 0.5691, 16.69124};
  const std::vector<double> z{-0.081, 0.024, 5.339, 4.468, 0.065};
  const auto flags = detect_separation(estimates, z);
  CHECK(flags == std::vector<bool>{true, true, false, false, true});
}

TEST_CASE("compute_aic is two terms minus two log-likelihoods") {
  CHECK(compute_aic(1, std::log(0.5)) == doctest::Approx(3.3863).epsilon(1e-4));

  SUBCASE("a superfluous term raises AIC on average") {
    Rng rng(59);
    const ModelSpec small = ModelSpec::mains({0});
    const ModelSpec big = testutil::mains_upto(2);
    const std::vector<double> truth{0.8, 0.0};
    std::vector<ChoicePair> pairs{pair("q0", {1, 0}, {0, 0}), pair("q1", {1, 1}, {0, 1}),
                                  pair("q2", {0, 1}, {0, 0})};
    double total_delta = 0.0;
    for (int rep = 0; rep < 40; ++rep) {
      std::vector<ChoiceObservation> data;
      for (int i = 0; i < 150; ++i) {
        const auto& cp = pairs[static_cast<std::size_t>(i % 3)];
        data.push_back({&cp, sample_choice(cp, truth, big, rng)});
      }
      total_delta += fit_mnl(data, big).aic - fit_mnl(data, small).aic;
    }
    CHECK(total_delta / 40.0 > 0.0);
  }
}

TEST_CASE("insignificant_mains reproduces the reference z pattern") {
  // Catalog-order z values of an 11-attribute mains fit where exactly the
  // 2nd, 4th and 10th attributes are insignificant.
  const FitResult fit = fit_with_stats(
      {0.5691, -20.6751, -0.3512, 0.1012, -0.8183, 0.5428, 0.7952, 1.1241, 0.4337, -0.1055,
       -0.3302},
      {4.468, -0.081, -2.585, 0.655, -5.096, 3.386, 5.165, 7.189, 3.005, -0.722, -2.797});
  CHECK(insignificant_mains(fit, 0.05) == std::vector<int>{1, 3, 9});
}

TEST_CASE("backward elimination drops planted-null attributes") {
  const AttributeCatalog catalog = generic_catalog(3);
  const ModelSpec spec = testutil::mains_upto(3);
  const std::vector<double> truth{1.2, 0.0, 0.9};
  std::vector<ChoicePair> pairs{pair("q0", {1, 0, 0}, {0, 1, 0}), pair("q1", {1, 1, 0}, {0, 0, 1}),
                                pair("q2", {0, 1, 1}, {1, 0, 0}), pair("q3", {1, 0, 1}, {0, 1, 1})};

  SUBCASE("single run keeps the true attributes") {
    Rng rng(61);
    std::vector<ChoiceObservation> data;
    for (int i = 0; i < 600; ++i) {
      const auto& cp = pairs[static_cast<std::size_t>(i % 4)];
      data.push_back({&cp, sample_choice(cp, truth, spec, rng)});
    }
    const PipelineResult result = backward_eliminate(data, catalog);
    CHECK(result.dropped == std::vector<int>{1});
    CHECK(result.linear_reduced.spec.main_terms() == std::vector<int>{0, 2});
    CHECK_FALSE(result.interaction_fit.has_value());
  }

  SUBCASE("the null attribute is dropped at roughly the alpha complement") {
    int dropped_null = 0;
    int dropped_true = 0;
    for (int rep = 0; rep < 50; ++rep) {
      Rng rng(1000 + static_cast<std::uint64_t>(rep));
      std::vector<ChoiceObservation> data;
      for (int i = 0; i < 600; ++i) {
        const auto& cp = pairs[static_cast<std::size_t>(i % 4)];
        data.push_back({&cp, sample_choice(cp, truth, spec, rng)});
      }
      const PipelineResult result = backward_eliminate(data, catalog);
      for (int attribute : result.dropped) {
        if (attribute == 1) ++dropped_null;
        if (attribute != 1) ++dropped_true;
      }
    }
    CHECK(dropped_null >= 43);  // about 95% of 50
    CHECK(dropped_true == 0);
  }

  SUBCASE("pure-noise data leaves nothing to retain") {
    Rng rng(62);
    const std::vector<double> zero{0.0, 0.0, 0.0};
    std::vector<ChoiceObservation> data;
    for (int i = 0; i < 100; ++i) {
      const auto& cp = pairs[static_cast<std::size_t>(i % 4)];
      data.push_back({&cp, sample_choice(cp, zero, spec, rng)});
    }
    CHECK_THROWS_AS(backward_eliminate(data, catalog), Error);
  }
}

TEST_CASE("fit_interactions builds the retained-mains interaction spec") {
  Rng rng(63);
  const ModelSpec full = testutil::mains_upto(8);
  std::vector<ChoicePair> pairs;
  for (int i = 0; i < 40; ++i) {
    std::vector<int> a;
    std::vector<int> b;
    for (int k = 0; k < 8; ++k) {
      a.push_back(rng.coin() ? 1 : 0);
      b.push_back(rng.coin() ? 1 : 0);
    }
    pairs.push_back(pair("q" + std::to_string(i), a, b));
  }
  std::vector<ChoiceObservation> data;
  const std::vector<double> zero(8, 0.0);
  for (int i = 0; i < 200; ++i) {
    const auto& cp = pairs[static_cast<std::size_t>(i % pairs.size())];
    data.push_back({&cp, sample_choice(cp, zero, full, rng)});
  }
  const FitResult eight = fit_interactions(data, {0, 1, 2, 3, 4, 5, 6, 7});
  CHECK(eight.spec.term_count() == 36);
  CHECK(eight.spec.interaction_terms().size() == 28);

  const FitResult two = fit_interactions(data, {0, 1});
  CHECK(two.spec.term_count() == 3);

  CHECK_THROWS_AS(fit_interactions(data, {0}), Error);
}

TEST_CASE("a planted interaction is recovered within two standard errors") {
  Rng rng(64);
  const ModelSpec spec = testutil::mains_upto(2).with_all_interactions();
  const std::vector<double> truth{0.3, 0.2, 2.0};
  std::vector<ChoicePair> pairs{pair("q0", {1, 0}, {0, 0}), pair("q1", {0, 1}, {0, 0}),
                                pair("q2", {1, 1}, {0, 0}), pair("q3", {1, 1}, {1, 0}),
                                pair("q4", {1, 1}, {0, 1}), pair("q5", {1, 0}, {0, 1})};
  std::vector<ChoiceObservation> data;
  for (int i = 0; i < 5000; ++i) {
    const auto& cp = pairs[static_cast<std::size_t>(i % pairs.size())];
    data.push_back({&cp, sample_choice(cp, truth, spec, rng)});
  }
  const FitResult fit = fit_interactions(data, {0, 1});
  REQUIRE(fit.converged);
  const double se = std::sqrt(fit.covariance(2, 2));
  CHECK(std::abs(fit.estimates[2] - 2.0) < 2.0 * se);
}

TEST_CASE("run_pipeline stitches the stages together") {
  Rng rng(65);
  const AttributeCatalog catalog = generic_catalog(3);
  const ModelSpec spec = testutil::mains_upto(3);
  const std::vector<double> truth{1.1, 0.0, 0.8};
  std::vector<ChoicePair> pairs{pair("q0", {1, 0, 0}, {0, 1, 0}), pair("q1", {1, 1, 0}, {0, 0, 1}),
                                pair("q2", {0, 1, 1}, {1, 0, 0}), pair("q3", {1, 0, 1}, {0, 1, 1})};
  std::vector<ChoiceObservation> data;
  for (int i = 0; i < 800; ++i) {
    const auto& cp = pairs[static_cast<std::size_t>(i % 4)];
    data.push_back({&cp, sample_choice(cp, truth, spec, rng)});
  }
  const PipelineResult result = run_pipeline(data, catalog);
  REQUIRE(result.interaction_fit.has_value());
  CHECK(result.interaction_fit->spec.main_terms() == result.linear_reduced.spec.main_terms());
  const std::size_t retained = result.linear_reduced.spec.main_terms().size();
  CHECK(result.interaction_fit->spec.interaction_terms().size() ==
        retained * (retained - 1) / 2);
  CHECK(result.interaction_fit->aic ==
        doctest::Approx(2.0 * result.interaction_fit->spec.term_count() -
                        2.0 * result.interaction_fit->log_lik));
}
