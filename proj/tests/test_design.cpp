#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "cbcw/design.hpp"
#include "cbcw/error.hpp"
#include "cbcw/rng.hpp"
#include "helpers.hpp"

using namespace cbcw;
using testutil::design_of;
using testutil::pair;

namespace {

// Test-side evaluator kept independent of the library path: features, logit
// probability, information matrix and determinant are all recomputed from
// first principles with plain loops.
std::vector<double> oracle_features(const Profile& profile, const ModelSpec& spec) {
  std::vector<double> f;
  for (int r : spec.main_terms()) {
    f.push_back(profile.active[static_cast<std::size_t>(r)]
                    ? static_cast<double>(profile.levels[static_cast<std::size_t>(r)])
                    : 0.0);
  }
  for (const auto& [r, s] : spec.interaction_terms()) {
    const double xr = profile.active[static_cast<std::size_t>(r)]
                          ? static_cast<double>(profile.levels[static_cast<std::size_t>(r)])
                          : 0.0;
    const double xs = profile.active[static_cast<std::size_t>(s)]
                          ? static_cast<double>(profile.levels[static_cast<std::size_t>(s)])
                          : 0.0;
    f.push_back(xr * xs);
  }
  return f;
}

double oracle_det(std::vector<std::vector<double>> m) {
  const std::size_t n = m.size();
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < n; ++row) {
      if (std::abs(m[row][col]) > std::abs(m[pivot][col])) pivot = row;
    }
    if (std::abs(m[pivot][col]) < 1e-300) return 0.0;
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (std::size_t row = col + 1; row < n; ++row) {
      const double factor = m[row][col] / m[col][col];
      for (std::size_t k = col; k < n; ++k) m[row][k] -= factor * m[col][k];
    }
  }
  return det;
}

std::vector<std::vector<double>> oracle_information(const Design& design,
                                                    const std::vector<double>& theta,
                                                    const ModelSpec& spec) {
  const std::size_t q = static_cast<std::size_t>(spec.term_count());
  std::vector<std::vector<double>> m(q, std::vector<double>(q, 0.0));
  for (const auto& cp : design.pairs) {
    const auto fa = oracle_features(cp.a, spec);
    const auto fb = oracle_features(cp.b, spec);
    double margin = 0.0;
    std::vector<double> d(q);
    for (std::size_t k = 0; k < q; ++k) {
      d[k] = fa[k] - fb[k];
      margin += theta[k] * d[k];
    }
    const double p = 1.0 / (1.0 + std::exp(-margin));
    const double w = p * (1.0 - p);
    for (std::size_t i = 0; i < q; ++i) {
      for (std::size_t j = 0; j < q; ++j) m[i][j] += w * d[i] * d[j];
    }
  }
  return m;
}

double oracle_criterion(const Design& design, const std::vector<double>& theta,
                        const ModelSpec& spec) {
  auto m = oracle_information(design, theta, spec);
  const double n = static_cast<double>(design.pairs.size());
  for (auto& row : m) {
    for (double& value : row) value /= n;
  }
  const double det = oracle_det(m);
  if (det <= 0.0) return 0.0;
  return std::pow(det, 1.0 / static_cast<double>(spec.term_count()));
}

}  // namespace

TEST_CASE("feature_difference subtracts expanded features") {
  const ModelSpec mains = testutil::mains_upto(2);
  CHECK(feature_difference(pair("q", {1, 0}, {1, 0}), mains) == std::vector<double>{0.0, 0.0});
  CHECK(feature_difference(pair("q", {1, 0}, {0, 1}), mains) == std::vector<double>{1.0, -1.0});
  const ModelSpec with_inter = mains.with_all_interactions();
  CHECK(feature_difference(pair("q", {1, 1}, {1, 0}), with_inter) ==
        std::vector<double>{0.0, 1.0, 1.0});
}

TEST_CASE("information_matrix closed forms") {
  const ModelSpec spec = testutil::mains_upto(2);
  const std::vector<double> zeros{0.0, 0.0};

  SUBCASE("single pair at theta = 0") {
    const Design d = design_of(2, 2, {pair("q", {1, 0}, {0, 0})});
    const Eigen::MatrixXd m = information_matrix(d, zeros, spec);
    CHECK(m(0, 0) == doctest::Approx(0.25));
    CHECK(m(0, 1) == doctest::Approx(0.0));
    CHECK(m(1, 1) == doctest::Approx(0.0));
  }
  SUBCASE("identical alternatives carry no information") {
    const Design d =
        design_of(2, 2, {pair("q1", {1, 0}, {1, 0}), pair("q2", {0, 1}, {0, 1})});
    CHECK(information_matrix(d, zeros, spec).norm() == 0.0);
  }
  SUBCASE("all distinct unordered full-profile pairs match the oracle") {
    std::vector<std::vector<int>> profiles{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    std::vector<ChoicePair> pairs;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      for (std::size_t j = i + 1; j < profiles.size(); ++j) {
        pairs.push_back(pair("q" + std::to_string(pairs.size()), profiles[i], profiles[j]));
      }
    }
    const Design d = design_of(2, 2, std::move(pairs));
    const Eigen::MatrixXd m = information_matrix(d, zeros, spec);
    const auto oracle = oracle_information(d, zeros, spec);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        CHECK(m(i, j) == doctest::Approx(oracle[static_cast<std::size_t>(i)]
                                               [static_cast<std::size_t>(j)]).epsilon(1e-12));
      }
    }
  }
  SUBCASE("empty design is rejected") {
    CHECK_THROWS_AS(information_matrix(design_of(2, 2, {}), zeros, spec), Error);
  }
}

TEST_CASE("information matrix is positive semidefinite") {
  Rng rng(11);
  for (int round = 0; round < 20; ++round) {
    const int p = 2 + static_cast<int>(rng.index(3));
    ModelSpec spec = testutil::mains_upto(p);
    if (rng.coin()) spec = spec.with_all_interactions();
    std::vector<ChoicePair> pairs;
    const auto n = 2 + rng.index(8);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<int> a;
      std::vector<int> b;
      for (int k = 0; k < p; ++k) {
        a.push_back(rng.coin() ? 1 : 0);
        b.push_back(rng.coin() ? 1 : 0);
      }
      pairs.push_back(pair("q" + std::to_string(i), a, b));
    }
    std::vector<double> theta;
    for (int t = 0; t < spec.term_count(); ++t) theta.push_back(rng.uniform01() * 2 - 1);
    const Design d = design_of(p, p, std::move(pairs));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(information_matrix(d, theta, spec));
    CHECK(solver.eigenvalues().minCoeff() >= -1e-10);
  }
}

TEST_CASE("d_criterion values and invariances") {
  const ModelSpec one_term = ModelSpec::mains({0});
  const ModelSpec spec2 = testutil::mains_upto(2);

  SUBCASE("rank-deficient designs score zero") {
    const Design d = design_of(2, 2, {pair("q", {1, 0}, {0, 0})});
    CHECK(d_criterion(d, std::vector<double>{0.0, 0.0}, spec2) == 0.0);
  }
  SUBCASE("an empty term set is rejected") {
    const Design d = design_of(2, 2, {pair("q", {1, 0}, {0, 0})});
    CHECK_THROWS_AS(d_criterion(d, std::vector<double>{}, ModelSpec{}), Error);
  }
  SUBCASE("one pair, one term") {
    const Design d = design_of(2, 2, {pair("q", {1, 0}, {0, 0})});
    CHECK(d_criterion(d, std::vector<double>{0.0}, one_term) == doctest::Approx(0.25));
  }
  SUBCASE("pair order does not matter") {
    std::vector<ChoicePair> pairs{pair("q1", {1, 0}, {0, 1}), pair("q2", {1, 1}, {0, 0}),
                                  pair("q3", {1, 0}, {0, 0})};
    const Design forward = design_of(2, 2, pairs);
    std::reverse(pairs.begin(), pairs.end());
    const Design backward = design_of(2, 2, pairs);
    const std::vector<double> zeros{0.0, 0.0};
    CHECK(d_criterion(forward, zeros, spec2) ==
          doctest::Approx(d_criterion(backward, zeros, spec2)).epsilon(1e-14));
  }
  SUBCASE("matches the oracle at random coefficients") {
    Rng rng(3);
    for (int round = 0; round < 20; ++round) {
      std::vector<ChoicePair> pairs;
      for (int i = 0; i < 4; ++i) {
        pairs.push_back(pair("q" + std::to_string(i),
                             {static_cast<int>(rng.coin()), static_cast<int>(rng.coin())},
                             {static_cast<int>(rng.coin()), static_cast<int>(rng.coin())}));
      }
      const Design d = design_of(2, 2, std::move(pairs));
      const std::vector<double> theta{rng.uniform01() * 2 - 1, rng.uniform01() * 2 - 1};
      CHECK(d_criterion(d, theta, spec2) ==
            doctest::Approx(oracle_criterion(d, theta, spec2)).epsilon(1e-10));
    }
  }
}

TEST_CASE("relative_efficiency normalizes per pair") {
  const ModelSpec spec = testutil::mains_upto(2);
  const std::vector<double> zeros{0.0, 0.0};
  Design d = design_of(2, 2, {pair("q1", {1, 0}, {0, 1}), pair("q2", {1, 1}, {0, 0})});

  CHECK(relative_efficiency(d, d, zeros, spec) == doctest::Approx(1.0));

  Design doubled = d;
  doubled.pairs.push_back(pair("q3", {1, 0}, {0, 1}));
  doubled.pairs.push_back(pair("q4", {1, 1}, {0, 0}));
  CHECK(relative_efficiency(doubled, d, zeros, spec) == doctest::Approx(1.0).epsilon(1e-12));

  SUBCASE("full profile vs strength-2 partial on 3 attributes, by the oracle") {
    const ModelSpec spec3 = testutil::mains_upto(3);
    const std::vector<double> zeros3{0.0, 0.0, 0.0};
    const Design full = design_of(3, 3,
                                  {pair("f1", {1, 1, 1}, {0, 0, 0}), pair("f2", {1, 1, 0}, {0, 0, 1}),
                                   pair("f3", {1, 0, 1}, {0, 1, 0}), pair("f4", {0, 1, 1}, {1, 0, 0})});
    const Design partial =
        design_of(3, 2,
                  {pair("p1", {1, 1, 0}, {0, 0, 0}, {1, 1, 0}),
                   pair("p2", {1, 0, 1}, {0, 0, 0}, {1, 0, 1}),
                   pair("p3", {0, 1, 1}, {0, 0, 0}, {0, 1, 1}),
                   pair("p4", {1, 0, 0}, {0, 1, 0}, {1, 1, 0})});
    const double expected =
        oracle_criterion(full, zeros3, spec3) / oracle_criterion(partial, zeros3, spec3);
    CHECK(relative_efficiency(full, partial, zeros3, spec3) ==
          doctest::Approx(expected).epsilon(1e-10));
  }
  SUBCASE("a zero-criterion benchmark is rejected") {
    const Design singular = design_of(2, 2, {pair("q", {1, 0}, {0, 0})});
    CHECK_THROWS_AS(relative_efficiency(d, singular, zeros, spec), Error);
  }
}

TEST_CASE("is_dominated recognizes clear choices") {
  CHECK(is_dominated(pair("q", {1, 1, 0, 0}, {1, 0, 0, 0})));
  CHECK_FALSE(is_dominated(pair("q", {1, 0}, {0, 1})));
  CHECK(is_dominated(pair("q", {1, 0}, {1, 0})));  // equal profiles, degenerate
  // Only shown attributes count.
  CHECK(is_dominated(pair("q", {1, 0, 1}, {0, 0, 1}, {1, 0, 1})));
  CHECK_FALSE(is_dominated(pair("q", {1, 0, 0}, {0, 0, 1}, {1, 0, 1})));
}

TEST_CASE("prune_dominated keeps exactly the trade-off pairs") {
  SUBCASE("alternating dominated rows halve the design") {
    std::vector<ChoicePair> pairs;
    for (int i = 0; i < 120; ++i) {
      if (i % 2 == 0) {
        pairs.push_back(pair("q" + std::to_string(i + 1), {1, 1}, {1, 0}));  // clear choice
      } else {
        pairs.push_back(pair("q" + std::to_string(i + 1), {1, 0}, {0, 1}));
      }
    }
    const Design d = design_of(2, 2, std::move(pairs));
    const Design pruned = prune_dominated(d);
    CHECK(pruned.pairs.size() == 60);
    for (std::size_t i = 0; i < pruned.pairs.size(); ++i) {
      CHECK(pruned.pairs[i].id == "q" + std::to_string(2 * i + 2));
    }
  }
  SUBCASE("designs without dominated pairs are untouched") {
    const Design d = design_of(2, 2, {pair("q1", {1, 0}, {0, 1}), pair("q2", {0, 1}, {1, 0})});
    CHECK(prune_dominated(d).pairs.size() == 2);
  }
  SUBCASE("pruning is idempotent on random designs") {
    Rng rng(17);
    for (int round = 0; round < 10; ++round) {
      std::vector<ChoicePair> pairs;
      for (int i = 0; i < 12; ++i) {
        pairs.push_back(pair("q" + std::to_string(i),
                             {static_cast<int>(rng.coin()), static_cast<int>(rng.coin()),
                              static_cast<int>(rng.coin())},
                             {static_cast<int>(rng.coin()), static_cast<int>(rng.coin()),
                              static_cast<int>(rng.coin())}));
      }
      const Design d = design_of(3, 3, std::move(pairs));
      const Design once = prune_dominated(d);
      const Design twice = prune_dominated(once);
      CHECK(once.pairs.size() == twice.pairs.size());
    }
  }
}

TEST_CASE("dominated pairs have one-signed main-effect differences") {
  Rng rng(23);
  const ModelSpec spec = testutil::mains_upto(3);
  for (int round = 0; round < 100; ++round) {
    std::vector<int> a;
    std::vector<int> b;
    for (int k = 0; k < 3; ++k) {
      a.push_back(rng.coin() ? 1 : 0);
      b.push_back(rng.coin() ? 1 : 0);
    }
    const ChoicePair cp = pair("q", a, b);
    if (!is_dominated(cp)) continue;
    const auto d = feature_difference(cp, spec);
    const bool non_negative = std::all_of(d.begin(), d.end(), [](double x) { return x >= 0; });
    const bool non_positive = std::all_of(d.begin(), d.end(), [](double x) { return x <= 0; });
    CHECK((non_negative || non_positive));
  }
}

TEST_CASE("dominating alternatives win under non-negative coefficients") {
  Rng rng(29);
  const ModelSpec spec = testutil::mains_upto(3);
  for (int round = 0; round < 100; ++round) {
    std::vector<int> b;
    std::vector<int> a;
    for (int k = 0; k < 3; ++k) {
      b.push_back(rng.coin() ? 1 : 0);
      a.push_back(b.back());
    }
    a[rng.index(3)] = 1;  // a >= b componentwise
    const std::vector<double> theta{rng.uniform01(), rng.uniform01(), rng.uniform01()};
    CHECK(choice_probability(pair("q", a, b), theta, spec) >= 0.5);
  }
}

TEST_CASE("block_design partitions evenly and balances exposure") {
  std::vector<ChoicePair> pairs;
  for (int i = 0; i < 60; ++i) {
    pairs.push_back(pair("q" + std::to_string(i), {1, 0, 0}, {0, 1, 0}, {1, 1, 0}));
  }
  const Design d60 = design_of(3, 2, std::move(pairs));

  SUBCASE("sixty pairs in five blocks of twelve") {
    const BlockedDesign blocked = block_design(d60, 5, 7);
    CHECK(blocked.blocks.size() == 5);
    std::size_t total = 0;
    for (const auto& [label, ids] : blocked.blocks) {
      CHECK(ids.size() == 12);
      total += ids.size();
    }
    CHECK(total == 60);
  }
  SUBCASE("one block is the whole design") {
    const BlockedDesign blocked = block_design(d60, 1, 7);
    CHECK(blocked.blocks.size() == 1);
    CHECK(blocked.blocks[0].second.size() == 60);
  }
  SUBCASE("seven pairs over two blocks split 4/3") {
    Design d7 = d60;
    d7.pairs.resize(7);
    const BlockedDesign blocked = block_design(d7, 2, 7);
    CHECK(blocked.blocks[0].second.size() == 4);
    CHECK(blocked.blocks[1].second.size() == 3);
  }
  SUBCASE("every id appears exactly once") {
    const BlockedDesign blocked = block_design(d60, 7, 7);
    std::vector<std::string> seen;
    std::size_t smallest = 60;
    std::size_t largest = 0;
    for (const auto& [label, ids] : blocked.blocks) {
      smallest = std::min(smallest, ids.size());
      largest = std::max(largest, ids.size());
      seen.insert(seen.end(), ids.begin(), ids.end());
    }
    CHECK(largest - smallest <= 1);
    std::sort(seen.begin(), seen.end());
    CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
    CHECK(seen.size() == 60);
  }
  SUBCASE("deterministic given the seed") {
    const BlockedDesign first = block_design(d60, 5, 42);
    const BlockedDesign second = block_design(d60, 5, 42);
    CHECK(first.blocks == second.blocks);
  }
  SUBCASE("invalid block counts are rejected") {
    CHECK_THROWS_AS(block_design(d60, 0, 7), Error);
    CHECK_THROWS_AS(block_design(d60, 61, 7), Error);
  }
}

TEST_CASE("with_blocks stamps labels onto pairs") {
  Design d = design_of(2, 2, {pair("q1", {1, 0}, {0, 1}), pair("q2", {0, 1}, {1, 0})});
  const Design labeled = with_blocks(d, block_design(d, 2, 1));
  CHECK_FALSE(labeled.pairs[0].block.empty());
  CHECK(block_labels(labeled).size() == 2);
}

TEST_CASE("generate_design reaches the enumerated optimum on two attributes") {
  const ModelSpec spec = testutil::mains_upto(2);
  const Design found = generate_design(2, 2, 4, spec, 99, {2000, 2});
  CHECK(found.pairs.size() == 4);
  for (const auto& cp : found.pairs) CHECK_FALSE(is_dominated(cp));

  // Exhaustive search over all 4-multisets of non-dominated ordered pairs.
  std::vector<ChoicePair> candidates;
  std::vector<std::vector<int>> profiles{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  for (const auto& a : profiles) {
    for (const auto& b : profiles) {
      const ChoicePair cp = pair("c", a, b);
      if (!is_dominated(cp)) candidates.push_back(cp);
    }
  }
  const std::vector<double> zeros{0.0, 0.0};
  double best = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (std::size_t j = i; j < candidates.size(); ++j) {
      for (std::size_t k = j; k < candidates.size(); ++k) {
        for (std::size_t l = k; l < candidates.size(); ++l) {
          Design d = design_of(2, 2, {candidates[i], candidates[j], candidates[k], candidates[l]});
          for (std::size_t m = 0; m < 4; ++m) d.pairs[m].id = "q" + std::to_string(m);
          best = std::max(best, oracle_criterion(d, zeros, spec));
        }
      }
    }
  }
  CHECK(d_criterion(found, zeros, spec) == doctest::Approx(best).epsilon(1e-10));
}

TEST_CASE("generate_design is deterministic and rejects bad shapes") {
  const ModelSpec spec = testutil::mains_upto(3);
  const Design first = generate_design(3, 2, 6, spec, 4, {500, 2});
  const Design second = generate_design(3, 2, 6, spec, 4, {500, 2});
  REQUIRE(first.pairs.size() == second.pairs.size());
  for (std::size_t i = 0; i < first.pairs.size(); ++i) {
    CHECK(first.pairs[i].a == second.pairs[i].a);
    CHECK(first.pairs[i].b == second.pairs[i].b);
  }
  CHECK_THROWS_AS(generate_design(3, 4, 6, spec, 4, {}), Error);
  CHECK_THROWS_AS(generate_design(3, 2, 0, spec, 4, {}), Error);
}
