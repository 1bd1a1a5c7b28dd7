#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "plebo/acquisition.hpp"

using namespace plebo;

namespace {

Dataset random_dataset(std::size_t n, std::uint64_t seed) {
  RngStream rng(seed);
  Dataset d(2);
  for (std::size_t i = 0; i < n; ++i) {
    const double p[2] = {rng.uniform(), rng.uniform()};
    d.add(p, rng.normal());
  }
  return d;
}

std::vector<double> random_grid(std::size_t m, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<double> xs(m * 2);
  for (double& v : xs) v = rng.uniform();
  return xs;
}

CandidateSet random_candidates(std::size_t h, std::uint64_t seed) {
  RngStream rng(seed);
  CandidateSet cands;
  cands.source_seed = seed;
  for (std::size_t i = 0; i < h; ++i)
    cands.thetas.push_back(
        HyperParams{0.05 + 0.4 * rng.uniform(), 0.3 + 2.0 * rng.uniform(),
                    1e-4});
  return cands;
}

// Straightforward mixture: weights + per-candidate predictions computed with
// the public single-candidate operations, accumulated in a plain loop.
std::vector<double> brute_force_mixture(const CandidateSet& cands,
                                        const Dataset& d,
                                        std::span<const double> grid_xs,
                                        double best) {
  const std::vector<double> log_w = candidate_log_weights(cands, d);
  const double max_lw = *std::max_element(log_w.begin(), log_w.end());
  std::vector<double> acc(grid_xs.size() / 2, 0.0);
  double total = 0.0;
  for (std::size_t h = 0; h < cands.size(); ++h) {
    const double w = std::exp(log_w[h] - max_lw);
    Prediction pred = posterior_predictive(d, cands.thetas[h], grid_xs, false);
    const auto a = expected_improvement(pred, best);
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += w * a[j];
    total += w;
  }
  for (double& v : acc) v /= total;
  return acc;
}

}  // namespace

TEST_CASE("expected improvement analytic values") {
  Prediction pred;
  pred.mean = {1.0};
  pred.variance = {0.0};
  CHECK(expected_improvement(pred, 1.0)[0] == 0.0);

  pred.variance = {1.0};
  CHECK(expected_improvement(pred, 1.0)[0] ==
        doctest::Approx(0.39894228040143268).epsilon(1e-12));

  pred.mean = {2.0};
  pred.variance = {0.0};
  CHECK(expected_improvement(pred, 1.0)[0] == 1.0);  // deterministic limit
}

TEST_CASE("expected improvement matches Monte-Carlo") {
  Prediction pred;
  pred.mean = {1.0};
  pred.variance = {4.0};
  const double ei = expected_improvement(pred, 0.0)[0];
  auto [mc, se] = oracles::mc_expected_improvement(1.0, 2.0, 0.0, 1000000, 4);
  CHECK(std::abs(ei - mc) <= 3.0 * se);
}

TEST_CASE("expected improvement monotonicity properties") {
  RngStream rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const double mu = 2.0 * rng.normal();
    const double best = 2.0 * rng.normal();
    const double s1 = 0.1 + rng.uniform();
    const double s2 = s1 + rng.uniform();
    Prediction a{{mu}, {s1 * s1}};
    Prediction b{{mu}, {s2 * s2}};
    const double ei_a = expected_improvement(a, best)[0];
    const double ei_b = expected_improvement(b, best)[0];
    CHECK(ei_a >= 0.0);
    CHECK(ei_b >= ei_a - 1e-12);  // non-decreasing in sigma

    Prediction c{{mu + 0.5}, {s1 * s1}};
    CHECK(expected_improvement(c, best)[0] >= ei_a - 1e-12);  // and in mu
  }
}

TEST_CASE("ucb values") {
  Prediction pred;
  pred.mean = {3.0};
  pred.variance = {0.0};
  CHECK(ucb(pred, 4.0)[0] == 3.0);

  pred.mean = {0.0};
  pred.variance = {1.0};
  CHECK(ucb(pred, 4.0)[0] == doctest::Approx(2.0));

  RngStream rng(42);
  Prediction r;
  for (int i = 0; i < 20; ++i) {
    r.mean.push_back(rng.normal());
    r.variance.push_back(rng.uniform());
  }
  const double beta = 2.5;
  auto out = ucb(r, beta);
  for (std::size_t i = 0; i < r.mean.size(); ++i)
    CHECK(out[i] ==
          doctest::Approx(r.mean[i] + std::sqrt(beta) *
                                          std::sqrt(r.variance[i])));
}

TEST_CASE("candidate log weights") {
  auto cands = random_candidates(3, 50);

  SUBCASE("empty dataset gives uniform zeros") {
    Dataset empty(2);
    auto w = candidate_log_weights(cands, empty);
    for (double lw : w) CHECK(lw == 0.0);
  }

  SUBCASE("duplicate candidates get identical weights") {
    CandidateSet dup;
    dup.thetas = {cands.thetas[0], cands.thetas[0], cands.thetas[1]};
    auto d = random_dataset(4, 51);
    auto w = candidate_log_weights(dup, d);
    CHECK(w[0] == w[1]);
    CHECK(w[0] != w[2]);
  }

  SUBCASE("weights are the per-candidate marginal likelihoods") {
    auto d = random_dataset(4, 52);
    auto w = candidate_log_weights(cands, d);
    for (std::size_t h = 0; h < cands.size(); ++h)
      CHECK(w[h] == doctest::Approx(log_marginal_likelihood(d, cands.thetas[h]))
                        .epsilon(1e-12));
  }

  SUBCASE("all-undefined raises AllWeightsZero") {
    Dataset d(2);
    const double p1[2] = {0.1, 0.2};
    const double p2[2] = {0.6, 0.7};
    d.add(p1, 1e200);
    d.add(p2, -1e200);
    CHECK_THROWS_AS(candidate_log_weights(cands, d), AllWeightsZero);
  }
}

TEST_CASE("plebo acquisition with one candidate equals the base") {
  RngStream rng(60);
  for (int trial = 0; trial < 20; ++trial) {
    auto d = random_dataset(3 + rng.below(4), 600 + trial);
    auto grid = random_grid(12, 700 + trial);
    CandidateSet single;
    single.thetas = {HyperParams{0.05 + 0.4 * rng.uniform(),
                                 0.3 + 2.0 * rng.uniform(), 1e-4}};
    const double best =
        *std::max_element(d.ys().begin(), d.ys().end());
    auto mix = plebo_acquisition(single, d, grid, 2, {}, best);
    auto base = expected_improvement(
        posterior_predictive(d, single.thetas[0], grid, false), best);
    REQUIRE(mix.size() == base.size());
    for (std::size_t j = 0; j < mix.size(); ++j)
      CHECK(std::abs(mix[j] - base[j]) <= 1e-12);
  }
}

TEST_CASE("weighted mixture selects the only live candidate") {
  const std::vector<double> log_w = {
      -std::numeric_limits<double>::infinity(), 0.0};
  const std::vector<std::vector<double>> per_cand = {{}, {1.0, 2.0, 3.0}};
  auto mix = weighted_mixture(log_w, per_cand);
  REQUIRE(mix.size() == 3);
  CHECK(mix[0] == 1.0);
  CHECK(mix[1] == 2.0);
  CHECK(mix[2] == 3.0);
}

TEST_CASE("weighted mixture rejects all-zero weights") {
  const double ninf = -std::numeric_limits<double>::infinity();
  const std::vector<double> log_w = {ninf, ninf};
  const std::vector<std::vector<double>> per_cand = {{}, {}};
  CHECK_THROWS_AS(weighted_mixture(log_w, per_cand), AllWeightsZero);
}

TEST_CASE("plebo acquisition matches the brute-force mixture") {
  auto cands = random_candidates(5, 61);
  auto d = random_dataset(3, 62);
  auto grid = random_grid(10, 63);
  const double best = *std::max_element(d.ys().begin(), d.ys().end());
  auto fast = plebo_acquisition(cands, d, grid, 2, {}, best);
  auto brute = brute_force_mixture(cands, d, grid, best);
  REQUIRE(fast.size() == brute.size());
  for (std::size_t j = 0; j < fast.size(); ++j)
    CHECK(std::abs(fast[j] - brute[j]) <= 1e-10);
}

TEST_CASE("log-weight shifts do not change the mixture") {
  auto cands = random_candidates(4, 64);
  auto d = random_dataset(4, 65);
  auto grid = random_grid(8, 66);
  auto log_w = candidate_log_weights(cands, d);
  std::vector<std::vector<double>> per_cand;
  for (const HyperParams& theta : cands.thetas)
    per_cand.push_back(expected_improvement(
        posterior_predictive(d, theta, grid, false), 0.5));
  auto base = weighted_mixture(log_w, per_cand);
  for (double shift : {-500.0, -3.0, 123.0, 1e4}) {
    auto shifted = log_w;
    for (double& lw : shifted) lw += shift;
    auto out = weighted_mixture(shifted, per_cand);
    for (std::size_t j = 0; j < base.size(); ++j)
      CHECK(std::abs(out[j] - base[j]) <= 1e-12);
  }
}

TEST_CASE("identical candidates reduce to the base acquisition") {
  CandidateSet cands;
  const HyperParams theta{0.2, 1.5, 1e-4};
  for (int i = 0; i < 6; ++i) cands.thetas.push_back(theta);
  auto d = random_dataset(4, 67);
  auto grid = random_grid(9, 68);
  const double best = 0.25;
  auto mix = plebo_acquisition(cands, d, grid, 2, {}, best);
  auto base = expected_improvement(posterior_predictive(d, theta, grid, false),
                                   best);
  for (std::size_t j = 0; j < mix.size(); ++j)
    CHECK(std::abs(mix[j] - base[j]) <= 1e-12);
}

TEST_CASE("candidate order does not matter") {
  auto cands = random_candidates(7, 69);
  auto d = random_dataset(4, 70);
  auto grid = random_grid(11, 71);
  auto base = plebo_acquisition(cands, d, grid, 2, {}, 0.1);
  CandidateSet permuted;
  const std::size_t order[] = {3, 0, 6, 2, 5, 1, 4};
  for (std::size_t idx : order) permuted.thetas.push_back(cands.thetas[idx]);
  auto out = plebo_acquisition(permuted, d, grid, 2, {}, 0.1);
  for (std::size_t j = 0; j < base.size(); ++j)
    CHECK(std::abs(out[j] - base[j]) <= 1e-12);
}

TEST_CASE("mixture stays inside the per-candidate envelope") {
  auto cands = random_candidates(6, 72);
  auto d = random_dataset(5, 73);
  auto grid = random_grid(14, 74);
  const double best = 0.0;
  auto mix = plebo_acquisition(cands, d, grid, 2, {}, best);
  std::vector<std::vector<double>> per_cand;
  for (const HyperParams& theta : cands.thetas)
    per_cand.push_back(expected_improvement(
        posterior_predictive(d, theta, grid, false), best));
  for (std::size_t j = 0; j < mix.size(); ++j) {
    double lo = per_cand[0][j];
    double hi = per_cand[0][j];
    for (const auto& a : per_cand) {
      lo = std::min(lo, a[j]);
      hi = std::max(hi, a[j]);
    }
    CHECK(mix[j] >= lo - 1e-12);
    CHECK(mix[j] <= hi + 1e-12);
  }
}

TEST_CASE("plebo acquisition with an empty dataset uses the priors") {
  CandidateSet cands;
  cands.thetas = {HyperParams{0.1, 1.0, 1e-4}, HyperParams{0.3, 4.0, 1e-4}};
  Dataset empty(2);
  auto grid = random_grid(5, 75);
  auto mix = plebo_acquisition(cands, empty, grid, 2, {}, 0.0);
  // Prior predictions are translation invariant across the grid, so the
  // mixture must be constant.
  for (double v : mix) CHECK(v == doctest::Approx(mix[0]));
  // Uniform weights over the two prior EIs: sigma * phi(0) each.
  const double expected =
      0.5 * (std::sqrt(1.0) + std::sqrt(4.0)) * 0.39894228040143268;
  CHECK(mix[0] == doctest::Approx(expected).epsilon(1e-9));
}
