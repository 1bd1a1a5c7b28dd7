#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "plebo/numerics.hpp"
#include "plebo/rng.hpp"

using namespace plebo;

namespace {

SquareMatrix from_rows(std::size_t n, const std::vector<double>& entries) {
  SquareMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m.at(i, j) = entries[i * n + j];
  return m;
}

// X^T X + I: SPD by construction.
SquareMatrix random_spd(std::size_t n, RngStream& rng) {
  std::vector<double> x(n * n);
  for (double& v : x) v = rng.normal();
  SquareMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += x[k * n + i] * x[k * n + j];
      m.at(i, j) = s + (i == j ? 1.0 : 0.0);
    }
  return m;
}

double reconstruction_error(const CholeskyFactor& f, const SquareMatrix& a) {
  const std::size_t n = a.n();
  double err = 0.0;
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double llt = 0.0;
      for (std::size_t k = 0; k <= std::min(i, j); ++k)
        llt += f.L.at(i, k) * f.L.at(j, k);
      const double target = a.at(i, j) + (i == j ? f.jitter_used : 0.0);
      err += (llt - target) * (llt - target);
      norm += a.at(i, j) * a.at(i, j);
    }
  }
  return std::sqrt(err) / std::sqrt(norm);
}

}  // namespace

TEST_CASE("cholesky identity") {
  SquareMatrix eye(3);
  for (int i = 0; i < 3; ++i) eye.at(i, i) = 1.0;
  const double ladder[] = {0.0};
  auto f = cholesky(eye, ladder);
  CHECK(f.jitter_used == 0.0);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(f.L.at(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));
}

TEST_CASE("cholesky 2x2 hand-checked") {
  auto f = cholesky(from_rows(2, {4, 2, 2, 3}));
  CHECK(f.L.at(0, 0) == doctest::Approx(2.0));
  CHECK(f.L.at(1, 0) == doctest::Approx(1.0));
  CHECK(f.L.at(1, 1) == doctest::Approx(std::sqrt(2.0)));
  CHECK(f.L.at(0, 1) == 0.0);
  CHECK(f.jitter_used == 0.0);
}

TEST_CASE("cholesky reconstructs random SPD 6x6") {
  RngStream rng(1);
  auto a = random_spd(6, rng);
  auto f = cholesky(a);
  CHECK(reconstruction_error(f, a) < 1e-10);
}

TEST_CASE("cholesky symmetrises its input") {
  auto a = from_rows(2, {4, 2.2, 1.8, 3});  // asymmetric; mean is {4,2,2,3}
  auto f = cholesky(a);
  CHECK(f.L.at(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("jitter ladder recovers a singular matrix") {
  // Rank-1: ones * ones^T.
  auto a = from_rows(2, {1, 1, 1, 1});
  auto f = cholesky(a);
  CHECK(f.jitter_used > 0.0);
  CHECK(reconstruction_error(f, a) < 1e-8);
}

TEST_CASE("cholesky failure raises NotPositiveDefinite") {
  auto a = from_rows(2, {-1, 0, 0, -1});
  CHECK_THROWS_AS(cholesky(a), NotPositiveDefinite);
}

TEST_CASE("solve_chol examples") {
  SquareMatrix eye(3);
  for (int i = 0; i < 3; ++i) eye.at(i, i) = 1.0;
  const std::vector<double> b{1.0, -2.0, 3.5};
  auto x = solve_chol(cholesky(eye), b);
  for (std::size_t i = 0; i < 3; ++i) CHECK(x[i] == doctest::Approx(b[i]));

  // Oracle: direct 2x2 inverse of [[4,2],[2,3]] applied to [8,7].
  auto f = cholesky(from_rows(2, {4, 2, 2, 3}));
  auto x2 = solve_chol(f, std::vector<double>{8.0, 7.0});
  CHECK(x2[0] == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(x2[1] == doctest::Approx(1.5).epsilon(1e-12));

  auto fd = cholesky(from_rows(2, {2, 0, 0, 8}));
  auto x3 = solve_chol(fd, std::vector<double>{2.0, 8.0});
  CHECK(x3[0] == doctest::Approx(1.0));
  CHECK(x3[1] == doctest::Approx(1.0));
}

TEST_CASE("solve_chol dimension mismatch") {
  auto f = cholesky(from_rows(2, {4, 2, 2, 3}));
  CHECK_THROWS_AS(solve_chol(f, std::vector<double>{1.0, 2.0, 3.0}),
                  DimensionMismatch);
}

TEST_CASE("solve then multiply recovers the rhs") {
  RngStream rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng.below(7);
    auto a = random_spd(n, rng);
    auto f = cholesky(a);
    std::vector<double> b(n);
    for (double& v : b) v = rng.normal();
    auto x = solve_chol(f, b);
    double err = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += a.at(i, j) * x[j];
      err += (s - b[i]) * (s - b[i]);
      norm += b[i] * b[i];
    }
    CHECK(std::sqrt(err) <= 1e-8 * std::sqrt(norm));
  }
}

TEST_CASE("log_det examples") {
  SquareMatrix eye(3);
  for (int i = 0; i < 3; ++i) eye.at(i, i) = 1.0;
  CHECK(log_det(cholesky(eye)) == doctest::Approx(0.0));

  SquareMatrix de(2);
  de.at(0, 0) = std::exp(1.0);
  de.at(1, 1) = std::exp(1.0);
  CHECK(log_det(cholesky(de)) == doctest::Approx(2.0));

  RngStream rng(3);
  auto a = random_spd(5, rng);
  const double expected = oracles::naive_log_det(oracles::dense_matrix(a), 5);
  CHECK(log_det(cholesky(a)) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("log_det invariant under symmetric permutation") {
  RngStream rng(11);
  auto a = random_spd(4, rng);
  const double base = log_det(cholesky(a));
  const std::size_t perms[][4] = {
      {1, 0, 2, 3}, {3, 2, 1, 0}, {2, 0, 3, 1}, {1, 2, 3, 0}};
  for (const auto& p : perms) {
    SquareMatrix b(4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) b.at(i, j) = a.at(p[i], p[j]);
    CHECK(log_det(cholesky(b)) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("reconstruction accuracy on well-conditioned inputs") {
  RngStream rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 3 + rng.below(20);
    auto a = random_spd(n, rng);
    auto f = cholesky(a);
    CHECK(reconstruction_error(f, a) < 1e-8);
  }
}
