#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "plebo/errors.hpp"

namespace plebo {

// Dense square matrix, row-major. Sized once at construction.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

  std::size_t n() const { return n_; }
  double& at(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double at(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  double* row(std::size_t i) { return a_.data() + i * n_; }
  const double* row(std::size_t i) const { return a_.data() + i * n_; }
  double* data() { return a_.data(); }
  const double* data() const { return a_.data(); }

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

// Lower-triangular Cholesky factor of A + jitter_used * I.
struct CholeskyFactor {
  SquareMatrix L;
  double jitter_used = 0.0;

  std::size_t n() const { return L.n(); }
};

inline constexpr double kDefaultJitterLadder[] = {0.0, 1e-9, 1e-7, 1e-5};

// Factors (A + A^T)/2 + jitter * I, trying the ladder entries in order and
// keeping the first jitter that succeeds. Throws NotPositiveDefinite when
// every entry fails.
CholeskyFactor cholesky(const SquareMatrix& a,
                        std::span<const double> jitter_ladder =
                            kDefaultJitterLadder);

// Solves (L L^T) x = b with two triangular solves.
std::vector<double> solve_chol(const CholeskyFactor& f,
                               std::span<const double> b);

// In-place variant of solve_chol: forward then back substitution on b.
void solve_chol_in_place(const CholeskyFactor& f, std::span<double> b);

// Forward substitution only: overwrites b with L^{-1} b.
void forward_solve_in_place(const CholeskyFactor& f, std::span<double> b);

// log det(L L^T) = 2 sum_i log L_ii.
double log_det(const CholeskyFactor& f);

}  // namespace plebo
