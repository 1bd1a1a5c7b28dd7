#include "plebo/numerics.hpp"

#include <cmath>
#include <string>

#include "plebo/kernels.hpp"

namespace plebo {

namespace {

// Row-major lower Cholesky; the inner sums run over contiguous row
// prefixes, which is where the dot kernel earns its keep on big matrices.
bool try_factor(const SquareMatrix& a, double jitter, SquareMatrix& l) {
  const auto& ops = kernels::active();
  const std::size_t n = a.n();
  for (std::size_t i = 0; i < n; ++i) {
    double* li = l.row(i);
    for (std::size_t j = 0; j <= i; ++j) {
      const double* lj = l.row(j);
      double s = a.at(i, j) - ops.dot(li, lj, j);
      if (i == j) {
        s += jitter;
        if (!(s > 0.0) || !std::isfinite(s)) return false;
        li[i] = std::sqrt(s);
      } else {
        li[j] = s / lj[j];
      }
    }
    for (std::size_t j = i + 1; j < n; ++j) li[j] = 0.0;
  }
  return true;
}

}  // namespace

CholeskyFactor cholesky(const SquareMatrix& a,
                        std::span<const double> jitter_ladder) {
  const std::size_t n = a.n();
  if (n == 0) throw DimensionMismatch("cholesky: empty matrix");

  // Kernel matrices are symmetric up to rounding; make it exact.
  SquareMatrix sym(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      sym.at(i, j) = 0.5 * (a.at(i, j) + a.at(j, i));

  CholeskyFactor f;
  f.L = SquareMatrix(n);
  for (double jitter : jitter_ladder) {
    if (try_factor(sym, jitter, f.L)) {
      f.jitter_used = jitter;
      return f;
    }
  }
  throw NotPositiveDefinite("cholesky: all jitter ladder entries failed (n=" +
                            std::to_string(n) + ")");
}

void forward_solve_in_place(const CholeskyFactor& f, std::span<double> b) {
  const std::size_t n = f.n();
  if (b.size() != n)
    throw DimensionMismatch("forward_solve: vector length mismatch");
  const auto& ops = kernels::active();
  for (std::size_t i = 0; i < n; ++i) {
    const double* li = f.L.row(i);
    b[i] = (b[i] - ops.dot(li, b.data(), i)) / li[i];
  }
}

void solve_chol_in_place(const CholeskyFactor& f, std::span<double> b) {
  forward_solve_in_place(f, b);
  const std::size_t n = f.n();
  // Back substitution with L^T; column access of L.
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= f.L.at(k, ii) * b[k];
    b[ii] = s / f.L.at(ii, ii);
  }
}

std::vector<double> solve_chol(const CholeskyFactor& f,
                               std::span<const double> b) {
  if (b.size() != f.n())
    throw DimensionMismatch("solve_chol: vector length mismatch");
  std::vector<double> x(b.begin(), b.end());
  solve_chol_in_place(f, x);
  return x;
}

double log_det(const CholeskyFactor& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.n(); ++i) s += std::log(f.L.at(i, i));
  return 2.0 * s;
}

}  // namespace plebo
