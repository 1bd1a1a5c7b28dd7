#include <cmath>
#include <cstddef>

#include "plebo/kernels.hpp"

namespace plebo::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void rbf_from_sqdist_scalar(double scale, double gamma, const double* sq,
                            double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = scale * std::exp(-gamma * sq[i]);
}

void sq_dist_scalar(const double* point, const double* pts, std::size_t n,
                    std::size_t d, double* out) {
  for (std::size_t j = 0; j < n; ++j) {
    const double* p = pts + j * d;
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      double diff = point[k] - p[k];
      s += diff * diff;
    }
    out[j] = s;
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops{"scalar", dot_scalar, axpy_scalar,
                       rbf_from_sqdist_scalar, sq_dist_scalar};
  return ops;
}

}  // namespace plebo::kernels
