#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace plebo::kernels {

// Hot arithmetic loops behind the GP code. Each entry has a scalar reference
// implementation and, on x86-64 builds, an AVX2+FMA variant selected at
// runtime. Variants are equivalence-tested against the scalar versions; they
// are not bit-identical (different summation order, polynomial exp).
struct Ops {
  const char* name;

  // sum_i a[i]*b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);

  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

  // out[i] = scale * exp(-gamma * sq[i]); sq[i] >= 0
  void (*rbf_from_sqdist)(double scale, double gamma, const double* sq,
                          double* out, std::size_t n);

  // out[j] = sum_k (point[k] - pts[j*d + k])^2 for j in [0, n)
  void (*sq_dist)(const double* point, const double* pts, std::size_t n,
                  std::size_t d, double* out);
};

const Ops& scalar_ops();

// Currently selected implementation. Default resolution order: the
// PLEBO_KERNEL environment variable ("scalar" or "avx2") if set, otherwise
// the widest variant this CPU supports.
const Ops& active();

// Force a variant by name ("scalar", "avx2", "auto"). Returns false and
// leaves the selection unchanged if the variant is not available.
bool select(std::string_view name);

// Names of all variants usable on this machine.
std::vector<std::string> available();

}  // namespace plebo::kernels
