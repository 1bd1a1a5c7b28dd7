// AVX2+FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma; callers reach it only through the dispatch table, after the
// runtime CPU check in avx2_ops_if_supported().

#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "plebo/kernels.hpp"

namespace plebo::kernels {

const Ops* avx2_ops_if_supported();

namespace {

// exp() for four doubles: Cody-Waite reduction x = n*ln2 + r followed by the
// Cephes rational approximation of e^r, then 2^n applied on the exponent
// bits. Inputs below -708 flush to zero (the scalar path would return a
// subnormal there; the RBF kernel treats both as zero correlation).
inline __m256d exp_pd(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d p0 = _mm256_set1_pd(1.26177193074810590878e-4);
  const __m256d p1 = _mm256_set1_pd(3.02994407707441961300e-2);
  const __m256d p2 = _mm256_set1_pd(9.99999999999999999910e-1);
  const __m256d q0 = _mm256_set1_pd(3.00198505138664455042e-6);
  const __m256d q1 = _mm256_set1_pd(2.52448340349684104192e-3);
  const __m256d q2 = _mm256_set1_pd(2.27265548208155028766e-1);
  const __m256d q3 = _mm256_set1_pd(2.00000000000000000005e0);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d lo_cut = _mm256_set1_pd(-708.0);
  const __m256d hi_cut = _mm256_set1_pd(708.0);

  __m256d zero_mask = _mm256_cmp_pd(x, lo_cut, _CMP_LT_OQ);
  __m256d xc = _mm256_min_pd(_mm256_max_pd(x, lo_cut), hi_cut);

  __m256d nf = _mm256_round_pd(_mm256_mul_pd(xc, log2e),
                               _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(nf, ln2_hi, xc);
  r = _mm256_fnmadd_pd(nf, ln2_lo, r);

  __m256d r2 = _mm256_mul_pd(r, r);
  __m256d px = _mm256_fmadd_pd(p0, r2, p1);
  px = _mm256_fmadd_pd(px, r2, p2);
  px = _mm256_mul_pd(px, r);
  __m256d qx = _mm256_fmadd_pd(q0, r2, q1);
  qx = _mm256_fmadd_pd(qx, r2, q2);
  qx = _mm256_fmadd_pd(qx, r2, q3);
  __m256d er = _mm256_add_pd(
      one, _mm256_div_pd(_mm256_add_pd(px, px), _mm256_sub_pd(qx, px)));

  __m128i n32 = _mm256_cvtpd_epi32(nf);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  __m256d result = _mm256_castsi256_pd(
      _mm256_add_epi64(_mm256_castpd_si256(er), _mm256_slli_epi64(n64, 52)));
  return _mm256_andnot_pd(zero_mask, result);
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(
        y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                               _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void rbf_from_sqdist_avx2(double scale, double gamma, const double* sq,
                          double* out, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(scale);
  const __m256d vng = _mm256_set1_pd(-gamma);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d e = exp_pd(_mm256_mul_pd(vng, _mm256_loadu_pd(sq + i)));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(vs, e));
  }
  for (; i < n; ++i) out[i] = scale * std::exp(-gamma * sq[i]);
}

void sq_dist_avx2(const double* point, const double* pts, std::size_t n,
                  std::size_t d, double* out) {
  if (d == 2) {
    const __m256d px = _mm256_set1_pd(point[0]);
    const __m256d py = _mm256_set1_pd(point[1]);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      __m256d u = _mm256_loadu_pd(pts + 2 * j);      // x0 y0 x1 y1
      __m256d v = _mm256_loadu_pd(pts + 2 * j + 4);  // x2 y2 x3 y3
      __m256d t0 = _mm256_permute2f128_pd(u, v, 0x20);  // x0 y0 x2 y2
      __m256d t1 = _mm256_permute2f128_pd(u, v, 0x31);  // x1 y1 x3 y3
      __m256d xs = _mm256_unpacklo_pd(t0, t1);
      __m256d ys = _mm256_unpackhi_pd(t0, t1);
      __m256d dx = _mm256_sub_pd(xs, px);
      __m256d dy = _mm256_sub_pd(ys, py);
      _mm256_storeu_pd(out + j,
                       _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy)));
    }
    for (; j < n; ++j) {
      double dx = point[0] - pts[2 * j];
      double dy = point[1] - pts[2 * j + 1];
      out[j] = dx * dx + dy * dy;
    }
    return;
  }
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

const Ops* avx2_ops_if_supported() {
  static const bool supported =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  if (!supported) return nullptr;
  static const Ops ops{"avx2", dot_avx2, axpy_avx2, rbf_from_sqdist_avx2,
                       sq_dist_avx2};
  return &ops;
}

}  // namespace plebo::kernels
