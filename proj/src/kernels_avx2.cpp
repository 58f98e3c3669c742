// AVX2 variants of the dense kernels. Float inputs are widened to double
// before accumulation so the result tracks the scalar reference to rounding
// of the summation order only.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "proxkit/kernels.hpp"

namespace proxkit::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

}  // namespace

double dot(const float* a, const float* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 af = _mm256_loadu_ps(a + i);
    __m256 bf = _mm256_loadu_ps(b + i);
    __m256d alo = _mm256_cvtps_pd(_mm256_castps256_ps128(af));
    __m256d ahi = _mm256_cvtps_pd(_mm256_extractf128_ps(af, 1));
    __m256d blo = _mm256_cvtps_pd(_mm256_castps256_ps128(bf));
    __m256d bhi = _mm256_cvtps_pd(_mm256_extractf128_ps(bf, 1));
    acc0 = _mm256_fmadd_pd(alo, blo, acc0);
    acc1 = _mm256_fmadd_pd(ahi, bhi, acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return acc;
}

double sumsq(const float* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 af = _mm256_loadu_ps(a + i);
    __m256d alo = _mm256_cvtps_pd(_mm256_castps256_ps128(af));
    __m256d ahi = _mm256_cvtps_pd(_mm256_extractf128_ps(af, 1));
    acc0 = _mm256_fmadd_pd(alo, alo, acc0);
    acc1 = _mm256_fmadd_pd(ahi, ahi, acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    acc += static_cast<double>(a[i]) * static_cast<double>(a[i]);
  }
  return acc;
}

}  // namespace proxkit::kernels::avx2

#endif  // x86_64
