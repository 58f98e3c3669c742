// NEON variants for aarch64. Same widen-to-double scheme as the AVX2 path.

#if defined(__aarch64__) && defined(__ARM_NEON)

#include <arm_neon.h>

#include "proxkit/kernels.hpp"

namespace proxkit::kernels::neon {

double dot(const float* a, const float* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    float32x4_t af = vld1q_f32(a + i);
    float32x4_t bf = vld1q_f32(b + i);
    float64x2_t alo = vcvt_f64_f32(vget_low_f32(af));
    float64x2_t ahi = vcvt_high_f64_f32(af);
    float64x2_t blo = vcvt_f64_f32(vget_low_f32(bf));
    float64x2_t bhi = vcvt_high_f64_f32(bf);
    acc0 = vfmaq_f64(acc0, alo, blo);
    acc1 = vfmaq_f64(acc1, ahi, bhi);
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) {
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return acc;
}

double sumsq(const float* a, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    float32x4_t af = vld1q_f32(a + i);
    float64x2_t alo = vcvt_f64_f32(vget_low_f32(af));
    float64x2_t ahi = vcvt_high_f64_f32(af);
    acc0 = vfmaq_f64(acc0, alo, alo);
    acc1 = vfmaq_f64(acc1, ahi, ahi);
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) {
    acc += static_cast<double>(a[i]) * static_cast<double>(a[i]);
  }
  return acc;
}

}  // namespace proxkit::kernels::neon

#endif  // aarch64
