#include "proxkit/kernels.hpp"

namespace proxkit::kernels {

#if defined(PROXKIT_BUILD_AVX2)
namespace avx2 {
double dot(const float*, const float*, std::size_t);
double sumsq(const float*, std::size_t);
}  // namespace avx2
#endif

#if defined(__aarch64__) && defined(__ARM_NEON)
namespace neon {
double dot(const float*, const float*, std::size_t);
double sumsq(const float*, std::size_t);
}  // namespace neon
#endif

namespace {

using DotFn = double (*)(const float*, const float*, std::size_t);
using SumsqFn = double (*)(const float*, std::size_t);

struct Impl {
  DotFn dot;
  SumsqFn sumsq;
  std::string_view name;
};

Impl select() {
#if defined(PROXKIT_BUILD_AVX2)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    return {&avx2::dot, &avx2::sumsq, "avx2"};
  }
#endif
#if defined(__aarch64__) && defined(__ARM_NEON)
  return {&neon::dot, &neon::sumsq, "neon"};
#endif
  return {&scalar::dot, &scalar::sumsq, "scalar"};
}

const Impl& impl() {
  static const Impl chosen = select();
  return chosen;
}

}  // namespace

double dot(const float* a, const float* b, std::size_t n) { return impl().dot(a, b, n); }

double sumsq(const float* a, std::size_t n) { return impl().sumsq(a, n); }

std::string_view backend() { return impl().name; }

}  // namespace proxkit::kernels
