#pragma once

#include <cstddef>
#include <string_view>

namespace proxkit::kernels {

/// Dot product of two float32 arrays, accumulated in double.
double dot(const float* a, const float* b, std::size_t n);

/// Sum of squares of a float32 array, accumulated in double.
double sumsq(const float* a, std::size_t n);

/// Name of the implementation selected at runtime ("avx2", "neon", "scalar").
std::string_view backend();

/// Portable reference kernels; the dispatched variants are equivalence-tested
/// against these.
namespace scalar {
double dot(const float* a, const float* b, std::size_t n);
double sumsq(const float* a, std::size_t n);
}  // namespace scalar

}  // namespace proxkit::kernels
