#pragma once

#include <cstddef>

// Raw kernel entry points. Lengths are validated by the dispatching wrappers.
namespace expert::simd {

struct KernelTable {
    float (*dot)(const float*, const float*, std::size_t);
    double (*dot_wide)(const float*, const float*, std::size_t);
    void (*axpy)(float, const float*, float*, std::size_t);
    void (*add)(const float*, float*, std::size_t);
};

namespace scalar {
float dot(const float* x, const float* y, std::size_t n);
double dot_wide(const float* x, const float* y, std::size_t n);
void axpy(float a, const float* x, float* y, std::size_t n);
void add(const float* x, float* y, std::size_t n);
}  // namespace scalar

#if defined(EXPERT_HAVE_AVX2)
namespace avx2 {
float dot(const float* x, const float* y, std::size_t n);
double dot_wide(const float* x, const float* y, std::size_t n);
void axpy(float a, const float* x, float* y, std::size_t n);
void add(const float* x, float* y, std::size_t n);
}  // namespace avx2
#endif

}  // namespace expert::simd
