#include "kernels.hpp"

namespace expert::simd::scalar {

float dot(const float* x, const float* y, std::size_t n)
{
    float acc = 0.0F;
    for (std::size_t i = 0; i < n; ++i) {
        acc += x[i] * y[i];
    }
    return acc;
}

double dot_wide(const float* x, const float* y, std::size_t n)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += static_cast<double>(x[i]) * static_cast<double>(y[i]);
    }
    return acc;
}

void axpy(float a, const float* x, float* y, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) {
        y[i] += a * x[i];
    }
}

void add(const float* x, float* y, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) {
        y[i] += x[i];
    }
}

}  // namespace expert::simd::scalar
