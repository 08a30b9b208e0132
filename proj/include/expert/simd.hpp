#pragma once

#include <span>
#include <string_view>

/// Dense float-vector kernels used by embedding training and scoring.
/// Each kernel has a scalar reference implementation and, on x86-64, an AVX2
/// variant. The variant is picked once at startup from CPUID and can be
/// overridden (tests force each one to check they agree).
namespace expert::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

/// True when the running CPU and this build both support `isa`.
bool supported(Isa isa);

/// The variant the kernels below currently dispatch to.
Isa active_isa();

/// Forces a variant. Throws InvalidArgument if unsupported. Not thread-safe
/// with respect to concurrent kernel calls; call before starting work.
void set_isa(Isa isa);

/// Float-accumulated dot product. Summation order differs per variant.
float dot(std::span<const float> x, std::span<const float> y);

/// Dot product with double accumulation, for similarity scores.
double dot_wide(std::span<const float> x, std::span<const float> y);

/// y += a * x
void axpy(float a, std::span<const float> x, std::span<float> y);

/// y += x (bit-identical across variants)
void add(std::span<const float> x, std::span<float> y);

}  // namespace expert::simd
