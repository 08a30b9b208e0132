#include <atomic>
#include <string>

#include "expert/errors.hpp"
#include "expert/simd.hpp"
#include "kernels.hpp"

namespace expert::simd {

namespace {

constexpr KernelTable scalar_table{scalar::dot, scalar::dot_wide, scalar::axpy, scalar::add};
#if defined(EXPERT_HAVE_AVX2)
constexpr KernelTable avx2_table{avx2::dot, avx2::dot_wide, avx2::axpy, avx2::add};
#endif

bool cpu_has_avx2()
{
#if defined(EXPERT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa detect()
{
    return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current()
{
    static std::atomic<Isa> isa{detect()};
    return isa;
}

const KernelTable& table()
{
#if defined(EXPERT_HAVE_AVX2)
    if (current().load(std::memory_order_relaxed) == Isa::avx2) {
        return avx2_table;
    }
#endif
    return scalar_table;
}

void check_lengths(std::size_t a, std::size_t b)
{
    if (a != b) {
        throw InvalidArgument("vector length mismatch: " + std::to_string(a) + " vs " +
                              std::to_string(b));
    }
}

}  // namespace

std::string_view to_string(Isa isa)
{
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

bool supported(Isa isa)
{
    return isa == Isa::scalar || cpu_has_avx2();
}

Isa active_isa() { return current().load(); }

void set_isa(Isa isa)
{
    if (!supported(isa)) {
        throw InvalidArgument("SIMD variant not supported here: " + std::string(to_string(isa)));
    }
    current().store(isa);
}

float dot(std::span<const float> x, std::span<const float> y)
{
    check_lengths(x.size(), y.size());
    return table().dot(x.data(), y.data(), x.size());
}

double dot_wide(std::span<const float> x, std::span<const float> y)
{
    check_lengths(x.size(), y.size());
    return table().dot_wide(x.data(), y.data(), x.size());
}

void axpy(float a, std::span<const float> x, std::span<float> y)
{
    check_lengths(x.size(), y.size());
    table().axpy(a, x.data(), y.data(), x.size());
}

void add(std::span<const float> x, std::span<float> y)
{
    check_lengths(x.size(), y.size());
    table().add(x.data(), y.data(), x.size());
}

}  // namespace expert::simd
