#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace icc::simd {

// Every dot kernel accumulates float inputs in double precision across
// kLanes interleaved partial sums: element i lands in lane i % kLanes, and
// the lanes are combined as ((l0+l4)+(l1+l5)) + ((l2+l6)+(l3+l7)).
// float*float is exact in double, so FMA and mul+add agree and every
// variant returns the same bits as the scalar reference.
inline constexpr std::size_t kLanes = 8;

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa);

using DotFn = double (*)(const float* a, const float* b, std::size_t n);

double dot_scalar(const float* a, const float* b, std::size_t n);
#if defined(ICC_HAVE_AVX2)
double dot_avx2(const float* a, const float* b, std::size_t n);
#endif
#if defined(ICC_HAVE_NEON)
double dot_neon(const float* a, const float* b, std::size_t n);
#endif

// True when the kernel for `isa` is compiled in and the running CPU supports it.
bool isa_available(Isa isa);

// Kernel for `isa`; falls back to the scalar reference when unavailable.
DotFn kernel_for(Isa isa);

// Best available ISA, unless ICC_SIMD=scalar|avx2|neon pins one.
Isa active_isa();

double dot(std::span<const float> a, std::span<const float> b);

} // namespace icc::simd
