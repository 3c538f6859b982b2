#include "icc/simd.hpp"

#include <cstdlib>
#include <string>

#include "icc/error.hpp"

namespace icc::simd {

std::string_view to_string(Isa isa) {
    switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
    }
    return "scalar";
}

bool isa_available(Isa isa) {
    switch (isa) {
    case Isa::Scalar:
        return true;
    case Isa::Avx2:
#if defined(ICC_HAVE_AVX2)
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    case Isa::Neon:
#if defined(ICC_HAVE_NEON)
        return true;
#else
        return false;
#endif
    }
    return false;
}

DotFn kernel_for(Isa isa) {
    if (!isa_available(isa)) {
        return &dot_scalar;
    }
    switch (isa) {
#if defined(ICC_HAVE_AVX2)
    case Isa::Avx2: return &dot_avx2;
#endif
#if defined(ICC_HAVE_NEON)
    case Isa::Neon: return &dot_neon;
#endif
    default: return &dot_scalar;
    }
}

namespace {

Isa detect() {
    if (const char* forced = std::getenv("ICC_SIMD")) {
        const std::string name(forced);
        if (name == "scalar") return Isa::Scalar;
        if (name == "avx2" && isa_available(Isa::Avx2)) return Isa::Avx2;
        if (name == "neon" && isa_available(Isa::Neon)) return Isa::Neon;
        return Isa::Scalar;
    }
    if (isa_available(Isa::Avx2)) return Isa::Avx2;
    if (isa_available(Isa::Neon)) return Isa::Neon;
    return Isa::Scalar;
}

} // namespace

Isa active_isa() {
    static const Isa isa = detect();
    return isa;
}

double dot(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) {
        raise(ErrorCode::DimensionMismatch, "dot of vectors with different lengths");
    }
    static const DotFn fn = kernel_for(active_isa());
    return fn(a.data(), b.data(), a.size());
}

} // namespace icc::simd
