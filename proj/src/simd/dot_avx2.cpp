#include "icc/simd.hpp"

#include <immintrin.h>

namespace icc::simd {

double dot_avx2(const float* a, const float* b, std::size_t n) {
    __m256d acc_lo = _mm256_setzero_pd(); // lanes 0..3
    __m256d acc_hi = _mm256_setzero_pd(); // lanes 4..7
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256 va = _mm256_loadu_ps(a + i);
        const __m256 vb = _mm256_loadu_ps(b + i);
        const __m256d a_lo = _mm256_cvtps_pd(_mm256_castps256_ps128(va));
        const __m256d a_hi = _mm256_cvtps_pd(_mm256_extractf128_ps(va, 1));
        const __m256d b_lo = _mm256_cvtps_pd(_mm256_castps256_ps128(vb));
        const __m256d b_hi = _mm256_cvtps_pd(_mm256_extractf128_ps(vb, 1));
        acc_lo = _mm256_fmadd_pd(a_lo, b_lo, acc_lo);
        acc_hi = _mm256_fmadd_pd(a_hi, b_hi, acc_hi);
    }
    alignas(32) double lanes[kLanes];
    _mm256_store_pd(lanes, acc_lo);
    _mm256_store_pd(lanes + 4, acc_hi);
    // tail keeps the i % kLanes lane assignment of the reference
    for (; i < n; ++i) {
        lanes[i % kLanes] += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    const double s0 = lanes[0] + lanes[4];
    const double s1 = lanes[1] + lanes[5];
    const double s2 = lanes[2] + lanes[6];
    const double s3 = lanes[3] + lanes[7];
    return (s0 + s1) + (s2 + s3);
}

} // namespace icc::simd
