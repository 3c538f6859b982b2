#include "icc/simd.hpp"

#include <arm_neon.h>

namespace icc::simd {

double dot_neon(const float* a, const float* b, std::size_t n) {
    float64x2_t acc01 = vdupq_n_f64(0.0);
    float64x2_t acc23 = vdupq_n_f64(0.0);
    float64x2_t acc45 = vdupq_n_f64(0.0);
    float64x2_t acc67 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const float32x4_t va0 = vld1q_f32(a + i);
        const float32x4_t va1 = vld1q_f32(a + i + 4);
        const float32x4_t vb0 = vld1q_f32(b + i);
        const float32x4_t vb1 = vld1q_f32(b + i + 4);
        acc01 = vfmaq_f64(acc01, vcvt_f64_f32(vget_low_f32(va0)), vcvt_f64_f32(vget_low_f32(vb0)));
        acc23 = vfmaq_f64(acc23, vcvt_high_f64_f32(va0), vcvt_high_f64_f32(vb0));
        acc45 = vfmaq_f64(acc45, vcvt_f64_f32(vget_low_f32(va1)), vcvt_f64_f32(vget_low_f32(vb1)));
        acc67 = vfmaq_f64(acc67, vcvt_high_f64_f32(va1), vcvt_high_f64_f32(vb1));
    }
    double lanes[kLanes];
    vst1q_f64(lanes, acc01);
    vst1q_f64(lanes + 2, acc23);
    vst1q_f64(lanes + 4, acc45);
    vst1q_f64(lanes + 6, acc67);
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
