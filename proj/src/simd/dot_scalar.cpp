#include "icc/simd.hpp"

namespace icc::simd {

double dot_scalar(const float* a, const float* b, std::size_t n) {
    double lanes[kLanes] = {};
    for (std::size_t i = 0; i < n; ++i) {
        lanes[i % kLanes] += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    const double s0 = lanes[0] + lanes[4];
    const double s1 = lanes[1] + lanes[5];
    const double s2 = lanes[2] + lanes[6];
    const double s3 = lanes[3] + lanes[7];
    return (s0 + s1) + (s2 + s3);
}

} // namespace icc::simd
