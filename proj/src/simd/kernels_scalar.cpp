#include "gsr/simd/kernels.hpp"

#include <cstddef>

namespace gsr::simd::scalar {

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void correlate_accumulate(std::span<const double> src, std::span<const double> taps, std::span<double> out) noexcept {
    for (std::size_t m = 0; m < out.size(); ++m) {
        double acc = 0.0;
        for (std::size_t s = 0; s < taps.size(); ++s) {
            acc += taps[s] * src[m + s];
        }
        out[m] += acc;
    }
}

}  // namespace gsr::simd::scalar
