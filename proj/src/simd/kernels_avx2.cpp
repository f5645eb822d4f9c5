#include "gsr/simd/kernels.hpp"

#include <cstddef>

#if defined(__AVX2__) && defined(__FMA__)
#define GSR_HAVE_AVX2 1
#include <immintrin.h>
#else
#define GSR_HAVE_AVX2 0
#endif

namespace gsr::simd::avx2 {

#if GSR_HAVE_AVX2

namespace {

inline double horizontal_sum(__m256d v) noexcept {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

}  // namespace

bool compiled() noexcept { return true; }

double dot(std::span<const double> a, std::span<const double> b) noexcept {
    const std::size_t n = a.size();
    const double *pa = a.data();
    const double *pb = b.data();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i + 4), _mm256_loadu_pd(pb + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i), acc0);
    }
    double acc = horizontal_sum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        acc += pa[i] * pb[i];
    }
    return acc;
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    const std::size_t n = a.size();
    const double *pa = a.data();
    const double *pb = b.data();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i));
        const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(pa + i + 4), _mm256_loadu_pd(pb + i + 4));
        acc0 = _mm256_fmadd_pd(d0, d0, acc0);
        acc1 = _mm256_fmadd_pd(d1, d1, acc1);
    }
    for (; i + 4 <= n; i += 4) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i));
        acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    }
    double acc = horizontal_sum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        const double d = pa[i] - pb[i];
        acc += d * d;
    }
    return acc;
}

// Vectorised across outputs: four consecutive out[m] share each broadcast tap.
void correlate_accumulate(std::span<const double> src, std::span<const double> taps, std::span<double> out) noexcept {
    const std::size_t n = out.size();
    const std::size_t ntaps = taps.size();
    const double *ps = src.data();
    double *po = out.data();
    std::size_t m = 0;
    for (; m + 4 <= n; m += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t s = 0; s < ntaps; ++s) {
            acc = _mm256_fmadd_pd(_mm256_set1_pd(taps[s]), _mm256_loadu_pd(ps + m + s), acc);
        }
        _mm256_storeu_pd(po + m, _mm256_add_pd(_mm256_loadu_pd(po + m), acc));
    }
    for (; m < n; ++m) {
        double acc = 0.0;
        for (std::size_t s = 0; s < ntaps; ++s) {
            acc += taps[s] * ps[m + s];
        }
        po[m] += acc;
    }
}

#else

bool compiled() noexcept { return false; }

double dot(std::span<const double> a, std::span<const double> b) noexcept { return scalar::dot(a, b); }

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    return scalar::squared_distance(a, b);
}

void correlate_accumulate(std::span<const double> src, std::span<const double> taps, std::span<double> out) noexcept {
    scalar::correlate_accumulate(src, taps, out);
}

#endif

}  // namespace gsr::simd::avx2
