#include "doctest.h"
#include "support.hpp"

#include "gsr/error.hpp"
#include "gsr/pipeline.hpp"
#include "gsr/simd/kernels.hpp"
#include "gsr/synth.hpp"
#include "gsr/wavelet.hpp"

#include <cmath>

using namespace gsr;

namespace {

double close(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

struct LevelGuard {
    ~LevelGuard() { simd::force_level(std::nullopt); }
};

}  // namespace

TEST_CASE("scalar and avx2 kernels agree") {
    if (!simd::avx2::compiled() || simd::detected_level() != simd::Level::avx2) {
        MESSAGE("AVX2 path unavailable on this machine; comparing scalar with itself");
    }
    const bool have_avx2 = simd::detected_level() == simd::Level::avx2;
    for (std::size_t n = 0; n < 70; ++n) {
        CAPTURE(n);
        const auto a = gsr_test::random_signal(n, 2 * n + 1, 3.0);
        const auto b = gsr_test::random_signal(n, 2 * n + 2, 0.5);
        const double d0 = simd::scalar::dot(a, b);
        const double s0 = simd::scalar::squared_distance(a, b);
        double naive_dot = 0.0, naive_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            naive_dot += a[i] * b[i];
            naive_sq += (a[i] - b[i]) * (a[i] - b[i]);
        }
        CHECK(close(d0, naive_dot));
        CHECK(close(s0, naive_sq));
        if (have_avx2) {
            CHECK(close(simd::avx2::dot(a, b), d0));
            CHECK(close(simd::avx2::squared_distance(a, b), s0));
        }
        for (std::size_t taps : {1u, 3u, 5u}) {
            if (n < taps) continue;
            const auto t = gsr_test::random_signal(taps, 1000 + taps);
            const std::size_t out_len = n - taps + 1;
            std::vector<double> ref(out_len, 0.25), fast(out_len, 0.25), naive(out_len, 0.25);
            simd::scalar::correlate_accumulate(a, t, ref);
            for (std::size_t m = 0; m < out_len; ++m) {
                for (std::size_t s = 0; s < taps; ++s) naive[m] += t[s] * a[m + s];
            }
            for (std::size_t m = 0; m < out_len; ++m) CHECK(close(ref[m], naive[m]));
            if (have_avx2) {
                simd::avx2::correlate_accumulate(a, t, fast);
                for (std::size_t m = 0; m < out_len; ++m) CHECK(close(fast[m], ref[m]));
            }
        }
    }
}

TEST_CASE("dispatch checks sizes and honours a pinned level") {
    LevelGuard guard;
    const std::vector<double> a{1, 2, 3}, b{1, 2};
    CHECK_THROWS_AS((void)simd::dot(a, b), ValidationError);
    CHECK_THROWS_AS((void)simd::squared_distance(a, b), ValidationError);
    std::vector<double> out(3);
    CHECK_THROWS_AS(simd::correlate_accumulate(a, b, out), ValidationError);
    simd::force_level(simd::Level::scalar);
    CHECK(simd::active_level() == simd::Level::scalar);
    simd::force_level(simd::Level::avx2);
    CHECK(simd::active_level() == simd::detected_level());
}

TEST_CASE("pipeline results do not depend on the kernel level") {
    LevelGuard guard;
    SynthConfig sc;
    sc.per_label_counts = {10, 10, 10, 10, 10};
    const Dataset ds = generate_dataset(sc);
    const PipelineConfig pc;
    std::vector<std::vector<EmotionLabel>> predictions;
    std::vector<std::vector<double>> wavelets;
    for (simd::Level level : {simd::Level::scalar, simd::Level::avx2}) {
        simd::force_level(level);
        const FeatureMatrix fm = prepare_features(ds, pc);
        const auto fit = fit_pipeline(fm, pc);
        predictions.push_back(predict_all(fit.model, fm));
        wavelets.push_back(dwt_reconstruct(dwt_decompose(ds.records[0].samples, 5)));
    }
    CHECK(predictions[0] == predictions[1]);
    for (std::size_t i = 0; i < wavelets[0].size(); ++i) {
        CHECK(close(wavelets[0][i], wavelets[1][i]));
    }
}
