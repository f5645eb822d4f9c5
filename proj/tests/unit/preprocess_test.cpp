#include "doctest.h"
#include "support.hpp"

#include "gsr/error.hpp"
#include "gsr/preprocess.hpp"
#include "gsr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace gsr;

namespace {

std::vector<double> sinusoid(std::size_t n, double fs, double hz) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / fs);
    }
    return x;
}

double mse(const std::vector<double> &a, const std::vector<double> &b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return acc / static_cast<double>(a.size());
}

}  // namespace

TEST_CASE("soft threshold") {
    CHECK(soft_threshold(3.0, 1.0) == 2.0);
    CHECK(soft_threshold(-3.0, 1.0) == -2.0);
    CHECK(soft_threshold(0.5, 1.0) == 0.0);
    CHECK(soft_threshold(-1.0, 1.0) == 0.0);
}

TEST_CASE("noise sigma uses the lower median") {
    CHECK(estimate_noise_sigma(std::vector<double>{-4.0, 1.0, 2.0, 3.0}) == doctest::Approx(2.0 / 0.6745));
    CHECK(estimate_noise_sigma(std::vector<double>{0.6745}) == doctest::Approx(1.0));
}

TEST_CASE("denoising a noisy 0.1 Hz sinusoid lowers the error") {
    const auto clean = sinusoid(512, 16.0, 0.1);
    // signal power 0.5, 10 dB SNR -> noise variance 0.05
    const auto noise = gsr_test::random_signal(512, 2024, std::sqrt(0.05));
    std::vector<double> noisy(512);
    for (std::size_t i = 0; i < 512; ++i) {
        noisy[i] = clean[i] + noise[i];
    }
    const auto out = denoise(noisy);
    REQUIRE(out.size() == 512);
    CHECK(mse(out, clean) < mse(noisy, clean));
    CHECK(mse(out, clean) < 0.5 * mse(noisy, clean));
}

TEST_CASE("denoise leaves a constant signal alone") {
    const std::vector<double> x(200, 4.25);
    const auto y = denoise(x);
    for (double v : y) {
        CHECK(std::abs(v - 4.25) < 1e-9);
    }
    CHECK_THROWS_AS((void)denoise(std::vector<double>(32, 1.0)), ValidationError);
    CHECK_NOTHROW((void)denoise(std::vector<double>(64, 1.0)));
}

TEST_CASE("threshold grows with the added noise") {
    const auto clean = sinusoid(512, 16.0, 0.1);
    const auto noise = gsr_test::random_signal(512, 77);
    double previous = -1.0;
    for (double s : {0.0, 0.001, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0}) {
        std::vector<double> x(512);
        for (std::size_t i = 0; i < 512; ++i) {
            x[i] = clean[i] + s * noise[i];
        }
        const double t = universal_threshold(x);
        CHECK(t >= previous);
        previous = t;
    }
}

TEST_CASE("calm baseline") {
    const auto p = fit_calm_baseline(std::vector<double>{2.0, 5.0, 3.0});
    CHECK(p.x_min() == 2.0);
    CHECK(p.x_max() == 5.0);
    CHECK_THROWS_AS((void)fit_calm_baseline(std::vector<double>{4.0, 4.0, 4.0}), ValidationError);
    CHECK_THROWS_AS(NormalizationParams(1.0, 1.0), ValidationError);

    const GsrRecord calm = generate_record(EmotionLabel::Calm, 12, SynthConfig{});
    const auto smooth = denoise(calm.samples);
    const auto q = fit_calm_baseline(smooth);
    CHECK(q.x_min() == *std::min_element(smooth.begin(), smooth.end()));
    CHECK(q.x_max() == *std::max_element(smooth.begin(), smooth.end()));
}

TEST_CASE("normalize_signal") {
    const NormalizationParams p(2.0, 5.0);
    const auto y = normalize_signal(std::vector<double>{2.0, 5.0, 6.5, 0.5}, p);
    CHECK(y[0] == 0.0);
    CHECK(y[1] == 1.0);
    CHECK(y[2] == doctest::Approx(1.5));
    CHECK(y[3] == doctest::Approx(-0.5));

    // affine: normalize(a x + b) under (a min + b, a max + b) equals normalize(x)
    const auto x = gsr_test::random_signal(50, 4);
    const double a = 3.5;
    const double b = -1.25;
    std::vector<double> ax(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        ax[i] = a * x[i] + b;
    }
    const auto y1 = normalize_signal(x, p);
    const auto y2 = normalize_signal(ax, NormalizationParams(a * 2.0 + b, a * 5.0 + b));
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(y2[i] == doctest::Approx(y1[i]).epsilon(1e-12));
    }
}

TEST_CASE("preprocess_dataset pairs each subject with its calm record") {
    SynthConfig cfg;
    cfg.per_label_counts = {3, 3, 3, 3, 3};
    const Dataset ds = generate_dataset(cfg);
    const Dataset out = preprocess_dataset(ds, true);
    REQUIRE(out.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto &r = ds.records[i];
        const GsrRecord *calm = nullptr;
        for (const auto &c : ds.records) {
            if (c.subject_id == r.subject_id && c.label == EmotionLabel::Calm) {
                calm = &c;
                break;
            }
        }
        REQUIRE(calm != nullptr);
        const auto params = fit_calm_baseline(denoise(calm->samples));
        const auto expected = normalize_signal(denoise(r.samples), params);
        CHECK(out.records[i].samples == expected);
        if (&r == calm) {
            CHECK(*std::min_element(expected.begin(), expected.end()) == 0.0);
            CHECK(*std::max_element(expected.begin(), expected.end()) == 1.0);
        }
    }
    CHECK(preprocess_dataset(ds, false).records[4].samples == denoise(ds.records[4].samples));

    Dataset no_calm;
    for (const auto &r : ds.records) {
        if (r.label != EmotionLabel::Calm) {
            no_calm.records.push_back(r);
        }
    }
    CHECK_THROWS_AS((void)preprocess_dataset(no_calm, true), ValidationError);
}
