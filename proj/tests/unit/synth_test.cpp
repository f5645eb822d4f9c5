#include "doctest.h"
#include "support.hpp"

#include "gsr/error.hpp"
#include "gsr/features.hpp"
#include "gsr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace gsr;

namespace {

double mean_abs_first_difference(const std::vector<double> &x) {
    double acc = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
        acc += std::abs(x[i] - x[i - 1]);
    }
    return acc / static_cast<double>(x.size() - 1);
}

}  // namespace

TEST_CASE("calm is smoother than anger") {
    SynthConfig cfg;
    cfg.noise_std_us = 0.0;
    const GsrRecord calm = generate_record(EmotionLabel::Calm, 1, cfg);
    const GsrRecord anger = generate_record(EmotionLabel::Anger, 1, cfg);
    CHECK(mean_abs_first_difference(calm.samples) < mean_abs_first_difference(anger.samples));
}

TEST_CASE("generate_record is deterministic and positive") {
    const SynthConfig cfg;
    for (EmotionLabel l : kAllLabels) {
        const GsrRecord a = generate_record(l, 99, cfg);
        const GsrRecord b = generate_record(l, 99, cfg);
        CHECK(a.samples == b.samples);
        CHECK(a.samples.size() == cfg.samples_per_record());
        CHECK(*std::min_element(a.samples.begin(), a.samples.end()) > 0.0);
        CHECK(generate_record(l, 100, cfg).samples != a.samples);
    }
}

TEST_CASE("no events and no noise leaves a straight line") {
    SynthConfig cfg;
    cfg.noise_std_us = 0.0;
    cfg.artifact_rate_per_min = 0.0;
    for (auto &p : cfg.profiles) {
        p.events_per_min_min = 0.0;
        p.events_per_min_max = 0.0;
        p.drift_min_us_per_min = 0.2;
        p.drift_max_us_per_min = 0.3;
    }
    const GsrRecord r = generate_record(EmotionLabel::Fear, 5, cfg);
    const auto d2 = difference(r.samples, 2);
    CHECK(gsr_test::max_abs(d2) < 1e-12);
    CHECK(r.samples.back() > r.samples.front());
}

TEST_CASE("default dataset shape") {
    const Dataset ds = generate_dataset(SynthConfig{});
    CHECK(ds.size() == 257);
    CHECK(ds.label_counts() == std::array<std::size_t, kNumLabels>{57, 51, 47, 43, 59});
    std::set<std::string> ids;
    std::set<std::string> subjects_with_calm;
    std::set<std::string> subjects;
    for (const auto &r : ds.records) {
        ids.insert(r.record_id);
        subjects.insert(r.subject_id);
        if (r.label == EmotionLabel::Calm) {
            subjects_with_calm.insert(r.subject_id);
        }
        CHECK(*std::min_element(r.samples.begin(), r.samples.end()) > 0.0);
        validate_record(r);
    }
    CHECK(ids.size() == 257);
    CHECK(subjects == subjects_with_calm);
}

TEST_CASE("generate_dataset determinism and empty config") {
    SynthConfig cfg;
    cfg.seed = 3;
    const Dataset a = generate_dataset(cfg);
    const Dataset b = generate_dataset(cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.records[i].record_id == b.records[i].record_id);
        CHECK(a.records[i].samples == b.records[i].samples);
    }
    cfg.seed = 4;
    CHECK(generate_dataset(cfg).records[0].samples != a.records[0].samples);

    SynthConfig none;
    none.per_label_counts = {0, 0, 0, 0, 0};
    CHECK(generate_dataset(none).empty());
}

TEST_CASE("synth config validation") {
    SynthConfig cfg;
    cfg.duration_s = 3.0;  // 48 samples at 16 Hz
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = SynthConfig{};
    cfg.noise_std_us = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = SynthConfig{};
    cfg.sample_rate_hz = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = SynthConfig{};
    cfg.profiles[0].amplitude_min_us = 2.0;
    cfg.profiles[0].amplitude_max_us = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}
