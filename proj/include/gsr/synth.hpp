#pragma once

#include "gsr/dataset_io.hpp"
#include "gsr/emotion.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

namespace gsr {

/// Parameter bands for one label; each record draws its values uniformly
/// from these ranges.
struct LabelProfile {
    double events_per_min_min{0.0};
    double events_per_min_max{0.0};
    double amplitude_min_us{0.0};
    double amplitude_max_us{0.0};
    double decay_min_s{2.0};
    double decay_max_s{10.0};
    double drift_min_us_per_min{0.0};
    double drift_max_us_per_min{0.0};
};

/// Frozen bands used by the default corpus.
[[nodiscard]] const std::array<LabelProfile, kNumLabels> &default_label_profiles();

struct SynthConfig {
    std::array<std::size_t, kNumLabels> per_label_counts{57, 51, 47, 43, 59};
    double duration_s{60.0};
    double sample_rate_hz{16.0};
    std::uint64_t seed{42};
    double noise_std_us{0.01};
    double rise_s{0.75};
    double tonic_jitter_us{0.3};  ///< per-record tonic offset, uniform in +-jitter
    double artifact_rate_per_min{2.0};  ///< label-independent motion artifacts (mean rate)
    double artifact_amplitude_us{0.15};
    std::array<LabelProfile, kNumLabels> profiles = default_label_profiles();

    /// Throws ValidationError for non-positive durations/rates, negative noise,
    /// inverted bands, or fewer than 64 samples per record.
    void validate() const;
    [[nodiscard]] std::size_t samples_per_record() const;
};

/// Individual differences: tonic level and response gain of one subject.
struct SubjectTraits {
    std::string subject_id{"S00"};
    double tonic_us{5.0};
    double gain{1.0};
};

/// x(t) = tonic (+ per-record jitter) + gain * (drift * t + sum of phasic bumps) + white noise,
/// floored at 0.01 uS. Each bump is a difference of exponentials with rise
/// time config.rise_s and a label-dependent decay, scaled to its amplitude.
[[nodiscard]] GsrRecord generate_record(EmotionLabel label, std::uint64_t seed, const SynthConfig &config,
                                        const SubjectTraits &subject = {});

/// Records for every label count; subjects are shared so each one owns a Calm
/// record when Calm is requested. Record seeds derive from config.seed.
[[nodiscard]] Dataset generate_dataset(const SynthConfig &config);

}  // namespace gsr
