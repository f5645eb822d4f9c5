#include "gsr/synth.hpp"

#include "gsr/error.hpp"
#include "gsr/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace gsr {

namespace {

constexpr const char *kModule = "synth";
constexpr double kFloorUs = 0.01;

// Peak of exp(-t/decay) - exp(-t/rise), used to scale bumps to unit height.
double bump_peak(double rise, double decay) {
    const double t_peak = std::log(decay / rise) * rise * decay / (decay - rise);
    return std::exp(-t_peak / decay) - std::exp(-t_peak / rise);
}

std::string format_id(const char *fmt, std::size_t a) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), fmt, a);
    return buf;
}

void check_band(double lo, double hi, const char *what) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
        throw ValidationError(kModule, std::string("invalid ") + what + " band");
    }
}

}  // namespace

const std::array<LabelProfile, kNumLabels> &default_label_profiles() {
    // events/min, amplitude uS, decay s, drift uS/min; order Happiness, Grief, Fear, Anger, Calm
    static const std::array<LabelProfile, kNumLabels> profiles{{
        {3.0, 5.0, 0.25, 0.45, 3.0, 5.0, 0.02, 0.12},
        {1.0, 2.5, 0.40, 0.70, 7.0, 10.0, -0.20, -0.05},
        {6.0, 9.0, 0.20, 0.40, 2.0, 3.5, 0.00, 0.10},
        {5.0, 8.0, 0.60, 1.00, 3.5, 6.0, 0.10, 0.25},
        {2.0, 2.0, 0.10, 0.12, 7.0, 8.0, -0.01, 0.01},
    }};
    return profiles;
}

void SynthConfig::validate() const {
    if (!(duration_s > 0.0) || !(sample_rate_hz > 0.0) || !std::isfinite(duration_s) || !std::isfinite(sample_rate_hz)) {
        throw ValidationError(kModule, "duration_s and sample_rate_hz must be positive");
    }
    if (!(noise_std_us >= 0.0) || !std::isfinite(noise_std_us)) {
        throw ValidationError(kModule, "noise_std_us must be non-negative");
    }
    if (!(artifact_rate_per_min >= 0.0) || !std::isfinite(artifact_rate_per_min) || !(artifact_amplitude_us >= 0.0) ||
        !std::isfinite(artifact_amplitude_us)) {
        throw ValidationError(kModule, "artifact rate and amplitude must be non-negative");
    }
    if (!(tonic_jitter_us >= 0.0) || !std::isfinite(tonic_jitter_us)) {
        throw ValidationError(kModule, "tonic_jitter_us must be non-negative");
    }
    if (!(rise_s > 0.0)) {
        throw ValidationError(kModule, "rise_s must be positive");
    }
    if (duration_s * sample_rate_hz < static_cast<double>(kMinRecordLength)) {
        throw ValidationError(kModule, "duration_s * sample_rate_hz must be at least " +
                                           std::to_string(kMinRecordLength));
    }
    for (const auto &p : profiles) {
        check_band(p.events_per_min_min, p.events_per_min_max, "event rate");
        check_band(p.amplitude_min_us, p.amplitude_max_us, "amplitude");
        check_band(p.decay_min_s, p.decay_max_s, "decay");
        check_band(p.drift_min_us_per_min, p.drift_max_us_per_min, "drift");
        if (p.events_per_min_min < 0.0 || p.amplitude_min_us < 0.0) {
            throw ValidationError(kModule, "event rates and amplitudes must be non-negative");
        }
        if (!(p.decay_min_s > rise_s)) {
            throw ValidationError(kModule, "decay times must exceed the rise time");
        }
    }
}

std::size_t SynthConfig::samples_per_record() const {
    return static_cast<std::size_t>(std::floor(duration_s * sample_rate_hz + 1e-9));
}

GsrRecord generate_record(EmotionLabel label, std::uint64_t seed, const SynthConfig &config,
                          const SubjectTraits &subject) {
    config.validate();
    const LabelProfile &p = config.profiles[label_index(label)];
    std::mt19937_64 rng(mix_seed(seed, 0xC0FFEE + label_index(label)));
    const std::size_t n = config.samples_per_record();
    const double fs = config.sample_rate_hz;

    const double tonic = subject.tonic_us + uniform(rng, -config.tonic_jitter_us, config.tonic_jitter_us);
    const double drift_per_s = uniform(rng, p.drift_min_us_per_min, p.drift_max_us_per_min) / 60.0;
    const double rate = uniform(rng, p.events_per_min_min, p.events_per_min_max);
    const auto n_events = static_cast<std::size_t>(std::floor(rate * config.duration_s / 60.0 + 0.5));

    std::vector<double> phasic(n, 0.0);
    for (std::size_t e = 0; e < n_events; ++e) {
        // jittered grid: responses recur at roughly the label's rate
        const double slot = config.duration_s / static_cast<double>(n_events);
        const double onset = std::clamp((static_cast<double>(e) + 0.5 + uniform(rng, -0.35, 0.35)) * slot, 0.0,
                                        std::max(config.duration_s - 2.0, 0.0));
        const double amplitude = uniform(rng, p.amplitude_min_us, p.amplitude_max_us);
        const double decay = uniform(rng, p.decay_min_s, p.decay_max_s);
        const double scale = amplitude / bump_peak(config.rise_s, decay);
        const auto first = static_cast<std::size_t>(std::ceil(onset * fs));
        for (std::size_t i = first; i < n; ++i) {
            const double t = static_cast<double>(i) / fs - onset;
            phasic[i] += scale * (std::exp(-t / decay) - std::exp(-t / config.rise_s));
        }
    }

    // motion artifacts: brief electrode-contact spikes of either sign, unrelated to the label
    const auto n_artifacts = static_cast<std::size_t>(
        std::floor(uniform(rng, 0.0, 2.0 * config.artifact_rate_per_min) * config.duration_s / 60.0 + 0.5));
    for (std::size_t e = 0; e < n_artifacts; ++e) {
        const double onset = uniform(rng, 0.0, config.duration_s);
        const double width = uniform(rng, 0.25, 0.5);
        const double height = uniform(rng, 0.5, 1.0) * config.artifact_amplitude_us * (uniform01(rng) < 0.5 ? -1.0 : 1.0);
        const auto first = static_cast<std::size_t>(std::ceil(onset * fs));
        for (std::size_t i = first; i < n && static_cast<double>(i) / fs < onset + width; ++i) {
            phasic[i] += height;
        }
    }

    GsrRecord record;
    record.label = label;
    record.subject_id = subject.subject_id;
    record.sample_rate_hz = fs;
    record.record_id = subject.subject_id + "_" + std::string(to_string(label)) + "_" + format_id("%03zu", seed % 1000);
    record.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        double x = tonic + subject.gain * (drift_per_s * t + phasic[i]);
        if (config.noise_std_us > 0.0) {
            x += config.noise_std_us * standard_normal(rng);
        }
        record.samples[i] = std::max(x, kFloorUs);
    }
    return record;
}

Dataset generate_dataset(const SynthConfig &config) {
    config.validate();
    const std::size_t calm = config.per_label_counts[label_index(EmotionLabel::Calm)];
    const std::size_t largest = *std::max_element(config.per_label_counts.begin(), config.per_label_counts.end());
    const std::size_t n_subjects = calm > 0 ? calm : std::max<std::size_t>(largest, 1);

    std::vector<SubjectTraits> subjects(n_subjects);
    for (std::size_t s = 0; s < n_subjects; ++s) {
        std::mt19937_64 rng(mix_seed(config.seed, 0x5B000000ULL + s));
        subjects[s].subject_id = format_id("S%02zu", s + 1);
        subjects[s].tonic_us = uniform(rng, 2.0, 8.0);
        subjects[s].gain = uniform(rng, 0.6, 1.6);
    }

    Dataset dataset;
    for (const EmotionLabel label : kAllLabels) {
        const std::size_t count = config.per_label_counts[label_index(label)];
        for (std::size_t i = 0; i < count; ++i) {
            const std::uint64_t record_seed = mix_seed(config.seed, (label_index(label) + 1) * 1'000'000ULL + i);
            GsrRecord record = generate_record(label, record_seed, config, subjects[i % n_subjects]);
            record.record_id = subjects[i % n_subjects].subject_id + "_" + std::string(to_string(label)) + "_" +
                               format_id("%03zu", i + 1);
            dataset.records.push_back(std::move(record));
        }
    }
    return dataset;
}

}  // namespace gsr
