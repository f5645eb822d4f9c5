#include "gsr/preprocess.hpp"

#include "gsr/error.hpp"
#include "gsr/stats.hpp"
#include "gsr/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace gsr {

namespace {

constexpr const char *kModule = "preprocess";
constexpr double kMadToSigma = 0.6745;

void require_length(std::span<const double> signal) {
    if (signal.size() < kMinRecordLength) {
        throw ValidationError(kModule, "signal of length " + std::to_string(signal.size()) +
                                           " is shorter than the minimum " + std::to_string(kMinRecordLength));
    }
}

double threshold_for(const WaveletDecomposition &decomp) {
    const double sigma = estimate_noise_sigma(decomp.details.front());
    return sigma * std::sqrt(2.0 * std::log(static_cast<double>(decomp.original_length)));
}

}  // namespace

NormalizationParams::NormalizationParams(double x_min, double x_max) : x_min_(x_min), x_max_(x_max) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min)) {
        throw ValidationError(kModule, "degenerate normalization baseline: x_max must exceed x_min");
    }
}

double estimate_noise_sigma(std::span<const double> finest_detail) {
    std::vector<double> magnitudes(finest_detail.size());
    std::transform(finest_detail.begin(), finest_detail.end(), magnitudes.begin(),
                   [](double v) { return std::abs(v); });
    return stats::lower_median(magnitudes) / kMadToSigma;
}

double universal_threshold(std::span<const double> signal) {
    require_length(signal);
    return threshold_for(dwt_decompose(signal, 1));
}

std::vector<double> denoise(std::span<const double> signal) {
    require_length(signal);
    WaveletDecomposition decomp = dwt_decompose(signal, kWaveletLevels);
    const double threshold = threshold_for(decomp);
    for (auto &level : decomp.details) {
        for (double &c : level) {
            c = soft_threshold(c, threshold);
        }
    }
    return dwt_reconstruct(decomp);
}

NormalizationParams fit_calm_baseline(std::span<const double> calm_signal) {
    if (calm_signal.empty()) {
        throw ValidationError(kModule, "calm baseline signal is empty");
    }
    const auto [lo, hi] = std::minmax_element(calm_signal.begin(), calm_signal.end());
    if (!(*hi > *lo)) {
        throw ValidationError(kModule, "degenerate calm baseline: signal is constant");
    }
    return NormalizationParams(*lo, *hi);
}

std::vector<double> normalize_signal(std::span<const double> signal, const NormalizationParams &params) {
    std::vector<double> out(signal.size());
    std::transform(signal.begin(), signal.end(), out.begin(), [&](double x) { return params.apply(x); });
    return out;
}

Dataset preprocess_dataset(const Dataset &dataset, bool normalize) {
    Dataset out;
    out.manifest_path = dataset.manifest_path;
    out.records.reserve(dataset.records.size());
    for (const auto &record : dataset.records) {
        GsrRecord processed = record;
        try {
            processed.samples = denoise(record.samples);
        } catch (const ValidationError &e) {
            throw ValidationError(kModule, e.what(), record.record_id);
        }
        out.records.push_back(std::move(processed));
    }
    if (!normalize) {
        return out;
    }
    std::map<std::string, NormalizationParams> baselines;
    for (const auto &record : out.records) {
        if (record.label != EmotionLabel::Calm || baselines.contains(record.subject_id)) {
            continue;
        }
        try {
            baselines.emplace(record.subject_id, fit_calm_baseline(record.samples));
        } catch (const ValidationError &e) {
            throw ValidationError(kModule, e.what(), record.record_id);
        }
    }
    for (auto &record : out.records) {
        const auto it = baselines.find(record.subject_id);
        if (it == baselines.end()) {
            throw ValidationError(kModule, "subject '" + record.subject_id + "' has no calm baseline record",
                                  record.record_id);
        }
        record.samples = normalize_signal(record.samples, it->second);
    }
    return out;
}

}  // namespace gsr
