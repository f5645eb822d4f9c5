#pragma once

#include "gsr/dataset_io.hpp"

#include <span>
#include <vector>

namespace gsr {

inline constexpr int kWaveletLevels = 5;

/// Min-max range taken from a subject's calm recording.
class NormalizationParams {
  public:
    /// Throws ValidationError unless x_max > x_min (both finite).
    NormalizationParams(double x_min, double x_max);

    [[nodiscard]] double x_min() const noexcept { return x_min_; }
    [[nodiscard]] double x_max() const noexcept { return x_max_; }
    [[nodiscard]] double apply(double x) const noexcept { return (x - x_min_) / (x_max_ - x_min_); }

  private:
    double x_min_;
    double x_max_;
};

/// Noise-scale estimate from the finest detail level: median(|d1|) / 0.6745.
[[nodiscard]] double estimate_noise_sigma(std::span<const double> finest_detail);

/// sigma * sqrt(2 ln N) for a signal of length N, sigma from its level-1 db5 details.
[[nodiscard]] double universal_threshold(std::span<const double> signal);

[[nodiscard]] constexpr double soft_threshold(double value, double threshold) noexcept {
    if (value > threshold) {
        return value - threshold;
    }
    if (value < -threshold) {
        return value + threshold;
    }
    return 0.0;
}

/// Five-level db5 decomposition, soft universal threshold on every detail
/// level, reconstruction. Output has the input's length (>= 64 required).
[[nodiscard]] std::vector<double> denoise(std::span<const double> signal);

/// (min, max) of the calm signal; throws on a constant signal.
[[nodiscard]] NormalizationParams fit_calm_baseline(std::span<const double> calm_signal);

/// Element-wise (x - x_min) / (x_max - x_min); values outside the calm range are kept.
[[nodiscard]] std::vector<double> normalize_signal(std::span<const double> signal, const NormalizationParams &params);

/// Denoises every record and, when `normalize` is set, rescales each subject's
/// records by the range of that subject's first (denoised) Calm record.
/// Throws when a subject with records has no Calm record to serve as baseline.
[[nodiscard]] Dataset preprocess_dataset(const Dataset &dataset, bool normalize);

}  // namespace gsr
