#pragma once

#include "gsr/dataset_io.hpp"
#include "gsr/emotion.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gsr {

inline constexpr std::size_t kNumFeatures = 30;
inline constexpr std::size_t kNumTimeFeatures = 24;
inline constexpr int kCatalogVersion = 1;

/// Band used by the band-power features, in Hz (inclusive).
inline constexpr double kBandLowHz = 0.08;
inline constexpr double kBandHighHz = 0.2;

enum class FeatureDomain { time, frequency };

struct FeatureDescriptor {
    std::size_t index;  ///< 1-based catalog index
    std::string_view name;
    FeatureDomain domain;
};

/// Frozen feature registry, catalog version 1.
///
///  1-8   statistics of the signal x
///  9-16  the same statistics of the first difference d1
/// 17-24  the same statistics of the second difference d2
///        each block: mean, median (lower middle), population std, min, max,
///        range, mean of |v|, root mean square
/// 25-30  spectrum of mean-removed x (unwindowed DFT, positive frequencies,
///        power = |X_k|^2 / N): total power, power in 0.08-0.2 Hz, band ratio
///        (0 when total is 0), centroid Hz, spread Hz, peak-magnitude Hz
[[nodiscard]] std::span<const FeatureDescriptor, kNumFeatures> feature_catalog() noexcept;

struct FeatureVector {
    std::array<double, kNumFeatures> values{};
    std::string record_id;
    EmotionLabel label{EmotionLabel::Calm};

    /// 1-based access matching catalog indices.
    [[nodiscard]] double at_index(std::size_t catalog_index) const { return values.at(catalog_index - 1); }
};

/// Per-column min-max scaling fitted on a feature matrix. A constant column is
/// flagged degenerate and maps every value to 0.
struct FeatureScaling {
    double min{0.0};
    double max{0.0};
    bool degenerate{true};

    [[nodiscard]] double apply(double x) const noexcept { return degenerate ? 0.0 : (x - min) / (max - min); }
};

struct FeatureMatrix {
    std::vector<FeatureVector> rows;
    std::optional<std::vector<FeatureScaling>> normalization;

    [[nodiscard]] std::size_t size() const noexcept { return rows.size(); }
    [[nodiscard]] bool empty() const noexcept { return rows.empty(); }
    /// Values of 0-based column j across rows.
    [[nodiscard]] std::vector<double> column(std::size_t j) const;
    [[nodiscard]] std::vector<EmotionLabel> labels() const;
};

/// Order 1: x[n+1] - x[n]; order 2: x[n+2] - 2x[n+1] + x[n].
[[nodiscard]] std::vector<double> difference(std::span<const double> signal, int order);

[[nodiscard]] FeatureVector extract_features(std::span<const double> signal, double sample_rate_hz);

/// extract_features over every record, carrying record_id and label.
[[nodiscard]] FeatureMatrix extract_dataset_features(const Dataset &dataset);

[[nodiscard]] std::vector<FeatureScaling> fit_feature_normalization(const FeatureMatrix &matrix);

/// Returns a copy with every column rescaled and `normalization` set to params.
[[nodiscard]] FeatureMatrix apply_feature_normalization(const FeatureMatrix &matrix,
                                                        std::span<const FeatureScaling> params);

/// Rows at the given positions, in the given order; normalization is carried over.
[[nodiscard]] FeatureMatrix select_rows(const FeatureMatrix &matrix, std::span<const std::size_t> positions);

/// CSV with a `# catalog_version: 1` line and header `record_id,label,f01..f30`.
void save_feature_matrix(const FeatureMatrix &matrix, const std::filesystem::path &path);
[[nodiscard]] FeatureMatrix load_feature_matrix(const std::filesystem::path &path);

}  // namespace gsr
