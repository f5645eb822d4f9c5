#pragma once

#include "gsr/emotion.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gsr {

/// Minimum record length: five db5 levels need at least 2^5 * 2 samples.
inline constexpr std::size_t kMinRecordLength = 64;

struct GsrRecord {
    std::string record_id;
    std::string subject_id;
    EmotionLabel label{EmotionLabel::Calm};
    double sample_rate_hz{0.0};
    std::vector<double> samples;  ///< skin conductance in microsiemens
};

/// Throws ValidationError naming the record when an invariant does not hold.
void validate_record(const GsrRecord &record);

struct Dataset {
    std::vector<GsrRecord> records;
    std::string manifest_path;

    [[nodiscard]] bool empty() const noexcept { return records.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return records.size(); }
    [[nodiscard]] std::vector<EmotionLabel> labels() const;
    /// Record count per label in canonical order.
    [[nodiscard]] std::array<std::size_t, kNumLabels> label_counts() const;
};

/// Throws on duplicate record ids.
void validate_dataset(const Dataset &dataset);

[[nodiscard]] GsrRecord load_record(const std::filesystem::path &path);
void save_record(const GsrRecord &record, const std::filesystem::path &path);

[[nodiscard]] Dataset load_dataset(const std::filesystem::path &manifest_path);

/// Writes `<dir>/records/<record_id>.csv` for every record plus `<dir>/manifest.txt`.
/// Returns the manifest path.
std::filesystem::path save_dataset(const Dataset &dataset, const std::filesystem::path &dir);

/// Row positions of a stratified two-way split, each side ascending.
struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Per label the test side receives round-half-up(test_fraction * count) rows,
/// clamped to [1, count - 1] so both sides see every label. Deterministic in seed.
[[nodiscard]] SplitIndices stratified_split(std::span<const EmotionLabel> labels, double test_fraction,
                                            std::uint64_t seed);

/// Stratified k-way partition: fold f holds positions assigned round-robin
/// after a seeded per-label shuffle (the rotation carries over between labels,
/// so fold sizes differ by at most one). Needs at least k rows in total.
[[nodiscard]] std::vector<std::vector<std::size_t>> stratified_folds(std::span<const EmotionLabel> labels,
                                                                     std::size_t k, std::uint64_t seed);

[[nodiscard]] std::pair<Dataset, Dataset> split_dataset(const Dataset &dataset, double test_fraction,
                                                        std::uint64_t seed);

[[nodiscard]] Dataset subset(const Dataset &dataset, std::span<const std::size_t> positions);

}  // namespace gsr
