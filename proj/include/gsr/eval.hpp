#pragma once

#include "gsr/emotion.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace gsr {

/// counts[true][predicted] over the five labels in canonical order.
struct ConfusionMatrix {
    std::array<std::array<std::size_t, kNumLabels>, kNumLabels> counts{};

    [[nodiscard]] std::size_t total() const noexcept;
    [[nodiscard]] std::size_t row_total(EmotionLabel truth) const noexcept;
    [[nodiscard]] std::size_t at(EmotionLabel truth, EmotionLabel predicted) const noexcept {
        return counts[label_index(truth)][label_index(predicted)];
    }
    ConfusionMatrix &operator+=(const ConfusionMatrix &other) noexcept;
};

[[nodiscard]] ConfusionMatrix confusion_matrix(std::span<const EmotionLabel> truth,
                                               std::span<const EmotionLabel> predicted);

/// trace / total; throws on an empty matrix.
[[nodiscard]] double accuracy(const ConfusionMatrix &cm);

/// Recall per label (diagonal over row total); throws when a label row is empty.
[[nodiscard]] std::map<EmotionLabel, double> per_label_rates(const ConfusionMatrix &cm);

/// Like per_label_rates but labels with an empty row are simply absent.
[[nodiscard]] std::map<EmotionLabel, double> available_label_rates(const ConfusionMatrix &cm);

struct CvReport {
    std::size_t k{0};
    std::uint64_t seed{0};
    std::vector<double> fold_accuracies;
    double mean{0.0};
    double std{0.0};  ///< population standard deviation of fold accuracies
    std::vector<ConfusionMatrix> per_fold_confusions;
    std::vector<std::size_t> fold_sizes;
    std::size_t fit_row_reads{0};          ///< rows read while fitting, all folds
    std::size_t heldout_reads_during_fit{0};
};

/// One evaluated model column of the accuracy tables.
struct AccuracyColumn {
    std::size_t n_features{0};
    ConfusionMatrix train;
    ConfusionMatrix test;
};

/// Per-label recognition rate (%) on the test side, one column per feature count.
[[nodiscard]] std::string format_label_table(std::span<const AccuracyColumn> columns, const std::string &title);

/// Overall accuracy (%) on training and test data, one column per feature count.
[[nodiscard]] std::string format_accuracy_table(std::span<const AccuracyColumn> columns, const std::string &title);

[[nodiscard]] std::string format_confusion(const ConfusionMatrix &cm);

/// Positions of `per_label` rows per label drawn with the seed (labels with
/// fewer rows contribute all of theirs); ascending.
[[nodiscard]] std::vector<std::size_t> sample_per_label(std::span<const EmotionLabel> labels, std::size_t per_label,
                                                        std::uint64_t seed);

}  // namespace gsr
