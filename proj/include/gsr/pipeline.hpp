#pragma once

#include "gsr/dataset_io.hpp"
#include "gsr/eval.hpp"
#include "gsr/features.hpp"
#include "gsr/preprocess.hpp"
#include "gsr/selection.hpp"
#include "gsr/svm.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <vector>

namespace gsr {

/// Where min-max scaling is applied: to the signal against the
/// subject's calm range, to the feature columns, or both.
enum class NormalizationMode { signal, feature, both };

[[nodiscard]] std::string_view to_string(NormalizationMode mode) noexcept;
[[nodiscard]] NormalizationMode parse_normalization_mode(std::string_view text);

[[nodiscard]] constexpr bool normalizes_signal(NormalizationMode m) noexcept { return m != NormalizationMode::feature; }
[[nodiscard]] constexpr bool normalizes_features(NormalizationMode m) noexcept { return m != NormalizationMode::signal; }

struct PipelineConfig {
    int wavelet_levels{kWaveletLevels};
    KernelSpec kernel{};
    std::optional<double> eta;   ///< unset: 1 / number of selected features
    double c{1.0};
    double tolerance{1e-3};
    std::size_t max_passes{100000};
    std::size_t k{15};
    std::optional<std::vector<std::size_t>> feature_list;
    NormalizationMode normalization{NormalizationMode::both};
    std::uint64_t seed{42};

    void validate() const;
    [[nodiscard]] TrainConfig train_config(std::size_t n_selected) const;
};

/// Denoise (+ calm-baseline scaling per mode), then extract the 30 features.
[[nodiscard]] FeatureMatrix prepare_features(const Dataset &dataset, const PipelineConfig &config);

struct FittedPipeline {
    SelectionResult selection;
    MulticlassSvmModel model;
};

/// Fits on raw training features: feature scaling (per mode),
/// selection, one-vs-one SVM training.
[[nodiscard]] FittedPipeline fit_pipeline(const FeatureMatrix &train, const PipelineConfig &config);

[[nodiscard]] std::vector<EmotionLabel> predict_all(const MulticlassSvmModel &model, const FeatureMatrix &rows);

[[nodiscard]] ConfusionMatrix evaluate_model(const MulticlassSvmModel &model, const FeatureMatrix &rows);

/// Counts row reads made while fitting and flags reads of held-out rows.
class LeakageAudit {
  public:
    void begin_fold(std::span<const std::size_t> heldout);
    void record_fit_read(std::size_t position) noexcept;

    [[nodiscard]] std::size_t fit_reads() const noexcept { return fit_reads_; }
    [[nodiscard]] std::size_t heldout_reads() const noexcept { return heldout_reads_; }

  private:
    std::set<std::size_t> heldout_;
    std::size_t fit_reads_{0};
    std::size_t heldout_reads_{0};
};

struct CvOptions {
    /// Fit selection on every row instead of the training folds. Exists to
    /// demonstrate the audit and the optimism of a leaky protocol.
    bool leaky_selection{false};
};

/// Stratified k-fold CV over prepared features; every fitted stage sees only
/// the training folds (reads go through the audit).
[[nodiscard]] CvReport kfold_cross_validate(const FeatureMatrix &features, std::size_t k,
                                            const PipelineConfig &config, std::uint64_t seed,
                                            const CvOptions &options = {});

/// Same, starting from records: prepare_features then the matrix overload.
[[nodiscard]] CvReport kfold_cross_validate(const Dataset &dataset, std::size_t k, const PipelineConfig &config,
                                            std::uint64_t seed, const CvOptions &options = {});

}  // namespace gsr
