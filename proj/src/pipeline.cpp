#include "gsr/pipeline.hpp"

#include "gsr/error.hpp"

#include <algorithm>
#include <cmath>

namespace gsr {

namespace {

constexpr const char *kModule = "pipeline";

/// Copies the rows at `positions`, reporting each read to the audit.
FeatureMatrix audited_rows(const FeatureMatrix &all, std::span<const std::size_t> positions, LeakageAudit &audit) {
    FeatureMatrix out;
    out.rows.reserve(positions.size());
    for (const std::size_t p : positions) {
        audit.record_fit_read(p);
        out.rows.push_back(all.rows.at(p));
    }
    return out;
}

}  // namespace

std::string_view to_string(NormalizationMode mode) noexcept {
    switch (mode) {
    case NormalizationMode::signal:
        return "signal";
    case NormalizationMode::feature:
        return "feature";
    case NormalizationMode::both:
        return "both";
    }
    return "signal";
}

NormalizationMode parse_normalization_mode(std::string_view text) {
    if (text == "signal") {
        return NormalizationMode::signal;
    }
    if (text == "feature") {
        return NormalizationMode::feature;
    }
    if (text == "both") {
        return NormalizationMode::both;
    }
    throw ValidationError("cli", "unknown normalization mode '" + std::string(text) + "'");
}

void PipelineConfig::validate() const {
    if (wavelet_levels != kWaveletLevels) {
        throw ValidationError(kModule, "wavelet levels are fixed at " + std::to_string(kWaveletLevels));
    }
    if (feature_list) {
        if (feature_list->empty()) {
            throw ValidationError(kModule, "explicit feature list is empty");
        }
    } else if (k < 2 || k > kNumFeatures) {
        throw ValidationError(kModule, "k must lie in [2, 30]");
    }
    if (eta && !(*eta > 0.0)) {
        throw ValidationError(kModule, "eta must be > 0");
    }
    train_config(feature_list ? feature_list->size() : k).validate();
}

TrainConfig PipelineConfig::train_config(std::size_t n_selected) const {
    TrainConfig tc;
    tc.c = c;
    tc.kernel = kernel;
    tc.kernel.eta = eta ? *eta : 1.0 / static_cast<double>(n_selected);
    tc.tolerance = tolerance;
    tc.max_passes = max_passes;
    tc.seed = seed;
    return tc;
}

FeatureMatrix prepare_features(const Dataset &dataset, const PipelineConfig &config) {
    config.validate();
    if (dataset.empty()) {
        throw ValidationError(kModule, "dataset is empty");
    }
    return extract_dataset_features(preprocess_dataset(dataset, normalizes_signal(config.normalization)));
}

FittedPipeline fit_pipeline(const FeatureMatrix &train, const PipelineConfig &config) {
    config.validate();
    if (train.size() < 2) {
        throw ValidationError(kModule, "training set needs at least 2 rows");
    }
    FeatureMatrix scaled = normalizes_features(config.normalization)
                               ? apply_feature_normalization(train, fit_feature_normalization(train))
                               : train;
    FittedPipeline fitted;
    fitted.selection = config.feature_list ? select_explicit(scaled, *config.feature_list)
                                           : select_features(scaled, config.k);
    fitted.model = train_multiclass(scaled, fitted.selection.selected_indices,
                                    config.train_config(fitted.selection.selected_indices.size()));
    return fitted;
}

std::vector<EmotionLabel> predict_all(const MulticlassSvmModel &model, const FeatureMatrix &rows) {
    std::vector<EmotionLabel> out;
    out.reserve(rows.size());
    for (const auto &row : rows.rows) {
        out.push_back(predict(model, row));
    }
    return out;
}

ConfusionMatrix evaluate_model(const MulticlassSvmModel &model, const FeatureMatrix &rows) {
    const auto predicted = predict_all(model, rows);
    const auto truth = rows.labels();
    return confusion_matrix(truth, predicted);
}

void LeakageAudit::begin_fold(std::span<const std::size_t> heldout) { heldout_ = {heldout.begin(), heldout.end()}; }

void LeakageAudit::record_fit_read(std::size_t position) noexcept {
    ++fit_reads_;
    if (heldout_.contains(position)) {
        ++heldout_reads_;
    }
}

CvReport kfold_cross_validate(const FeatureMatrix &features, std::size_t k, const PipelineConfig &config,
                              std::uint64_t seed, const CvOptions &options) {
    config.validate();
    if (k < 2) {
        throw ValidationError("eval", "fold count must be at least 2");
    }
    const auto labels = features.labels();
    for (const EmotionLabel label : kAllLabels) {
        const auto count = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
        if (count > 0 && count < k) {
            throw ValidationError("eval", "label '" + std::string(to_string(label)) + "' has " + std::to_string(count) +
                                              " records, fewer than " + std::to_string(k) + " folds");
        }
    }
    const auto folds = stratified_folds(labels, k, seed);
    CvReport report;
    report.k = k;
    report.seed = seed;
    LeakageAudit audit;
    std::vector<std::size_t> everything(features.size());
    for (std::size_t i = 0; i < everything.size(); ++i) {
        everything[i] = i;
    }
    for (std::size_t f = 0; f < k; ++f) {
        const auto &heldout = folds[f];
        std::vector<std::size_t> train_positions;
        for (std::size_t g = 0; g < k; ++g) {
            if (g != f) {
                train_positions.insert(train_positions.end(), folds[g].begin(), folds[g].end());
            }
        }
        std::sort(train_positions.begin(), train_positions.end());
        audit.begin_fold(heldout);
        const FeatureMatrix train = audited_rows(features, train_positions, audit);
        PipelineConfig fold_config = config;
        if (options.leaky_selection && !config.feature_list) {
            FeatureMatrix all = audited_rows(features, everything, audit);
            if (normalizes_features(config.normalization)) {
                all = apply_feature_normalization(all, fit_feature_normalization(all));
            }
            fold_config.feature_list = select_features(all, config.k).selected_indices;
        }
        const FittedPipeline fitted = fit_pipeline(train, fold_config);
        const FeatureMatrix test = select_rows(features, heldout);
        const ConfusionMatrix cm = evaluate_model(fitted.model, test);
        report.per_fold_confusions.push_back(cm);
        report.fold_accuracies.push_back(accuracy(cm));
        report.fold_sizes.push_back(heldout.size());
    }
    double sum = 0.0;
    for (const double a : report.fold_accuracies) {
        sum += a;
    }
    report.mean = sum / static_cast<double>(k);
    double var = 0.0;
    for (const double a : report.fold_accuracies) {
        var += (a - report.mean) * (a - report.mean);
    }
    report.std = std::sqrt(var / static_cast<double>(k));
    report.fit_row_reads = audit.fit_reads();
    report.heldout_reads_during_fit = audit.heldout_reads();
    return report;
}

CvReport kfold_cross_validate(const Dataset &dataset, std::size_t k, const PipelineConfig &config, std::uint64_t seed,
                              const CvOptions &options) {
    return kfold_cross_validate(prepare_features(dataset, config), k, config, seed, options);
}

}  // namespace gsr
