#pragma once

#include "gsr/emotion.hpp"
#include "gsr/features.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace gsr {

enum class KernelKind { linear, polynomial, rbf, sigmoid };

[[nodiscard]] std::string_view to_string(KernelKind kind) noexcept;
/// Accepts linear, poly/polynomial, rbf, sigmoid.
[[nodiscard]] KernelKind parse_kernel_kind(std::string_view text);

/// linear:     x.y
/// polynomial: (eta x.y + r)^degree
/// rbf:        exp(-eta |x - y|^2)
/// sigmoid:    tanh(eta x.y + r)
struct KernelSpec {
    KernelKind kind{KernelKind::rbf};
    double eta{1.0};
    double r{0.0};
    int degree{3};

    /// Throws ValidationError when eta <= 0 (non-linear kinds) or degree < 1.
    void validate() const;
};

[[nodiscard]] double kernel_eval(const KernelSpec &spec, std::span<const double> x, std::span<const double> y);

struct TrainConfig {
    double c{1.0};
    KernelSpec kernel{};
    double tolerance{1e-3};           ///< KKT violation allowed at convergence
    std::size_t max_passes{100000};   ///< SMO iteration cap
    std::uint64_t seed{0};            ///< working-set tie breaking

    void validate() const;
};

/// Binary decision function f(x) = sum_i coef_i K(sv_i, x) + bias, with
/// coef_i = alpha_i y_i. label_pair.first is the +1 side.
struct BinarySvmModel {
    std::vector<std::vector<double>> support_vectors;
    std::vector<double> dual_coefficients;
    double bias{0.0};
    KernelSpec kernel{};
    double c{1.0};
    std::pair<EmotionLabel, EmotionLabel> label_pair{EmotionLabel::Happiness, EmotionLabel::Grief};
    bool converged{false};
    std::size_t iterations{0};
};

/// Solver trace from one SMO run.
struct TrainStats {
    std::vector<double> alphas;          ///< final multiplier per training row
    std::vector<double> objective_trace; ///< dual objective after every step, starting at 0
    std::size_t iterations{0};
    bool converged{false};
    double final_gap{0.0};               ///< max violating-pair gap at exit
};

/// C-SVC dual by SMO with maximal-violating-pair working sets; labels are +1/-1.
[[nodiscard]] BinarySvmModel train_binary(std::span<const std::vector<double>> rows, std::span<const int> labels,
                                          const TrainConfig &config, TrainStats *stats = nullptr);

[[nodiscard]] double decision_value(const BinarySvmModel &model, std::span<const double> x);

/// One-vs-one ensemble over the labels present in training.
struct MulticlassSvmModel {
    std::vector<BinarySvmModel> machines;   ///< one per unordered pair, in label_order pair order
    std::vector<EmotionLabel> label_order;
    std::vector<std::size_t> feature_indices;  ///< 1-based catalog indices
    std::optional<std::vector<FeatureScaling>> normalization;  ///< per selected feature
    TrainConfig config{};
};

/// Trains one machine per label pair on the rows of `matrix` (already scaled
/// when matrix.normalization is set) restricted to `feature_indices`.
[[nodiscard]] MulticlassSvmModel train_multiclass(const FeatureMatrix &matrix,
                                                  std::span<const std::size_t> feature_indices,
                                                  const TrainConfig &config);

/// Picks the winning label from a vote table: most votes, then larger summed
/// |decision| among the tied labels, then earlier position in label_order.
[[nodiscard]] EmotionLabel resolve_votes(std::span<const EmotionLabel> label_order,
                                         std::span<const std::size_t> votes, std::span<const double> magnitudes);

struct VoteTally {
    std::vector<std::size_t> votes;     ///< parallel to label_order
    std::vector<double> magnitudes;     ///< summed |decision| of the machines voting for each label
    EmotionLabel winner{EmotionLabel::Calm};
};

/// Restricts and scales a raw 30-feature vector to the model inputs.
[[nodiscard]] std::vector<double> model_inputs(const MulticlassSvmModel &model, const FeatureVector &features);

[[nodiscard]] VoteTally tally_votes(const MulticlassSvmModel &model, std::span<const double> inputs);

[[nodiscard]] EmotionLabel predict(const MulticlassSvmModel &model, const FeatureVector &features);

inline constexpr int kModelFormatVersion = 1;

/// Versioned JSON; every real is stored as a hexadecimal float string.
void save_model(const MulticlassSvmModel &model, const std::filesystem::path &path);
[[nodiscard]] MulticlassSvmModel load_model(const std::filesystem::path &path);

[[nodiscard]] std::string model_to_json(const MulticlassSvmModel &model);
[[nodiscard]] MulticlassSvmModel model_from_json(std::string_view text);

}  // namespace gsr
