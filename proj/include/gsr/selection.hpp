#pragma once

#include "gsr/emotion.hpp"
#include "gsr/features.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace gsr {

enum class MatrixKind { covariance, correlation };

/// Dense symmetric dim x dim matrix, row-major.
struct CovarianceMatrix {
    std::size_t dim{0};
    std::vector<double> values;
    MatrixKind kind{MatrixKind::covariance};

    [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values.at(i * dim + j); }
};

/// Population covariance E[(X - EX)(Y - EY)], divide by N.
[[nodiscard]] double covariance(std::span<const double> x, std::span<const double> y);

/// Cov(X, Y) / (sqrt(DX) sqrt(DY)), clamped to [-1, 1]. Throws on a constant input.
[[nodiscard]] double correlation(std::span<const double> x, std::span<const double> y);

/// Pairwise covariance or correlation over the 30 feature columns. In the
/// correlation kind a constant column has unit diagonal and zero off-diagonal.
[[nodiscard]] CovarianceMatrix covariance_matrix(const FeatureMatrix &matrix, MatrixKind kind);

/// covariance_matrix restricted to each present label's rows.
[[nodiscard]] std::map<EmotionLabel, CovarianceMatrix> per_label_covariance(const FeatureMatrix &matrix,
                                                                            MatrixKind kind = MatrixKind::covariance);

struct SelectionResult {
    std::vector<std::size_t> selected_indices;  ///< 1-based catalog indices, ascending
    std::vector<double> scores;                 ///< per feature: mean |rho| to the selected set
    std::vector<std::size_t> drop_order;        ///< 1-based indices in the order they were removed
    std::size_t k{0};
    CovarianceMatrix correlation;
    std::map<EmotionLabel, CovarianceMatrix> per_label_matrices;
    std::vector<std::string> warnings;
    bool explicit_list{false};
};

/// Greedy backward elimination on |rho|: while more than k features remain,
/// take the most correlated remaining pair and drop the member with the larger
/// mean |rho| to the other remaining features (the larger index on a tie).
/// Constant columns are dropped first with a warning.
[[nodiscard]] SelectionResult select_features(const FeatureMatrix &matrix, std::size_t k);

/// Selection forced to the given 1-based indices; scores and matrices are still computed.
[[nodiscard]] SelectionResult select_explicit(const FeatureMatrix &matrix, std::vector<std::size_t> indices);

/// JSON report: selected indices, scores, drop order, row-major correlation
/// matrix, per-label covariance matrices, catalog version.
void save_selection_report(const SelectionResult &result, const std::filesystem::path &path);
[[nodiscard]] SelectionResult load_selection_report(const std::filesystem::path &path);

}  // namespace gsr
