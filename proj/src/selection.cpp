#include "gsr/selection.hpp"

#include "gsr/error.hpp"
#include "gsr/simd/kernels.hpp"
#include "gsr/stats.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace gsr {

namespace fs = std::filesystem;

namespace {

constexpr const char *kModule = "selection";
// |rho| values closer than this are treated as equal when ranking.
constexpr double kTieTolerance = 1e-12;

void check_pair(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw ValidationError(kModule, "covariance inputs differ in length");
    }
    if (x.size() < 2) {
        throw ValidationError(kModule, "covariance needs at least 2 observations");
    }
}

std::vector<double> centered(std::span<const double> v) {
    const double m = stats::mean(v);
    std::vector<double> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [m](double x) { return x - m; });
    return out;
}

bool is_constant(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

double mean_abs_to(const CovarianceMatrix &corr, std::size_t j, const std::vector<std::size_t> &others) {
    double acc = 0.0;
    std::size_t count = 0;
    for (const std::size_t o : others) {
        if (o != j) {
            acc += std::abs(corr.at(j, o));
            ++count;
        }
    }
    return count == 0 ? 0.0 : acc / static_cast<double>(count);
}

SelectionResult finish(const FeatureMatrix &matrix, SelectionResult result, const std::vector<std::size_t> &kept) {
    result.scores.assign(kNumFeatures, 0.0);
    for (std::size_t j = 0; j < kNumFeatures; ++j) {
        result.scores[j] = mean_abs_to(result.correlation, j, kept);
    }
    result.selected_indices.clear();
    for (const std::size_t j : kept) {
        result.selected_indices.push_back(j + 1);
    }
    std::sort(result.selected_indices.begin(), result.selected_indices.end());
    result.k = result.selected_indices.size();
    std::array<std::size_t, kNumLabels> counts{};
    for (const auto &row : matrix.rows) {
        ++counts[label_index(row.label)];
    }
    if (std::all_of(counts.begin(), counts.end(), [](std::size_t c) { return c == 0 || c >= 2; })) {
        result.per_label_matrices = per_label_covariance(matrix);
    } else {
        result.warnings.emplace_back("per-label covariance skipped: a label has fewer than 2 rows");
    }
    return result;
}

nlohmann::json matrix_to_json(const CovarianceMatrix &m) {
    return {{"dim", m.dim},
            {"kind", m.kind == MatrixKind::covariance ? "covariance" : "correlation"},
            {"values", m.values}};
}

CovarianceMatrix matrix_from_json(const nlohmann::json &j) {
    CovarianceMatrix m;
    m.dim = j.at("dim").get<std::size_t>();
    m.kind = j.at("kind").get<std::string>() == "covariance" ? MatrixKind::covariance : MatrixKind::correlation;
    m.values = j.at("values").get<std::vector<double>>();
    if (m.values.size() != m.dim * m.dim) {
        throw ValidationError(kModule, "matrix value count does not match its dimension");
    }
    return m;
}

}  // namespace

double covariance(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y);
    const auto cx = centered(x);
    const auto cy = centered(y);
    return simd::dot(cx, cy) / static_cast<double>(x.size());
}

double correlation(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y);
    const auto cx = centered(x);
    const auto cy = centered(y);
    const double sxx = simd::dot(cx, cx);
    const double syy = simd::dot(cy, cy);
    if (!(sxx > 0.0) || !(syy > 0.0) || is_constant(x) || is_constant(y)) {
        throw ValidationError(kModule, "correlation undefined for a constant input");
    }
    return std::clamp(simd::dot(cx, cy) / (std::sqrt(sxx) * std::sqrt(syy)), -1.0, 1.0);
}

CovarianceMatrix covariance_matrix(const FeatureMatrix &matrix, MatrixKind kind) {
    if (matrix.size() < 2) {
        throw ValidationError(kModule, "covariance matrix needs at least 2 rows");
    }
    const auto n = static_cast<double>(matrix.size());
    std::vector<std::vector<double>> cols(kNumFeatures);
    std::vector<double> self(kNumFeatures);
    std::vector<bool> constant(kNumFeatures);
    for (std::size_t j = 0; j < kNumFeatures; ++j) {
        const auto raw = matrix.column(j);
        constant[j] = is_constant(raw);
        cols[j] = centered(raw);
        self[j] = simd::dot(cols[j], cols[j]);
    }
    CovarianceMatrix out{kNumFeatures, std::vector<double>(kNumFeatures * kNumFeatures, 0.0), kind};
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
        for (std::size_t j = i; j < kNumFeatures; ++j) {
            double v = 0.0;
            if (kind == MatrixKind::covariance) {
                v = (i == j ? self[i] : simd::dot(cols[i], cols[j])) / n;
            } else if (i == j) {
                v = 1.0;
            } else if (!constant[i] && !constant[j]) {
                v = std::clamp(simd::dot(cols[i], cols[j]) / (std::sqrt(self[i]) * std::sqrt(self[j])), -1.0, 1.0);
            }
            out.values[i * kNumFeatures + j] = v;
            out.values[j * kNumFeatures + i] = v;
        }
    }
    return out;
}

std::map<EmotionLabel, CovarianceMatrix> per_label_covariance(const FeatureMatrix &matrix, MatrixKind kind) {
    std::map<EmotionLabel, CovarianceMatrix> out;
    for (const EmotionLabel label : kAllLabels) {
        FeatureMatrix part;
        for (const auto &row : matrix.rows) {
            if (row.label == label) {
                part.rows.push_back(row);
            }
        }
        if (part.empty()) {
            continue;
        }
        if (part.size() < 2) {
            throw ValidationError(kModule, "label '" + std::string(to_string(label)) + "' has fewer than 2 rows");
        }
        out.emplace(label, covariance_matrix(part, kind));
    }
    return out;
}

SelectionResult select_features(const FeatureMatrix &matrix, std::size_t k) {
    if (k < 2 || k > kNumFeatures) {
        throw ValidationError(kModule, "k must lie in [2, " + std::to_string(kNumFeatures) + "], got " +
                                           std::to_string(k));
    }
    if (matrix.size() < 2) {
        throw ValidationError(kModule, "selection needs at least 2 rows");
    }

    // Canonical row order makes the floating-point sums independent of input order.
    std::vector<std::size_t> order(matrix.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto &va = matrix.rows[a].values;
        const auto &vb = matrix.rows[b].values;
        if (va != vb) {
            return std::lexicographical_compare(va.begin(), va.end(), vb.begin(), vb.end());
        }
        return label_index(matrix.rows[a].label) < label_index(matrix.rows[b].label);
    });
    const FeatureMatrix canonical = select_rows(matrix, order);

    SelectionResult result;
    result.correlation = covariance_matrix(canonical, MatrixKind::correlation);

    std::vector<std::size_t> remaining;
    for (std::size_t j = 0; j < kNumFeatures; ++j) {
        if (is_constant(canonical.column(j))) {
            result.drop_order.push_back(j + 1);
            result.warnings.push_back("feature " + std::to_string(j + 1) + " (" +
                                      std::string(feature_catalog()[j].name) + ") is constant and was dropped");
        } else {
            remaining.push_back(j);
        }
    }
    if (remaining.size() < k) {
        throw ValidationError(kModule, "only " + std::to_string(remaining.size()) +
                                           " non-constant features available, cannot select " + std::to_string(k));
    }

    const CovarianceMatrix &corr = result.correlation;
    while (remaining.size() > k) {
        std::size_t best_a = 0;
        std::size_t best_b = 1;
        double best = -1.0;
        for (std::size_t a = 0; a < remaining.size(); ++a) {
            for (std::size_t b = a + 1; b < remaining.size(); ++b) {
                const double v = std::abs(corr.at(remaining[a], remaining[b]));
                if (v > best + kTieTolerance) {
                    best = v;
                    best_a = a;
                    best_b = b;
                }
            }
        }
        const double score_a = mean_abs_to(corr, remaining[best_a], remaining);
        const double score_b = mean_abs_to(corr, remaining[best_b], remaining);
        // remaining is ascending, so best_b holds the larger catalog index
        const std::size_t drop = (score_a > score_b + kTieTolerance) ? best_a : best_b;
        result.drop_order.push_back(remaining[drop] + 1);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(drop));
    }
    return finish(matrix, std::move(result), remaining);
}

SelectionResult select_explicit(const FeatureMatrix &matrix, std::vector<std::size_t> indices) {
    if (indices.empty()) {
        throw ValidationError(kModule, "explicit feature list is empty");
    }
    std::set<std::size_t> unique;
    for (const std::size_t idx : indices) {
        if (idx < 1 || idx > kNumFeatures) {
            throw ValidationError(kModule, "feature index " + std::to_string(idx) + " outside 1.." +
                                               std::to_string(kNumFeatures));
        }
        if (!unique.insert(idx).second) {
            throw ValidationError(kModule, "feature index " + std::to_string(idx) + " listed twice");
        }
    }
    if (matrix.size() < 2) {
        throw ValidationError(kModule, "selection needs at least 2 rows");
    }
    SelectionResult result;
    result.explicit_list = true;
    result.correlation = covariance_matrix(matrix, MatrixKind::correlation);
    std::vector<std::size_t> kept;
    for (const std::size_t idx : unique) {
        kept.push_back(idx - 1);
    }
    for (std::size_t j = 1; j <= kNumFeatures; ++j) {
        if (!unique.contains(j)) {
            result.drop_order.push_back(j);
        }
    }
    return finish(matrix, std::move(result), kept);
}

void save_selection_report(const SelectionResult &result, const fs::path &path) {
    nlohmann::json j;
    j["catalog_version"] = kCatalogVersion;
    j["k"] = result.k;
    j["selected_indices"] = result.selected_indices;
    j["scores"] = result.scores;
    j["drop_order"] = result.drop_order;
    j["explicit_list"] = result.explicit_list;
    j["correlation_matrix"] = matrix_to_json(result.correlation);
    nlohmann::json per_label = nlohmann::json::object();
    for (const auto &[label, m] : result.per_label_matrices) {
        per_label[std::string(to_string(label))] = matrix_to_json(m);
    }
    j["per_label_covariance"] = per_label;
    j["warnings"] = result.warnings;
    std::vector<std::string> names;
    for (const std::size_t idx : result.selected_indices) {
        names.emplace_back(feature_catalog()[idx - 1].name);
    }
    j["selected_names"] = names;
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError(kModule, "cannot write '" + path.string() + "'");
    }
    out << j.dump(2) << '\n';
}

SelectionResult load_selection_report(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(kModule, "cannot open '" + path.string() + "'");
    }
    try {
        const nlohmann::json j = nlohmann::json::parse(in);
        if (j.at("catalog_version").get<int>() != kCatalogVersion) {
            throw ValidationError(kModule, "selection report uses an unsupported catalog version");
        }
        SelectionResult r;
        r.k = j.at("k").get<std::size_t>();
        r.selected_indices = j.at("selected_indices").get<std::vector<std::size_t>>();
        r.scores = j.at("scores").get<std::vector<double>>();
        r.drop_order = j.at("drop_order").get<std::vector<std::size_t>>();
        r.explicit_list = j.value("explicit_list", false);
        r.correlation = matrix_from_json(j.at("correlation_matrix"));
        for (const auto &[name, m] : j.at("per_label_covariance").items()) {
            r.per_label_matrices.emplace(parse_label(name), matrix_from_json(m));
        }
        r.warnings = j.value("warnings", std::vector<std::string>{});
        for (const std::size_t idx : r.selected_indices) {
            if (idx < 1 || idx > kNumFeatures) {
                throw ValidationError(kModule, "selection report holds an invalid feature index");
            }
        }
        return r;
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(kModule, std::string("malformed selection report: ") + e.what());
    }
}

}  // namespace gsr
