#pragma once

#include "gsr/features.hpp"
#include "gsr/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace gsr_test {

/// Empty scratch directory under the system temp dir, recreated on every call.
inline std::filesystem::path fresh_dir(const std::string &name) {
    const auto dir = std::filesystem::temp_directory_path() / "gsr_unit" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::vector<double> random_signal(std::size_t n, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::vector<double> x(n);
    for (auto &v : x) {
        v = scale * gsr::standard_normal(rng);
    }
    return x;
}

/// Rows of independent normal features, labels assigned round-robin.
inline gsr::FeatureMatrix random_matrix(std::size_t rows, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    gsr::FeatureMatrix m;
    for (std::size_t i = 0; i < rows; ++i) {
        gsr::FeatureVector fv;
        for (auto &v : fv.values) {
            v = gsr::standard_normal(rng);
        }
        fv.record_id = "r" + std::to_string(i);
        fv.label = gsr::kAllLabels[i % gsr::kNumLabels];
        m.rows.push_back(fv);
    }
    return m;
}

inline double max_abs(const std::vector<double> &v) {
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

}  // namespace gsr_test
