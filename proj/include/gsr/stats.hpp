#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace gsr::stats {

// Descriptive statistics with the conventions used throughout the pipeline:
// population moments (divide by N) and the lower-middle median.

[[nodiscard]] inline double mean(std::span<const double> v) {
    double acc = 0.0;
    for (const double x : v) {
        acc += x;
    }
    return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

/// Element at position (n - 1) / 2 of the sorted sequence; always a member of the data.
[[nodiscard]] inline double lower_median(std::span<const double> v) {
    if (v.empty()) {
        return 0.0;
    }
    std::vector<double> copy(v.begin(), v.end());
    const auto mid = copy.begin() + static_cast<std::ptrdiff_t>((copy.size() - 1) / 2);
    std::nth_element(copy.begin(), mid, copy.end());
    return *mid;
}

[[nodiscard]] inline double population_std(std::span<const double> v) {
    if (v.empty()) {
        return 0.0;
    }
    const double m = mean(v);
    double acc = 0.0;
    for (const double x : v) {
        acc += (x - m) * (x - m);
    }
    return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace gsr::stats
