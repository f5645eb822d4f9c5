#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace gsr {

// Portable draws on top of mt19937_64: the std distributions are
// implementation-defined, and generated data must not depend on the toolchain.

[[nodiscard]] inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept {
    // splitmix64 finaliser over the combined words
    std::uint64_t z = a * 0x9E3779B97F4A7C15ULL + b + 0x632BE59BD9B4E019ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Uniform in [0, 1) with 53 random bits.
[[nodiscard]] inline double uniform01(std::mt19937_64 &rng) noexcept {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

[[nodiscard]] inline double uniform(std::mt19937_64 &rng, double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform01(rng);
}

/// Unbiased integer in [0, n) by rejection; n must be > 0.
[[nodiscard]] inline std::uint64_t uniform_index(std::mt19937_64 &rng, std::uint64_t n) noexcept {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t draw = rng();
    while (draw >= limit) {
        draw = rng();
    }
    return draw % n;
}

/// Standard normal via Box-Muller (one value per call).
[[nodiscard]] inline double standard_normal(std::mt19937_64 &rng) noexcept {
    const double u1 = 1.0 - uniform01(rng);  // (0, 1]
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

template <typename Container>
void shuffle(Container &items, std::mt19937_64 &rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace gsr
