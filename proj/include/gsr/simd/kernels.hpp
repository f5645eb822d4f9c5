#pragma once

// Data-parallel inner loops shared by the wavelet, covariance and kernel code.
// Every kernel has a scalar reference implementation and an AVX2 variant; the
// variant is picked once at runtime from CPUID and can be pinned for testing.

#include <optional>
#include <span>
#include <string_view>

namespace gsr::simd {

enum class Level { scalar, avx2 };

[[nodiscard]] std::string_view to_string(Level level) noexcept;

/// Best level the running CPU supports (and the binary was built with).
[[nodiscard]] Level detected_level() noexcept;

/// Level currently used by the dispatching entry points below. Defaults to
/// detected_level(); the environment variable GSR_SIMD=scalar pins scalar.
[[nodiscard]] Level active_level() noexcept;

/// Pins the active level (nullopt restores detection). Requests above the
/// detected level are clamped. Not thread-safe; call before parallel work.
void force_level(std::optional<Level> level) noexcept;

/// Sum of a[i] * b[i]. Sizes must match.
[[nodiscard]] double dot(std::span<const double> a, std::span<const double> b);

/// Sum of (a[i] - b[i])^2. Sizes must match.
[[nodiscard]] double squared_distance(std::span<const double> a, std::span<const double> b);

/// out[m] += sum_s taps[s] * src[m + s] for m in [0, out.size()).
/// Requires src.size() >= out.size() + taps.size() - 1.
void correlate_accumulate(std::span<const double> src, std::span<const double> taps, std::span<double> out);

namespace scalar {
double dot(std::span<const double> a, std::span<const double> b) noexcept;
double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;
void correlate_accumulate(std::span<const double> src, std::span<const double> taps, std::span<double> out) noexcept;
}  // namespace scalar

namespace avx2 {
/// True when this translation unit was compiled with AVX2/FMA code paths.
bool compiled() noexcept;
double dot(std::span<const double> a, std::span<const double> b) noexcept;
double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;
void correlate_accumulate(std::span<const double> src, std::span<const double> taps, std::span<double> out) noexcept;
}  // namespace avx2

}  // namespace gsr::simd
