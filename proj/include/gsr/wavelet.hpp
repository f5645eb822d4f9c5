#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace gsr {

inline constexpr std::size_t kDb5Length = 10;

/// Orthogonal two-channel filter bank. Highpass filters follow the
/// quadrature-mirror rule highpass[n] = (-1)^n lowpass[L-1-n]; reconstruction
/// filters are the time-reversed decomposition filters.
struct WaveletFilterBank {
    std::array<double, kDb5Length> lowpass_decomp{};
    std::array<double, kDb5Length> highpass_decomp{};
    std::array<double, kDb5Length> lowpass_recon{};
    std::array<double, kDb5Length> highpass_recon{};

    /// Daubechies wavelet with five vanishing moments.
    [[nodiscard]] static const WaveletFilterBank &db5();
    /// Builds the remaining three filters from a lowpass decomposition filter.
    [[nodiscard]] static WaveletFilterBank from_lowpass(const std::array<double, kDb5Length> &lowpass);
};

/// symmetric: half-sample mirror extension, redundant (ceil length recurrence).
/// periodization: circular wrap, n/2 coefficients per level, orthogonal.
enum class PaddingMode { symmetric, periodization };

struct WaveletDecomposition {
    std::vector<double> approximation;          ///< coarsest approximation
    std::vector<std::vector<double>> details;   ///< details[0] is level 1 (finest)
    std::size_t original_length{0};
    PaddingMode padding_mode{PaddingMode::symmetric};

    [[nodiscard]] std::size_t levels() const noexcept { return details.size(); }
};

/// ceil((input_length + filter_length - 1) / 2) for symmetric, input_length / 2 for periodization.
[[nodiscard]] constexpr std::size_t dwt_coefficient_length(std::size_t input_length,
                                                           std::size_t filter_length = kDb5Length,
                                                           PaddingMode mode = PaddingMode::symmetric) noexcept {
    return mode == PaddingMode::periodization ? input_length / 2 : (input_length + filter_length) / 2;
}

/// Convolve-and-downsample cascade with half-sample symmetric extension.
/// Requires levels >= 1 and signal.size() >= 2^levels.
[[nodiscard]] WaveletDecomposition dwt_decompose(std::span<const double> signal, int levels,
                                                 const WaveletFilterBank &bank = WaveletFilterBank::db5());

/// Same cascade with an explicit boundary mode. Periodization additionally
/// requires signal.size() to be a multiple of 2^levels.
[[nodiscard]] WaveletDecomposition dwt_decompose(std::span<const double> signal, int levels, PaddingMode mode,
                                                 const WaveletFilterBank &bank = WaveletFilterBank::db5());

/// Inverse of dwt_decompose; throws when coefficient lengths do not follow the
/// length recurrence from original_length.
[[nodiscard]] std::vector<double> dwt_reconstruct(const WaveletDecomposition &decomp,
                                                  const WaveletFilterBank &bank = WaveletFilterBank::db5());

}  // namespace gsr
