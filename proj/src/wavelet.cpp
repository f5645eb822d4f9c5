#include "gsr/wavelet.hpp"

#include "gsr/error.hpp"
#include "gsr/simd/kernels.hpp"

#include <string>

namespace gsr {

namespace {

constexpr const char *kModule = "preprocess";
constexpr std::size_t kTaps = kDb5Length;
constexpr std::size_t kHalf = kTaps / 2;

// Spectral factorisation of the Daubechies N=5 polynomial, minimum-phase roots.
constexpr std::array<double, kDb5Length> kDb5Lowpass{
    0.003335725285473771277998183,  -0.01258075199908199946850974, -0.006241490212798274274190519,
    0.07757149384004571352313049,  -0.03224486958463837464847976, -0.2422948870663820318625714,
    0.1384281459013207315053971,   0.7243085284377729277280712,   0.6038292697971896705401193,
    0.1601023979741929144807237,
};

// Half-sample symmetric extension, periodic with period 2n.
double extended_at(std::span<const double> x, std::ptrdiff_t m) {
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    std::ptrdiff_t r = m % (2 * n);
    if (r < 0) {
        r += 2 * n;
    }
    return r < n ? x[static_cast<std::size_t>(r)] : x[static_cast<std::size_t>(2 * n - 1 - r)];
}

double periodic_at(std::span<const double> x, std::ptrdiff_t m) {
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    std::ptrdiff_t r = m % n;
    if (r < 0) {
        r += n;
    }
    return x[static_cast<std::size_t>(r)];
}

double boundary_at(std::span<const double> x, std::ptrdiff_t m, PaddingMode mode) {
    return mode == PaddingMode::periodization ? periodic_at(x, m) : extended_at(x, m);
}

struct Polyphase {
    std::array<double, kHalf> even{};
    std::array<double, kHalf> odd{};
};

Polyphase polyphase(const std::array<double, kTaps> &taps) {
    Polyphase p;
    for (std::size_t r = 0; r < kHalf; ++r) {
        p.even[r] = taps[2 * r];
        p.odd[r] = taps[2 * r + 1];
    }
    return p;
}

// One analysis level: out[i] = sum_j h[j] x_ext(2i + 1 - j) for both channels,
// evaluated as sum_q recon[q] e[2i + q] over the padded buffer e and split into
// even/odd phases so each phase is a contiguous correlation.
void analysis_step(std::span<const double> x, const WaveletFilterBank &bank, PaddingMode mode,
                   std::vector<double> &approx, std::vector<double> &detail) {
    const std::size_t m = dwt_coefficient_length(x.size(), kTaps, mode);
    const std::size_t phase_len = m + kHalf - 1;
    std::vector<double> even(phase_len);
    std::vector<double> odd(phase_len);
    const auto offset = static_cast<std::ptrdiff_t>(kTaps) - 2;
    for (std::size_t k = 0; k < phase_len; ++k) {
        even[k] = boundary_at(x, static_cast<std::ptrdiff_t>(2 * k) - offset, mode);
        odd[k] = boundary_at(x, static_cast<std::ptrdiff_t>(2 * k + 1) - offset, mode);
    }
    const Polyphase lo = polyphase(bank.lowpass_recon);
    const Polyphase hi = polyphase(bank.highpass_recon);
    approx.assign(m, 0.0);
    detail.assign(m, 0.0);
    simd::correlate_accumulate(even, lo.even, approx);
    simd::correlate_accumulate(odd, lo.odd, approx);
    simd::correlate_accumulate(even, hi.even, detail);
    simd::correlate_accumulate(odd, hi.odd, detail);
}

// Adjoint of analysis_step restricted to [0, out_len):
// x(2m)   = sum_s a[m+s] h[2s+1] + d[m+s] g[2s+1]
// x(2m+1) = sum_s a[m+s] h[2s]   + d[m+s] g[2s]
std::vector<double> synthesis_step(std::span<const double> approx, std::span<const double> detail,
                                   std::size_t out_len, const WaveletFilterBank &bank) {
    const Polyphase lo = polyphase(bank.lowpass_decomp);
    const Polyphase hi = polyphase(bank.highpass_decomp);
    const std::size_t n_even = (out_len + 1) / 2;
    const std::size_t n_odd = out_len / 2;
    std::vector<double> even(n_even, 0.0);
    std::vector<double> odd(n_odd, 0.0);
    simd::correlate_accumulate(approx, lo.odd, even);
    simd::correlate_accumulate(detail, hi.odd, even);
    simd::correlate_accumulate(approx, lo.even, odd);
    simd::correlate_accumulate(detail, hi.even, odd);
    std::vector<double> out(out_len);
    for (std::size_t k = 0; k < n_even; ++k) {
        out[2 * k] = even[k];
    }
    for (std::size_t k = 0; k < n_odd; ++k) {
        out[2 * k + 1] = odd[k];
    }
    return out;
}

// Periodized analysis is orthogonal, so its inverse is the transpose:
// x[(2i + 1 - j) mod n] += h[j] a[i] + g[j] d[i].
std::vector<double> periodic_synthesis_step(std::span<const double> approx, std::span<const double> detail,
                                            std::size_t out_len, const WaveletFilterBank &bank) {
    std::vector<double> out(out_len, 0.0);
    const auto n = static_cast<std::ptrdiff_t>(out_len);
    for (std::size_t i = 0; i < approx.size(); ++i) {
        for (std::size_t j = 0; j < kTaps; ++j) {
            std::ptrdiff_t p = (static_cast<std::ptrdiff_t>(2 * i + 1) - static_cast<std::ptrdiff_t>(j)) % n;
            if (p < 0) {
                p += n;
            }
            out[static_cast<std::size_t>(p)] += bank.lowpass_decomp[j] * approx[i] + bank.highpass_decomp[j] * detail[i];
        }
    }
    return out;
}

}  // namespace

WaveletFilterBank WaveletFilterBank::from_lowpass(const std::array<double, kDb5Length> &lowpass) {
    WaveletFilterBank bank;
    bank.lowpass_decomp = lowpass;
    for (std::size_t n = 0; n < kTaps; ++n) {
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        bank.highpass_decomp[n] = sign * lowpass[kTaps - 1 - n];
    }
    for (std::size_t n = 0; n < kTaps; ++n) {
        bank.lowpass_recon[n] = bank.lowpass_decomp[kTaps - 1 - n];
        bank.highpass_recon[n] = bank.highpass_decomp[kTaps - 1 - n];
    }
    return bank;
}

const WaveletFilterBank &WaveletFilterBank::db5() {
    static const WaveletFilterBank bank = from_lowpass(kDb5Lowpass);
    return bank;
}

WaveletDecomposition dwt_decompose(std::span<const double> signal, int levels, const WaveletFilterBank &bank) {
    return dwt_decompose(signal, levels, PaddingMode::symmetric, bank);
}

WaveletDecomposition dwt_decompose(std::span<const double> signal, int levels, PaddingMode mode,
                                   const WaveletFilterBank &bank) {
    if (levels < 1) {
        throw ValidationError(kModule, "wavelet levels must be >= 1, got " + std::to_string(levels));
    }
    if (levels >= 63 || signal.size() < (std::size_t{1} << levels)) {
        throw ValidationError(kModule, "signal of length " + std::to_string(signal.size()) + " is too short for " +
                                           std::to_string(levels) + " wavelet levels");
    }
    if (mode == PaddingMode::periodization && signal.size() % (std::size_t{1} << levels) != 0) {
        throw ValidationError(kModule, "periodization needs a length divisible by 2^levels, got " +
                                           std::to_string(signal.size()));
    }
    WaveletDecomposition out;
    out.original_length = signal.size();
    out.padding_mode = mode;
    out.details.resize(static_cast<std::size_t>(levels));
    std::vector<double> current(signal.begin(), signal.end());
    for (int level = 0; level < levels; ++level) {
        std::vector<double> approx;
        analysis_step(current, bank, mode, approx, out.details[static_cast<std::size_t>(level)]);
        current = std::move(approx);
    }
    out.approximation = std::move(current);
    return out;
}

std::vector<double> dwt_reconstruct(const WaveletDecomposition &decomp, const WaveletFilterBank &bank) {
    const std::size_t levels = decomp.details.size();
    if (levels == 0) {
        throw ValidationError(kModule, "decomposition has no detail levels");
    }
    if (decomp.original_length == 0) {
        throw ValidationError(kModule, "decomposition has zero original length");
    }
    const bool periodic = decomp.padding_mode == PaddingMode::periodization;
    if (periodic && (levels >= 63 || decomp.original_length % (std::size_t{1} << levels) != 0)) {
        throw ValidationError(kModule, "periodized decomposition length is not divisible by 2^levels");
    }
    std::vector<std::size_t> input_lengths(levels);
    std::size_t len = decomp.original_length;
    for (std::size_t j = 0; j < levels; ++j) {
        input_lengths[j] = len;
        len = dwt_coefficient_length(len, kTaps, decomp.padding_mode);
        if (decomp.details[j].size() != len) {
            throw ValidationError(kModule, "detail level " + std::to_string(j + 1) + " has " +
                                               std::to_string(decomp.details[j].size()) + " coefficients, expected " +
                                               std::to_string(len));
        }
    }
    if (decomp.approximation.size() != len) {
        throw ValidationError(kModule, "approximation has " + std::to_string(decomp.approximation.size()) +
                                           " coefficients, expected " + std::to_string(len));
    }
    std::vector<double> current = decomp.approximation;
    for (std::size_t j = levels; j-- > 0;) {
        current = periodic ? periodic_synthesis_step(current, decomp.details[j], input_lengths[j], bank)
                           : synthesis_step(current, decomp.details[j], input_lengths[j], bank);
    }
    return current;
}

}  // namespace gsr
