#include "gsr/error.hpp"
#include "gsr/simd/kernels.hpp"

#include <cstdlib>
#include <string>

namespace gsr::simd {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Level initial_level() noexcept {
    const Level best = detected_level();
    if (const char *env = std::getenv("GSR_SIMD"); env != nullptr && std::string(env) == "scalar") {
        return Level::scalar;
    }
    return best;
}

Level &current() noexcept {
    static Level level = initial_level();
    return level;
}

void check_sizes(std::size_t a, std::size_t b, const char *what) {
    if (a != b) {
        throw ValidationError("simd", std::string(what) + ": size mismatch " + std::to_string(a) + " vs " +
                                          std::to_string(b));
    }
}

}  // namespace

std::string_view to_string(Level level) noexcept { return level == Level::avx2 ? "avx2" : "scalar"; }

Level detected_level() noexcept {
    static const Level level = (avx2::compiled() && cpu_has_avx2()) ? Level::avx2 : Level::scalar;
    return level;
}

Level active_level() noexcept { return current(); }

void force_level(std::optional<Level> level) noexcept {
    if (!level) {
        current() = initial_level();
        return;
    }
    current() = (*level == Level::avx2 && detected_level() != Level::avx2) ? Level::scalar : *level;
}

double dot(std::span<const double> a, std::span<const double> b) {
    check_sizes(a.size(), b.size(), "dot");
    return current() == Level::avx2 ? avx2::dot(a, b) : scalar::dot(a, b);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    check_sizes(a.size(), b.size(), "squared_distance");
    return current() == Level::avx2 ? avx2::squared_distance(a, b) : scalar::squared_distance(a, b);
}

void correlate_accumulate(std::span<const double> src, std::span<const double> taps, std::span<double> out) {
    if (out.empty()) {
        return;
    }
    if (taps.empty() || src.size() < out.size() + taps.size() - 1) {
        throw ValidationError("simd", "correlate_accumulate: source too short for requested outputs");
    }
    if (current() == Level::avx2) {
        avx2::correlate_accumulate(src, taps, out);
    } else {
        scalar::correlate_accumulate(src, taps, out);
    }
}

}  // namespace gsr::simd
