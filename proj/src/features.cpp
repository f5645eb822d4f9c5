#include "gsr/features.hpp"

#include "gsr/error.hpp"
#include "gsr/stats.hpp"
#include "text.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <memory>
#include <sstream>

namespace gsr {

namespace fs = std::filesystem;

namespace {

constexpr const char *kModule = "features";

constexpr std::array<FeatureDescriptor, kNumFeatures> kCatalog{{
    {1, "x_mean", FeatureDomain::time},
    {2, "x_median", FeatureDomain::time},
    {3, "x_std", FeatureDomain::time},
    {4, "x_min", FeatureDomain::time},
    {5, "x_max", FeatureDomain::time},
    {6, "x_range", FeatureDomain::time},
    {7, "x_mean_abs", FeatureDomain::time},
    {8, "x_rms", FeatureDomain::time},
    {9, "d1_mean", FeatureDomain::time},
    {10, "d1_median", FeatureDomain::time},
    {11, "d1_std", FeatureDomain::time},
    {12, "d1_min", FeatureDomain::time},
    {13, "d1_max", FeatureDomain::time},
    {14, "d1_range", FeatureDomain::time},
    {15, "d1_mean_abs", FeatureDomain::time},
    {16, "d1_rms", FeatureDomain::time},
    {17, "d2_mean", FeatureDomain::time},
    {18, "d2_median", FeatureDomain::time},
    {19, "d2_std", FeatureDomain::time},
    {20, "d2_min", FeatureDomain::time},
    {21, "d2_max", FeatureDomain::time},
    {22, "d2_range", FeatureDomain::time},
    {23, "d2_mean_abs", FeatureDomain::time},
    {24, "d2_rms", FeatureDomain::time},
    {25, "spectral_power", FeatureDomain::frequency},
    {26, "band_power_0.08_0.2hz", FeatureDomain::frequency},
    {27, "band_power_ratio", FeatureDomain::frequency},
    {28, "spectral_centroid_hz", FeatureDomain::frequency},
    {29, "spectral_spread_hz", FeatureDomain::frequency},
    {30, "peak_frequency_hz", FeatureDomain::frequency},
}};

// Writes the eight block statistics starting at out[0].
void block_statistics(std::span<const double> v, std::span<double, 8> out) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    for (const double x : v) {
        abs_sum += std::abs(x);
        sq_sum += x * x;
    }
    const auto n = static_cast<double>(v.size());
    out[0] = stats::mean(v);
    out[1] = stats::lower_median(v);
    out[2] = stats::population_std(v);
    out[3] = *lo;
    out[4] = *hi;
    out[5] = *hi - *lo;
    out[6] = abs_sum / n;
    out[7] = std::sqrt(sq_sum / n);
}

struct FftwFree {
    void operator()(void *p) const noexcept { fftw_free(p); }
};

struct PlanDestroy {
    void operator()(fftw_plan_s *p) const noexcept { fftw_destroy_plan(p); }
};

/// |X_k|^2 / N for k = 1 .. floor(N/2) of the mean-removed signal.
std::vector<double> positive_power_spectrum(std::span<const double> signal) {
    const std::size_t n = signal.size();
    const double m = stats::mean(signal);
    std::unique_ptr<double, FftwFree> in(static_cast<double *>(fftw_malloc(sizeof(double) * n)));
    std::unique_ptr<fftw_complex, FftwFree> out(
        static_cast<fftw_complex *>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1))));
    if (!in || !out) {
        throw std::bad_alloc();
    }
    std::unique_ptr<fftw_plan_s, PlanDestroy> plan(
        fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE));
    for (std::size_t i = 0; i < n; ++i) {
        in.get()[i] = signal[i] - m;
    }
    fftw_execute(plan.get());
    std::vector<double> power(n / 2);
    for (std::size_t k = 1; k <= n / 2; ++k) {
        const double re = out.get()[k][0];
        const double im = out.get()[k][1];
        power[k - 1] = (re * re + im * im) / static_cast<double>(n);
    }
    return power;
}

void spectral_features(std::span<const double> signal, double fs, std::span<double, 6> out) {
    const std::size_t n = signal.size();
    const std::vector<double> power = positive_power_spectrum(signal);
    const auto freq = [&](std::size_t bin) { return static_cast<double>(bin + 1) * fs / static_cast<double>(n); };
    double total = 0.0;
    double band = 0.0;
    double weighted = 0.0;
    std::size_t peak = 0;
    for (std::size_t b = 0; b < power.size(); ++b) {
        const double f = freq(b);
        total += power[b];
        weighted += f * power[b];
        if (f >= kBandLowHz && f <= kBandHighHz) {
            band += power[b];
        }
        if (power[b] > power[peak]) {
            peak = b;
        }
    }
    out[0] = total;
    out[1] = band;
    if (total > 0.0) {
        const double centroid = weighted / total;
        double spread = 0.0;
        for (std::size_t b = 0; b < power.size(); ++b) {
            const double d = freq(b) - centroid;
            spread += d * d * power[b];
        }
        out[2] = band / total;
        out[3] = centroid;
        out[4] = std::sqrt(spread / total);
        out[5] = freq(peak);
    } else {
        out[2] = out[3] = out[4] = out[5] = 0.0;
    }
}

std::ofstream open_for_write(const fs::path &path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError(kModule, "cannot write '" + path.string() + "'");
    }
    return out;
}

}  // namespace

std::span<const FeatureDescriptor, kNumFeatures> feature_catalog() noexcept { return kCatalog; }

std::vector<double> FeatureMatrix::column(std::size_t j) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto &r : rows) {
        out.push_back(r.values.at(j));
    }
    return out;
}

std::vector<EmotionLabel> FeatureMatrix::labels() const {
    std::vector<EmotionLabel> out;
    out.reserve(rows.size());
    for (const auto &r : rows) {
        out.push_back(r.label);
    }
    return out;
}

std::vector<double> difference(std::span<const double> signal, int order) {
    if (order != 1 && order != 2) {
        throw ValidationError(kModule, "difference order must be 1 or 2");
    }
    if (signal.size() <= static_cast<std::size_t>(order)) {
        throw ValidationError(kModule, "signal too short for difference of order " + std::to_string(order));
    }
    std::vector<double> out(signal.size() - static_cast<std::size_t>(order));
    for (std::size_t n = 0; n < out.size(); ++n) {
        out[n] = order == 1 ? signal[n + 1] - signal[n] : signal[n + 2] - 2.0 * signal[n + 1] + signal[n];
    }
    return out;
}

FeatureVector extract_features(std::span<const double> signal, double sample_rate_hz) {
    if (signal.size() < kMinRecordLength) {
        throw ValidationError(kModule, "signal of length " + std::to_string(signal.size()) +
                                           " is shorter than the minimum " + std::to_string(kMinRecordLength));
    }
    if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
        throw ValidationError(kModule, "sample rate must be positive");
    }
    FeatureVector fv;
    std::span<double, kNumFeatures> v(fv.values);
    block_statistics(signal, v.subspan<0, 8>());
    block_statistics(difference(signal, 1), v.subspan<8, 8>());
    block_statistics(difference(signal, 2), v.subspan<16, 8>());
    spectral_features(signal, sample_rate_hz, v.subspan<24, 6>());
    for (std::size_t j = 0; j < kNumFeatures; ++j) {
        if (!std::isfinite(fv.values[j])) {
            throw ValidationError(kModule, "feature " + std::string(kCatalog[j].name) + " is not finite");
        }
    }
    return fv;
}

FeatureMatrix extract_dataset_features(const Dataset &dataset) {
    FeatureMatrix matrix;
    matrix.rows.reserve(dataset.size());
    for (const auto &record : dataset.records) {
        try {
            FeatureVector fv = extract_features(record.samples, record.sample_rate_hz);
            fv.record_id = record.record_id;
            fv.label = record.label;
            matrix.rows.push_back(std::move(fv));
        } catch (const ValidationError &e) {
            throw ValidationError(kModule, e.what(), record.record_id);
        }
    }
    return matrix;
}

std::vector<FeatureScaling> fit_feature_normalization(const FeatureMatrix &matrix) {
    if (matrix.size() < 2) {
        throw ValidationError(kModule, "feature normalization needs at least 2 rows");
    }
    std::vector<FeatureScaling> params(kNumFeatures);
    for (std::size_t j = 0; j < kNumFeatures; ++j) {
        double lo = matrix.rows.front().values[j];
        double hi = lo;
        for (const auto &row : matrix.rows) {
            lo = std::min(lo, row.values[j]);
            hi = std::max(hi, row.values[j]);
        }
        params[j] = FeatureScaling{lo, hi, !(hi > lo)};
    }
    return params;
}

FeatureMatrix apply_feature_normalization(const FeatureMatrix &matrix, std::span<const FeatureScaling> params) {
    if (params.size() != kNumFeatures) {
        throw ValidationError(kModule, "normalization has " + std::to_string(params.size()) + " columns, expected " +
                                           std::to_string(kNumFeatures));
    }
    FeatureMatrix out = matrix;
    for (auto &row : out.rows) {
        for (std::size_t j = 0; j < kNumFeatures; ++j) {
            row.values[j] = params[j].apply(row.values[j]);
        }
    }
    out.normalization.emplace(params.begin(), params.end());
    return out;
}

FeatureMatrix select_rows(const FeatureMatrix &matrix, std::span<const std::size_t> positions) {
    FeatureMatrix out;
    out.normalization = matrix.normalization;
    out.rows.reserve(positions.size());
    for (const std::size_t p : positions) {
        out.rows.push_back(matrix.rows.at(p));
    }
    return out;
}

void save_feature_matrix(const FeatureMatrix &matrix, const fs::path &path) {
    auto out = open_for_write(path);
    out << "# catalog_version: " << kCatalogVersion << '\n';
    out << "record_id,label";
    for (std::size_t j = 1; j <= kNumFeatures; ++j) {
        out << ",f" << (j < 10 ? "0" : "") << j;
    }
    out << '\n';
    for (const auto &row : matrix.rows) {
        out << row.record_id << ',' << to_string(row.label);
        for (const double v : row.values) {
            out << ',' << detail::format_double(v);
        }
        out << '\n';
    }
    if (!out) {
        throw IoError(kModule, "write failed for '" + path.string() + "'");
    }
}

FeatureMatrix load_feature_matrix(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(kModule, "cannot open '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    FeatureMatrix matrix;
    bool version_seen = false;
    bool header_seen = false;
    std::size_t line_no = 0;
    for (std::string_view raw : detail::split(text, '\n')) {
        ++line_no;
        const std::string_view line = detail::trim(raw);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            const std::string_view body = detail::trim(line.substr(1));
            if (body.starts_with("catalog_version:")) {
                const auto v = detail::parse_double(body.substr(std::string_view("catalog_version:").size()));
                if (!v || *v != kCatalogVersion) {
                    throw ValidationError(kModule, "unsupported feature catalog version in '" + path.string() + "'");
                }
                version_seen = true;
            }
            continue;
        }
        const auto fields = detail::split(line, ',');
        if (!header_seen) {
            if (fields.size() != kNumFeatures + 2 || fields[0] != "record_id" || fields[1] != "label") {
                throw ValidationError(kModule, "malformed feature header in '" + path.string() + "'");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != kNumFeatures + 2) {
            throw ValidationError(kModule, "malformed feature row at line " + std::to_string(line_no),
                                  std::string(fields[0]));
        }
        FeatureVector fv;
        fv.record_id = std::string(detail::trim(fields[0]));
        fv.label = parse_label(detail::trim(fields[1]));
        for (std::size_t j = 0; j < kNumFeatures; ++j) {
            const auto v = detail::parse_double(fields[j + 2]);
            if (!v || !std::isfinite(*v)) {
                throw ValidationError(kModule, "malformed feature value at line " + std::to_string(line_no),
                                      fv.record_id);
            }
            fv.values[j] = *v;
        }
        matrix.rows.push_back(std::move(fv));
    }
    if (!version_seen) {
        throw ValidationError(kModule, "feature file '" + path.string() + "' lacks a catalog_version line");
    }
    if (!header_seen) {
        throw ValidationError(kModule, "feature file '" + path.string() + "' lacks a header");
    }
    return matrix;
}

}  // namespace gsr
