#include "gsr/svm.hpp"

#include "gsr/error.hpp"
#include "gsr/random.hpp"
#include "gsr/simd/kernels.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

namespace gsr {

namespace fs = std::filesystem;

namespace {

constexpr const char *kModule = "svm";
constexpr double kTau = 1e-12;

// ---------------------------------------------------------------------------
// SMO solver

class SmoSolver {
  public:
    SmoSolver(std::span<const std::vector<double>> rows, std::span<const int> labels, const TrainConfig &config)
        : n_(rows.size()), y_(labels.begin(), labels.end()), c_(config.c), config_(config),
          rng_(mix_seed(config.seed, 0x5EED)) {
        q_.resize(n_ * n_);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i; j < n_; ++j) {
                const double v = y_[i] * y_[j] * kernel_eval(config.kernel, rows[i], rows[j]);
                q_[i * n_ + j] = v;
                q_[j * n_ + i] = v;
            }
        }
        alpha_.assign(n_, 0.0);
        grad_.assign(n_, -1.0);
    }

    void solve(TrainStats &stats) {
        stats.objective_trace.push_back(objective());
        std::size_t iter = 0;
        bool converged = false;
        double gap = 0.0;
        while (true) {
            const auto [i, j, g] = select_working_set();
            gap = g;
            if (g <= config_.tolerance) {
                converged = true;
                break;
            }
            if (iter >= config_.max_passes) {
                break;
            }
            update_pair(i, j);
            ++iter;
            stats.objective_trace.push_back(objective());
        }
        stats.alphas = alpha_;
        stats.iterations = iter;
        stats.converged = converged;
        stats.final_gap = gap;
    }

    /// b = mean of -y_i G_i over free vectors, else the midpoint of the feasible interval.
    [[nodiscard]] double bias() const {
        double sum = 0.0;
        std::size_t free = 0;
        double up = -std::numeric_limits<double>::infinity();
        double low = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n_; ++t) {
            const double v = -y_[t] * grad_[t];
            if (alpha_[t] > 0.0 && alpha_[t] < c_) {
                sum += v;
                ++free;
            }
            if (in_up(t)) {
                up = std::max(up, v);
            }
            if (in_low(t)) {
                low = std::min(low, v);
            }
        }
        if (free > 0) {
            return sum / static_cast<double>(free);
        }
        return 0.5 * (up + low);
    }

    [[nodiscard]] const std::vector<double> &alpha() const noexcept { return alpha_; }

  private:
    struct WorkingSet {
        std::size_t i;
        std::size_t j;
        double gap;
    };

    [[nodiscard]] bool in_up(std::size_t t) const noexcept {
        return (y_[t] > 0 && alpha_[t] < c_) || (y_[t] < 0 && alpha_[t] > 0.0);
    }
    [[nodiscard]] bool in_low(std::size_t t) const noexcept {
        return (y_[t] > 0 && alpha_[t] > 0.0) || (y_[t] < 0 && alpha_[t] < c_);
    }

    // Maximal violating pair; exact ties pick uniformly with the seeded generator.
    WorkingSet select_working_set() {
        double up = -std::numeric_limits<double>::infinity();
        double low = std::numeric_limits<double>::infinity();
        up_candidates_.clear();
        low_candidates_.clear();
        for (std::size_t t = 0; t < n_; ++t) {
            const double v = -y_[t] * grad_[t];
            if (in_up(t)) {
                if (v > up) {
                    up = v;
                    up_candidates_.assign(1, t);
                } else if (v == up) {
                    up_candidates_.push_back(t);
                }
            }
            if (in_low(t)) {
                if (v < low) {
                    low = v;
                    low_candidates_.assign(1, t);
                } else if (v == low) {
                    low_candidates_.push_back(t);
                }
            }
        }
        if (up_candidates_.empty() || low_candidates_.empty()) {
            return {0, 0, 0.0};
        }
        const std::size_t i = pick(up_candidates_);
        const std::size_t j = pick(low_candidates_);
        return {i, j, up - low};
    }

    std::size_t pick(const std::vector<std::size_t> &candidates) {
        if (candidates.size() == 1) {
            return candidates.front();
        }
        return candidates[static_cast<std::size_t>(uniform_index(rng_, candidates.size()))];
    }

    void update_pair(std::size_t i, std::size_t j) {
        const double *qi = &q_[i * n_];
        const double *qj = &q_[j * n_];
        const double old_i = alpha_[i];
        const double old_j = alpha_[j];
        double &ai = alpha_[i];
        double &aj = alpha_[j];
        if (y_[i] != y_[j]) {
            double quad = qi[i] + qj[j] + 2.0 * qi[j];
            if (quad <= 0.0) {
                quad = kTau;
            }
            const double delta = (-grad_[i] - grad_[j]) / quad;
            const double diff = ai - aj;
            ai += delta;
            aj += delta;
            if (diff > 0.0) {
                if (aj < 0.0) {
                    aj = 0.0;
                    ai = diff;
                }
            } else if (ai < 0.0) {
                ai = 0.0;
                aj = -diff;
            }
            if (diff > 0.0) {
                if (ai > c_) {
                    ai = c_;
                    aj = c_ - diff;
                }
            } else if (aj > c_) {
                aj = c_;
                ai = c_ + diff;
            }
        } else {
            double quad = qi[i] + qj[j] - 2.0 * qi[j];
            if (quad <= 0.0) {
                quad = kTau;
            }
            const double delta = (grad_[i] - grad_[j]) / quad;
            const double sum = ai + aj;
            ai -= delta;
            aj += delta;
            if (sum > c_) {
                if (ai > c_) {
                    ai = c_;
                    aj = sum - c_;
                }
            } else if (aj < 0.0) {
                aj = 0.0;
                ai = sum;
            }
            if (sum > c_) {
                if (aj > c_) {
                    aj = c_;
                    ai = sum - c_;
                }
            } else if (ai < 0.0) {
                ai = 0.0;
                aj = sum;
            }
        }
        const double di = ai - old_i;
        const double dj = aj - old_j;
        for (std::size_t t = 0; t < n_; ++t) {
            grad_[t] += qi[t] * di + qj[t] * dj;
        }
    }

    // Dual objective sum(alpha) - 0.5 alpha'Q alpha = -0.5 sum alpha_t (G_t - 1).
    [[nodiscard]] double objective() const {
        double acc = 0.0;
        for (std::size_t t = 0; t < n_; ++t) {
            acc += alpha_[t] * (grad_[t] - 1.0);
        }
        return -0.5 * acc;
    }

    std::size_t n_;
    std::vector<double> y_;
    double c_;
    const TrainConfig &config_;
    std::mt19937_64 rng_;
    std::vector<double> q_;
    std::vector<double> alpha_;
    std::vector<double> grad_;
    std::vector<std::size_t> up_candidates_;
    std::vector<std::size_t> low_candidates_;
};

// ---------------------------------------------------------------------------
// serialization helpers

std::string hex(double v) {
    char buf[64];
    const bool negative = std::signbit(v);
    const double mag = std::abs(v);
    if (!std::isfinite(v)) {
        throw ValidationError(kModule, "cannot serialize a non-finite value");
    }
    const auto res = std::to_chars(buf, buf + sizeof(buf), mag, std::chars_format::hex);
    return std::string(negative ? "-0x" : "0x") + std::string(buf, res.ptr);
}

double unhex(const nlohmann::json &j) {
    const std::string text = j.get<std::string>();
    std::string_view s = text;
    bool negative = false;
    if (!s.empty() && s.front() == '-') {
        negative = true;
        s.remove_prefix(1);
    }
    if (!s.starts_with("0x")) {
        throw ValidationError(kModule, "expected hexadecimal float, got '" + text + "'");
    }
    s.remove_prefix(2);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, std::chars_format::hex);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ValidationError(kModule, "malformed hexadecimal float '" + text + "'");
    }
    return negative ? -v : v;
}

nlohmann::json hex_vector(std::span<const double> v) {
    nlohmann::json out = nlohmann::json::array();
    for (const double x : v) {
        out.push_back(hex(x));
    }
    return out;
}

std::vector<double> unhex_vector(const nlohmann::json &j) {
    std::vector<double> out;
    for (const auto &e : j) {
        out.push_back(unhex(e));
    }
    return out;
}

nlohmann::json kernel_to_json(const KernelSpec &k) {
    return {{"kind", std::string(to_string(k.kind))}, {"eta", hex(k.eta)}, {"r", hex(k.r)}, {"degree", k.degree}};
}

KernelSpec kernel_from_json(const nlohmann::json &j) {
    KernelSpec k;
    k.kind = parse_kernel_kind(j.at("kind").get<std::string>());
    k.eta = unhex(j.at("eta"));
    k.r = unhex(j.at("r"));
    k.degree = j.at("degree").get<int>();
    k.validate();
    return k;
}

}  // namespace

std::string_view to_string(KernelKind kind) noexcept {
    switch (kind) {
    case KernelKind::linear:
        return "linear";
    case KernelKind::polynomial:
        return "poly";
    case KernelKind::rbf:
        return "rbf";
    case KernelKind::sigmoid:
        return "sigmoid";
    }
    return "rbf";
}

KernelKind parse_kernel_kind(std::string_view text) {
    if (text == "linear") {
        return KernelKind::linear;
    }
    if (text == "poly" || text == "polynomial") {
        return KernelKind::polynomial;
    }
    if (text == "rbf") {
        return KernelKind::rbf;
    }
    if (text == "sigmoid") {
        return KernelKind::sigmoid;
    }
    throw ValidationError(kModule, "unknown kernel '" + std::string(text) + "'");
}

void KernelSpec::validate() const {
    if (kind != KernelKind::linear && !(eta > 0.0)) {
        throw ValidationError(kModule, "kernel eta must be > 0");
    }
    if (!std::isfinite(eta) || !std::isfinite(r)) {
        throw ValidationError(kModule, "kernel parameters must be finite");
    }
    if (kind == KernelKind::polynomial && degree < 1) {
        throw ValidationError(kModule, "polynomial degree must be >= 1");
    }
}

void TrainConfig::validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw ValidationError(kModule, "C must be > 0");
    }
    if (!(tolerance > 0.0 && tolerance <= 0.1)) {
        throw ValidationError(kModule, "tolerance must lie in (0, 0.1]");
    }
    kernel.validate();
}

double kernel_eval(const KernelSpec &spec, std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw ValidationError(kModule, "kernel inputs differ in dimension");
    }
    spec.validate();
    switch (spec.kind) {
    case KernelKind::linear:
        return simd::dot(x, y);
    case KernelKind::polynomial: {
        const double base = spec.eta * simd::dot(x, y) + spec.r;
        double out = 1.0;
        for (int d = 0; d < spec.degree; ++d) {
            out *= base;
        }
        return out;
    }
    case KernelKind::rbf:
        return std::exp(-spec.eta * simd::squared_distance(x, y));
    case KernelKind::sigmoid:
        return std::tanh(spec.eta * simd::dot(x, y) + spec.r);
    }
    return 0.0;
}

BinarySvmModel train_binary(std::span<const std::vector<double>> rows, std::span<const int> labels,
                            const TrainConfig &config, TrainStats *stats) {
    config.validate();
    if (rows.size() != labels.size()) {
        throw ValidationError(kModule, "row and label counts differ");
    }
    if (rows.empty()) {
        throw ValidationError(kModule, "no training rows");
    }
    const std::size_t dim = rows.front().size();
    bool has_pos = false;
    bool has_neg = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (labels[i] != 1 && labels[i] != -1) {
            throw ValidationError(kModule, "binary labels must be +1 or -1");
        }
        (labels[i] > 0 ? has_pos : has_neg) = true;
        if (rows[i].size() != dim) {
            throw ValidationError(kModule, "training rows differ in dimension");
        }
        if (!std::all_of(rows[i].begin(), rows[i].end(), [](double v) { return std::isfinite(v); })) {
            throw ValidationError(kModule, "non-finite feature in training row " + std::to_string(i));
        }
    }
    if (!has_pos || !has_neg) {
        throw ValidationError(kModule, "training data holds a single label");
    }
    TrainStats local;
    TrainStats &st = stats != nullptr ? *stats : local;
    st = TrainStats{};
    SmoSolver solver(rows, labels, config);
    solver.solve(st);

    BinarySvmModel model;
    model.kernel = config.kernel;
    model.c = config.c;
    model.bias = solver.bias();
    model.converged = st.converged;
    model.iterations = st.iterations;
    const auto &alpha = solver.alpha();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (alpha[i] > 0.0) {
            model.support_vectors.push_back(rows[i]);
            model.dual_coefficients.push_back(alpha[i] * labels[i]);
        }
    }
    return model;
}

double decision_value(const BinarySvmModel &model, std::span<const double> x) {
    if (model.support_vectors.empty()) {
        throw ValidationError(kModule, "model has no support vectors");
    }
    if (x.size() != model.support_vectors.front().size()) {
        throw ValidationError(kModule, "input dimension " + std::to_string(x.size()) + " does not match model dimension " +
                                           std::to_string(model.support_vectors.front().size()));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
        acc += model.dual_coefficients[i] * kernel_eval(model.kernel, model.support_vectors[i], x);
    }
    return acc + model.bias;
}

MulticlassSvmModel train_multiclass(const FeatureMatrix &matrix, std::span<const std::size_t> feature_indices,
                                    const TrainConfig &config) {
    config.validate();
    if (feature_indices.empty()) {
        throw ValidationError(kModule, "no feature indices given");
    }
    for (const std::size_t idx : feature_indices) {
        if (idx < 1 || idx > kNumFeatures) {
            throw ValidationError(kModule, "feature index " + std::to_string(idx) + " outside the catalog");
        }
    }
    MulticlassSvmModel model;
    model.feature_indices.assign(feature_indices.begin(), feature_indices.end());
    model.config = config;
    if (matrix.normalization) {
        std::vector<FeatureScaling> snapshot;
        for (const std::size_t idx : feature_indices) {
            snapshot.push_back(matrix.normalization->at(idx - 1));
        }
        model.normalization = std::move(snapshot);
    }
    std::array<std::vector<std::vector<double>>, kNumLabels> by_label;
    for (const auto &row : matrix.rows) {
        std::vector<double> x;
        x.reserve(feature_indices.size());
        for (const std::size_t idx : feature_indices) {
            x.push_back(row.values[idx - 1]);
        }
        by_label[label_index(row.label)].push_back(std::move(x));
    }
    for (const EmotionLabel label : kAllLabels) {
        const auto count = by_label[label_index(label)].size();
        if (count == 0) {
            continue;
        }
        if (count < 2) {
            throw ValidationError(kModule, "label '" + std::string(to_string(label)) + "' has fewer than 2 rows");
        }
        model.label_order.push_back(label);
    }
    if (model.label_order.size() < 2) {
        throw ValidationError(kModule, "multiclass training needs at least 2 labels");
    }
    std::size_t pair_no = 0;
    for (std::size_t a = 0; a < model.label_order.size(); ++a) {
        for (std::size_t b = a + 1; b < model.label_order.size(); ++b, ++pair_no) {
            const auto &pos = by_label[label_index(model.label_order[a])];
            const auto &neg = by_label[label_index(model.label_order[b])];
            std::vector<std::vector<double>> rows;
            std::vector<int> labels;
            rows.insert(rows.end(), pos.begin(), pos.end());
            labels.insert(labels.end(), pos.size(), 1);
            rows.insert(rows.end(), neg.begin(), neg.end());
            labels.insert(labels.end(), neg.size(), -1);
            TrainConfig pair_config = config;
            pair_config.seed = mix_seed(config.seed, pair_no);
            BinarySvmModel machine = train_binary(rows, labels, pair_config);
            machine.label_pair = {model.label_order[a], model.label_order[b]};
            model.machines.push_back(std::move(machine));
        }
    }
    return model;
}

EmotionLabel resolve_votes(std::span<const EmotionLabel> label_order, std::span<const std::size_t> votes,
                           std::span<const double> magnitudes) {
    if (label_order.empty() || votes.size() != label_order.size() || magnitudes.size() != label_order.size()) {
        throw ValidationError(kModule, "vote table does not match label order");
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < label_order.size(); ++i) {
        if (votes[i] > votes[best] || (votes[i] == votes[best] && magnitudes[i] > magnitudes[best])) {
            best = i;
        }
    }
    return label_order[best];
}

std::vector<double> model_inputs(const MulticlassSvmModel &model, const FeatureVector &features) {
    std::vector<double> x;
    x.reserve(model.feature_indices.size());
    for (std::size_t k = 0; k < model.feature_indices.size(); ++k) {
        const std::size_t idx = model.feature_indices[k];
        if (idx < 1 || idx > kNumFeatures) {
            throw ValidationError(kModule, "model expects missing feature index " + std::to_string(idx),
                                  features.record_id);
        }
        const double raw = features.values[idx - 1];
        x.push_back(model.normalization ? (*model.normalization)[k].apply(raw) : raw);
    }
    return x;
}

VoteTally tally_votes(const MulticlassSvmModel &model, std::span<const double> inputs) {
    VoteTally tally;
    tally.votes.assign(model.label_order.size(), 0);
    tally.magnitudes.assign(model.label_order.size(), 0.0);
    const auto position = [&](EmotionLabel l) {
        return static_cast<std::size_t>(std::find(model.label_order.begin(), model.label_order.end(), l) -
                                        model.label_order.begin());
    };
    for (const auto &machine : model.machines) {
        const double d = decision_value(machine, inputs);
        const std::size_t p = position(d > 0.0 ? machine.label_pair.first : machine.label_pair.second);
        tally.votes.at(p) += 1;
        tally.magnitudes.at(p) += std::abs(d);
    }
    tally.winner = resolve_votes(model.label_order, tally.votes, tally.magnitudes);
    return tally;
}

EmotionLabel predict(const MulticlassSvmModel &model, const FeatureVector &features) {
    if (model.machines.empty()) {
        throw ValidationError(kModule, "model has no machines");
    }
    return tally_votes(model, model_inputs(model, features)).winner;
}

std::string model_to_json(const MulticlassSvmModel &model) {
    nlohmann::json j;
    j["format"] = "gsr-emotion-svm";
    j["format_version"] = kModelFormatVersion;
    j["catalog_version"] = kCatalogVersion;
    j["kernel"] = kernel_to_json(model.config.kernel);
    j["c"] = hex(model.config.c);
    j["tolerance"] = hex(model.config.tolerance);
    j["max_passes"] = model.config.max_passes;
    j["seed"] = model.config.seed;
    nlohmann::json labels = nlohmann::json::array();
    for (const EmotionLabel l : model.label_order) {
        labels.push_back(std::string(to_string(l)));
    }
    j["label_order"] = labels;
    j["feature_indices"] = model.feature_indices;
    if (model.normalization) {
        nlohmann::json norm = nlohmann::json::array();
        for (const auto &s : *model.normalization) {
            norm.push_back({{"min", hex(s.min)}, {"max", hex(s.max)}, {"degenerate", s.degenerate}});
        }
        j["normalization"] = norm;
    } else {
        j["normalization"] = nullptr;
    }
    nlohmann::json machines = nlohmann::json::array();
    for (const auto &m : model.machines) {
        nlohmann::json sv = nlohmann::json::array();
        for (const auto &v : m.support_vectors) {
            sv.push_back(hex_vector(v));
        }
        machines.push_back({{"labels", {std::string(to_string(m.label_pair.first)), std::string(to_string(m.label_pair.second))}},
                            {"bias", hex(m.bias)},
                            {"converged", m.converged},
                            {"iterations", m.iterations},
                            {"support_vectors", sv},
                            {"dual_coefficients", hex_vector(m.dual_coefficients)}});
    }
    j["machines"] = machines;
    return j.dump(1) + "\n";
}

MulticlassSvmModel model_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error &e) {
        throw ValidationError(kModule, std::string("model file parse error: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != "gsr-emotion-svm") {
            throw ValidationError(kModule, "not a model file");
        }
        const int version = j.at("format_version").get<int>();
        if (version != kModelFormatVersion) {
            throw ValidationError(kModule, "unsupported model format version " + std::to_string(version) +
                                               " (expected " + std::to_string(kModelFormatVersion) + ")");
        }
        MulticlassSvmModel model;
        model.config.kernel = kernel_from_json(j.at("kernel"));
        model.config.c = unhex(j.at("c"));
        model.config.tolerance = unhex(j.at("tolerance"));
        model.config.max_passes = j.at("max_passes").get<std::size_t>();
        model.config.seed = j.at("seed").get<std::uint64_t>();
        for (const auto &l : j.at("label_order")) {
            model.label_order.push_back(parse_label(l.get<std::string>()));
        }
        model.feature_indices = j.at("feature_indices").get<std::vector<std::size_t>>();
        if (model.feature_indices.empty()) {
            throw ValidationError(kModule, "model lists no feature indices");
        }
        for (const std::size_t idx : model.feature_indices) {
            if (idx < 1 || idx > kNumFeatures) {
                throw ValidationError(kModule, "model feature index " + std::to_string(idx) + " outside the catalog");
            }
        }
        if (!j.at("normalization").is_null()) {
            std::vector<FeatureScaling> norm;
            for (const auto &s : j.at("normalization")) {
                norm.push_back({unhex(s.at("min")), unhex(s.at("max")), s.at("degenerate").get<bool>()});
            }
            if (norm.size() != model.feature_indices.size()) {
                throw ValidationError(kModule, "normalization snapshot does not match feature indices");
            }
            model.normalization = std::move(norm);
        }
        const std::size_t dim = model.feature_indices.size();
        for (const auto &m : j.at("machines")) {
            BinarySvmModel machine;
            machine.kernel = model.config.kernel;
            machine.c = model.config.c;
            const auto &pair = m.at("labels");
            machine.label_pair = {parse_label(pair.at(0).get<std::string>()), parse_label(pair.at(1).get<std::string>())};
            machine.bias = unhex(m.at("bias"));
            machine.converged = m.at("converged").get<bool>();
            machine.iterations = m.at("iterations").get<std::size_t>();
            for (const auto &sv : m.at("support_vectors")) {
                machine.support_vectors.push_back(unhex_vector(sv));
                if (machine.support_vectors.back().size() != dim) {
                    throw ValidationError(kModule, "support vector dimension does not match feature indices");
                }
            }
            machine.dual_coefficients = unhex_vector(m.at("dual_coefficients"));
            if (machine.dual_coefficients.size() != machine.support_vectors.size() || machine.support_vectors.empty()) {
                throw ValidationError(kModule, "machine has inconsistent support vectors");
            }
            model.machines.push_back(std::move(machine));
        }
        const std::size_t n = model.label_order.size();
        if (model.machines.size() != n * (n - 1) / 2) {
            throw ValidationError(kModule, "model holds " + std::to_string(model.machines.size()) +
                                               " machines for " + std::to_string(n) + " labels");
        }
        return model;
    } catch (const nlohmann::json::exception &e) {
        throw ValidationError(kModule, std::string("malformed model file: ") + e.what());
    }
}

void save_model(const MulticlassSvmModel &model, const fs::path &path) {
    const std::string text = model_to_json(model);
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError(kModule, "cannot write '" + path.string() + "'");
    }
    out << text;
}

MulticlassSvmModel load_model(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(kModule, "cannot open '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return model_from_json(buffer.str());
}

}  // namespace gsr
