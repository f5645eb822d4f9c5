#include "gsr/eval.hpp"

#include "gsr/error.hpp"
#include "gsr/random.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace gsr {

namespace {

constexpr const char *kModule = "eval";

std::string percent(double rate) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * rate);
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) {
        s.append(width - s.size(), ' ');
    }
    return s;
}

}  // namespace

std::size_t ConfusionMatrix::total() const noexcept {
    std::size_t t = 0;
    for (const auto &row : counts) {
        for (const std::size_t c : row) {
            t += c;
        }
    }
    return t;
}

std::size_t ConfusionMatrix::row_total(EmotionLabel truth) const noexcept {
    std::size_t t = 0;
    for (const std::size_t c : counts[label_index(truth)]) {
        t += c;
    }
    return t;
}

ConfusionMatrix &ConfusionMatrix::operator+=(const ConfusionMatrix &other) noexcept {
    for (std::size_t i = 0; i < kNumLabels; ++i) {
        for (std::size_t j = 0; j < kNumLabels; ++j) {
            counts[i][j] += other.counts[i][j];
        }
    }
    return *this;
}

ConfusionMatrix confusion_matrix(std::span<const EmotionLabel> truth, std::span<const EmotionLabel> predicted) {
    if (truth.size() != predicted.size()) {
        throw ValidationError(kModule, "truth and prediction sequences differ in length");
    }
    if (truth.empty()) {
        throw ValidationError(kModule, "cannot build a confusion matrix from no predictions");
    }
    ConfusionMatrix cm;
    for (std::size_t n = 0; n < truth.size(); ++n) {
        ++cm.counts[label_index(truth[n])][label_index(predicted[n])];
    }
    return cm;
}

double accuracy(const ConfusionMatrix &cm) {
    const std::size_t total = cm.total();
    if (total == 0) {
        throw ValidationError(kModule, "accuracy of an empty confusion matrix");
    }
    std::size_t trace = 0;
    for (std::size_t i = 0; i < kNumLabels; ++i) {
        trace += cm.counts[i][i];
    }
    return static_cast<double>(trace) / static_cast<double>(total);
}

std::map<EmotionLabel, double> per_label_rates(const ConfusionMatrix &cm) {
    std::map<EmotionLabel, double> out;
    for (const EmotionLabel label : kAllLabels) {
        const std::size_t row = cm.row_total(label);
        if (row == 0) {
            throw ValidationError(kModule, "label '" + std::string(to_string(label)) + "' has no scored records");
        }
        out[label] = static_cast<double>(cm.at(label, label)) / static_cast<double>(row);
    }
    return out;
}

std::map<EmotionLabel, double> available_label_rates(const ConfusionMatrix &cm) {
    std::map<EmotionLabel, double> out;
    for (const EmotionLabel label : kAllLabels) {
        if (const std::size_t row = cm.row_total(label); row > 0) {
            out[label] = static_cast<double>(cm.at(label, label)) / static_cast<double>(row);
        }
    }
    return out;
}

std::string format_label_table(std::span<const AccuracyColumn> columns, const std::string &title) {
    std::ostringstream out;
    out << title << '\n';
    out << pad("Target Emotion", 18) << "Recognition rate (%)\n";
    out << pad("", 18) << "Number of features\n";
    out << pad("", 18);
    for (const auto &c : columns) {
        out << pad(std::to_string(c.n_features), 10);
    }
    out << '\n';
    std::vector<std::map<EmotionLabel, double>> rates;
    for (const auto &c : columns) {
        rates.push_back(available_label_rates(c.test));
    }
    for (const EmotionLabel label : kAllLabels) {
        out << pad(std::string(display_name(label)), 18);
        for (const auto &r : rates) {
            const auto it = r.find(label);
            out << pad(it == r.end() ? "n/a" : percent(it->second), 10);
        }
        out << '\n';
    }
    return out.str();
}

std::string format_accuracy_table(std::span<const AccuracyColumn> columns, const std::string &title) {
    std::ostringstream out;
    out << title << '\n';
    out << pad("Data", 18) << "Accuracy (%)\n";
    out << pad("", 18) << "Number of features\n";
    out << pad("", 18);
    for (const auto &c : columns) {
        out << pad(std::to_string(c.n_features), 10);
    }
    out << '\n';
    out << pad("Training data", 18);
    for (const auto &c : columns) {
        out << pad(c.train.total() ? percent(accuracy(c.train)) : "n/a", 10);
    }
    out << '\n';
    out << pad("Test data", 18);
    for (const auto &c : columns) {
        out << pad(c.test.total() ? percent(accuracy(c.test)) : "n/a", 10);
    }
    out << '\n';
    return out.str();
}

std::string format_confusion(const ConfusionMatrix &cm) {
    std::ostringstream out;
    out << pad("true \\ predicted", 18);
    for (const EmotionLabel l : kAllLabels) {
        out << pad(std::string(display_name(l)), 11);
    }
    out << '\n';
    for (const EmotionLabel t : kAllLabels) {
        out << pad(std::string(display_name(t)), 18);
        for (const EmotionLabel p : kAllLabels) {
            out << pad(std::to_string(cm.at(t, p)), 11);
        }
        out << '\n';
    }
    return out.str();
}

std::vector<std::size_t> sample_per_label(std::span<const EmotionLabel> labels, std::size_t per_label,
                                          std::uint64_t seed) {
    std::vector<std::size_t> out;
    for (const EmotionLabel label : kAllLabels) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == label) {
                members.push_back(i);
            }
        }
        std::mt19937_64 rng(mix_seed(seed, 200 + label_index(label)));
        shuffle(members, rng);
        members.resize(std::min(members.size(), per_label));
        out.insert(out.end(), members.begin(), members.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace gsr
