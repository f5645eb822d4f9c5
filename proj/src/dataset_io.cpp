#include "gsr/dataset_io.hpp"

#include "gsr/error.hpp"
#include "gsr/random.hpp"
#include "text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace gsr {

namespace fs = std::filesystem;

namespace {

constexpr const char *kModule = "dataset_io";
constexpr std::string_view kColumnHeader = "t_seconds,conductance_us";

std::string read_file(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError(kModule, "cannot open '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
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

std::vector<std::string_view> lines_of(std::string_view text) {
    auto lines = detail::split(text, '\n');
    if (!lines.empty() && detail::trim(lines.back()).empty()) {
        lines.pop_back();
    }
    return lines;
}

}  // namespace

void validate_record(const GsrRecord &record) {
    const std::string &id = record.record_id;
    if (record.record_id.empty()) {
        throw ValidationError(kModule, "record_id is empty");
    }
    if (!(record.sample_rate_hz > 0.0) || !std::isfinite(record.sample_rate_hz)) {
        throw ValidationError(kModule, "sample_rate_hz must be positive", id);
    }
    if (record.samples.size() < kMinRecordLength) {
        throw ValidationError(kModule,
                              "record has " + std::to_string(record.samples.size()) + " samples, need at least " +
                                  std::to_string(kMinRecordLength),
                              id);
    }
    for (std::size_t i = 0; i < record.samples.size(); ++i) {
        if (!std::isfinite(record.samples[i])) {
            throw ValidationError(kModule, "non-finite sample at row " + std::to_string(i), id);
        }
    }
}

std::vector<EmotionLabel> Dataset::labels() const {
    std::vector<EmotionLabel> out;
    out.reserve(records.size());
    for (const auto &r : records) {
        out.push_back(r.label);
    }
    return out;
}

std::array<std::size_t, kNumLabels> Dataset::label_counts() const {
    std::array<std::size_t, kNumLabels> counts{};
    for (const auto &r : records) {
        ++counts[label_index(r.label)];
    }
    return counts;
}

void validate_dataset(const Dataset &dataset) {
    std::set<std::string_view> seen;
    for (const auto &r : dataset.records) {
        if (!seen.insert(r.record_id).second) {
            throw ValidationError(kModule, "duplicate record_id", r.record_id);
        }
    }
}

GsrRecord load_record(const fs::path &path) {
    const std::string text = read_file(path);
    const std::string where = path.string();
    std::map<std::string, std::string, std::less<>> meta;
    GsrRecord record;
    bool header_seen = false;
    std::size_t line_no = 0;
    for (std::string_view raw : lines_of(text)) {
        ++line_no;
        const std::string_view line = detail::trim(raw);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            const std::string_view body = detail::trim(line.substr(1));
            const auto colon = body.find(':');
            if (colon != std::string_view::npos) {
                meta[std::string(detail::trim(body.substr(0, colon)))] = std::string(detail::trim(body.substr(colon + 1)));
            }
            continue;
        }
        if (!header_seen) {
            if (line != kColumnHeader) {
                throw ValidationError(kModule, "expected header '" + std::string(kColumnHeader) + "' at line " +
                                                   std::to_string(line_no), where);
            }
            header_seen = true;
            continue;
        }
        const auto fields = detail::split(line, ',');
        if (fields.size() != 2) {
            throw ValidationError(kModule, "malformed row at line " + std::to_string(line_no), where);
        }
        const auto t = detail::parse_double(fields[0]);
        const auto value = detail::parse_double(fields[1]);
        if (!t || !value) {
            throw ValidationError(kModule, "malformed row at line " + std::to_string(line_no), where);
        }
        if (!std::isfinite(*t) || !std::isfinite(*value)) {
            throw ValidationError(kModule, "malformed sample (non-finite) at line " + std::to_string(line_no), where);
        }
        record.samples.push_back(*value);
    }
    if (!header_seen) {
        throw ValidationError(kModule, "missing column header", where);
    }
    const auto require = [&](const char *key) -> const std::string & {
        const auto it = meta.find(key);
        if (it == meta.end() || it->second.empty()) {
            throw ValidationError(kModule, std::string("missing metadata '# ") + key + ":'", where);
        }
        return it->second;
    };
    record.record_id = require("record_id");
    record.subject_id = require("subject");
    try {
        record.label = parse_label(require("label"));
    } catch (const ValidationError &e) {
        throw ValidationError(kModule, e.what(), record.record_id);
    }
    const auto rate = detail::parse_double(require("sample_rate_hz"));
    if (!rate) {
        throw ValidationError(kModule, "malformed sample_rate_hz", record.record_id);
    }
    record.sample_rate_hz = *rate;
    validate_record(record);
    return record;
}

void save_record(const GsrRecord &record, const fs::path &path) {
    validate_record(record);
    auto out = open_for_write(path);
    out << "# subject: " << record.subject_id << '\n'
        << "# label: " << to_string(record.label) << '\n'
        << "# sample_rate_hz: " << detail::format_double(record.sample_rate_hz) << '\n'
        << "# record_id: " << record.record_id << '\n'
        << kColumnHeader << '\n';
    for (std::size_t i = 0; i < record.samples.size(); ++i) {
        out << detail::format_double(static_cast<double>(i) / record.sample_rate_hz) << ','
            << detail::format_double(record.samples[i]) << '\n';
    }
    if (!out) {
        throw IoError(kModule, "write failed for '" + path.string() + "'");
    }
}

Dataset load_dataset(const fs::path &manifest_path) {
    const std::string text = read_file(manifest_path);
    const fs::path base = manifest_path.parent_path();
    Dataset dataset;
    dataset.manifest_path = manifest_path.string();
    for (std::string_view raw : lines_of(text)) {
        const std::string_view line = detail::trim(raw);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const fs::path record_path = base / fs::path(std::string(line));
        try {
            dataset.records.push_back(load_record(record_path));
        } catch (const IoError &e) {
            throw IoError(kModule, std::string("manifest entry: ") + e.what(), std::string(line));
        }
    }
    validate_dataset(dataset);
    return dataset;
}

fs::path save_dataset(const Dataset &dataset, const fs::path &dir) {
    validate_dataset(dataset);
    std::ostringstream manifest;
    manifest << "# GSR dataset manifest: one record file per line\n";
    for (const auto &record : dataset.records) {
        const std::string relative = "records/" + record.record_id + ".csv";
        save_record(record, dir / relative);
        manifest << relative << '\n';
    }
    const fs::path manifest_path = dir / "manifest.txt";
    auto out = open_for_write(manifest_path);
    out << manifest.str();
    if (!out) {
        throw IoError(kModule, "write failed for '" + manifest_path.string() + "'");
    }
    return manifest_path;
}

SplitIndices stratified_split(std::span<const EmotionLabel> labels, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ValidationError(kModule, "test_fraction must lie in (0, 1)");
    }
    if (labels.empty()) {
        throw ValidationError(kModule, "cannot split an empty dataset");
    }
    SplitIndices split;
    for (const EmotionLabel label : kAllLabels) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == label) {
                members.push_back(i);
            }
        }
        if (members.empty()) {
            continue;
        }
        if (members.size() < 2) {
            throw ValidationError(kModule, "label '" + std::string(to_string(label)) + "' has fewer than 2 records");
        }
        std::mt19937_64 rng(mix_seed(seed, label_index(label) + 1));
        shuffle(members, rng);
        const double exact = test_fraction * static_cast<double>(members.size());
        auto n_test = static_cast<std::size_t>(std::floor(exact + 0.5 + 1e-9));
        n_test = std::clamp<std::size_t>(n_test, 1, members.size() - 1);
        split.test.insert(split.test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_test));
        split.train.insert(split.train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test), members.end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const EmotionLabel> labels, std::size_t k,
                                                       std::uint64_t seed) {
    if (k < 2) {
        throw ValidationError(kModule, "fold count must be at least 2");
    }
    if (labels.size() < k) {
        throw ValidationError(kModule, "fold count exceeds record count");
    }
    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t next = 0;  // round-robin continues across labels so fold sizes stay balanced
    for (const EmotionLabel label : kAllLabels) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == label) {
                members.push_back(i);
            }
        }
        if (members.empty()) {
            continue;
        }
        std::mt19937_64 rng(mix_seed(seed, 100 + label_index(label)));
        shuffle(members, rng);
        for (const std::size_t m : members) {
            folds[next].push_back(m);
            next = (next + 1) % k;
        }
    }
    for (auto &fold : folds) {
        std::sort(fold.begin(), fold.end());
    }
    return folds;
}

Dataset subset(const Dataset &dataset, std::span<const std::size_t> positions) {
    Dataset out;
    out.manifest_path = dataset.manifest_path;
    out.records.reserve(positions.size());
    for (const std::size_t p : positions) {
        out.records.push_back(dataset.records.at(p));
    }
    return out;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset &dataset, double test_fraction, std::uint64_t seed) {
    const auto labels = dataset.labels();
    const SplitIndices split = stratified_split(labels, test_fraction, seed);
    return {subset(dataset, split.train), subset(dataset, split.test)};
}

}  // namespace gsr
