#include "cli.hpp"

#include "gsr/error.hpp"
#include "gsr/pipeline.hpp"
#include "gsr/synth.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>

namespace gsr::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char *kModule = "cli";

struct Options {
    std::uint64_t seed{42};
    std::string out;
    bool force{false};
    std::string kernel{"rbf"};
    double c{1.0};
    std::optional<double> eta;
    int degree{3};
    double r{0.0};
    std::size_t k{15};
    std::string features_list;
    std::string norm{"both"};
    double test_fraction{0.3};
    std::size_t folds{5};
    std::string manifest;
    std::string features;
    std::string model;
    std::string selection;
    std::size_t rate_sample{0};
};

std::vector<std::size_t> parse_index_list(const std::string &text) {
    std::vector<std::size_t> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        std::string token = text.substr(pos, comma - pos);
        const auto first = token.find_first_not_of(" \t");
        const auto last = token.find_last_not_of(" \t");
        token = first == std::string::npos ? "" : token.substr(first, last - first + 1);
        std::size_t value = 0;
        const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (token.empty() || ec != std::errc{} || end != token.data() + token.size() || value < 1 ||
            value > kNumFeatures) {
            throw ValidationError(kModule, "--features-list entry '" + token + "' is not a catalog index in [1, 30]");
        }
        out.push_back(value);
        pos = comma + 1;
    }
    return out;
}

PipelineConfig pipeline_config(const Options &o) {
    PipelineConfig pc;
    pc.kernel.kind = parse_kernel_kind(o.kernel);
    pc.kernel.degree = o.degree;
    pc.kernel.r = o.r;
    pc.eta = o.eta;
    pc.c = o.c;
    pc.k = o.k;
    pc.normalization = parse_normalization_mode(o.norm);
    pc.seed = o.seed;
    if (!o.features_list.empty()) {
        pc.feature_list = parse_index_list(o.features_list);
    }
    pc.validate();
    return pc;
}

const std::string &require(const std::string &value, const char *flag) {
    if (value.empty()) {
        throw ValidationError(kModule, std::string(flag) + " is required");
    }
    return value;
}

/// Output file guard: refuses to replace an existing file unless forced.
fs::path output_file(const Options &o) {
    const fs::path path = require(o.out, "--out");
    if (fs::exists(path)) {
        if (fs::is_directory(path)) {
            throw IoError(kModule, path.string() + " is a directory");
        }
        if (!o.force) {
            throw IoError(kModule, path.string() + " exists; pass --force to overwrite");
        }
    }
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    return path;
}

fs::path output_dir(const Options &o) {
    const fs::path path = require(o.out, "--out");
    if (fs::exists(path)) {
        if (!fs::is_directory(path)) {
            throw IoError(kModule, path.string() + " is not a directory");
        }
        if (!fs::is_empty(path) && !o.force) {
            throw IoError(kModule, path.string() + " is not empty; pass --force to overwrite");
        }
    }
    fs::create_directories(path);
    return path;
}

void write_text(const fs::path &path, const std::string &text) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw IoError(kModule, "cannot open " + path.string() + " for writing");
    }
    file << text;
    if (!file.flush()) {
        throw IoError(kModule, "write failed for " + path.string());
    }
}

FeatureMatrix scaled_for_mode(const FeatureMatrix &m, NormalizationMode mode) {
    return normalizes_features(mode) ? apply_feature_normalization(m, fit_feature_normalization(m)) : m;
}

json confusion_json(const ConfusionMatrix &cm) {
    json rows = json::array();
    for (const auto &row : cm.counts) {
        rows.push_back(row);
    }
    return rows;
}

json rates_json(const ConfusionMatrix &cm) {
    json rates = json::object();
    for (const auto &[label, rate] : available_label_rates(cm)) {
        rates[std::string(to_string(label))] = rate;
    }
    return rates;
}

json config_json(const Options &o, const PipelineConfig &pc) {
    json j;
    j["seed"] = o.seed;
    j["kernel"] = std::string(to_string(pc.kernel.kind));
    j["c"] = pc.c;
    j["eta"] = pc.eta ? json(*pc.eta) : json(nullptr);
    j["degree"] = pc.kernel.degree;
    j["r"] = pc.kernel.r;
    j["k"] = pc.k;
    j["features_list"] = pc.feature_list ? json(*pc.feature_list) : json(nullptr);
    j["norm"] = std::string(to_string(pc.normalization));
    j["test_fraction"] = o.test_fraction;
    j["folds"] = o.folds;
    return j;
}

json cv_json(const CvReport &cv) {
    json j;
    j["k"] = cv.k;
    j["seed"] = cv.seed;
    j["fold_accuracies"] = cv.fold_accuracies;
    j["fold_sizes"] = cv.fold_sizes;
    j["mean"] = cv.mean;
    j["std"] = cv.std;
    j["fit_row_reads"] = cv.fit_row_reads;
    j["heldout_reads_during_fit"] = cv.heldout_reads_during_fit;
    json folds = json::array();
    for (const auto &cm : cv.per_fold_confusions) {
        folds.push_back(confusion_json(cm));
    }
    j["per_fold_confusions"] = folds;
    return j;
}

std::string percent(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * v);
    return buf;
}

/// Train and test row positions; a zero fraction puts every row on the test side.
SplitIndices split_rows(const FeatureMatrix &m, const Options &o) {
    SplitIndices split;
    if (o.test_fraction == 0.0) {
        split.test.resize(m.size());
        for (std::size_t i = 0; i < m.size(); ++i) {
            split.test[i] = i;
        }
        return split;
    }
    return stratified_split(m.labels(), o.test_fraction, o.seed);
}

int cmd_synth(const Options &o, std::ostream &out) {
    SynthConfig sc;
    sc.seed = o.seed;
    const Dataset ds = generate_dataset(sc);
    const fs::path dir = output_dir(o);
    const fs::path manifest = save_dataset(ds, dir);
    out << "synth: " << ds.size() << " records -> " << manifest.string() << '\n';
    return kExitOk;
}

int cmd_preprocess(const Options &o, std::ostream &out) {
    const PipelineConfig pc = pipeline_config(o);
    const Dataset ds = load_dataset(require(o.manifest, "--manifest"));
    const Dataset cleaned = preprocess_dataset(ds, normalizes_signal(pc.normalization));
    const fs::path manifest = save_dataset(cleaned, output_dir(o));
    out << "preprocess: " << cleaned.size() << " records (norm " << to_string(pc.normalization) << ") -> "
        << manifest.string() << '\n';
    return kExitOk;
}

int cmd_features(const Options &o, std::ostream &out) {
    const Dataset ds = load_dataset(require(o.manifest, "--manifest"));
    const FeatureMatrix fm = extract_dataset_features(ds);
    const fs::path path = output_file(o);
    save_feature_matrix(fm, path);
    out << "features: " << fm.size() << " rows x " << kNumFeatures << " -> " << path.string() << '\n';
    return kExitOk;
}

int cmd_select(const Options &o, std::ostream &out) {
    const PipelineConfig pc = pipeline_config(o);
    const FeatureMatrix fm = scaled_for_mode(load_feature_matrix(require(o.features, "--features")), pc.normalization);
    const SelectionResult sel = pc.feature_list ? select_explicit(fm, *pc.feature_list) : select_features(fm, pc.k);
    const fs::path path = output_file(o);
    save_selection_report(sel, path);
    out << "select: " << sel.selected_indices.size() << " features:";
    for (const std::size_t i : sel.selected_indices) {
        out << ' ' << i;
    }
    out << " -> " << path.string() << '\n';
    for (const auto &w : sel.warnings) {
        out << "warning: " << w << '\n';
    }
    return kExitOk;
}

int cmd_train(const Options &o, std::ostream &out) {
    PipelineConfig pc = pipeline_config(o);
    if (!pc.feature_list && !o.selection.empty()) {
        pc.feature_list = load_selection_report(o.selection).selected_indices;
    }
    const FeatureMatrix fm = load_feature_matrix(require(o.features, "--features"));
    const SplitIndices split = split_rows(fm, o);
    const FeatureMatrix train = select_rows(fm, split.train.empty() ? split.test : split.train);
    const FittedPipeline fitted = fit_pipeline(train, pc);
    const fs::path path = output_file(o);
    save_model(fitted.model, path);
    std::size_t unconverged = 0;
    for (const auto &m : fitted.model.machines) {
        unconverged += m.converged ? 0 : 1;
    }
    out << "train: " << train.size() << " rows, " << fitted.model.feature_indices.size() << " features, "
        << fitted.model.machines.size() << " machines, training accuracy "
        << percent(accuracy(evaluate_model(fitted.model, train))) << "% -> " << path.string() << '\n';
    if (unconverged > 0) {
        out << "warning: " << unconverged << " machines hit the iteration cap\n";
    }
    return kExitOk;
}

int cmd_predict(const Options &o, std::ostream &out) {
    const FeatureMatrix fm = load_feature_matrix(require(o.features, "--features"));
    const MulticlassSvmModel model = load_model(require(o.model, "--model"));
    const auto predicted = predict_all(model, fm);
    std::string text = "record_id,label,predicted\n";
    for (std::size_t i = 0; i < fm.size(); ++i) {
        text += fm.rows[i].record_id + ',' + std::string(to_string(fm.rows[i].label)) + ',' +
                std::string(to_string(predicted[i])) + '\n';
    }
    const fs::path path = output_file(o);
    write_text(path, text);
    out << "predict: " << fm.size() << " rows -> " << path.string() << '\n';
    return kExitOk;
}

int cmd_eval(const Options &o, std::ostream &out) {
    const FeatureMatrix fm = load_feature_matrix(require(o.features, "--features"));
    const MulticlassSvmModel model = load_model(require(o.model, "--model"));
    const SplitIndices split = split_rows(fm, o);
    AccuracyColumn column;
    column.n_features = model.feature_indices.size();
    if (!split.train.empty()) {
        column.train = evaluate_model(model, select_rows(fm, split.train));
    }
    column.test = evaluate_model(model, select_rows(fm, split.test));
    const fs::path dir = output_dir(o);
    const std::vector<AccuracyColumn> columns{column};
    const std::string rates_table = format_label_table(columns, "Recognition rate per emotion, test data");
    const std::string accuracy_table = format_accuracy_table(columns, "Recognition accuracy");
    const std::string confusion = format_confusion(column.test);
    json j;
    j["format"] = "gsr-emotion-eval";
    j["n_features"] = column.n_features;
    j["feature_indices"] = model.feature_indices;
    j["test_fraction"] = o.test_fraction;
    j["seed"] = o.seed;
    j["train_rows"] = column.train.total();
    j["test_rows"] = column.test.total();
    j["train_accuracy"] = column.train.total() ? json(accuracy(column.train)) : json(nullptr);
    j["test_accuracy"] = accuracy(column.test);
    j["test_label_rates"] = rates_json(column.test);
    j["test_confusion"] = confusion_json(column.test);
    write_text(dir / "label_rates.txt", rates_table);
    write_text(dir / "accuracy.txt", accuracy_table);
    write_text(dir / "confusion.txt", confusion);
    write_text(dir / "eval.json", j.dump(2) + '\n');
    out << confusion << '\n' << accuracy_table;
    return kExitOk;
}

int cmd_cv(const Options &o, std::ostream &out) {
    const PipelineConfig pc = pipeline_config(o);
    const FeatureMatrix fm = load_feature_matrix(require(o.features, "--features"));
    const CvReport cv = kfold_cross_validate(fm, o.folds, pc, o.seed);
    const fs::path path = output_file(o);
    json j = cv_json(cv);
    j["format"] = "gsr-emotion-cv";
    j["config"] = config_json(o, pc);
    write_text(path, j.dump(2) + '\n');
    out << "cv: " << cv.k << " folds, mean " << percent(cv.mean) << "%, std " << percent(cv.std)
        << "%, held-out reads during fit " << cv.heldout_reads_during_fit << " -> " << path.string() << '\n';
    return kExitOk;
}

int cmd_report(const Options &o, std::ostream &out) {
    const PipelineConfig pc = pipeline_config(o);
    const Dataset ds = load_dataset(require(o.manifest, "--manifest"));
    const FeatureMatrix fm = prepare_features(ds, pc);
    if (!(o.test_fraction > 0.0)) {
        throw ValidationError(kModule, "report needs --test-fraction > 0");
    }
    const SplitIndices split = stratified_split(fm.labels(), o.test_fraction, o.seed);
    const FeatureMatrix train = select_rows(fm, split.train);
    const FeatureMatrix test = select_rows(fm, split.test);

    std::vector<PipelineConfig> variants{pc};
    if ((pc.feature_list ? pc.feature_list->size() : pc.k) != kNumFeatures) {
        PipelineConfig all = pc;
        all.feature_list.reset();
        all.k = kNumFeatures;
        variants.push_back(all);
    }

    // per-emotion rates optionally on a few sampled test rows per label
    const FeatureMatrix rate_rows =
        o.rate_sample > 0 ? select_rows(test, sample_per_label(test.labels(), o.rate_sample, o.seed)) : test;

    std::vector<AccuracyColumn> columns;
    std::vector<AccuracyColumn> rate_columns;
    json column_json = json::array();
    std::string confusion;
    for (const auto &variant : variants) {
        const FittedPipeline fitted = fit_pipeline(train, variant);
        AccuracyColumn column;
        column.n_features = fitted.model.feature_indices.size();
        column.train = evaluate_model(fitted.model, train);
        column.test = evaluate_model(fitted.model, test);
        columns.push_back(column);
        AccuracyColumn rates = column;
        rates.test = evaluate_model(fitted.model, rate_rows);
        rate_columns.push_back(rates);

        json c;
        c["n_features"] = column.n_features;
        c["selected_indices"] = fitted.selection.selected_indices;
        c["drop_order"] = fitted.selection.drop_order;
        c["train_accuracy"] = accuracy(column.train);
        c["test_accuracy"] = accuracy(column.test);
        c["test_label_rates"] = rates_json(rates.test);
        c["train_confusion"] = confusion_json(column.train);
        c["test_confusion"] = confusion_json(column.test);
        column_json.push_back(c);
        confusion += std::to_string(column.n_features) + " features, test data\n" + format_confusion(column.test) + '\n';
    }

    json j;
    j["format"] = "gsr-emotion-report";
    j["config"] = config_json(o, pc);
    j["records"] = fm.size();
    j["train_rows"] = train.size();
    j["test_rows"] = test.size();
    j["rate_sample"] = o.rate_sample;
    j["columns"] = column_json;
    if (o.folds >= 2) {
        j["cv"] = cv_json(kfold_cross_validate(fm, o.folds, pc, o.seed));
    }

    const std::string rates_table = format_label_table(
        rate_columns, o.rate_sample > 0 ? "Recognition rate per emotion, " + std::to_string(o.rate_sample) +
                                              " test records per emotion"
                                        : std::string("Recognition rate per emotion, test data"));
    const std::string accuracy_table = format_accuracy_table(columns, "Recognition accuracy");
    const fs::path dir = output_dir(o);
    write_text(dir / "label_rates.txt", rates_table);
    write_text(dir / "accuracy.txt", accuracy_table);
    write_text(dir / "confusion.txt", confusion);
    write_text(dir / "report.json", j.dump(2) + '\n');
    out << rates_table << '\n' << accuracy_table;
    return kExitOk;
}

void add_options(CLI::App &app, Options &o) {
    app.add_option("--seed", o.seed, "Seed for every random choice")->capture_default_str();
    app.add_option("--out", o.out, "Output file or directory");
    app.add_flag("--force", o.force, "Overwrite existing outputs");
    app.add_option("--kernel", o.kernel, "SVM kernel")
        ->check(CLI::IsMember({"linear", "poly", "rbf", "sigmoid"}))
        ->capture_default_str();
    app.add_option("--c", o.c, "Box constraint C")->capture_default_str();
    app.add_option("--eta", o.eta, "Kernel eta (default 1 / number of features)");
    app.add_option("--degree", o.degree, "Polynomial degree")->capture_default_str();
    app.add_option("--r", o.r, "Kernel offset r")->capture_default_str();
    app.add_option("--k", o.k, "Number of features kept by selection")->capture_default_str();
    app.add_option("--features-list", o.features_list, "Comma-separated catalog indices; overrides --k");
    app.add_option("--norm", o.norm, "Normalization placement")
        ->check(CLI::IsMember({"signal", "feature", "both"}))
        ->capture_default_str();
    app.add_option("--test-fraction", o.test_fraction, "Held-out fraction per label; 0 disables the split")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app.add_option("--folds", o.folds, "Cross-validation folds (report: 0 skips CV)")->capture_default_str();
    app.add_option("--manifest", o.manifest, "Dataset manifest");
    app.add_option("--features", o.features, "Feature matrix CSV");
    app.add_option("--model", o.model, "Model JSON");
    app.add_option("--selection", o.selection, "Selection report JSON (train uses its indices)");
    app.add_option("--rate-sample", o.rate_sample, "report: per-emotion rates on this many test records per emotion (0: all)")
        ->capture_default_str();
}

}  // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"GSR emotion recognition pipeline", "gsr"};
    app.set_config("--config", "", "TOML-style key = value file; flags override it");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.fallthrough();
    app.require_subcommand(1, 1);
    Options o;
    add_options(app, o);

    using Command = int (*)(const Options &, std::ostream &);
    const std::vector<std::tuple<const char *, const char *, Command>> commands{
        {"synth", "Generate the synthetic corpus (--out DIR)", cmd_synth},
        {"preprocess", "Denoise and calm-normalize records (--manifest, --out DIR)", cmd_preprocess},
        {"features", "Extract the 30 features (--manifest, --out CSV)", cmd_features},
        {"select", "Select features (--features, --out JSON)", cmd_select},
        {"train", "Train the one-vs-one SVM (--features, --out JSON)", cmd_train},
        {"predict", "Predict labels (--features, --model, --out CSV)", cmd_predict},
        {"eval", "Confusion matrix and accuracy tables (--features, --model, --out DIR)", cmd_eval},
        {"cv", "Stratified k-fold cross-validation (--features, --out JSON)", cmd_cv},
        {"report", "Full pipeline from records to tables (--manifest, --out DIR)", cmd_report},
    };
    std::vector<std::pair<CLI::App *, Command>> subs;
    for (const auto &[name, help, fn] : commands) {
        subs.emplace_back(app.add_subcommand(name, help), fn);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::FileError &e) {
        err << "error: " << kModule << ": " << e.what() << '\n';
        return kExitIo;
    } catch (const CLI::ParseError &e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitValidation;
    }

    try {
        for (const auto &[sub, fn] : subs) {
            if (sub->parsed()) {
                return fn(o, out);
            }
        }
        return kExitValidation;
    } catch (const IoError &e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const fs::filesystem_error &e) {
        err << "error: " << kModule << ": " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    std::vector<const char *> argv{"gsr"};
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace gsr::cli
