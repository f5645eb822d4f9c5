#include "doctest.h"
#include "support.hpp"

#include "gsr/error.hpp"
#include "gsr/pipeline.hpp"
#include "gsr/synth.hpp"

using namespace gsr;

TEST_CASE("pipeline config") {
    PipelineConfig pc;
    CHECK(pc.k == 15);
    CHECK(pc.c == 1.0);
    CHECK(pc.kernel.kind == KernelKind::rbf);
    CHECK(pc.wavelet_levels == 5);
    CHECK(pc.train_config(15).kernel.eta == doctest::Approx(1.0 / 15.0));
    pc.eta = 0.5;
    CHECK(pc.train_config(15).kernel.eta == 0.5);
    CHECK_NOTHROW(pc.validate());
    pc.k = 1;
    CHECK_THROWS_AS(pc.validate(), ValidationError);
    pc = PipelineConfig{};
    pc.wavelet_levels = 4;
    CHECK_THROWS_AS(pc.validate(), ValidationError);
    pc = PipelineConfig{};
    pc.c = -1.0;
    CHECK_THROWS_AS(pc.validate(), ValidationError);
    CHECK(parse_normalization_mode("both") == NormalizationMode::both);
    CHECK(parse_normalization_mode("signal") == NormalizationMode::signal);
    CHECK_THROWS_AS((void)parse_normalization_mode("none"), ValidationError);
}

TEST_CASE("feature-level scaling is fitted on training rows only") {
    SynthConfig sc;
    sc.per_label_counts = {12, 12, 12, 12, 12};
    const Dataset ds = generate_dataset(sc);
    PipelineConfig pc;
    pc.normalization = NormalizationMode::feature;
    const FeatureMatrix fm = prepare_features(ds, pc);
    const auto split = stratified_split(fm.labels(), 0.3, 3);
    const FeatureMatrix train = select_rows(fm, split.train);
    const auto fit = fit_pipeline(train, pc);
    REQUIRE(fit.model.normalization.has_value());
    const auto scaling = fit_feature_normalization(train);
    for (std::size_t k = 0; k < fit.model.feature_indices.size(); ++k) {
        const auto &s = (*fit.model.normalization)[k];
        CHECK(s.min == scaling[fit.model.feature_indices[k] - 1].min);
        CHECK(s.max == scaling[fit.model.feature_indices[k] - 1].max);
    }
    pc.normalization = NormalizationMode::signal;
    CHECK_FALSE(fit_pipeline(train, pc).model.normalization.has_value());
}

TEST_CASE("explicit feature list") {
    SynthConfig sc;
    sc.per_label_counts = {8, 8, 8, 8, 8};
    PipelineConfig pc;
    pc.feature_list = std::vector<std::size_t>{3, 5, 7, 8, 9, 10, 11, 15, 16, 17, 18, 19, 23, 24, 28};
    const FeatureMatrix fm = prepare_features(generate_dataset(sc), pc);
    const auto fit = fit_pipeline(fm, pc);
    CHECK(fit.selection.explicit_list);
    CHECK(fit.model.feature_indices == *pc.feature_list);
    CHECK(fit.model.config.kernel.eta == doctest::Approx(1.0 / 15.0));
}

TEST_CASE("held-out accuracy on the default corpus") {
    const Dataset ds = generate_dataset(SynthConfig{});
    const PipelineConfig pc;
    const FeatureMatrix fm = prepare_features(ds, pc);
    const auto split = stratified_split(fm.labels(), 0.3, 42);
    const FeatureMatrix train = select_rows(fm, split.train);
    const FeatureMatrix test = select_rows(fm, split.test);
    const auto fit = fit_pipeline(train, pc);
    const ConfusionMatrix cm = evaluate_model(fit.model, test);
    CHECK(cm.total() == test.size());
    CHECK(accuracy(cm) >= 0.6);
    const auto predicted = predict_all(fit.model, test);
    CHECK(predicted.size() == test.size());
}
