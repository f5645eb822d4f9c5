#include "doctest.h"
#include "support.hpp"
#include "oracles.hpp"

#include "gsr/error.hpp"
#include "gsr/pipeline.hpp"
#include "gsr/selection.hpp"
#include "gsr/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace gsr;

namespace {

using gsr_oracle::mean_abs_rho;
using gsr_oracle::min_eigenvalue;
using gsr_oracle::naive_covariance;

FeatureMatrix default_features() {
    return prepare_features(generate_dataset(SynthConfig{}), PipelineConfig{});
}

}  // namespace

TEST_CASE("covariance examples") {
    CHECK(covariance(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}) == doctest::Approx(2.0 / 3.0));
    CHECK(covariance(std::vector<double>{1, 2, 3}, std::vector<double>{4, 4, 4}) == 0.0);
    CHECK(covariance(std::vector<double>{1, 2}, std::vector<double>{2, 1}) == doctest::Approx(-0.25));
    CHECK_THROWS_AS((void)covariance(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), ValidationError);
    CHECK_THROWS_AS((void)covariance(std::vector<double>{1}, std::vector<double>{1}), ValidationError);
}

TEST_CASE("correlation examples") {
    const auto x = gsr_test::random_signal(30, 1);
    std::vector<double> neg(x.size()), aff(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        neg[i] = -x[i];
        aff[i] = 3.0 * x[i] + 7.0;
    }
    CHECK(correlation(x, x) == doctest::Approx(1.0));
    CHECK(correlation(x, neg) == doctest::Approx(-1.0));
    CHECK(correlation(x, aff) == doctest::Approx(1.0));
    CHECK(std::abs(correlation(x, x)) <= 1.0);
    CHECK_THROWS_AS((void)correlation(x, std::vector<double>(30, 2.0)), ValidationError);
}

TEST_CASE("covariance symmetry, bilinearity and affine invariance of correlation") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto x = gsr_test::random_signal(57, 2 * seed + 1);
        const auto y = gsr_test::random_signal(57, 2 * seed + 2);
        CHECK(covariance(x, y) == covariance(y, x));
        const double a = 1.7, b = -3.0, c = -0.4, d = 11.0;
        std::vector<double> u(x.size()), v(y.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            u[i] = a * x[i] + b;
            v[i] = c * y[i] + d;
        }
        CHECK(covariance(u, v) == doctest::Approx(a * c * covariance(x, y)).epsilon(1e-9));
        std::vector<double> w(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) w[i] = 0.25 * x[i] + 100.0;
        CHECK(std::abs(correlation(w, y) - correlation(x, y)) <= 1e-10);
    }
}

TEST_CASE("covariance matrix against the double loop") {
    const FeatureMatrix m = gsr_test::random_matrix(257, 42);
    const CovarianceMatrix cov = covariance_matrix(m, MatrixKind::covariance);
    REQUIRE(cov.dim == 30);
    for (std::size_t i = 0; i < 30; ++i) {
        for (std::size_t j = 0; j < 30; ++j) {
            CHECK(std::abs(cov.at(i, j) - naive_covariance(m.column(i), m.column(j))) <= 1e-10);
            CHECK(cov.at(i, j) == cov.at(j, i));
        }
    }
    CHECK(min_eigenvalue(cov) >= -1e-8);

    const CovarianceMatrix rho = covariance_matrix(m, MatrixKind::correlation);
    for (std::size_t i = 0; i < 30; ++i) {
        CHECK(rho.at(i, i) == doctest::Approx(1.0));
        for (std::size_t j = 0; j < 30; ++j) {
            CHECK(std::abs(rho.at(i, j)) <= 1.0 + 1e-12);
        }
    }
    CHECK_THROWS_AS((void)covariance_matrix(gsr_test::random_matrix(1, 1), MatrixKind::covariance), ValidationError);
}

TEST_CASE("identical columns correlate perfectly") {
    FeatureMatrix m = gsr_test::random_matrix(20, 3);
    for (auto &r : m.rows) r.values[1] = r.values[0];
    const auto rho = covariance_matrix(m, MatrixKind::correlation);
    CHECK(rho.at(0, 0) == doctest::Approx(1.0));
    CHECK(rho.at(0, 1) == doctest::Approx(1.0));
    CHECK(rho.at(1, 0) == doctest::Approx(1.0));
    CHECK(rho.at(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("independent columns are nearly uncorrelated") {
    const auto rho = covariance_matrix(gsr_test::random_matrix(10000, 8), MatrixKind::correlation);
    for (std::size_t i = 0; i < 30; ++i) {
        for (std::size_t j = 0; j < 30; ++j) {
            if (i != j) CHECK(std::abs(rho.at(i, j)) < 0.05);
        }
    }
}

TEST_CASE("per-label covariance") {
    SUBCASE("single label equals the pooled matrix") {
        FeatureMatrix m = gsr_test::random_matrix(30, 4);
        for (auto &r : m.rows) r.label = EmotionLabel::Fear;
        const auto per = per_label_covariance(m);
        REQUIRE(per.size() == 1);
        CHECK(per.at(EmotionLabel::Fear).values == covariance_matrix(m, MatrixKind::covariance).values);
    }
    SUBCASE("locality") {
        FeatureMatrix m = gsr_test::random_matrix(40, 5);
        const auto before = per_label_covariance(m);
        for (auto &r : m.rows) {
            if (r.label == EmotionLabel::Grief) r.values[3] *= 10.0;
        }
        const auto after = per_label_covariance(m);
        for (EmotionLabel l : kAllLabels) {
            if (l == EmotionLabel::Grief) {
                CHECK(after.at(l).values != before.at(l).values);
            } else {
                CHECK(after.at(l).values == before.at(l).values);
            }
        }
    }
    SUBCASE("default corpus gives five PSD matrices") {
        const auto per = per_label_covariance(default_features());
        REQUIRE(per.size() == 5);
        for (const auto &[label, cov] : per) {
            // relative slack: raw feature scales span many decades
            double scale = 0.0;
            for (std::size_t i = 0; i < cov.dim; ++i) scale = std::max(scale, cov.at(i, i));
            CHECK(min_eigenvalue(cov) >= -1e-8 * std::max(1.0, scale));
        }
    }
    SUBCASE("a label with one row") {
        FeatureMatrix m = gsr_test::random_matrix(6, 1);
        CHECK_THROWS_AS((void)per_label_covariance(m), ValidationError);
    }
}

TEST_CASE("duplicate column is dropped, larger index loses the tie") {
    FeatureMatrix m = gsr_test::random_matrix(50, 6);
    for (auto &r : m.rows) {
        for (std::size_t j = 3; j < 30; ++j) r.values[j] = 1.0;
        r.values[1] = r.values[0];
    }
    const SelectionResult s = select_features(m, 2);
    CHECK(s.selected_indices == std::vector<std::size_t>{1, 3});
    CHECK(s.k == 2);
    CHECK(s.warnings.size() == 27);
    CHECK(s.drop_order.back() == 2);
}

TEST_CASE("k = 30 keeps everything") {
    const SelectionResult s = select_features(gsr_test::random_matrix(40, 2), 30);
    REQUIRE(s.selected_indices.size() == 30);
    for (std::size_t i = 0; i < 30; ++i) CHECK(s.selected_indices[i] == i + 1);
    CHECK(s.drop_order.empty());
}

TEST_CASE("selection keeps the greedy rule") {
    // replay the elimination on the reported matrix
    const FeatureMatrix m = gsr_test::random_matrix(60, 17);
    const SelectionResult s = select_features(m, 10);
    std::vector<std::size_t> remaining(30);
    for (std::size_t i = 0; i < 30; ++i) remaining[i] = i;
    const auto mean_to_rest = [&](std::size_t f) {
        double acc = 0.0;
        for (std::size_t g : remaining) if (g != f) acc += std::abs(s.correlation.at(f, g));
        return acc / static_cast<double>(remaining.size() - 1);
    };
    std::vector<std::size_t> drops;
    while (remaining.size() > 10) {
        std::size_t bi = 0, bj = 0;
        double best = -1.0;
        for (std::size_t a = 0; a < remaining.size(); ++a) {
            for (std::size_t b = a + 1; b < remaining.size(); ++b) {
                const double v = std::abs(s.correlation.at(remaining[a], remaining[b]));
                if (v > best + 1e-12) {
                    best = v;
                    bi = remaining[a];
                    bj = remaining[b];
                }
            }
        }
        const double si = mean_to_rest(bi), sj = mean_to_rest(bj);
        const std::size_t drop = (si > sj + 1e-12) ? bi : bj;
        drops.push_back(drop + 1);
        remaining.erase(std::find(remaining.begin(), remaining.end(), drop));
    }
    CHECK(s.drop_order == drops);
    std::vector<std::size_t> kept;
    for (std::size_t r : remaining) kept.push_back(r + 1);
    CHECK(s.selected_indices == kept);
}

TEST_CASE("selection on the default corpus lowers mean correlation") {
    const FeatureMatrix m = default_features();
    const SelectionResult s = select_features(m, 15);
    REQUIRE(s.selected_indices.size() == 15);
    CHECK(std::is_sorted(s.selected_indices.begin(), s.selected_indices.end()));
    std::vector<std::size_t> all(30);
    for (std::size_t i = 0; i < 30; ++i) all[i] = i + 1;
    CHECK(mean_abs_rho(s.correlation, s.selected_indices) < mean_abs_rho(s.correlation, all));
    CHECK(s.scores.size() == 30);
    CHECK(s.per_label_matrices.size() == 5);

    SUBCASE("row order") {
        FeatureMatrix shuffled = m;
        std::mt19937_64 rng(5);
        shuffle(shuffled.rows, rng);
        CHECK(select_features(shuffled, 15).selected_indices == s.selected_indices);
    }
    SUBCASE("positive column rescaling") {
        FeatureMatrix scaled = m;
        for (auto &r : scaled.rows) {
            for (std::size_t j = 0; j < 30; ++j) r.values[j] *= std::pow(10.0, static_cast<double>(j % 7) - 3.0);
        }
        CHECK(select_features(scaled, 15).selected_indices == s.selected_indices);
    }
}

TEST_CASE("selection errors and explicit lists") {
    const FeatureMatrix m = gsr_test::random_matrix(20, 9);
    CHECK_THROWS_AS((void)select_features(m, 1), ValidationError);
    CHECK_THROWS_AS((void)select_features(m, 31), ValidationError);
    CHECK_THROWS_AS((void)select_features(gsr_test::random_matrix(1, 1), 5), ValidationError);
    FeatureMatrix mostly_constant = m;
    for (auto &r : mostly_constant.rows) {
        for (std::size_t j = 5; j < 30; ++j) r.values[j] = 0.0;
    }
    CHECK_THROWS_AS((void)select_features(mostly_constant, 6), ValidationError);

    const SelectionResult e = select_explicit(m, {28, 3, 5});
    CHECK(e.selected_indices == std::vector<std::size_t>{3, 5, 28});
    CHECK(e.explicit_list);
    CHECK_THROWS_AS((void)select_explicit(m, {0, 3}), ValidationError);
    CHECK_THROWS_AS((void)select_explicit(m, {3, 3}), ValidationError);
    CHECK_THROWS_AS((void)select_explicit(m, {31}), ValidationError);
}

TEST_CASE("selection report round trip") {
    const auto dir = gsr_test::fresh_dir("selection_io");
    const SelectionResult s = select_features(gsr_test::random_matrix(40, 12), 15);
    save_selection_report(s, dir / "sel.json");
    const SelectionResult back = load_selection_report(dir / "sel.json");
    CHECK(back.selected_indices == s.selected_indices);
    CHECK(back.drop_order == s.drop_order);
    CHECK(back.scores == s.scores);
    CHECK(back.correlation.values == s.correlation.values);
    CHECK(back.k == 15);
}
