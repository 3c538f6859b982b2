#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "icc/error.hpp"
#include "icc/label_space.hpp"

using icc::LabelDistribution;
using icc::LabelStrategy;
using icc::LabelTextConfig;
using icc::fixtures::make_store;

namespace {

LabelDistribution dist_of(std::string anchor, std::vector<icc::WeightedLabel> entries) {
    LabelDistribution d;
    d.anchor_label = std::move(anchor);
    d.similar_entries = std::move(entries);
    d.top_m = d.similar_entries.size() + 1;
    return d;
}

LabelTextConfig with(LabelStrategy s) {
    LabelTextConfig cfg;
    cfg.strategy = s;
    return cfg;
}

} // namespace

TEST(Softmax, HandComputedWeights) {
    const std::vector<double> sims{0.30, 0.20, 0.10};
    const auto w = icc::softmax(sims, 1.0);
    ASSERT_EQ(w.size(), 3u);
    EXPECT_NEAR(w[0], 0.36717, 1e-5);
    EXPECT_NEAR(w[1], 0.33223, 1e-5);
    EXPECT_NEAR(w[2], 0.30060, 1e-5);
}

TEST(Softmax, TiesGiveEqualWeights) {
    const std::vector<double> sims{0.4, 0.4};
    const auto w = icc::softmax(sims, 0.05);
    EXPECT_DOUBLE_EQ(w[0], 0.5);
    EXPECT_DOUBLE_EQ(w[1], 0.5);
}

TEST(Softmax, StableForLargeScaledInputs) {
    const std::vector<double> sims{1.0, -1.0, 0.999};
    const auto w = icc::softmax(sims, 1e-4);
    for (double x : w) {
        EXPECT_TRUE(std::isfinite(x));
    }
    EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-12);
    EXPECT_THROW(icc::softmax(sims, 0.0), icc::Error);
    EXPECT_TRUE(icc::softmax(std::vector<double>{}, 1.0).empty());
}

TEST(LabelDistribution, TopOneIsSingleLabel) {
    const auto store = make_store({{"img", {0.2f, 0.9f, 0.3f}}}, {{"bull", {1, 0, 0}}, {"ox", {0, 1, 0}}, {"cow", {0, 0, 1}}});
    const icc::LabelCatalog catalog({"bull", "ox", "cow"}, store);
    const auto d = icc::compute_label_distribution(store, "img", "bull", catalog, 1, 0.05);
    EXPECT_EQ(d.anchor_label, "bull");
    EXPECT_TRUE(d.similar_entries.empty());
    EXPECT_EQ(icc::render_label_text(d, with(LabelStrategy::DD)), "bull");
}

TEST(LabelDistribution, ExcludesGoldAndKeepsMostSimilar) {
    const std::vector<float> img{0.2f, 0.9f, 0.3f, 0.1f};
    const auto store = make_store({{"img", img}},
                                  {{"bull", {1, 0, 0, 0}}, {"ox", {0, 1, 0, 0}}, {"cow", {0, 0, 1, 0}}, {"yak", {0, 0, 0, 1}}});
    const icc::LabelCatalog catalog({"bull", "ox", "cow", "yak"}, store);
    const auto d = icc::compute_label_distribution(store, "img", "bull", catalog, 3, 0.05);
    ASSERT_EQ(d.similar_entries.size(), 2u);
    EXPECT_EQ(d.similar_entries[0].label, "ox");
    EXPECT_EQ(d.similar_entries[1].label, "cow");

    const double norm = std::sqrt(0.04 + 0.81 + 0.09 + 0.01);
    const double e_ox = std::exp(0.9 / norm / 0.05);
    const double e_cow = std::exp(0.3 / norm / 0.05);
    EXPECT_NEAR(d.similar_entries[0].weight, e_ox / (e_ox + e_cow), 1e-6);
    EXPECT_NEAR(d.similar_entries[1].weight, e_cow / (e_ox + e_cow), 1e-6);

    // the gold label never appears among the similar entries, even when closest
    const auto d2 = icc::compute_label_distribution(store, "img", "ox", catalog, 4, 1.0);
    ASSERT_EQ(d2.similar_entries.size(), 3u);
    for (const auto& e : d2.similar_entries) {
        EXPECT_NE(e.label, "ox");
    }
    EXPECT_EQ(d2.similar_entries[0].label, "cow");

    EXPECT_THROW(icc::compute_label_distribution(store, "img", "zebra", catalog, 3, 0.05), icc::Error);
    EXPECT_THROW(icc::compute_label_distribution(store, "nope", "bull", catalog, 3, 0.05), icc::Error);
    EXPECT_THROW(icc::compute_label_distribution(store, "img", "bull", catalog, 0, 0.05), icc::Error);
}

TEST(FormatProbability, HalfUpOnTheDecimalString) {
    EXPECT_EQ(icc::format_probability(1.0, 2), "1.00");
    EXPECT_EQ(icc::format_probability(0.285, 2), "0.29");
    EXPECT_EQ(icc::format_probability(0.615, 2), "0.62");
    EXPECT_EQ(icc::format_probability(0.994999, 2), "0.99");
    EXPECT_EQ(icc::format_probability(0.995, 2), "1.00");
    EXPECT_EQ(icc::format_probability(0.5, 0), "1");
    EXPECT_EQ(icc::format_probability(0.0, 3), "0.000");
    EXPECT_THROW(icc::format_probability(-0.1, 2), icc::Error);
}

TEST(RenderLabelText, StrategyExamples) {
    const auto bull = dist_of("bull", {{"ox", 0.7}, {"yak", 0.3}});
    EXPECT_EQ(icc::render_label_text(bull, with(LabelStrategy::SL)), "bull");
    EXPECT_EQ(icc::render_label_text(bull, with(LabelStrategy::EL)), "bull or ox");
    EXPECT_EQ(icc::render_label_text(bull, with(LabelStrategy::DL)), "bull (1.00), ox (0.70), yak (0.30)");

    const auto football = dist_of("football", {{"football helmet", 0.62}, {"rugby ball", 0.38}});
    EXPECT_EQ(icc::render_label_text(football, with(LabelStrategy::DD)),
              "football. This image most resembles: football (1.00), football helmet (0.62), rugby ball (0.38)");
}

TEST(RenderLabelText, NoSimilarEntriesFallsBackToSingleLabel) {
    const auto d = dist_of("bull", {});
    for (auto s : {LabelStrategy::SL, LabelStrategy::EL, LabelStrategy::DL, LabelStrategy::DD}) {
        EXPECT_EQ(icc::render_label_text(d, with(s)), "bull");
    }
}

TEST(RenderLabelText, TemplateChecks) {
    const auto d = dist_of("bull", {{"ox", 1.0}});
    auto cfg = with(LabelStrategy::EL);
    cfg.el = "{anchor} or {sim1} or {sim2}";
    EXPECT_THROW(icc::render_label_text(d, cfg), icc::Error);
    cfg.el = "{anchor} only";
    try {
        icc::render_label_text(d, cfg);
        FAIL();
    } catch (const icc::Error& e) {
        EXPECT_EQ(e.code(), icc::ErrorCode::TemplateMissingPlaceholder);
    }
    cfg = with(LabelStrategy::DL);
    cfg.dl = "{anchor}|{sim1}:{p1}";
    EXPECT_EQ(icc::render_label_text(d, cfg), "bull|ox:1.00");
    EXPECT_EQ(icc::parse_label_strategy("DD"), LabelStrategy::DD);
    EXPECT_THROW(icc::parse_label_strategy("XX"), icc::Error);
}

TEST(Softmax, PermutationEquivariantExactly) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> sim(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> s(1 + rng() % 24);
        for (auto& x : s) {
            x = sim(rng);
        }
        std::vector<std::size_t> perm(s.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<double> permuted(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            permuted[i] = s[perm[i]];
        }
        const auto w = icc::softmax(s, 0.05);
        const auto wp = icc::softmax(permuted, 0.05);
        for (std::size_t i = 0; i < s.size(); ++i) {
            ASSERT_EQ(wp[i], w[perm[i]]) << "trial " << trial;
        }
    }
}
