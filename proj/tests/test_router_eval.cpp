#include "ikgate/error.hpp"
#include "ikgate/router_eval.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ikgate;

namespace {

std::vector<IKScore> scores(const std::vector<double>& ik) {
    std::vector<IKScore> out;
    for (std::size_t i = 0; i < ik.size(); ++i) out.push_back({"q" + std::to_string(i), ik[i], 0, 0, 0});
    return out;
}

std::vector<LabeledQuery> labels(const std::vector<int>& yes) {
    std::vector<LabeledQuery> out;
    for (std::size_t i = 0; i < yes.size(); ++i) out.push_back({"q" + std::to_string(i), yes[i] ? Label::Yes : Label::No});
    return out;
}

std::vector<RoutingInput> inputs(const std::vector<double>& ik, const std::vector<double>& norag,
                                 const std::vector<double>& rag) {
    std::vector<RoutingInput> out;
    for (std::size_t i = 0; i < ik.size(); ++i) out.push_back({"q" + std::to_string(i), ik[i], norag[i], rag[i]});
    return out;
}

}  // namespace

TEST(Route, ThresholdRule) {
    EXPECT_EQ(route(0.9, 0.5), Mode::NoRag);
    EXPECT_EQ(route(0.3, 0.5), Mode::Rag);
    EXPECT_EQ(route(0.5, 0.5), Mode::NoRag);
    auto routed = route_all(inputs({0.2, 0.7}, {0.0, 1.0}, {1.0, 0.0}), Theta::of(0.5));
    EXPECT_EQ(routed[0].mode_chosen, Mode::Rag);
    EXPECT_EQ(routed[0].eval_selected, 1.0);
    EXPECT_EQ(routed[1].mode_chosen, Mode::NoRag);
    EXPECT_EQ(routed[1].eval_selected, 1.0);
    EXPECT_THROW(Theta::of(1.5), RangeError);
}

TEST(IkAccuracy, Examples) {
    EXPECT_EQ(ik_accuracy(scores({0.9, 0.2}), labels({1, 0})), 1.0);
    EXPECT_EQ(ik_accuracy(scores({0.9, 0.1}), labels({1, 1})), 0.5);
    EXPECT_EQ(ik_accuracy(scores({0.5}), labels({1})), 1.0);
    auto l = labels({1, 0});
    l[1].query_id = "other";
    EXPECT_THROW(ik_accuracy(scores({0.9, 0.2}), l), RangeError);
}

TEST(IkAuc, Examples) {
    EXPECT_EQ(ik_auc(scores({0.9, 0.8, 0.2, 0.1}), labels({1, 1, 0, 0})), 1.0);
    EXPECT_EQ(ik_auc(scores({0.5, 0.5}), labels({1, 0})), 0.5);
    EXPECT_EQ(ik_auc(scores({0.8, 0.7, 0.6, 0.5}), labels({1, 0, 1, 0})), 0.75);
    EXPECT_THROW(ik_auc(scores({0.8, 0.7}), labels({1, 1})), UndefinedAucError);
}

TEST(IkAuc, MatchesBruteForceAndIsRankInvariant) {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 2 + rng() % 199;
        std::vector<double> s(n);
        std::vector<int> pos(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = static_cast<double>(rng() % 25) / 24.0;  // coarse grid forces ties
            pos[i] = static_cast<int>(rng() % 2);
        }
        pos[0] = 1;
        pos[1] = 0;
        const double auc = ik_auc(scores(s), labels(pos));
        ASSERT_NEAR(auc, oracle::auc_brute_force(s, pos), 1e-12);
        std::vector<double> warped(n);
        for (std::size_t i = 0; i < n; ++i) warped[i] = std::exp(3.0 * s[i]) - 7.0;
        std::vector<Label> l;
        for (int p : pos) l.push_back(p ? Label::Yes : Label::No);
        ASSERT_NEAR(ik_auc(warped, l), auc, 1e-12);
    }
}

TEST(RoutedQuality, Examples) {
    auto in = inputs({0.9, 0.8, 0.3, 0.1}, {1, 1, 0, 0}, {1, 0, 1, 1});
    auto q = routed_quality(in, Theta::of(0.5));
    EXPECT_EQ(q.mean_quality, 1.0);
    EXPECT_EQ(q.retrieval_fraction, 0.5);
    EXPECT_EQ(routed_quality(in, Theta::never()).mean_quality, 0.5);
    EXPECT_EQ(routed_quality(in, Theta::never()).retrieval_fraction, 0.0);
    EXPECT_EQ(routed_quality(in, Theta::always()).mean_quality, 0.75);
    EXPECT_EQ(routed_quality(in, Theta::always()).retrieval_fraction, 1.0);
}

TEST(RoutedQuality, EqualsAccuracyWhenEvalsMirrorLabels) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.001, 0.999);
    std::vector<double> ik(300), norag(300), rag(300);
    std::vector<int> yes(300);
    for (int i = 0; i < 300; ++i) {
        ik[i] = u(rng);
        yes[i] = static_cast<int>(rng() % 2);
        norag[i] = yes[i];
        rag[i] = 1 - yes[i];
    }
    EXPECT_DOUBLE_EQ(routed_quality(inputs(ik, norag, rag), Theta::of(0.5)).mean_quality,
                     ik_accuracy(scores(ik), labels(yes)));
}

TEST(ThresholdSweep, RowsSentinelsAndEndpoints) {
    auto in = inputs({0.9, 0.8, 0.3, 0.1}, {1, 1, 0, 0}, {1, 0, 1, 1});
    auto r = threshold_sweep(in, {0.5, 0.0, 0.5, 1.0});
    ASSERT_EQ(r.rows.size(), 5u);
    EXPECT_EQ(r.rows.front().theta, Theta::never());
    EXPECT_EQ(r.rows[1].theta, Theta::of(0.0));
    EXPECT_EQ(r.rows.back().theta, Theta::always());
    EXPECT_EQ(r.norag_quality, 0.5);
    EXPECT_EQ(r.rag_quality, 0.75);
    EXPECT_EQ(r.best.theta, Theta::of(0.5));
    EXPECT_EQ(default_grid().size(), 21u);
}

TEST(ThresholdSweep, TieGoesToLeastRetrieval) {
    auto same = inputs({0.9, 0.4, 0.2}, {1, 0, 1}, {1, 0, 1});
    auto r = threshold_sweep(same, default_grid());
    EXPECT_EQ(r.best.theta, Theta::never());
    EXPECT_EQ(r.best.retrieval_fraction, 0.0);

    // Only the sentinel retrieves for a score of exactly 1.
    auto rag_wins = inputs({1.0, 0.4, 0.2}, {0, 0, 0}, {1, 1, 1});
    EXPECT_EQ(threshold_sweep(rag_wins, default_grid()).best.theta, Theta::always());
    // Otherwise the smallest grid value that retrieves everything ties with it and wins.
    auto interior = threshold_sweep(inputs({0.9, 0.4, 0.2}, {0, 0, 0}, {1, 1, 1}), default_grid());
    EXPECT_EQ(interior.best.retrieval_fraction, 1.0);
    EXPECT_EQ(interior.best.theta, Theta::of(0.95));
}

TEST(ThresholdSweep, ReferenceOperatingPoints) {
    // 100 queries: 36 below 0.5, 14 in [0.5, 0.8), 50 at or above 0.8.
    std::vector<double> ik, norag, rag;
    auto add = [&](std::size_t n, double score, std::size_t norag_ok, std::size_t rag_ok) {
        for (std::size_t i = 0; i < n; ++i) {
            ik.push_back(score);
            norag.push_back(i < norag_ok ? 1.0 : 0.0);
            rag.push_back(i < rag_ok ? 1.0 : 0.0);
        }
    };
    add(36, 0.3, 10, 22);
    add(14, 0.6, 10, 12);
    add(50, 0.9, 45, 42);
    auto r = threshold_sweep(inputs(ik, norag, rag), {0.5, 0.8});
    ASSERT_EQ(r.rows.size(), 4u);
    EXPECT_NEAR(r.rows[1].mean_quality, 0.77, 1e-12);
    EXPECT_NEAR(r.rows[1].retrieval_fraction, 0.36, 1e-12);
    EXPECT_NEAR(r.rows[2].mean_quality, 0.79, 1e-12);
    EXPECT_NEAR(r.rows[2].retrieval_fraction, 0.50, 1e-12);
    EXPECT_EQ(r.best.theta, Theta::of(0.8));
}

TEST(ThresholdSweep, SameOperatingPointAtTheSmallerThreshold) {
    // No score in [0.6, 0.8): both thresholds route identically and the smaller one wins.
    std::vector<double> ik, norag, rag;
    auto add = [&](std::size_t n, double score, std::size_t norag_ok, std::size_t rag_ok) {
        for (std::size_t i = 0; i < n; ++i) {
            ik.push_back(score);
            norag.push_back(i < norag_ok ? 1.0 : 0.0);
            rag.push_back(i < rag_ok ? 1.0 : 0.0);
        }
    };
    add(36, 0.3, 10, 22);
    add(14, 0.55, 10, 12);
    add(50, 0.9, 45, 42);
    auto r = threshold_sweep(inputs(ik, norag, rag), {0.5, 0.6, 0.8});
    ASSERT_EQ(r.rows.size(), 5u);
    EXPECT_NEAR(r.rows[1].mean_quality, 0.77, 1e-12);
    EXPECT_NEAR(r.rows[1].retrieval_fraction, 0.36, 1e-12);
    EXPECT_EQ(r.rows[2].mean_quality, r.rows[3].mean_quality);
    EXPECT_NEAR(r.best.mean_quality, 0.79, 1e-12);
    EXPECT_NEAR(r.best.retrieval_fraction, 0.50, 1e-12);
    EXPECT_EQ(r.best.theta, Theta::of(0.6));
}

TEST(ThresholdSweep, RandomizedIdentities) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + rng() % 300;
        std::vector<double> ik(n), norag(n), rag(n);
        for (std::size_t i = 0; i < n; ++i) {
            ik[i] = std::round(u(rng) * 40) / 40;
            norag[i] = static_cast<double>(rng() % 2);
            rag[i] = u(rng);
        }
        auto grid = default_grid();
        auto r = threshold_sweep(inputs(ik, norag, rag), grid);
        ASSERT_EQ(r.rows.front().mean_quality, oracle::mean(norag));
        ASSERT_EQ(r.rows.back().mean_quality, oracle::mean(rag));
        for (std::size_t k = 1; k + 1 < r.rows.size(); ++k) {
            auto o = oracle::routed_mean(ik, norag, rag, r.rows[k].theta.value());
            ASSERT_EQ(r.rows[k].mean_quality, o.quality);
            ASSERT_EQ(r.rows[k].retrieval_fraction, o.retrieval);
        }
        for (std::size_t k = 1; k < r.rows.size(); ++k)
            ASSERT_LE(r.rows[k - 1].retrieval_fraction, r.rows[k].retrieval_fraction);
        ASSERT_GE(r.best.mean_quality, r.norag_quality);
        ASSERT_GE(r.best.mean_quality, r.rag_quality);
    }
}

TEST(Characterize, Patterns) {
    EXPECT_EQ(characterize(std::vector<double>(40, 0.9)).pattern, HistogramPattern::HighKnowledge);
    EXPECT_EQ(characterize(std::vector<double>(40, 0.05)).pattern, HistogramPattern::LowKnowledge);
    std::vector<double> u(20, 0.05);
    u.insert(u.end(), 20, 0.95);
    auto h = characterize(u);
    EXPECT_EQ(h.pattern, HistogramPattern::UShaped);
    EXPECT_EQ(h.bins[1], 20u);
    EXPECT_EQ(h.bins[19], 20u);
    EXPECT_EQ(characterize(std::vector<double>(40, 0.5)).pattern, HistogramPattern::Flat);
    EXPECT_THROW(characterize(std::vector<double>(19, 0.5)), RangeError);
}

TEST(Characterize, BinsAndMassesAreConsistent) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(1000);
    for (auto& x : v) x = u(rng);
    v[0] = 1.0;
    v[1] = 0.0;
    auto h = characterize(v);
    std::size_t total = 0;
    for (auto b : h.bins) total += b;
    EXPECT_EQ(total, v.size());
    std::size_t low = 0, high = 0;
    for (double x : v) {
        low += x < 0.2;
        high += x > 0.8;
    }
    EXPECT_EQ(h.low_mass, low / 1000.0);
    EXPECT_EQ(h.high_mass, high / 1000.0);
}
