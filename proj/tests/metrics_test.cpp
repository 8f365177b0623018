#include "driveml/error.hpp"
#include "driveml/metrics.hpp"
#include "driveml/rng.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace driveml;

namespace {

struct Fixture {
    std::vector<double> scores;
    std::vector<int> labels;
};

// Both classes present; scores on a coarse grid so ties are common.
Fixture random_fixture(Rng& rng, std::size_t max_n = 50) {
    Fixture f;
    const auto n = static_cast<std::size_t>(rng.between(2, static_cast<long long>(max_n)));
    const auto levels = rng.between(1, 8);
    for (std::size_t i = 0; i < n; ++i) {
        f.scores.push_back(static_cast<double>(rng.between(0, levels)) / static_cast<double>(levels));
        f.labels.push_back(static_cast<int>(rng.below(2)));
    }
    f.labels[0] = 0;
    f.labels[1] = 1;
    return f;
}

}  // namespace

TEST(Auc, PerfectAndAllTied) {
    const std::vector<int> y{0, 1, 0, 1, 1};
    const std::vector<double> s{0, 1, 0, 1, 1};
    EXPECT_EQ(metrics::auc(s, y), 1.0);
    EXPECT_EQ(metrics::auc(std::vector<double>(5, 0.3), y), 0.5);
}

TEST(Auc, SingleClassThrows) {
    EXPECT_THROW(metrics::auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), std::exception);
}

TEST(Auc, MatchesPairwiseOracle) {
    Rng rng(11);
    for (int k = 0; k < 1000; ++k) {
        const auto f = random_fixture(rng);
        EXPECT_NEAR(metrics::auc(f.scores, f.labels), fixture::pairwise_auc(f.scores, f.labels), 1e-12);
    }
}

TEST(Auc, ReversalAndMonotoneInvariance) {
    Rng rng(12);
    for (int k = 0; k < 100; ++k) {
        auto f = random_fixture(rng);
        const double a = metrics::auc(f.scores, f.labels);
        std::vector<double> neg, warped;
        for (double s : f.scores) {
            neg.push_back(-s);
            warped.push_back(std::exp(3.0 * s) - 7.0);
        }
        EXPECT_NEAR(a + metrics::auc(neg, f.labels), 1.0, 1e-12);
        EXPECT_EQ(metrics::auc(warped, f.labels), a);
    }
}

TEST(Roc, TrapezoidAreaEqualsAuc) {
    Rng rng(13);
    for (int k = 0; k < 100; ++k) {
        const auto f = random_fixture(rng);
        const auto roc = metrics::roc_curve(f.scores, f.labels);
        EXPECT_NEAR(roc.auc, metrics::auc(f.scores, f.labels), 1e-12);
        ASSERT_GE(roc.points.size(), 2u);
        EXPECT_EQ(roc.points.front().fpr, 0.0);
        EXPECT_EQ(roc.points.front().tpr, 0.0);
        EXPECT_EQ(roc.points.back().fpr, 1.0);
        EXPECT_EQ(roc.points.back().tpr, 1.0);
        for (std::size_t i = 1; i < roc.points.size(); ++i) {
            EXPECT_GE(roc.points[i].fpr, roc.points[i - 1].fpr);
            EXPECT_GE(roc.points[i].tpr, roc.points[i - 1].tpr);
        }
    }
}

TEST(Roc, PerfectPassesThroughTopLeft) {
    const auto roc = metrics::roc_curve(std::vector<double>{0.9, 0.8, 0.2, 0.1}, std::vector<int>{1, 1, 0, 0});
    bool hit = false;
    for (const auto& p : roc.points) hit |= p.fpr == 0.0 && p.tpr == 1.0;
    EXPECT_TRUE(hit);
}

TEST(Roc, SingleDistinctScore) {
    const auto roc = metrics::roc_curve(std::vector<double>(4, 0.5), std::vector<int>{1, 0, 1, 0});
    EXPECT_EQ(roc.points.size(), 2u);
    EXPECT_DOUBLE_EQ(roc.auc, 0.5);
}

TEST(Confusion, HandCountedFixture) {
    // TP=3, FP=1, FN=1, TN=5
    const std::vector<double> s{0.9, 0.8, 0.7, 0.6, 0.4, 0.3, 0.2, 0.1, 0.05, 0.0};
    const std::vector<int> y{1, 1, 1, 0, 1, 0, 0, 0, 0, 0};
    const auto m = metrics::confusion_metrics(s, y);
    EXPECT_EQ(m.tp, 3);
    EXPECT_EQ(m.fp, 1);
    EXPECT_EQ(m.fn, 1);
    EXPECT_EQ(m.tn, 5);
    EXPECT_DOUBLE_EQ(m.precision, 0.75);
    EXPECT_DOUBLE_EQ(m.recall, 0.75);
    EXPECT_DOUBLE_EQ(m.accuracy, 0.8);
    EXPECT_DOUBLE_EQ(m.f1, 0.75);
}

TEST(Confusion, PerfectAndAllNegative) {
    const std::vector<int> y{1, 0, 1, 0};
    const auto perfect = metrics::confusion_metrics(std::vector<double>{1, 0, 1, 0}, y);
    EXPECT_EQ(perfect.accuracy, 1.0);
    EXPECT_EQ(perfect.precision, 1.0);
    EXPECT_EQ(perfect.recall, 1.0);
    EXPECT_EQ(perfect.f1, 1.0);
    const auto none = metrics::confusion_metrics(std::vector<double>(4, 0.1), y);
    EXPECT_EQ(none.precision, 0.0);
    EXPECT_EQ(none.recall, 0.0);
    EXPECT_EQ(none.f1, 0.0);
    EXPECT_TRUE(none.no_predicted_positives);
}

TEST(Lift, PerfectModelTwoGroups) {
    const std::vector<double> s{1, 0, 1, 0, 1, 0};
    const std::vector<int> y{1, 0, 1, 0, 1, 0};
    const auto t = metrics::lift_table(s, y, 2);
    ASSERT_EQ(t.bins.size(), 2u);
    EXPECT_DOUBLE_EQ(t.bins[0].cumulative_lift, 2.0);
    EXPECT_NEAR(t.bins[1].cumulative_lift, 1.0, 1e-12);
}

TEST(Lift, Heart303In50Groups) {
    Rng rng(3);
    std::vector<double> s(303);
    std::vector<int> y(303);
    for (std::size_t i = 0; i < 303; ++i) {
        s[i] = rng.uniform();
        y[i] = static_cast<int>(rng.below(2));
    }
    const auto t = metrics::lift_table(s, y, 50);
    ASSERT_EQ(t.bins.size(), 50u);
    std::size_t total = 0;
    for (const auto& b : t.bins) {
        EXPECT_TRUE(b.n == 6 || b.n == 7) << b.n;
        total += b.n;
    }
    EXPECT_EQ(total, 303u);
    // 303 = 50*6 + 3: the remainder goes to the first three bins.
    EXPECT_EQ(t.bins[0].n, 7u);
    EXPECT_EQ(t.bins[2].n, 7u);
    EXPECT_EQ(t.bins[3].n, 6u);
}

TEST(Lift, InvariantsOnRandomFixtures) {
    Rng rng(4);
    for (int k = 0; k < 200; ++k) {
        const auto f = random_fixture(rng, 400);
        const auto positives = static_cast<std::size_t>(std::accumulate(f.labels.begin(), f.labels.end(), 0));
        for (std::size_t groups : {2u, 10u, 50u}) {
            const auto t = metrics::lift_table(f.scores, f.labels, groups);
            std::size_t lo = SIZE_MAX, hi = 0, n = 0, events = 0, prev = 0;
            for (const auto& b : t.bins) {
                lo = std::min(lo, b.n);
                hi = std::max(hi, b.n);
                n += b.n;
                events += b.events;
                EXPECT_GE(b.cumulative_events, prev);
                prev = b.cumulative_events;
            }
            EXPECT_LE(hi - lo, 1u);
            EXPECT_EQ(n, f.scores.size());
            EXPECT_EQ(events, positives);
            EXPECT_NEAR(t.bins.back().cumulative_lift, 1.0, 1e-9);
            EXPECT_NEAR(t.bins.back().cumulative_capture_rate, 1.0, 1e-12);
            EXPECT_EQ(t.clamped, groups > f.scores.size());
        }
    }
}

TEST(Lift, TiesKeepRowOrder) {
    const std::vector<double> s(4, 0.5);
    const std::vector<int> y{1, 1, 0, 0};
    const auto t = metrics::lift_table(s, y, 2);
    EXPECT_EQ(t.bins[0].events, 2u);
    EXPECT_EQ(t.bins[1].events, 0u);
}
