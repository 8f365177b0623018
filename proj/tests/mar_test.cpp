#include "driveml/mar.hpp"

#include "driveml/error.hpp"
#include "driveml/stats.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace driveml;

namespace {

enum class Pattern { AboveMedian, Coin };

// x1 has its missingness driven by `pattern`; x2, x3 are observed noise-free inputs.
std::pair<Table, Schema> mar_fixture(std::size_t n, std::uint64_t seed, Pattern pattern) {
    Rng rng(seed);
    std::vector<double> x1(n), x2(n), x3(n), y(n);
    std::vector<std::uint8_t> miss(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        x1[i] = rng.uniform();
        x2[i] = rng.uniform();
        x3[i] = rng.uniform();
        y[i] = rng.below(2);
    }
    const double med = stats::median(x2);
    for (std::size_t i = 0; i < n; ++i) {
        miss[i] = pattern == Pattern::AboveMedian ? x2[i] > med : rng.below(2) == 1;
    }
    Table t("mar");
    t.add_column(Column::numeric("x1", x1, miss));
    t.add_column(Column::numeric("x2", x2));
    t.add_column(Column::numeric("x3", x3));
    t.add_column(Column::numeric("y", y));
    return {t, infer_schema(t, {"y", {}, {}, {}})};
}

}  // namespace

TEST(Indicator, FollowsMask) {
    Table t;
    t.add_column(Column::numeric("a", {1, 0, 3}, {0, 1, 0}));
    t.add_column(Column::numeric("b", {1, 2, 3}));
    t.add_column(Column::numeric("c", {1, 2, 3}, {1, 1, 1}));
    const auto a = mar::mar_indicator(t, 0);
    EXPECT_EQ(a.name, "a_mar");
    EXPECT_EQ(a.values, (std::vector<double>{0, 1, 0}));
    EXPECT_EQ(mar::mar_indicator(t, 1).values, (std::vector<double>{0, 0, 0}));
    EXPECT_EQ(mar::mar_indicator(t, 2).values, (std::vector<double>{1, 1, 1}));
}

TEST(Indicator, IndependentOfValues) {
    Table t;
    t.add_column(Column::numeric("a", {5, 0, 9, 1}, {0, 1, 0, 1}));
    Table u;
    u.add_column(Column::numeric("a", {-2, 7, 0, 3}, {0, 1, 0, 1}));
    EXPECT_EQ(mar::mar_indicator(t, 0).values, mar::mar_indicator(u, 0).values);
}

TEST(Scan, PredictableMissingnessRetained) {
    auto [t, s] = mar_fixture(2000, 1, Pattern::AboveMedian);
    mar::MarConfig cfg;
    const auto r = mar::mar_scan(t, s, cfg);
    ASSERT_EQ(r.report.findings.size(), 1u);
    EXPECT_EQ(r.report.findings[0].verdict, mar::Verdict::Retained);
    EXPECT_GT(*r.report.findings[0].aux_auc, 0.95);
    EXPECT_EQ(r.report.added_columns, (std::vector<std::string>{"x1_mar"}));
    EXPECT_EQ(r.augmented.n_cols(), t.n_cols() + 1);
    // Existing columns are untouched.
    for (std::size_t j = 0; j < t.n_cols(); ++j) EXPECT_EQ(r.augmented.column(j).values, t.column(j).values);
}

TEST(Scan, CoinMissingnessDropped) {
    auto [t, s] = mar_fixture(2000, 2, Pattern::Coin);
    const auto r = mar::mar_scan(t, s, {});
    ASSERT_EQ(r.report.findings.size(), 1u);
    EXPECT_EQ(r.report.findings[0].verdict, mar::Verdict::Dropped);
    EXPECT_LT(*r.report.findings[0].aux_auc, 0.6);
    EXPECT_TRUE(r.report.added_columns.empty());
}

TEST(Scan, NoMissingEmptyReport) {
    const auto t = parse_csv("a,b,y\n1,2,0\n2,3,1\n3,1,0\n");
    const auto r = mar::mar_scan(t, infer_schema(t, {"y", {}, {}, {}}), {});
    EXPECT_TRUE(r.report.empty());
    EXPECT_TRUE(r.augmented == t);
}

TEST(Scan, FloorAndFullyMissingAreSkipped) {
    Table t;
    std::vector<double> v(100), y(100);
    std::vector<std::uint8_t> few(100, 0), all(100, 1);
    for (std::size_t i = 0; i < 100; ++i) {
        v[i] = static_cast<double>(i);
        y[i] = i % 2;
    }
    for (int i = 0; i < 5; ++i) few[static_cast<std::size_t>(i)] = 1;
    t.add_column(Column::numeric("few", v, few));
    t.add_column(Column::numeric("all", v, all));
    t.add_column(Column::numeric("v", v));
    t.add_column(Column::numeric("y", y));
    const auto r = mar::mar_scan(t, infer_schema(t, {"y", {}, {}, {}}), {});
    ASSERT_EQ(r.report.findings.size(), 2u);
    for (const auto& f : r.report.findings) {
        EXPECT_EQ(f.verdict, mar::Verdict::Skipped) << f.feature;
        EXPECT_FALSE(f.aux_auc);
        EXPECT_FALSE(f.note.empty());
    }
}

TEST(Scan, WorkerCountDoesNotChangeResult) {
    auto t = mar_fixture(1000, 3, Pattern::AboveMedian).first;
    t.add_column(Column::numeric("x4", std::vector<double>(1000, 1.0), t.column("x1").missing));
    const auto s = infer_schema(t, {"y", {}, {}, {}});
    mar::MarConfig one, four;
    four.workers = 4;
    const auto a = mar::mar_scan(t, s, one);
    const auto b = mar::mar_scan(t, s, four);
    ASSERT_EQ(a.report.findings.size(), b.report.findings.size());
    for (std::size_t k = 0; k < a.report.findings.size(); ++k) {
        EXPECT_EQ(a.report.findings[k].feature, b.report.findings[k].feature);
        EXPECT_EQ(a.report.findings[k].aux_auc, b.report.findings[k].aux_auc);
    }
}

TEST(Config, ThresholdRange) {
    mar::MarConfig c;
    c.auc_threshold = 0.5;
    EXPECT_THROW(c.validate(), ConfigError);
    c.auc_threshold = 1.0;
    EXPECT_THROW(c.validate(), ConfigError);
}
