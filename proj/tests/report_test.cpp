#include "driveml/report.hpp"
#include "driveml/svg.hpp"

#include "support.hpp"
#include "xml_check.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

using namespace driveml;

namespace {

const std::set<std::string> kHtmlVoid{"meta", "br", "hr", "img", "link", "input"};

tuning::Evaluation fake_eval(ModelId id, double auc) {
    tuning::Evaluation e;
    e.id = id;
    e.fit_time_s = 1.23456;
    e.score_time_s = 0.01;
    e.train_auc = 0.99;
    e.test_auc = auc;
    e.confusion.accuracy = 0.8;
    const std::vector<double> s{0.9, 0.8, 0.3, 0.2, 0.6};
    const std::vector<int> y{1, 1, 0, 0, 0};
    e.roc = metrics::roc_curve(s, y);
    e.lift = metrics::lift_table(s, y, 5);
    return e;
}

report::ReportBundle bundle() {
    report::ReportBundle b;
    b.title = "demo <&>";
    b.dataset = "demo.csv";
    b.summary = report::describe(parse_csv("a,b\n1,x\n2,y\n3,\n"));
    b.selected = {"a"};
    b.rejections = {{"b_y", prep::RejectReason::LowAUC, "", 0.5}};
    int k = 0;
    for (auto id : kAllModels) b.evaluations.push_back(fake_eval(id, 0.8 + 0.01 * k++));
    b.best = 5;
    b.importance = {{"a", 0.7}, {"b_x", 0.3}};
    b.pdps = {{"a", {1, 2, 3}, {0.2, 0.4, 0.5}}};
    b.config = {{"seed", "1"}};
    b.footer = "Generated 2020-01-01T00:00:00Z";
    return b;
}

std::string without_footer(const std::string& html) {
    std::istringstream in(html);
    std::string line, out;
    while (std::getline(in, line)) {
        if (line.rfind("<footer>", 0) != 0) out += line + "\n";
    }
    return out;
}

}  // namespace

TEST(Describe, NumericStats) {
    const auto d = report::describe(parse_csv("v\n1\n2\n3\n"));
    ASSERT_EQ(d.columns.size(), 1u);
    const auto& s = *d.columns[0].numeric;
    EXPECT_DOUBLE_EQ(s.mean, 2.0);
    EXPECT_DOUBLE_EQ(s.median, 2.0);
    EXPECT_DOUBLE_EQ(s.sd, 1.0);
    EXPECT_DOUBLE_EQ(s.q1, 1.5);
}

TEST(Describe, MissingFraction) {
    const auto d = report::describe(parse_csv("v\n1\nNA\n3\nNA\n5\n6\nNA\n8\n9\n10\n"));
    EXPECT_EQ(d.columns[0].missing, 3u);
    EXPECT_DOUBLE_EQ(d.columns[0].missing_pct, 0.3);
}

TEST(Describe, CategoricalTopLevels) {
    const auto d = report::describe(parse_csv("c\nb\na\nb\nc\nb\na\n"));
    EXPECT_EQ(d.columns[0].level_count, 3u);
    EXPECT_EQ(d.columns[0].top_levels.front(), (std::pair<std::string, std::size_t>{"b", 3}));
}

TEST(Describe, Heart) {
    const auto d = report::describe(read_csv(fixture::heart_csv()));
    EXPECT_EQ(d.columns.size(), 14u);
    for (const auto& c : d.columns) EXPECT_EQ(c.n, 303u);
}

TEST(Html, MetricsTableShape) {
    const auto html = report::render_html(bundle());
    EXPECT_NE(html.find("<tr><th>Model</th><th>Fitting time (secs)</th><th>Scoring time (secs)</th>"
                        "<th>Train AUC</th><th>Test AUC</th><th>Accuracy</th><th>Precision</th>"
                        "<th>Recall</th><th>F1_score</th></tr>"),
              std::string::npos);
    const auto table = html.substr(html.find("class=\"metrics\""));
    const auto rows = table.substr(0, table.find("</table>"));
    std::size_t n = 0;
    for (std::size_t i = 0; (i = rows.find("<tr", i)) != std::string::npos; ++i) ++n;
    EXPECT_EQ(n, 7u);  // header + six models
    EXPECT_NE(html.find("<td>1.235</td>"), std::string::npos);
    EXPECT_NE(html.find("demo &lt;&amp;&gt;"), std::string::npos);
}

TEST(Html, WellFormedWithValidSvg) {
    const auto html = report::render_html(bundle());
    const auto doc = fixture::check_markup(html, kHtmlVoid);
    EXPECT_TRUE(doc.ok) << doc.error;
    const auto svgs = fixture::svg_fragments(html);
    EXPECT_GE(svgs.size(), 4u);  // ROC, lift, importance, one PDP
    for (const auto& s : svgs) {
        const auto r = fixture::check_markup(s);
        EXPECT_TRUE(r.ok) << r.error;
        EXPECT_EQ(r.roots, 1u);
    }
}

TEST(Html, EmptyMarSection) {
    auto b = bundle();
    b.mar_enabled = true;
    EXPECT_NE(report::render_html(b).find("no features scanned"), std::string::npos);
    b.mar_enabled = false;
    EXPECT_NE(report::render_html(b).find("no features scanned"), std::string::npos);
}

TEST(Html, DeterministicApartFromFooter) {
    auto a = bundle();
    auto b = bundle();
    b.footer = "Generated 2031-05-05T10:10:10Z";
    EXPECT_EQ(report::render_html(a), report::render_html(bundle()));
    EXPECT_EQ(without_footer(report::render_html(a)), without_footer(report::render_html(b)));
    EXPECT_NE(report::render_html(a), report::render_html(b));
}

TEST(Html, TimingsHidden) {
    auto b = bundle();
    b.timings = false;
    const auto html = report::render_html(b);
    EXPECT_EQ(html.find("1.235"), std::string::npos);
    EXPECT_NE(html.find("<td>n/a</td>"), std::string::npos);
}

TEST(Html, WritesFile) {
    const auto dir = fixture::scratch_dir("report");
    report::write_html(bundle(), dir / "r.html");
    std::ifstream in(dir / "r.html");
    std::stringstream s;
    s << in.rdbuf();
    EXPECT_EQ(s.str(), report::render_html(bundle()));
    EXPECT_THROW(report::write_html(bundle(), dir / "missing" / "r.html"), std::exception);
}

TEST(Svg, NonFiniteInputStaysWellFormed) {
    svg::ChartOptions o;
    o.title = "t";
    const auto s = svg::line_chart({{"s", {0, 1, NAN}, {INFINITY, 1, 2}}}, o);
    const auto r = fixture::check_markup(s);
    EXPECT_TRUE(r.ok) << r.error;
    const auto bars = svg::bar_chart({{"a<b", 1.0}, {"c", NAN}}, o);
    EXPECT_TRUE(fixture::check_markup(bars).ok);
    EXPECT_NE(bars.find("a&lt;b"), std::string::npos);
}
