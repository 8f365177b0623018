#include "driveml/report.hpp"

#include "driveml/error.hpp"
#include "driveml/stats.hpp"
#include "driveml/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>

namespace driveml::report {

DescriptiveSummary describe(const Table& t) {
    DescriptiveSummary out;
    out.rows = t.n_rows();
    for (const auto& c : t.columns()) {
        ColumnSummary s;
        s.name = c.name;
        s.kind = c.kind;
        s.n = c.size();
        s.missing = c.missing_count();
        s.missing_pct = s.n == 0 ? 0.0 : static_cast<double>(s.missing) / static_cast<double>(s.n);
        if (c.kind == ColumnKind::Numeric || c.kind == ColumnKind::Date) {
            std::vector<double> v;
            for (std::size_t i = 0; i < c.size(); ++i) {
                if (!c.is_missing(i)) v.push_back(c.values[i]);
            }
            if (!v.empty()) {
                std::sort(v.begin(), v.end());
                s.numeric = NumericSummary{stats::mean(v),
                                           stats::sd(v),
                                           v.front(),
                                           stats::quantile_sorted(v, 0.25),
                                           stats::quantile_sorted(v, 0.5),
                                           stats::quantile_sorted(v, 0.75),
                                           v.back()};
            }
        } else {
            std::map<std::string, std::size_t> counts;
            for (std::size_t i = 0; i < c.size(); ++i) {
                if (!c.is_missing(i)) ++counts[c.text(i)];
            }
            s.level_count = counts.size();
            std::vector<std::pair<std::string, std::size_t>> levels(counts.begin(), counts.end());
            std::stable_sort(levels.begin(), levels.end(),
                             [](const auto& a, const auto& b) { return a.second > b.second; });
            if (levels.size() > 5) levels.resize(5);
            s.top_levels = std::move(levels);
        }
        out.columns.push_back(std::move(s));
    }
    return out;
}

namespace {

std::string fixed3(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string esc(std::string_view s) { return svg::escape(s); }

std::string stat_cell(const ColumnSummary& s, double v) {
    return s.kind == ColumnKind::Date ? format_date(static_cast<int>(v)) : fixed3(v);
}

void descriptives(std::string& h, const DescriptiveSummary& d) {
    h += "<h2>Data summary</h2>\n<p>" + std::to_string(d.rows) + " rows, " + std::to_string(d.columns.size()) +
         " columns.</p>\n";
    h += "<table>\n<tr><th>Column</th><th>Kind</th><th>N</th><th>Missing</th><th>Missing %</th><th>Mean</th>"
         "<th>SD</th><th>Min</th><th>Q1</th><th>Median</th><th>Q3</th><th>Max</th><th>Levels</th><th>Top levels</th></tr>\n";
    for (const auto& s : d.columns) {
        h += "<tr><td>" + esc(s.name) + "</td><td>" + std::string(to_string(s.kind)) + "</td><td>" +
             std::to_string(s.n) + "</td><td>" + std::to_string(s.missing) + "</td><td>" +
             fixed3(100.0 * s.missing_pct) + "</td>";
        if (s.numeric) {
            const auto& q = *s.numeric;
            h += "<td>" + stat_cell(s, q.mean) + "</td><td>" + fixed3(q.sd) + "</td><td>" + stat_cell(s, q.min) +
                 "</td><td>" + stat_cell(s, q.q1) + "</td><td>" + stat_cell(s, q.median) + "</td><td>" +
                 stat_cell(s, q.q3) + "</td><td>" + stat_cell(s, q.max) + "</td><td></td><td></td>";
        } else {
            std::string top;
            for (const auto& [level, n] : s.top_levels) {
                if (!top.empty()) top += ", ";
                top += esc(level) + " (" + std::to_string(n) + ")";
            }
            h += "<td></td><td></td><td></td><td></td><td></td><td></td><td></td><td>" +
                 std::to_string(s.level_count) + "</td><td>" + top + "</td>";
        }
        h += "</tr>\n";
    }
    h += "</table>\n";
}

void preparation(std::string& h, const ReportBundle& b) {
    h += "<h2>Data preparation</h2>\n<p>Train rows: " + std::to_string(b.train_rows) +
         ", test rows: " + std::to_string(b.test_rows) + ". Selected features (" + std::to_string(b.selected.size()) +
         "):</p>\n<p class=\"mono\">";
    for (std::size_t i = 0; i < b.selected.size(); ++i) h += (i ? ", " : "") + esc(b.selected[i]);
    h += "</p>\n<h3>Rejected features</h3>\n";
    if (b.rejections.empty()) {
        h += "<p>No features were rejected.</p>\n";
        return;
    }
    h += "<table>\n<tr><th>Feature</th><th>Reason</th><th>Partner</th><th>Statistic</th></tr>\n";
    for (const auto& r : b.rejections) {
        h += "<tr><td>" + esc(r.feature) + "</td><td>" + std::string(prep::to_string(r.reason)) + "</td><td>" +
             esc(r.partner) + "</td><td>" + fixed3(r.statistic) + "</td></tr>\n";
    }
    h += "</table>\n";
}

void missingness(std::string& h, const ReportBundle& b) {
    h += "<h2>Missing-at-random scan</h2>\n";
    if (!b.mar_enabled) {
        h += "<p>Scan disabled: no features scanned.</p>\n";
        return;
    }
    if (b.mar.empty()) {
        h += "<p>No feature has missing values: no features scanned.</p>\n";
        return;
    }
    h += "<table>\n<tr><th>Feature</th><th>Missing</th><th>Aux AUC</th><th>Verdict</th><th>Note</th></tr>\n";
    for (const auto& f : b.mar.findings) {
        h += "<tr><td>" + esc(f.feature) + "</td><td>" + std::to_string(f.missing_count) + "</td><td>" +
             (f.aux_auc ? fixed3(*f.aux_auc) : std::string("n/a")) + "</td><td>" +
             std::string(mar::to_string(f.verdict)) + "</td><td>" + esc(f.note) + "</td></tr>\n";
    }
    h += "</table>\n";
}

void models(std::string& h, const ReportBundle& b) {
    h += "<h2>Model performance</h2>\n<table class=\"metrics\">\n<tr><th>Model</th><th>Fitting time (secs)</th>"
         "<th>Scoring time (secs)</th><th>Train AUC</th><th>Test AUC</th><th>Accuracy</th><th>Precision</th>"
         "<th>Recall</th><th>F1_score</th></tr>\n";
    for (std::size_t k = 0; k < b.evaluations.size(); ++k) {
        const auto& e = b.evaluations[k];
        const bool best = b.best && *b.best == k;
        h += std::string(best ? "<tr class=\"best\">" : "<tr>") + "<td>" + std::string(to_string(e.id)) + "</td>";
        if (e.failed) {
            h += "<td colspan=\"8\">failed: " + esc(e.failure) + "</td></tr>\n";
            continue;
        }
        const std::string na = "n/a";
        h += "<td>" + (b.timings ? fixed3(e.fit_time_s) : na) + "</td><td>" + (b.timings ? fixed3(e.score_time_s) : na) +
             "</td><td>" + fixed3(e.train_auc) + "</td><td>" + fixed3(e.test_auc) + "</td><td>" +
             fixed3(e.confusion.accuracy) + "</td><td>" + fixed3(e.confusion.precision) + "</td><td>" +
             fixed3(e.confusion.recall) + "</td><td>" + fixed3(e.confusion.f1) + "</td></tr>\n";
    }
    h += "</table>\n";

    std::vector<svg::Series> roc;
    for (const auto& e : b.evaluations) {
        if (e.failed) continue;
        svg::Series s;
        s.label = std::string(to_string(e.id)) + " (" + fixed3(e.test_auc) + ")";
        for (const auto& p : e.roc.points) {
            s.x.push_back(p.fpr);
            s.y.push_back(p.tpr);
        }
        roc.push_back(std::move(s));
    }
    if (!roc.empty()) {
        svg::ChartOptions o;
        o.title = "Test ROC";
        o.x_label = "False positive rate";
        o.y_label = "True positive rate";
        o.diagonal = true;
        o.unit_axes = true;
        o.width = 520;
        o.height = 400;
        h += "<div class=\"chart\">\n" + svg::line_chart(roc, o) + "</div>\n";
    }
}

void best_model(std::string& h, const ReportBundle& b) {
    if (!b.best) return;
    const auto& e = b.evaluations[*b.best];
    const std::string name(to_string(e.id));
    h += "<h2>Best model: " + name + "</h2>\n<p>Test AUC " + fixed3(e.test_auc) + ". Hyperparameters: ";
    if (e.params.empty()) h += "none";
    bool first = true;
    for (const auto& [k, v] : e.params) {
        h += (first ? "" : ", ") + esc(k) + " = " + fixed3(v);
        first = false;
    }
    h += ".</p>\n";

    h += "<h3>Lift</h3>\n";
    svg::Series lift{"cumulative lift", {}, {}};
    for (const auto& bin : e.lift.bins) {
        lift.x.push_back(static_cast<double>(bin.bin));
        lift.y.push_back(bin.cumulative_lift);
    }
    svg::ChartOptions lo;
    lo.title = "Cumulative lift";
    lo.x_label = "Bin";
    lo.y_label = "Lift";
    lo.markers = true;
    h += "<div class=\"chart\">\n" + svg::line_chart({lift}, lo) + "</div>\n";
    if (e.lift.clamped) {
        h += "<p>Requested " + std::to_string(e.lift.requested_groups) + " groups; clamped to the row count.</p>\n";
    }
    h += "<table>\n<tr><th>Bin</th><th>N</th><th>Events</th><th>Response rate</th><th>Cumulative events</th>"
         "<th>Cumulative capture rate</th><th>Cumulative lift</th></tr>\n";
    for (const auto& bin : e.lift.bins) {
        h += "<tr><td>" + std::to_string(bin.bin) + "</td><td>" + std::to_string(bin.n) + "</td><td>" +
             std::to_string(bin.events) + "</td><td>" + fixed3(bin.response_rate) + "</td><td>" +
             std::to_string(bin.cumulative_events) + "</td><td>" + fixed3(bin.cumulative_capture_rate) + "</td><td>" +
             fixed3(bin.cumulative_lift) + "</td></tr>\n";
    }
    h += "</table>\n";

    if (!b.importance.empty()) {
        svg::ChartOptions io;
        io.title = "Variable importance";
        io.height = 40 + 22 * static_cast<int>(b.importance.size());
        h += "<h3>Variable importance</h3>\n<div class=\"chart\">\n" + svg::bar_chart(b.importance, io) + "</div>\n";
    }
    if (!b.pdps.empty()) {
        h += "<h3>Partial dependence</h3>\n<div class=\"grid\">\n";
        for (const auto& c : b.pdps) {
            svg::ChartOptions po;
            po.title = c.feature;
            po.x_label = c.feature;
            po.y_label = "Mean score";
            po.markers = true;
            po.width = 360;
            po.height = 260;
            h += "<div class=\"chart\">\n" + svg::line_chart({{"", c.grid, c.mean_score}}, po) + "</div>\n";
        }
        h += "</div>\n";
    }
}

}  // namespace

std::string render_html(const ReportBundle& b) {
    std::string h;
    h += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>" + esc(b.title) +
         "</title>\n<style>\n"
         "body{font-family:sans-serif;margin:2em;color:#222}\n"
         "table{border-collapse:collapse;margin:0.5em 0 1.5em}\n"
         "th,td{border:1px solid #ccc;padding:3px 8px;text-align:right}\n"
         "th{background:#f2f2f2}\n"
         "td:first-child,th:first-child{text-align:left}\n"
         "tr.best td{font-weight:bold}\n"
         ".mono{font-family:monospace}\n"
         ".grid{display:flex;flex-wrap:wrap;gap:12px}\n"
         "</style>\n</head>\n<body>\n";
    h += "<h1>" + esc(b.title) + "</h1>\n<p>Dataset: " + esc(b.dataset) + "</p>\n";
    descriptives(h, b.summary);
    preparation(h, b);
    missingness(h, b);
    models(h, b);
    best_model(h, b);
    h += "<h2>Run configuration</h2>\n<table>\n";
    for (const auto& [k, v] : b.config) h += "<tr><td>" + esc(k) + "</td><td>" + esc(v) + "</td></tr>\n";
    h += "</table>\n";
    h += "<footer>" + esc(b.footer) + "</footer>\n";
    h += "</body>\n</html>\n";
    return h;
}

void write_html(const ReportBundle& bundle, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("report: cannot write '" + path.string() + "'");
    out << render_html(bundle);
    if (!out) throw DataError("report: write failed for '" + path.string() + "'");
}

}  // namespace driveml::report
