#include "driveml/metrics.hpp"

#include "driveml/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace driveml::metrics {

namespace {

void check_sizes(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw DataError("metrics: scores and labels differ in length");
}

}  // namespace

double auc(std::span<const double> scores, std::span<const int> labels) {
    check_sizes(scores, labels);
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double rank_sum_pos = 0.0;
    std::size_t n_pos = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        // ranks i+1 .. j share the midrank
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] == 1) {
                rank_sum_pos += midrank;
                ++n_pos;
            }
        }
        i = j;
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw DataError("metrics: AUC needs both classes present");
    const double np = static_cast<double>(n_pos);
    const double u = rank_sum_pos - np * (np + 1.0) / 2.0;
    return u / (np * static_cast<double>(n_neg));
}

RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels) {
    check_sizes(scores, labels);
    const std::size_t n = scores.size();
    std::size_t n_pos = 0;
    for (int l : labels) n_pos += l == 1 ? 1 : 0;
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw DataError("metrics: ROC needs both classes present");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve roc;
    roc.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    double area = 0.0;
    while (i < n) {
        const double thr = scores[order[i]];
        std::size_t j = i;
        while (j < n && scores[order[j]] == thr) {
            if (labels[order[j]] == 1) {
                ++tp;
            } else {
                ++fp;
            }
            ++j;
        }
        RocPoint pt{static_cast<double>(fp) / static_cast<double>(n_neg),
                    static_cast<double>(tp) / static_cast<double>(n_pos), thr};
        const auto& prev = roc.points.back();
        area += (pt.fpr - prev.fpr) * (pt.tpr + prev.tpr) / 2.0;
        roc.points.push_back(pt);
        i = j;
    }
    roc.auc = area;
    return roc;
}

ConfusionMetrics confusion_metrics(std::span<const double> scores, std::span<const int> labels, double threshold) {
    check_sizes(scores, labels);
    ConfusionMetrics m;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool predicted = scores[i] >= threshold;
        const bool actual = labels[i] == 1;
        if (predicted && actual) ++m.tp;
        else if (predicted) ++m.fp;
        else if (actual) ++m.fn;
        else ++m.tn;
    }
    const double total = static_cast<double>(m.tp + m.fp + m.tn + m.fn);
    m.accuracy = total > 0 ? static_cast<double>(m.tp + m.tn) / total : 0.0;
    m.no_predicted_positives = m.tp + m.fp == 0;
    m.precision = m.no_predicted_positives ? 0.0 : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
    m.recall = m.tp + m.fn == 0 ? 0.0 : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
    m.f1 = m.precision + m.recall == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

LiftTable lift_table(std::span<const double> scores, std::span<const int> labels, std::size_t groups) {
    check_sizes(scores, labels);
    const std::size_t n = scores.size();
    LiftTable table;
    table.requested_groups = groups;
    if (n == 0 || groups == 0) return table;
    if (groups > n) {
        groups = n;
        table.clamped = true;
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    std::size_t total_events = 0;
    for (int l : labels) total_events += l == 1 ? 1 : 0;
    const double base_rate = static_cast<double>(total_events) / static_cast<double>(n);

    const std::size_t base = n / groups;
    const std::size_t extra = n % groups;
    std::size_t pos = 0;
    std::size_t cum_n = 0;
    std::size_t cum_events = 0;
    for (std::size_t g = 0; g < groups; ++g) {
        const std::size_t size = base + (g < extra ? 1 : 0);
        std::size_t events = 0;
        for (std::size_t k = 0; k < size; ++k) events += labels[order[pos + k]] == 1 ? 1 : 0;
        pos += size;
        cum_n += size;
        cum_events += events;
        LiftBin bin{};
        bin.bin = g + 1;
        bin.n = size;
        bin.events = events;
        bin.response_rate = size ? static_cast<double>(events) / static_cast<double>(size) : 0.0;
        bin.cumulative_events = cum_events;
        bin.cumulative_capture_rate =
            total_events ? static_cast<double>(cum_events) / static_cast<double>(total_events) : 0.0;
        bin.cumulative_lift =
            base_rate > 0 ? (static_cast<double>(cum_events) / static_cast<double>(cum_n)) / base_rate : 0.0;
        table.bins.push_back(bin);
    }
    return table;
}

nlohmann::json to_json(const RocCurve& roc) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : roc.points) {
        pts.push_back({p.fpr, p.tpr, std::isfinite(p.threshold) ? nlohmann::json(p.threshold) : nlohmann::json()});
    }
    return {{"auc", roc.auc}, {"points", pts}};
}

nlohmann::json to_json(const LiftTable& lift) {
    nlohmann::json bins = nlohmann::json::array();
    for (const auto& b : lift.bins) {
        bins.push_back({{"bin", b.bin},
                        {"n", b.n},
                        {"events", b.events},
                        {"response_rate", b.response_rate},
                        {"cumulative_events", b.cumulative_events},
                        {"cumulative_capture_rate", b.cumulative_capture_rate},
                        {"cumulative_lift", b.cumulative_lift}});
    }
    return {{"groups", lift.bins.size()}, {"clamped", lift.clamped}, {"bins", bins}};
}

}  // namespace driveml::metrics
