#pragma once

#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace driveml::metrics {

/// ROC AUC as the Mann-Whitney statistic with midranks for tied scores.
/// Throws when only one class is present.
double auc(std::span<const double> scores, std::span<const int> labels);

struct RocPoint {
    double fpr;
    double tpr;
    double threshold;  // +inf for the (0,0) origin
};

struct RocCurve {
    std::vector<RocPoint> points;
    double auc = 0.0;  // trapezoidal area under `points`
};

RocCurve roc_curve(std::span<const double> scores, std::span<const int> labels);

struct ConfusionMetrics {
    long tp = 0, fp = 0, tn = 0, fn = 0;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool no_predicted_positives = false;
};

/// Predicts 1 iff score >= threshold.
ConfusionMetrics confusion_metrics(std::span<const double> scores, std::span<const int> labels,
                                   double threshold = 0.5);

struct LiftBin {
    std::size_t bin;  // 1-based
    std::size_t n;
    std::size_t events;
    double response_rate;
    std::size_t cumulative_events;
    double cumulative_capture_rate;
    double cumulative_lift;
};

struct LiftTable {
    std::vector<LiftBin> bins;
    std::size_t requested_groups = 0;
    bool clamped = false;  // groups > n was reduced to n
};

LiftTable lift_table(std::span<const double> scores, std::span<const int> labels, std::size_t groups);

nlohmann::json to_json(const RocCurve& roc);
nlohmann::json to_json(const LiftTable& lift);

}  // namespace driveml::metrics
