#include "driveml/explain.hpp"

#include "driveml/error.hpp"
#include "driveml/stats.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <numeric>

namespace driveml::explain {

std::vector<double> pdp_grid(std::span<const double> values, std::size_t max_grid) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> distinct = sorted;
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    const bool binary = std::all_of(distinct.begin(), distinct.end(), [](double v) { return v == 0.0 || v == 1.0; });
    if (binary && !distinct.empty()) return {0.0, 1.0};
    if (distinct.size() < max_grid) return distinct;

    std::vector<double> grid;
    for (int k = 1; k <= 19; ++k) {
        const double q = stats::quantile_sorted(sorted, 0.05 * k);
        if (grid.empty() || q != grid.back()) grid.push_back(q);
    }
    return grid;
}

PdpCurve pdp(const TrainedModel& model, const FeatureMatrix& reference, const std::string& feature,
             std::size_t max_grid) {
    if (std::find(model.features.begin(), model.features.end(), feature) == model.features.end()) {
        throw DataError("explain: model has no feature '" + feature + "'");
    }
    const auto j = reference.find(feature);
    if (!j) throw DataError("explain: reference table has no column '" + feature + "'");

    PdpCurve curve;
    curve.feature = feature;
    curve.grid = pdp_grid(reference.column(*j), max_grid);
    FeatureMatrix forced = reference;
    for (double v : curve.grid) {
        auto col = forced.column(*j);
        std::fill(col.begin(), col.end(), v);
        const auto s = score(model, forced);
        curve.mean_score.push_back(s.empty() ? 0.0 : stats::mean(s));
    }
    return curve;
}

std::vector<std::string> top_features(const TrainedModel& model, std::size_t k) {
    std::vector<std::size_t> order(model.features.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return model.importance[a] > model.importance[b]; });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < std::min(k, order.size()); ++i) out.push_back(model.features[order[i]]);
    return out;
}

nlohmann::json to_json(const PdpCurve& curve) {
    return {{"feature", curve.feature}, {"grid", curve.grid}, {"mean_score", curve.mean_score}};
}

}  // namespace driveml::explain
