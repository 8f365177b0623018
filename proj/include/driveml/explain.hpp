#pragma once

#include "driveml/learners.hpp"

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace driveml::explain {

struct PdpCurve {
    std::string feature;
    std::vector<double> grid;
    std::vector<double> mean_score;
};

/// Grid for `values`: {0,1} for 0/1 features, every distinct value when there
/// are fewer than max_grid, else the distinct 5%..95% quantiles.
std::vector<double> pdp_grid(std::span<const double> values, std::size_t max_grid = 20);

/// Mean score over the reference rows with `feature` forced to each grid value.
PdpCurve pdp(const TrainedModel& model, const FeatureMatrix& reference, const std::string& feature,
             std::size_t max_grid = 20);

/// Features by decreasing importance; ties keep the model's feature order.
std::vector<std::string> top_features(const TrainedModel& model, std::size_t k);

nlohmann::json to_json(const PdpCurve& curve);

}  // namespace driveml::explain
