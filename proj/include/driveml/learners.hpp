#pragma once

#include "driveml/matrix.hpp"
#include "driveml/tree.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace driveml {

enum class ModelId { glmnet, logreg, randomForest, ranger, xgboost, rpart };

inline constexpr std::array<ModelId, 6> kAllModels = {ModelId::glmnet,  ModelId::logreg,  ModelId::randomForest,
                                                      ModelId::ranger,  ModelId::xgboost, ModelId::rpart};

std::string_view to_string(ModelId id);
std::optional<ModelId> parse_model_id(std::string_view name);

using Hyperparams = std::map<std::string, double>;

struct ModelSpec {
    ModelId id = ModelId::logreg;
    Hyperparams params;
    std::uint64_t seed = 0;
};

struct LogisticOptions {
    double lambda = 0.0;
    int max_iter = 1000;
    double tol = 1e-6;
};

struct TreeOptions {
    int max_depth = 30;
    int min_leaf = 1;
    double min_gain = 0.0;
    int max_bins = 256;
};

struct ForestOptions {
    int n_trees = 500;
    int mtry = 0;  // 0 -> floor(sqrt(p))
    double sample_fraction = 1.0;
    bool replace = true;
    int min_leaf = 1;
    int max_depth = 64;
    int max_bins = 256;
    std::uint64_t seed = 0;
    int workers = 1;
};

struct BoostOptions {
    int n_rounds = 100;
    double learning_rate = 0.1;
    int max_depth = 3;
    double subsample = 1.0;
    int min_leaf = 5;
    int max_bins = 256;
    std::uint64_t seed = 0;
};

/// Standardized L2 logistic regression. `scale` of 0 marks an ignored feature.
struct LogisticModel {
    std::vector<double> center;
    std::vector<double> scale;
    std::vector<double> weights;  // on the standardized scale
    double intercept = 0.0;
};

/// Averaged trees (single tree, forests) or an additive logit model (boosting).
struct TreeEnsemble {
    std::vector<DecisionTree> trees;
    bool boosted = false;
    double base_margin = 0.0;
};

struct TrainedModel {
    ModelId id = ModelId::logreg;
    Hyperparams params;
    std::vector<std::string> features;
    std::variant<LogisticModel, TreeEnsemble> body;
    std::vector<double> importance;  // per feature, normalized to sum 1 (all zero if nothing was learned)
    double fit_time_s = 0.0;
};

namespace logistic {

/// Mean negative log-likelihood plus (lambda/2)||w||^2; intercept unpenalized.
double loss(const FeatureMatrix& x, std::span<const int> y, std::span<const double> w, double b, double lambda);

/// Gradient of `loss` with respect to (w, b).
void gradient(const FeatureMatrix& x, std::span<const int> y, std::span<const double> w, double b, double lambda,
              std::span<double> grad_w, double& grad_b);

double sigmoid(double z);

}  // namespace logistic

TrainedModel fit_logistic(const FeatureMatrix& x, std::span<const int> y, const LogisticOptions& options = {});
TrainedModel fit_tree(const FeatureMatrix& x, std::span<const int> y, const TreeOptions& options = {});
TrainedModel fit_forest(const FeatureMatrix& x, std::span<const int> y, const ForestOptions& options = {});
TrainedModel fit_gbt(const FeatureMatrix& x, std::span<const int> y, const BoostOptions& options = {});

/// Fits the learner named by spec.id with its hyperparameters; unspecified
/// ones take the learner defaults. `workers` only affects forests.
TrainedModel fit_model(const ModelSpec& spec, const FeatureMatrix& x, std::span<const int> y, int workers = 1);

/// Probabilities in [0,1], one per row. Columns are matched by name when the
/// matrix column order differs from the model's feature list.
std::vector<double> score(const TrainedModel& model, const FeatureMatrix& x);

struct TimedScores {
    std::vector<double> scores;
    double seconds = 0.0;
};
TimedScores score_timed(const TrainedModel& model, const FeatureMatrix& x);

/// Feature -> normalized importance.
std::map<std::string, double> importance(const TrainedModel& model);

nlohmann::json to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& doc);

}  // namespace driveml
