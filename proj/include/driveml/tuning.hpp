#pragma once

#include "driveml/learners.hpp"
#include "driveml/metrics.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace driveml::tuning {

enum class Distribution { UniformInt, UniformReal, LogUniform };

struct ParamRange {
    std::string name;
    Distribution dist = Distribution::UniformReal;
    double lo = 0.0;
    double hi = 1.0;
};

struct SearchSpace {
    std::map<ModelId, std::vector<ParamRange>> params;

    const std::vector<ParamRange>& of(ModelId id) const;
};

/// Spaces for a design matrix with `p` columns (forest mtry depends on it).
SearchSpace default_spaces(std::size_t p);

/// `tune_iters` independent draws from the stream derived from (seed, model).
/// A model with an empty space yields exactly one empty candidate.
std::vector<Hyperparams> draw_candidates(const SearchSpace& space, ModelId id, int tune_iters, std::uint64_t seed);

struct SearchOptions {
    int tune_iters = 10;
    int folds = 5;
    std::size_t max_obs = 4000;
    std::uint64_t seed = 0;
    int workers = 1;
};

struct Candidate {
    Hyperparams params;
    double mean_auc = 0.0;
    std::vector<double> fold_aucs;
    std::string error;  // non-empty when a fold fit failed; mean_auc is then 0
};

struct TuneResult {
    ModelId id = ModelId::logreg;
    std::vector<Candidate> candidates;
    std::size_t tuning_rows = 0;
    std::size_t chosen = 0;
    std::optional<TrainedModel> model;  // refit on the full training matrix; empty when failed
    std::string failure;
    double train_auc = 0.0;  // in-sample, refit model
    double tune_time_s = 0.0;

    bool failed() const { return !model.has_value(); }
};

/// Random search scored by stratified k-fold CV mean AUC (ties keep the
/// earliest draw), then a refit of the winner on all of `x`.
TuneResult random_search(const FeatureMatrix& x, std::span<const int> y, ModelId id, const SearchSpace& space,
                         const SearchOptions& options);

struct Evaluation {
    ModelId id = ModelId::logreg;
    bool failed = false;
    std::string failure;
    Hyperparams params;
    double cv_auc = 0.0;
    double fit_time_s = 0.0;
    double score_time_s = 0.0;
    double train_auc = 0.0;
    double test_auc = 0.0;
    metrics::ConfusionMetrics confusion;
    metrics::RocCurve roc;
    metrics::LiftTable lift;
};

Evaluation evaluate(const TuneResult& result, const FeatureMatrix& test, std::span<const int> y,
                    std::size_t lift_groups);

/// Index of the highest test AUC among non-failed models; ties go to the
/// smaller fit time, then the earlier entry. Throws TrainingError when none trained.
std::size_t select_best(const std::vector<Evaluation>& evaluations);

/// One record per model. With `timings` false the timing fields are null so
/// repeated runs serialize identically.
nlohmann::json metrics_json(const std::vector<Evaluation>& evaluations, std::optional<std::size_t> best,
                            bool timings);

}  // namespace driveml::tuning
