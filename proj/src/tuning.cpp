#include "driveml/tuning.hpp"

#include "driveml/error.hpp"
#include "driveml/folds.hpp"
#include "driveml/parallel.hpp"
#include "driveml/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>

namespace driveml::tuning {

using nlohmann::json;

const std::vector<ParamRange>& SearchSpace::of(ModelId id) const {
    static const std::vector<ParamRange> empty;
    auto it = params.find(id);
    return it == params.end() ? empty : it->second;
}

SearchSpace default_spaces(std::size_t p) {
    const double pd = static_cast<double>(std::max<std::size_t>(p, 1));
    const double mtry_lo = std::max(1.0, std::floor(std::ceil(std::sqrt(pd)) / 2.0));
    using D = Distribution;
    SearchSpace s;
    s.params[ModelId::logreg] = {};
    s.params[ModelId::glmnet] = {{"lambda", D::LogUniform, 1e-4, 10.0}};
    s.params[ModelId::rpart] = {{"max_depth", D::UniformInt, 2, 10}, {"min_leaf", D::UniformInt, 5, 50}};
    s.params[ModelId::randomForest] = {{"n_trees", D::UniformInt, 100, 500}, {"mtry", D::UniformInt, mtry_lo, pd}};
    s.params[ModelId::ranger] = {{"n_trees", D::UniformInt, 100, 500},
                                 {"mtry", D::UniformInt, mtry_lo, pd},
                                 {"sample_fraction", D::UniformReal, 0.5, 1.0}};
    s.params[ModelId::xgboost] = {{"n_rounds", D::UniformInt, 50, 500},
                                  {"learning_rate", D::LogUniform, 0.01, 0.3},
                                  {"max_depth", D::UniformInt, 2, 8},
                                  {"subsample", D::UniformReal, 0.5, 1.0}};
    return s;
}

std::vector<Hyperparams> draw_candidates(const SearchSpace& space, ModelId id, int tune_iters, std::uint64_t seed) {
    const auto& ranges = space.of(id);
    if (ranges.empty()) return {Hyperparams{}};
    if (tune_iters < 1) throw ConfigError("tuning: tune_iters must be >= 1");
    Rng rng(derive_seed(seed, {hash_tag("candidates"), static_cast<std::uint64_t>(id)}));
    std::vector<Hyperparams> out;
    for (int k = 0; k < tune_iters; ++k) {
        Hyperparams hp;
        for (const auto& r : ranges) {
            switch (r.dist) {
                case Distribution::UniformInt:
                    hp[r.name] = static_cast<double>(
                        rng.between(static_cast<long long>(r.lo), static_cast<long long>(r.hi)));
                    break;
                case Distribution::UniformReal: hp[r.name] = rng.uniform(r.lo, r.hi); break;
                case Distribution::LogUniform:
                    hp[r.name] = std::exp(rng.uniform(std::log(r.lo), std::log(r.hi)));
                    break;
            }
        }
        out.push_back(std::move(hp));
    }
    return out;
}

namespace {

std::vector<int> pick(std::span<const int> y, const std::vector<std::size_t>& rows) {
    std::vector<int> out;
    out.reserve(rows.size());
    for (auto i : rows) out.push_back(y[i]);
    return out;
}

}  // namespace

TuneResult random_search(const FeatureMatrix& x, std::span<const int> y, ModelId id, const SearchSpace& space,
                         const SearchOptions& options) {
    if (options.folds < 2) throw ConfigError("tuning: folds must be >= 2");
    const auto start = std::chrono::steady_clock::now();
    const auto model_key = static_cast<std::uint64_t>(id);

    TuneResult result;
    result.id = id;
    const auto params = draw_candidates(space, id, options.tune_iters, options.seed);

    // Tuning rows: a stratified subsample when the table exceeds max_obs.
    const auto rows = stratified_subsample(y, options.max_obs, derive_seed(options.seed, {hash_tag("tune"), model_key}));
    const auto tx = rows.size() == x.rows() ? x : x.take_rows(rows);
    const auto ty = rows.size() == x.rows() ? std::vector<int>(y.begin(), y.end()) : pick(y, rows);
    result.tuning_rows = rows.size();

    const auto fold = stratified_folds(ty, options.folds, derive_seed(options.seed, {hash_tag("cv"), model_key}));
    std::vector<std::vector<std::size_t>> fit_rows(options.folds), val_rows(options.folds);
    for (std::size_t i = 0; i < ty.size(); ++i) {
        for (int f = 0; f < options.folds; ++f) (fold[i] == f ? val_rows : fit_rows)[f].push_back(i);
    }

    const std::size_t n_jobs = params.size() * static_cast<std::size_t>(options.folds);
    std::vector<double> job_auc(n_jobs, 0.0);
    std::vector<std::string> job_error(n_jobs);
    parallel_for(n_jobs, options.workers, [&](std::size_t job) {
        const std::size_t c = job / static_cast<std::size_t>(options.folds);
        const int f = static_cast<int>(job % static_cast<std::size_t>(options.folds));
        try {
            ModelSpec spec{id, params[c], derive_seed(options.seed, {model_key, c, static_cast<std::uint64_t>(f)})};
            const auto fy = pick(ty, fit_rows[f]);
            const auto vy = pick(ty, val_rows[f]);
            const auto model = fit_model(spec, tx.take_rows(fit_rows[f]), fy, 1);
            job_auc[job] = metrics::auc(score(model, tx.take_rows(val_rows[f])), vy);
        } catch (const std::exception& e) {
            job_error[job] = e.what();
        }
    });

    for (std::size_t c = 0; c < params.size(); ++c) {
        Candidate cand;
        cand.params = params[c];
        double total = 0.0;
        for (int f = 0; f < options.folds; ++f) {
            const auto job = c * static_cast<std::size_t>(options.folds) + static_cast<std::size_t>(f);
            if (!job_error[job].empty() && cand.error.empty()) cand.error = job_error[job];
            cand.fold_aucs.push_back(job_auc[job]);
            total += job_auc[job];
        }
        cand.mean_auc = cand.error.empty() ? total / options.folds : 0.0;
        result.candidates.push_back(std::move(cand));
    }

    const auto all_failed = std::all_of(result.candidates.begin(), result.candidates.end(),
                                        [](const Candidate& c) { return !c.error.empty(); });
    if (all_failed) {
        result.failure = "all candidates failed: " + result.candidates.front().error;
    } else {
        for (std::size_t c = 1; c < result.candidates.size(); ++c) {
            if (result.candidates[c].error.empty() &&
                (!result.candidates[result.chosen].error.empty() ||
                 result.candidates[c].mean_auc > result.candidates[result.chosen].mean_auc)) {
                result.chosen = c;
            }
        }
        try {
            ModelSpec spec{id, params[result.chosen], derive_seed(options.seed, {model_key, hash_tag("refit")})};
            result.model = fit_model(spec, x, y, options.workers);
            result.train_auc = metrics::auc(score(*result.model, x), y);
        } catch (const std::exception& e) {
            result.model.reset();
            result.failure = std::string("refit failed: ") + e.what();
        }
    }
    result.tune_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

Evaluation evaluate(const TuneResult& result, const FeatureMatrix& test, std::span<const int> y,
                    std::size_t lift_groups) {
    Evaluation e;
    e.id = result.id;
    if (result.failed()) {
        e.failed = true;
        e.failure = result.failure;
        return e;
    }
    const auto& model = *result.model;
    e.params = model.params;
    e.cv_auc = result.candidates[result.chosen].mean_auc;
    e.fit_time_s = model.fit_time_s;
    e.train_auc = result.train_auc;
    const auto timed = score_timed(model, test);
    e.score_time_s = timed.seconds;
    e.test_auc = metrics::auc(timed.scores, y);
    e.confusion = metrics::confusion_metrics(timed.scores, y);
    e.roc = metrics::roc_curve(timed.scores, y);
    e.lift = metrics::lift_table(timed.scores, y, lift_groups);
    return e;
}

std::size_t select_best(const std::vector<Evaluation>& evaluations) {
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < evaluations.size(); ++k) {
        const auto& e = evaluations[k];
        if (e.failed) continue;
        if (!best) {
            best = k;
            continue;
        }
        const auto& b = evaluations[*best];
        if (e.test_auc > b.test_auc || (e.test_auc == b.test_auc && e.fit_time_s < b.fit_time_s)) best = k;
    }
    if (!best) throw TrainingError("tuning: no model trained");
    return *best;
}

json metrics_json(const std::vector<Evaluation>& evaluations, std::optional<std::size_t> best, bool timings) {
    json models = json::array();
    for (const auto& e : evaluations) {
        json r{{"model_id", std::string(to_string(e.id))}, {"status", e.failed ? "failed" : "ok"}};
        if (e.failed) {
            r["error"] = e.failure;
            models.push_back(std::move(r));
            continue;
        }
        r["fit_time_s"] = timings ? json(e.fit_time_s) : json();
        r["score_time_s"] = timings ? json(e.score_time_s) : json();
        r["train_auc"] = e.train_auc;
        r["test_auc"] = e.test_auc;
        r["accuracy"] = e.confusion.accuracy;
        r["precision"] = e.confusion.precision;
        r["recall"] = e.confusion.recall;
        r["f1"] = e.confusion.f1;
        r["cv_auc"] = e.cv_auc;
        r["hyperparams"] = e.params;
        models.push_back(std::move(r));
    }
    json doc{{"format", "driveml.metrics"}, {"version", 1}, {"models", models}};
    doc["best_model"] = best ? json(std::string(to_string(evaluations[*best].id))) : json();
    if (best) doc["lift"] = metrics::to_json(evaluations[*best].lift);
    return doc;
}

}  // namespace driveml::tuning
