#include "driveml/learners.hpp"

#include "driveml/error.hpp"
#include "driveml/parallel.hpp"
#include "driveml/rng.hpp"
#include "driveml/stats.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace driveml {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

void normalize(std::vector<double>& v) {
    const double total = std::accumulate(v.begin(), v.end(), 0.0);
    if (total > 0.0) {
        for (auto& x : v) x /= total;
    }
}

double get_param(const Hyperparams& params, const char* name, double fallback) {
    auto it = params.find(name);
    return it == params.end() ? fallback : it->second;
}

int get_int(const Hyperparams& params, const char* name, int fallback) {
    return static_cast<int>(std::lround(get_param(params, name, fallback)));
}

void check_inputs(const FeatureMatrix& x, std::span<const int> y) {
    if (x.rows() != y.size()) throw TrainingError("learners: feature rows and label count differ");
    if (y.empty()) throw TrainingError("learners: empty training data");
}

}  // namespace

std::string_view to_string(ModelId id) {
    switch (id) {
        case ModelId::glmnet: return "glmnet";
        case ModelId::logreg: return "logreg";
        case ModelId::randomForest: return "randomForest";
        case ModelId::ranger: return "ranger";
        case ModelId::xgboost: return "xgboost";
        case ModelId::rpart: return "rpart";
    }
    return "unknown";
}

std::optional<ModelId> parse_model_id(std::string_view name) {
    for (auto id : kAllModels) {
        if (to_string(id) == name) return id;
    }
    return std::nullopt;
}

// --- logistic regression ----------------------------------------------------

namespace logistic {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double loss(const FeatureMatrix& x, std::span<const int> y, std::span<const double> w, double b, double lambda) {
    const std::size_t n = x.rows();
    std::vector<double> z(n, b);
    for (std::size_t j = 0; j < x.cols(); ++j) {
        if (w[j] == 0.0) continue;
        auto col = x.column(j);
        for (std::size_t i = 0; i < n; ++i) z[i] += w[j] * col[i];
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += softplus(z[i]) - y[i] * z[i];
    double penalty = 0.0;
    for (double v : w) penalty += v * v;
    return total / static_cast<double>(n) + 0.5 * lambda * penalty;
}

void gradient(const FeatureMatrix& x, std::span<const int> y, std::span<const double> w, double b, double lambda,
              std::span<double> grad_w, double& grad_b) {
    const std::size_t n = x.rows();
    std::vector<double> z(n, b);
    for (std::size_t j = 0; j < x.cols(); ++j) {
        auto col = x.column(j);
        for (std::size_t i = 0; i < n; ++i) z[i] += w[j] * col[i];
    }
    std::vector<double> resid(n);
    grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        resid[i] = sigmoid(z[i]) - y[i];
        grad_b += resid[i];
    }
    grad_b /= static_cast<double>(n);
    for (std::size_t j = 0; j < x.cols(); ++j) {
        auto col = x.column(j);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += col[i] * resid[i];
        grad_w[j] = s / static_cast<double>(n) + lambda * w[j];
    }
}

}  // namespace logistic

TrainedModel fit_logistic(const FeatureMatrix& x, std::span<const int> y, const LogisticOptions& options) {
    check_inputs(x, y);
    const auto start = Clock::now();
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();

    LogisticModel lm;
    lm.center.assign(p, 0.0);
    lm.scale.assign(p, 0.0);
    FeatureMatrix z(n, x.names());
    for (std::size_t j = 0; j < p; ++j) {
        auto col = x.column(j);
        lm.center[j] = stats::mean(col);
        lm.scale[j] = stats::sd(col);
        if (lm.scale[j] > 0.0) {
            auto dst = z.column(j);
            for (std::size_t i = 0; i < n; ++i) dst[i] = (col[i] - lm.center[j]) / lm.scale[j];
        }
    }

    const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    const double pbar = std::clamp(ybar, 1e-6, 1.0 - 1e-6);
    std::vector<double> w(p, 0.0);
    double b = std::log(pbar / (1.0 - pbar));
    const double lambda = options.lambda;

    // Margins are kept up to date so each line-search trial costs one pass over n.
    std::vector<double> margin(n, b);
    std::vector<double> gw(p, 0.0);
    std::vector<double> direction(n, 0.0);
    std::vector<double> trial(n, 0.0);

    auto objective = [&](const std::vector<double>& m, std::span<const double> weights) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += softplus(m[i]) - y[i] * m[i];
        double penalty = 0.0;
        for (double v : weights) penalty += v * v;
        return total / static_cast<double>(n) + 0.5 * lambda * penalty;
    };

    double current = objective(margin, w);
    double step = 1.0;
    std::vector<double> w_trial(p);
    for (int iter = 0; iter < options.max_iter; ++iter) {
        double gb = 0.0;
        std::vector<double> resid(n);
        for (std::size_t i = 0; i < n; ++i) {
            resid[i] = logistic::sigmoid(margin[i]) - y[i];
            gb += resid[i];
        }
        gb /= static_cast<double>(n);
        double gmax = std::abs(gb);
        double gnorm2 = gb * gb;
        for (std::size_t j = 0; j < p; ++j) {
            if (lm.scale[j] == 0.0) {
                gw[j] = 0.0;
                continue;
            }
            auto col = z.column(j);
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += col[i] * resid[i];
            gw[j] = s / static_cast<double>(n) + lambda * w[j];
            gmax = std::max(gmax, std::abs(gw[j]));
            gnorm2 += gw[j] * gw[j];
        }
        if (gmax < options.tol) break;

        std::fill(direction.begin(), direction.end(), gb);
        for (std::size_t j = 0; j < p; ++j) {
            if (gw[j] == 0.0) continue;
            auto col = z.column(j);
            for (std::size_t i = 0; i < n; ++i) direction[i] += gw[j] * col[i];
        }

        step = std::min(step * 2.0, 1e3);
        double next = current;
        bool accepted = false;
        while (step > 1e-16) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = margin[i] - step * direction[i];
            for (std::size_t j = 0; j < p; ++j) w_trial[j] = w[j] - step * gw[j];
            next = objective(trial, w_trial);
            if (!std::isfinite(next)) throw TrainingError("learners: non-finite logistic loss");
            if (next <= current - 0.5 * step * gnorm2) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        margin.swap(trial);
        w.swap(w_trial);
        b -= step * gb;
        current = next;
    }

    lm.weights = w;
    lm.intercept = b;
    TrainedModel model;
    model.id = lambda > 0.0 ? ModelId::glmnet : ModelId::logreg;
    model.params = {{"lambda", lambda}};
    model.features = x.names();
    model.importance.resize(p);
    for (std::size_t j = 0; j < p; ++j) model.importance[j] = std::abs(w[j]);
    normalize(model.importance);
    model.body = std::move(lm);
    model.fit_time_s = seconds_since(start);
    return model;
}

// --- trees ------------------------------------------------------------------

TrainedModel fit_tree(const FeatureMatrix& x, std::span<const int> y, const TreeOptions& options) {
    check_inputs(x, y);
    const auto start = Clock::now();
    const auto binned = BinnedMatrix::build(x, options.max_bins);
    std::vector<double> target(y.begin(), y.end());
    std::vector<std::size_t> rows(x.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});

    GrowOptions grow;
    grow.max_depth = options.max_depth;
    grow.min_leaf = options.min_leaf;
    grow.min_gain = options.min_gain;
    auto grown = grow_tree(binned, std::move(rows), target, {}, grow, nullptr);

    TrainedModel model;
    model.id = ModelId::rpart;
    model.params = {{"max_depth", options.max_depth}, {"min_leaf", options.min_leaf}, {"min_gain", options.min_gain}};
    model.features = x.names();
    model.importance = grown.gain_by_feature;
    normalize(model.importance);
    TreeEnsemble ens;
    ens.trees.push_back(std::move(grown.tree));
    model.body = std::move(ens);
    model.fit_time_s = seconds_since(start);
    return model;
}

TrainedModel fit_forest(const FeatureMatrix& x, std::span<const int> y, const ForestOptions& options) {
    check_inputs(x, y);
    if (options.n_trees < 1) throw TrainingError("learners: forest needs at least one tree");
    const auto start = Clock::now();
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    const auto binned = BinnedMatrix::build(x, options.max_bins);
    std::vector<double> target(y.begin(), y.end());

    int mtry = options.mtry > 0 ? options.mtry : static_cast<int>(std::floor(std::sqrt(static_cast<double>(p))));
    mtry = std::clamp(mtry, 1, static_cast<int>(std::max<std::size_t>(p, 1)));

    GrowOptions grow;
    grow.max_depth = options.max_depth;
    grow.min_leaf = options.min_leaf;
    grow.mtry = mtry;

    std::vector<GrownTree> grown(static_cast<std::size_t>(options.n_trees));
    parallel_for(grown.size(), options.workers, [&](std::size_t t) {
        Rng rng(derive_seed(options.seed, {t}));
        std::vector<std::size_t> rows;
        if (options.replace) {
            const auto m = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::llround(static_cast<double>(n) * options.sample_fraction)));
            rows.resize(m);
            for (auto& r : rows) r = rng.below(n);
        } else {
            const auto m = std::clamp<std::size_t>(
                static_cast<std::size_t>(std::floor(static_cast<double>(n) * options.sample_fraction + 1e-9)), 1, n);
            rows = rng.sample_indices(n, m);
        }
        grown[t] = grow_tree(binned, std::move(rows), target, {}, grow, &rng);
    });

    TrainedModel model;
    model.id = options.replace ? ModelId::randomForest : ModelId::ranger;
    model.params = {{"n_trees", options.n_trees},
                    {"mtry", mtry},
                    {"sample_fraction", options.sample_fraction},
                    {"min_leaf", options.min_leaf}};
    model.features = x.names();
    model.importance.assign(p, 0.0);
    TreeEnsemble ens;
    for (auto& g : grown) {
        for (std::size_t f = 0; f < p; ++f) model.importance[f] += g.gain_by_feature[f];
        ens.trees.push_back(std::move(g.tree));
    }
    normalize(model.importance);
    model.body = std::move(ens);
    model.fit_time_s = seconds_since(start);
    return model;
}

TrainedModel fit_gbt(const FeatureMatrix& x, std::span<const int> y, const BoostOptions& options) {
    check_inputs(x, y);
    const auto start = Clock::now();
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();

    const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    const double pbar = std::clamp(ybar, 1e-12, 1.0 - 1e-12);
    TreeEnsemble ens;
    ens.boosted = true;
    ens.base_margin = std::log(pbar / (1.0 - pbar));

    TrainedModel model;
    model.id = ModelId::xgboost;
    model.params = {{"n_rounds", options.n_rounds},
                    {"learning_rate", options.learning_rate},
                    {"max_depth", options.max_depth},
                    {"subsample", options.subsample},
                    {"min_leaf", options.min_leaf}};
    model.features = x.names();
    model.importance.assign(p, 0.0);

    if (options.n_rounds > 0) {
        const auto binned = BinnedMatrix::build(x, options.max_bins);
        std::vector<double> margin(n, ens.base_margin);
        std::vector<double> grad(n);
        std::vector<double> hess(n);
        GrowOptions grow;
        grow.max_depth = options.max_depth;
        grow.min_leaf = options.min_leaf;
        grow.criterion = SplitCriterion::Newton;
        grow.leaf_scale = options.learning_rate;
        const auto sample_size = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::floor(static_cast<double>(n) * options.subsample + 1e-9)), 1, n);

        for (int round = 0; round < options.n_rounds; ++round) {
            for (std::size_t i = 0; i < n; ++i) {
                const double prob = logistic::sigmoid(margin[i]);
                grad[i] = y[i] - prob;
                hess[i] = prob * (1.0 - prob);
            }
            std::vector<std::size_t> rows;
            if (sample_size < n) {
                Rng rng(derive_seed(options.seed, {static_cast<std::uint64_t>(round)}));
                rows = rng.sample_indices(n, sample_size);
                std::sort(rows.begin(), rows.end());
            } else {
                rows.resize(n);
                std::iota(rows.begin(), rows.end(), std::size_t{0});
            }
            auto grown = grow_tree(binned, std::move(rows), grad, hess, grow, nullptr);
            for (std::size_t i = 0; i < n; ++i) margin[i] += predict_binned(grown, binned, i);
            for (std::size_t f = 0; f < p; ++f) model.importance[f] += grown.gain_by_feature[f];
            ens.trees.push_back(std::move(grown.tree));
        }
    }
    normalize(model.importance);
    model.body = std::move(ens);
    model.fit_time_s = seconds_since(start);
    return model;
}

TrainedModel fit_model(const ModelSpec& spec, const FeatureMatrix& x, std::span<const int> y, int workers) {
    const auto& hp = spec.params;
    TrainedModel model;
    switch (spec.id) {
        case ModelId::logreg: {
            model = fit_logistic(x, y, {});
            break;
        }
        case ModelId::glmnet: {
            LogisticOptions o;
            o.lambda = get_param(hp, "lambda", 0.01);
            model = fit_logistic(x, y, o);
            break;
        }
        case ModelId::rpart: {
            TreeOptions o;
            o.max_depth = get_int(hp, "max_depth", 5);
            o.min_leaf = get_int(hp, "min_leaf", 7);
            o.min_gain = get_param(hp, "min_gain", 0.0);
            model = fit_tree(x, y, o);
            break;
        }
        case ModelId::randomForest:
        case ModelId::ranger: {
            ForestOptions o;
            o.n_trees = get_int(hp, "n_trees", 500);
            o.mtry = get_int(hp, "mtry", 0);
            o.replace = spec.id == ModelId::randomForest;
            o.sample_fraction = o.replace ? 1.0 : get_param(hp, "sample_fraction", 1.0);
            o.min_leaf = get_int(hp, "min_leaf", 1);
            o.seed = spec.seed;
            o.workers = workers;
            model = fit_forest(x, y, o);
            break;
        }
        case ModelId::xgboost: {
            BoostOptions o;
            o.n_rounds = get_int(hp, "n_rounds", 100);
            o.learning_rate = get_param(hp, "learning_rate", 0.1);
            o.max_depth = get_int(hp, "max_depth", 3);
            o.subsample = get_param(hp, "subsample", 1.0);
            o.min_leaf = get_int(hp, "min_leaf", 5);
            o.seed = spec.seed;
            model = fit_gbt(x, y, o);
            break;
        }
    }
    model.id = spec.id;
    for (const auto& [k, v] : hp) model.params[k] = v;
    return model;
}

// --- scoring ----------------------------------------------------------------

std::vector<double> score(const TrainedModel& model, const FeatureMatrix& x) {
    if (x.rows() == 0) return {};
    const FeatureMatrix* input = &x;
    FeatureMatrix reordered;
    if (x.names() != model.features) {
        reordered = x.select(model.features);
        input = &reordered;
    }
    const std::size_t n = input->rows();
    std::vector<double> out(n, 0.0);

    if (const auto* lm = std::get_if<LogisticModel>(&model.body)) {
        std::vector<double> z(n, lm->intercept);
        for (std::size_t j = 0; j < lm->weights.size(); ++j) {
            if (lm->scale[j] == 0.0 || lm->weights[j] == 0.0) continue;
            const double coef = lm->weights[j] / lm->scale[j];
            auto col = input->column(j);
            for (std::size_t i = 0; i < n; ++i) z[i] += coef * (col[i] - lm->center[j]);
        }
        for (std::size_t i = 0; i < n; ++i) out[i] = logistic::sigmoid(z[i]);
        return out;
    }

    const auto& ens = std::get<TreeEnsemble>(model.body);
    if (ens.boosted) {
        for (std::size_t i = 0; i < n; ++i) {
            double m = ens.base_margin;
            for (const auto& t : ens.trees) m += t.predict(*input, i);
            out[i] = logistic::sigmoid(m);
        }
        return out;
    }
    const double inv = ens.trees.empty() ? 0.0 : 1.0 / static_cast<double>(ens.trees.size());
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (const auto& t : ens.trees) s += t.predict(*input, i);
        out[i] = std::clamp(s * inv, 0.0, 1.0);
    }
    return out;
}

TimedScores score_timed(const TrainedModel& model, const FeatureMatrix& x) {
    const auto start = Clock::now();
    TimedScores out;
    out.scores = score(model, x);
    out.seconds = seconds_since(start);
    return out;
}

std::map<std::string, double> importance(const TrainedModel& model) {
    std::map<std::string, double> out;
    for (std::size_t j = 0; j < model.features.size(); ++j) out[model.features[j]] = model.importance[j];
    return out;
}

// --- serialization ----------------------------------------------------------

nlohmann::json to_json(const TrainedModel& model) {
    using nlohmann::json;
    json doc;
    doc["format"] = "driveml.model";
    doc["version"] = 1;
    doc["model_id"] = std::string(to_string(model.id));
    doc["params"] = model.params;
    doc["features"] = model.features;
    doc["importance"] = model.importance;
    doc["fit_time_s"] = model.fit_time_s;
    if (const auto* lm = std::get_if<LogisticModel>(&model.body)) {
        doc["logistic"] = {{"center", lm->center},
                           {"scale", lm->scale},
                           {"weights", lm->weights},
                           {"intercept", lm->intercept}};
    } else {
        const auto& ens = std::get<TreeEnsemble>(model.body);
        json trees = json::array();
        for (const auto& t : ens.trees) {
            json f = json::array(), thr = json::array(), l = json::array(), r = json::array(), v = json::array();
            for (const auto& nd : t.nodes) {
                f.push_back(nd.feature);
                thr.push_back(nd.threshold);
                l.push_back(nd.left);
                r.push_back(nd.right);
                v.push_back(nd.value);
            }
            trees.push_back({{"feature", f}, {"threshold", thr}, {"left", l}, {"right", r}, {"value", v}});
        }
        doc["ensemble"] = {{"boosted", ens.boosted}, {"base_margin", ens.base_margin}, {"trees", trees}};
    }
    return doc;
}

TrainedModel model_from_json(const nlohmann::json& doc) {
    if (doc.value("format", "") != "driveml.model" || doc.value("version", 0) != 1) {
        throw DataError("learners: unsupported model document");
    }
    TrainedModel model;
    auto id = parse_model_id(doc.at("model_id").get<std::string>());
    if (!id) throw DataError("learners: unknown model id in document");
    model.id = *id;
    model.params = doc.at("params").get<Hyperparams>();
    model.features = doc.at("features").get<std::vector<std::string>>();
    model.importance = doc.at("importance").get<std::vector<double>>();
    model.fit_time_s = doc.value("fit_time_s", 0.0);
    if (doc.contains("logistic")) {
        const auto& l = doc.at("logistic");
        LogisticModel lm;
        lm.center = l.at("center").get<std::vector<double>>();
        lm.scale = l.at("scale").get<std::vector<double>>();
        lm.weights = l.at("weights").get<std::vector<double>>();
        lm.intercept = l.at("intercept").get<double>();
        model.body = std::move(lm);
    } else {
        const auto& e = doc.at("ensemble");
        TreeEnsemble ens;
        ens.boosted = e.at("boosted").get<bool>();
        ens.base_margin = e.at("base_margin").get<double>();
        for (const auto& t : e.at("trees")) {
            DecisionTree tree;
            const auto& f = t.at("feature");
            for (std::size_t i = 0; i < f.size(); ++i) {
                tree.nodes.push_back({f[i].get<int>(), t.at("threshold")[i].get<double>(), t.at("left")[i].get<int>(),
                                      t.at("right")[i].get<int>(), t.at("value")[i].get<double>()});
            }
            ens.trees.push_back(std::move(tree));
        }
        model.body = std::move(ens);
    }
    return model;
}

}  // namespace driveml
