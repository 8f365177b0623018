#include "driveml/mar.hpp"

#include "driveml/error.hpp"
#include "driveml/folds.hpp"
#include "driveml/learners.hpp"
#include "driveml/metrics.hpp"
#include "driveml/parallel.hpp"
#include "driveml/stats.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <map>

namespace driveml::mar {

void MarConfig::validate() const {
    if (!(auc_threshold > 0.5 && auc_threshold < 1.0)) throw ConfigError("mar: auc threshold must be in (0.5,1)");
    if (cv_folds < 2) throw ConfigError("mar: cv folds must be >= 2");
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Retained: return "Retained";
        case Verdict::Dropped: return "Dropped";
        case Verdict::Skipped: return "Skipped";
    }
    return "unknown";
}

std::string indicator_name(const std::string& feature) { return feature + "_mar"; }

Column mar_indicator(const Table& t, std::size_t column) {
    const Column& src = t.column(column);
    std::vector<double> flag(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) flag[i] = src.is_missing(i) ? 1.0 : 0.0;
    return Column::boolean(indicator_name(src.name), std::move(flag));
}

namespace {

// Throwaway fill used only for the auxiliary models: median for ordered
// kinds, modal level code for categoricals.
FeatureMatrix filled_features(const Table& t, const std::vector<std::size_t>& features) {
    std::vector<std::string> names;
    for (auto f : features) names.push_back(t.column(f).name);
    FeatureMatrix x(t.n_rows(), names);
    for (std::size_t j = 0; j < features.size(); ++j) {
        const Column& c = t.column(features[j]);
        auto dst = x.column(j);
        if (c.is_categorical()) {
            std::vector<std::size_t> counts(c.levels.size(), 0);
            for (std::size_t i = 0; i < c.size(); ++i) {
                if (!c.is_missing(i)) ++counts[static_cast<std::size_t>(c.codes[i])];
            }
            const auto mode = counts.empty() ? 0 : std::max_element(counts.begin(), counts.end()) - counts.begin();
            for (std::size_t i = 0; i < c.size(); ++i) {
                dst[i] = c.is_missing(i) ? static_cast<double>(mode) : static_cast<double>(c.codes[i]);
            }
        } else {
            std::vector<double> present;
            for (std::size_t i = 0; i < c.size(); ++i) {
                if (!c.is_missing(i)) present.push_back(c.values[i]);
            }
            const double fill = present.empty() ? 0.0 : stats::median(present);
            for (std::size_t i = 0; i < c.size(); ++i) dst[i] = c.is_missing(i) ? fill : c.values[i];
        }
    }
    return x;
}

}  // namespace

MarResult mar_scan(const Table& train, const Schema& schema, const MarConfig& config) {
    config.validate();
    const std::size_t n = train.n_rows();
    const auto features = schema.features();
    const auto filled = filled_features(train, features);

    std::vector<std::size_t> candidates;  // positions within `features`
    for (std::size_t k = 0; k < features.size(); ++k) {
        if (train.column(features[k]).missing_count() > 0) candidates.push_back(k);
    }
    const auto floor_count =
        std::max<std::size_t>(10, static_cast<std::size_t>(std::ceil(0.005 * static_cast<double>(n))));

    std::vector<MarFinding> findings(candidates.size());
    parallel_for(candidates.size(), config.workers, [&](std::size_t k) {
        const std::size_t pos = candidates[k];
        const Column& col = train.column(features[pos]);
        MarFinding& out = findings[k];
        out.feature = col.name;
        out.missing_count = col.missing_count();
        const std::size_t present = n - out.missing_count;

        if (out.missing_count < floor_count) {
            out.note = "fewer than " + std::to_string(floor_count) + " missing cells";
            return;
        }
        if (present == 0) {
            out.note = "indicator is constant (column fully missing)";
            return;
        }
        if (present < static_cast<std::size_t>(config.cv_folds)) {
            out.note = "too few observed cells for cross-validation";
            return;
        }
        std::vector<std::string> others;
        for (std::size_t j = 0; j < features.size(); ++j) {
            if (j != pos) others.push_back(filled.names()[j]);
        }
        if (others.empty()) {
            out.note = "no other features to model missingness";
            return;
        }
        const auto x = filled.select(others);
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = col.is_missing(i) ? 1 : 0;

        const auto fold = stratified_folds(y, config.cv_folds, derive_seed(config.seed, {hash_tag(col.name)}));
        TreeOptions tree;
        tree.max_depth = config.tree_max_depth;
        tree.min_leaf = config.tree_min_leaf;
        double total = 0.0;
        for (int f = 0; f < config.cv_folds; ++f) {
            std::vector<std::size_t> fit_rows, val_rows;
            for (std::size_t i = 0; i < n; ++i) (fold[i] == f ? val_rows : fit_rows).push_back(i);
            std::vector<int> fit_y, val_y;
            for (auto i : fit_rows) fit_y.push_back(y[i]);
            for (auto i : val_rows) val_y.push_back(y[i]);
            const auto model = fit_tree(x.take_rows(fit_rows), fit_y, tree);
            const auto s = score(model, x.take_rows(val_rows));
            total += metrics::auc(s, val_y);
        }
        out.aux_auc = total / config.cv_folds;
        out.verdict = *out.aux_auc >= config.auc_threshold ? Verdict::Retained : Verdict::Dropped;
    });

    MarResult result{train, {}};
    for (auto& f : findings) {
        if (f.verdict == Verdict::Retained) {
            const auto idx = *train.find(f.feature);
            result.augmented.add_column(mar_indicator(train, idx));
            result.report.added_columns.push_back(indicator_name(f.feature));
        }
        result.report.findings.push_back(std::move(f));
    }
    return result;
}

nlohmann::json to_json(const MarReport& report) {
    nlohmann::json findings = nlohmann::json::array();
    for (const auto& f : report.findings) {
        findings.push_back({{"feature", f.feature},
                            {"missing_count", f.missing_count},
                            {"aux_auc", f.aux_auc ? nlohmann::json(*f.aux_auc) : nlohmann::json()},
                            {"verdict", std::string(to_string(f.verdict))},
                            {"note", f.note}});
    }
    return {{"findings", findings}, {"added_columns", report.added_columns}};
}

}  // namespace driveml::mar
