#pragma once

#include "driveml/mar.hpp"
#include "driveml/matrix.hpp"
#include "driveml/table.hpp"

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace driveml::prep {

enum class Imputation { MeanMedian, ModeOnly };

struct PrepConfig {
    Imputation missimpute = Imputation::MeanMedian;
    bool auto_mar = false;
    bool dummyvar = true;
    std::size_t char_var_limit = 15;
    double aucv = 0.002;
    double corr = 0.98;
    bool outlier_flag = true;
    std::size_t max_interaction_pairs = 200;
    mar::MarConfig mar;

    void validate() const;
};

enum class RejectReason { ZeroVariance, HighCorrelation, LowAUC, HighCardinality, Duplicate, AllMissing };
std::string_view to_string(RejectReason r);

struct Rejection {
    std::string feature;
    RejectReason reason;
    std::string partner;     // HighCorrelation only
    double statistic = 0.0;  // |r|, AUC or level count, depending on reason
};

struct ImputeValue {
    std::string column;
    ColumnKind kind;
    double value = 0.0;  // numeric / boolean / date
    std::string level;   // categorical
};

struct OutlierSpec {
    std::string column;
    double lower_fence = 0.0;
    double upper_fence = 0.0;
    double cap_low = 0.0;   // 5th percentile
    double cap_high = 0.0;  // 95th percentile
    std::size_t train_outliers = 0;
};

/// Categorical encoding: one 0/1 column per train level, or (ordinal) a single
/// column of level ranks when dummy encoding is disabled.
struct LevelMap {
    std::string column;
    std::vector<std::string> levels;  // sorted train levels
    std::vector<std::string> names;   // output column names
    bool ordinal = false;
    std::string fallback_level;  // ordinal encoding of unseen levels
};

struct SourceColumn {
    std::string name;
    ColumnKind kind;
};

struct PrepPipeline {
    std::string target;
    std::string positive_label;
    std::size_t rows_seen = 0;
    std::size_t rows_after_dedupe = 0;
    std::vector<SourceColumn> sources;
    std::vector<ImputeValue> imputation;
    std::vector<OutlierSpec> outliers;
    std::vector<std::string> date_columns;
    std::vector<std::pair<std::string, std::string>> interactions;
    std::vector<LevelMap> encodings;
    std::vector<std::string> mar_indicators;  // source columns whose missingness is kept
    mar::MarReport mar_report;
    std::vector<std::string> candidates;
    std::vector<std::string> selected;
    std::vector<Rejection> rejections;
};

// Individual stages. Each fit_* reads the training table only.

std::string sanitize_name(std::string_view name);
/// Lowercase, non-alphanumerics to '_', collisions suffixed _2, _3, ...
Table clean_names(const Table& t);
Table drop_duplicate_rows(const Table& t);
/// Names, duplicate rows and non-finite numerics.
Table clean(const Table& t);

/// One value per column of `train`; all-missing columns are rejected instead.
std::vector<ImputeValue> fit_impute(const Table& train, const PrepConfig& config, std::vector<Rejection>& rejected);
Table apply_impute(const Table& t, const std::vector<ImputeValue>& values);

/// Tukey fences and 5th/95th percentile caps for every numeric column.
std::vector<OutlierSpec> fit_outliers(const Table& train);
/// Caps values outside the fences; adds X_out_flag for columns with train outliers.
Table apply_outliers(const Table& t, const std::vector<OutlierSpec>& specs, bool add_flags = true);

/// Replaces each date column with _year, _month, _day, _weekday, _epoch_days.
Table engineer_dates(const Table& t);

std::vector<std::pair<std::string, std::string>> interaction_pairs(const std::vector<std::string>& numeric_columns,
                                                                   std::size_t max_pairs);
Table apply_interactions(const Table& t, const std::vector<std::pair<std::string, std::string>>& pairs);
/// All numeric (not boolean) columns of `t` paired in column order.
Table engineer_interactions(const Table& t, std::size_t max_pairs = 200);

std::vector<LevelMap> fit_onehot(const Table& train, const PrepConfig& config, std::vector<Rejection>& rejected);
Table apply_onehot(const Table& t, const std::vector<LevelMap>& maps);

struct Selection {
    std::vector<std::string> selected;
    std::vector<Rejection> rejected;
};

/// Zero variance, then pairwise correlation (later column dropped), then
/// univariate AUC separation from 0.5.
Selection select_features(const FeatureMatrix& candidates, std::span<const int> labels, const PrepConfig& config);

PrepPipeline fit_prep(const Table& train, const Schema& schema, const PrepConfig& config);

/// Replays the fitted transforms. Output: the selected features in order,
/// then the target as 0/1 when the input carries it.
Table apply_prep(const PrepPipeline& pipeline, const Table& t);

nlohmann::json to_json(const PrepPipeline& pipeline);
PrepPipeline pipeline_from_json(const nlohmann::json& doc);

}  // namespace driveml::prep
