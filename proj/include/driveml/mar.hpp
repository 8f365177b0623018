#pragma once

#include "driveml/table.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace driveml::mar {

struct MarConfig {
    double auc_threshold = 0.8;
    int cv_folds = 5;
    int tree_max_depth = 5;
    int tree_min_leaf = 5;
    std::uint64_t seed = 0;
    int workers = 1;

    void validate() const;
};

enum class Verdict { Retained, Dropped, Skipped };
std::string_view to_string(Verdict v);

struct MarFinding {
    std::string feature;
    std::size_t missing_count = 0;
    std::optional<double> aux_auc;  // mean out-of-fold AUC; empty when skipped
    Verdict verdict = Verdict::Skipped;
    std::string note;
};

struct MarReport {
    std::vector<MarFinding> findings;
    std::vector<std::string> added_columns;

    bool empty() const { return findings.empty(); }
};

/// Name of the indicator column appended for `feature`.
std::string indicator_name(const std::string& feature);

/// 1 where the column is missing, else 0.
Column mar_indicator(const Table& t, std::size_t column);

struct MarResult {
    Table augmented;
    MarReport report;
};

/// For every feature with at least max(10, 0.005 n) missing cells, scores how
/// well its missingness is predicted from the other features with a
/// cross-validated decision tree; predictable indicators are appended.
MarResult mar_scan(const Table& train, const Schema& schema, const MarConfig& config);

nlohmann::json to_json(const MarReport& report);

}  // namespace driveml::mar
