#pragma once

#include "driveml/explain.hpp"
#include "driveml/mar.hpp"
#include "driveml/prep.hpp"
#include "driveml/table.hpp"
#include "driveml/tuning.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace driveml::report {

struct NumericSummary {
    double mean, sd, min, q1, median, q3, max;
};

struct ColumnSummary {
    std::string name;
    ColumnKind kind;
    std::size_t n = 0;
    std::size_t missing = 0;
    double missing_pct = 0.0;  // fraction in [0,1]
    std::optional<NumericSummary> numeric;
    std::size_t level_count = 0;
    std::vector<std::pair<std::string, std::size_t>> top_levels;  // at most five, most frequent first
};

struct DescriptiveSummary {
    std::size_t rows = 0;
    std::vector<ColumnSummary> columns;
};

/// One record per column in table order. Numeric and date columns get
/// type-7 quantiles; categorical and boolean columns get level counts.
DescriptiveSummary describe(const Table& t);

struct ReportBundle {
    std::string title;
    std::string dataset;
    DescriptiveSummary summary;
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
    std::vector<std::string> selected;
    std::vector<prep::Rejection> rejections;
    bool mar_enabled = false;
    mar::MarReport mar;
    std::vector<tuning::Evaluation> evaluations;
    std::optional<std::size_t> best;
    std::vector<std::pair<std::string, double>> importance;  // best model, ordered
    std::vector<explain::PdpCurve> pdps;
    std::vector<std::pair<std::string, std::string>> config;  // effective run configuration
    bool timings = true;
    std::string footer;  // the only line that may vary between identical runs
};

/// Whole HTML document. The footer is emitted on a line of its own.
std::string render_html(const ReportBundle& bundle);

void write_html(const ReportBundle& bundle, const std::filesystem::path& path);

}  // namespace driveml::report
