#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace driveml {

enum class ColumnKind { Numeric, Categorical, Date, Boolean };

std::string_view to_string(ColumnKind kind);

/// One typed column with a per-cell missingness mask.
///
/// Numeric, Date and Boolean cells live in `values` (dates as days since
/// 1970-01-01, booleans as 0/1). Categorical cells are indices into `levels`,
/// stored in `codes`. Cells whose mask is set carry an unspecified value.
struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::Numeric;
    std::vector<double> values;
    std::vector<std::int32_t> codes;
    std::vector<std::string> levels;
    std::vector<std::uint8_t> missing;

    std::size_t size() const { return missing.size(); }
    bool is_missing(std::size_t row) const { return missing[row] != 0; }
    std::size_t missing_count() const;

    bool is_categorical() const { return kind == ColumnKind::Categorical; }

    /// Cell rendered as text (level name, ISO date, number, true/false);
    /// empty string for missing cells.
    std::string text(std::size_t row) const;

    static Column numeric(std::string name, std::vector<double> values,
                          std::vector<std::uint8_t> missing = {});
    static Column boolean(std::string name, std::vector<double> values,
                          std::vector<std::uint8_t> missing = {});
    static Column date(std::string name, std::vector<double> days,
                       std::vector<std::uint8_t> missing = {});
    /// Interns levels in order of first appearance. std::nullopt marks a missing cell.
    static Column categorical(std::string name, const std::vector<std::optional<std::string>>& cells);
};

/// Column-typed table. Every column has exactly n_rows() cells.
class Table {
public:
    Table() = default;
    explicit Table(std::string name) : name_(std::move(name)) {}
    Table(std::string name, std::vector<Column> columns);

    const std::string& name() const { return name_; }
    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_cols() const { return columns_.size(); }

    const std::vector<Column>& columns() const { return columns_; }
    const Column& column(std::size_t i) const { return columns_.at(i); }
    const Column& column(std::string_view name) const;
    Column& mutable_column(std::size_t i) { return columns_.at(i); }

    std::optional<std::size_t> find(std::string_view name) const;
    std::vector<std::string> column_names() const;

    /// Appends a column; its length must match n_rows (or define it for an empty table).
    void add_column(Column column);
    void remove_column(std::string_view name);

    /// Rows at the given indices, in the given order.
    Table take_rows(std::span<const std::size_t> rows) const;

    bool operator==(const Table& other) const;

private:
    std::string name_;
    std::vector<Column> columns_;
    std::size_t n_rows_ = 0;
};

struct CsvOptions {
    std::set<std::string> missing_tokens{"", "NA", "NaN", "null", "N/A"};
};

/// RFC-4180 CSV with a mandatory header row. Column kinds are inferred:
/// Numeric, then Date, then Boolean, falling back to Categorical.
Table read_csv(const std::filesystem::path& path, const CsvOptions& options = {});
Table parse_csv(std::string_view text, std::string name = "table", const CsvOptions& options = {});

void write_csv(const Table& table, const std::filesystem::path& path);
std::string to_csv(const Table& table);

enum class Role { Feature, Target, UID, Dropped };

struct Schema {
    std::vector<Role> roles;
    std::size_t target = 0;
    std::string target_name;
    std::string positive_label;

    std::vector<std::size_t> features() const;
    std::vector<std::string> feature_names(const Table& t) const;
};

struct SchemaOptions {
    std::string target;
    std::optional<std::string> uid;
    std::vector<std::string> drop;
    std::optional<std::vector<std::string>> onlykeep;
};

Schema infer_schema(const Table& t, const SchemaOptions& options);

/// Target column as 0/1 labels (1 = positive label). Throws on missing cells.
std::vector<int> target_labels(const Table& t, const Schema& schema);
std::vector<int> target_labels(const Column& target, std::string_view positive_label);

/// Text form of a target cell used for the positive-label rule.
std::string label_text(const Column& c, std::size_t row);

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Stratified split. Both index lists are ascending.
SplitIndices split_indices(const Table& t, const Schema& schema, double test_fraction, std::uint64_t seed);
std::pair<Table, Table> split_train_test(const Table& t, const Schema& schema, double test_fraction,
                                         std::uint64_t seed);

/// Days since 1970-01-01 for a proleptic Gregorian date; nullopt when invalid.
std::optional<int> civil_to_days(int year, unsigned month, unsigned day);

struct CivilDate {
    int year;
    unsigned month;
    unsigned day;
    unsigned weekday;  // 1 = Monday .. 7 = Sunday
};
CivilDate days_to_civil(int days);

/// ISO-8601 ("2020-01-31", optional time part) or "31-01-2020".
enum class DateFormat { Iso, DayMonthYear };
std::optional<int> parse_date(std::string_view text, DateFormat format);
std::string format_date(int days);

}  // namespace driveml
