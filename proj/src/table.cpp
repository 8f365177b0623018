#include "driveml/table.hpp"

#include "driveml/error.hpp"
#include "driveml/rng.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <unordered_map>

namespace driveml {

namespace {

std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::vector<std::uint8_t> mask_or_default(std::vector<std::uint8_t> missing, std::size_t n) {
    if (missing.empty()) missing.assign(n, 0);
    if (missing.size() != n) throw std::invalid_argument("missing mask length mismatch");
    return missing;
}

}  // namespace

std::string_view to_string(ColumnKind kind) {
    switch (kind) {
        case ColumnKind::Numeric: return "numeric";
        case ColumnKind::Categorical: return "categorical";
        case ColumnKind::Date: return "date";
        case ColumnKind::Boolean: return "boolean";
    }
    return "unknown";
}

std::size_t Column::missing_count() const {
    return static_cast<std::size_t>(std::count(missing.begin(), missing.end(), std::uint8_t{1}));
}

std::string Column::text(std::size_t row) const {
    if (is_missing(row)) return {};
    switch (kind) {
        case ColumnKind::Numeric: return format_number(values[row]);
        case ColumnKind::Boolean: return values[row] != 0.0 ? "true" : "false";
        case ColumnKind::Date: return format_date(static_cast<int>(values[row]));
        case ColumnKind::Categorical: return levels[static_cast<std::size_t>(codes[row])];
    }
    return {};
}

Column Column::numeric(std::string name, std::vector<double> values, std::vector<std::uint8_t> missing) {
    Column c;
    c.name = std::move(name);
    c.kind = ColumnKind::Numeric;
    c.missing = mask_or_default(std::move(missing), values.size());
    c.values = std::move(values);
    return c;
}

Column Column::boolean(std::string name, std::vector<double> values, std::vector<std::uint8_t> missing) {
    Column c = numeric(std::move(name), std::move(values), std::move(missing));
    c.kind = ColumnKind::Boolean;
    return c;
}

Column Column::date(std::string name, std::vector<double> days, std::vector<std::uint8_t> missing) {
    Column c = numeric(std::move(name), std::move(days), std::move(missing));
    c.kind = ColumnKind::Date;
    return c;
}

Column Column::categorical(std::string name, const std::vector<std::optional<std::string>>& cells) {
    Column c;
    c.name = std::move(name);
    c.kind = ColumnKind::Categorical;
    c.codes.assign(cells.size(), 0);
    c.missing.assign(cells.size(), 0);
    std::unordered_map<std::string, std::int32_t> index;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!cells[i]) {
            c.missing[i] = 1;
            continue;
        }
        auto [it, inserted] = index.emplace(*cells[i], static_cast<std::int32_t>(c.levels.size()));
        if (inserted) c.levels.push_back(*cells[i]);
        c.codes[i] = it->second;
    }
    return c;
}

Table::Table(std::string name, std::vector<Column> columns) : name_(std::move(name)) {
    for (auto& c : columns) add_column(std::move(c));
}

const Column& Table::column(std::string_view name) const {
    auto idx = find(name);
    if (!idx) throw DataError("table: no column named '" + std::string(name) + "'");
    return columns_[*idx];
}

std::optional<std::size_t> Table::find(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i].name == name) return i;
    }
    return std::nullopt;
}

std::vector<std::string> Table::column_names() const {
    std::vector<std::string> names;
    names.reserve(columns_.size());
    for (const auto& c : columns_) names.push_back(c.name);
    return names;
}

void Table::add_column(Column column) {
    if (columns_.empty()) {
        n_rows_ = column.size();
    } else if (column.size() != n_rows_) {
        throw std::invalid_argument("table: column '" + column.name + "' has " + std::to_string(column.size()) +
                                    " cells, expected " + std::to_string(n_rows_));
    }
    const bool is_cat = column.kind == ColumnKind::Categorical;
    if ((is_cat && column.codes.size() != column.size()) || (!is_cat && column.values.size() != column.size())) {
        throw std::invalid_argument("table: column '" + column.name + "' value/mask length mismatch");
    }
    columns_.push_back(std::move(column));
}

void Table::remove_column(std::string_view name) {
    auto idx = find(name);
    if (!idx) return;
    columns_.erase(columns_.begin() + static_cast<std::ptrdiff_t>(*idx));
}

Table Table::take_rows(std::span<const std::size_t> rows) const {
    Table out(name_);
    for (const auto& c : columns_) {
        Column nc;
        nc.name = c.name;
        nc.kind = c.kind;
        nc.levels = c.levels;
        nc.missing.reserve(rows.size());
        for (auto r : rows) nc.missing.push_back(c.missing.at(r));
        if (c.is_categorical()) {
            nc.codes.reserve(rows.size());
            for (auto r : rows) nc.codes.push_back(c.codes[r]);
        } else {
            nc.values.reserve(rows.size());
            for (auto r : rows) nc.values.push_back(c.values[r]);
        }
        out.add_column(std::move(nc));
    }
    if (columns_.empty()) out.n_rows_ = 0;
    return out;
}

bool Table::operator==(const Table& other) const {
    if (n_rows_ != other.n_rows_ || columns_.size() != other.columns_.size()) return false;
    for (std::size_t j = 0; j < columns_.size(); ++j) {
        const auto& a = columns_[j];
        const auto& b = other.columns_[j];
        if (a.name != b.name || a.kind != b.kind || a.missing != b.missing) return false;
        for (std::size_t i = 0; i < n_rows_; ++i) {
            if (a.is_missing(i)) continue;
            if (a.text(i) != b.text(i)) return false;
        }
    }
    return true;
}

// --- schema -----------------------------------------------------------------

std::vector<std::size_t> Schema::features() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < roles.size(); ++i) {
        if (roles[i] == Role::Feature) out.push_back(i);
    }
    return out;
}

std::vector<std::string> Schema::feature_names(const Table& t) const {
    std::vector<std::string> out;
    for (auto i : features()) out.push_back(t.column(i).name);
    return out;
}

std::string label_text(const Column& c, std::size_t row) { return c.text(row); }

Schema infer_schema(const Table& t, const SchemaOptions& options) {
    auto lookup = [&](const std::string& name, const char* what) {
        auto idx = t.find(name);
        if (!idx) throw ConfigError("table: " + std::string(what) + " column '" + name + "' not found");
        return *idx;
    };
    if (options.target.empty()) throw ConfigError("table: target column not specified");

    Schema schema;
    schema.roles.assign(t.n_cols(), Role::Feature);
    schema.target = lookup(options.target, "target");
    schema.target_name = options.target;

    const Column& target = t.column(schema.target);
    std::set<std::string> levels;
    for (std::size_t i = 0; i < target.size(); ++i) {
        if (!target.is_missing(i)) levels.insert(label_text(target, i));
    }
    if (levels.size() != 2) {
        throw DataError("table: target not binary ('" + options.target + "' has " + std::to_string(levels.size()) +
                        " distinct values)");
    }
    // Lexicographically greater level; for {0,1} and {false,true} this is the 1 level.
    schema.positive_label = *levels.rbegin();

    if (options.onlykeep) {
        for (const auto& keep : *options.onlykeep) lookup(keep, "onlykeep");
        for (std::size_t i = 0; i < t.n_cols(); ++i) {
            const auto& name = t.column(i).name;
            if (std::find(options.onlykeep->begin(), options.onlykeep->end(), name) == options.onlykeep->end()) {
                schema.roles[i] = Role::Dropped;
            }
        }
    }
    if (options.uid) schema.roles[lookup(*options.uid, "uid")] = Role::UID;
    for (const auto& d : options.drop) schema.roles[lookup(d, "drop")] = Role::Dropped;
    schema.roles[schema.target] = Role::Target;
    return schema;
}

std::vector<int> target_labels(const Column& target, std::string_view positive_label) {
    std::vector<int> y(target.size());
    for (std::size_t i = 0; i < target.size(); ++i) {
        if (target.is_missing(i)) {
            throw DataError("table: target '" + target.name + "' has a missing value at row " + std::to_string(i + 1));
        }
        y[i] = label_text(target, i) == positive_label ? 1 : 0;
    }
    return y;
}

std::vector<int> target_labels(const Table& t, const Schema& schema) {
    return target_labels(t.column(schema.target), schema.positive_label);
}

// --- splitting --------------------------------------------------------------

SplitIndices split_indices(const Table& t, const Schema& schema, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ConfigError("table: test fraction must be in (0,1)");
    }
    const auto y = target_labels(t, schema);
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(i);
    for (int c = 0; c < 2; ++c) {
        if (by_class[c].size() < 2) {
            throw DataError("table: class " + std::to_string(c) + " has fewer than 2 rows; cannot split");
        }
    }

    // Per-class floors, topped up to floor(n * f) by largest fractional remainder.
    constexpr double eps = 1e-9;
    std::size_t take[2];
    double remainder[2];
    for (int c = 0; c < 2; ++c) {
        const double exact = static_cast<double>(by_class[c].size()) * test_fraction;
        take[c] = static_cast<std::size_t>(std::floor(exact + eps));
        remainder[c] = exact - static_cast<double>(take[c]);
    }
    const auto total = static_cast<std::size_t>(std::floor(static_cast<double>(y.size()) * test_fraction + eps));
    while (take[0] + take[1] < total) {
        const int c = remainder[1] > remainder[0] ? 1 : 0;
        ++take[c];
        remainder[c] = -1.0;
    }

    Rng rng(derive_seed(seed, {hash_tag("split")}));
    SplitIndices out;
    for (int c = 0; c < 2; ++c) {
        auto idx = by_class[c];
        rng.shuffle(idx);
        out.test.insert(out.test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take[c]));
        out.train.insert(out.train.end(), idx.begin() + static_cast<std::ptrdiff_t>(take[c]), idx.end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

std::pair<Table, Table> split_train_test(const Table& t, const Schema& schema, double test_fraction,
                                         std::uint64_t seed) {
    auto idx = split_indices(t, schema, test_fraction, seed);
    return {t.take_rows(idx.train), t.take_rows(idx.test)};
}

// --- dates ------------------------------------------------------------------

std::optional<int> civil_to_days(int year, unsigned month, unsigned day) {
    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
    if (!ymd.ok()) return std::nullopt;
    return static_cast<int>(sys_days{ymd}.time_since_epoch().count());
}

CivilDate days_to_civil(int days) {
    using namespace std::chrono;
    const sys_days sd{std::chrono::days{days}};
    const year_month_day ymd{sd};
    const weekday wd{sd};
    return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
            wd.iso_encoding()};
}

namespace {

std::optional<int> parse_fixed_int(std::string_view s) {
    if (s.empty()) return std::nullopt;
    for (char c : s) {
        if (c < '0' || c > '9') return std::nullopt;
    }
    int v = 0;
    std::from_chars(s.data(), s.data() + s.size(), v);
    return v;
}

bool valid_time_suffix(std::string_view rest) {
    // Accepts "", "THH:MM", "THH:MM:SS[.fff]" with optional "Z" or "+HH:MM"/"-HH:MM";
    // the time part is ignored.
    if (rest.empty()) return true;
    if (rest[0] != 'T' && rest[0] != ' ') return false;
    rest.remove_prefix(1);
    if (!rest.empty() && rest.back() == 'Z') rest.remove_suffix(1);
    if (rest.size() > 6 && (rest[rest.size() - 6] == '+' || rest[rest.size() - 6] == '-') &&
        rest[rest.size() - 3] == ':') {
        rest.remove_suffix(6);
    }
    if (rest.size() < 5 || rest[2] != ':') return false;
    if (!parse_fixed_int(rest.substr(0, 2)) || !parse_fixed_int(rest.substr(3, 2))) return false;
    rest.remove_prefix(5);
    if (rest.empty()) return true;
    if (rest.size() < 3 || rest[0] != ':' || !parse_fixed_int(rest.substr(1, 2))) return false;
    rest.remove_prefix(3);
    if (rest.empty()) return true;
    if (rest[0] != '.') return false;
    return parse_fixed_int(rest.substr(1)).has_value();
}

}  // namespace

std::optional<int> parse_date(std::string_view s, DateFormat format) {
    if (format == DateFormat::Iso) {
        if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
        auto y = parse_fixed_int(s.substr(0, 4));
        auto m = parse_fixed_int(s.substr(5, 2));
        auto d = parse_fixed_int(s.substr(8, 2));
        if (!y || !m || !d || !valid_time_suffix(s.substr(10))) return std::nullopt;
        return civil_to_days(*y, static_cast<unsigned>(*m), static_cast<unsigned>(*d));
    }
    if (s.size() != 10 || s[2] != '-' || s[5] != '-') return std::nullopt;
    auto d = parse_fixed_int(s.substr(0, 2));
    auto m = parse_fixed_int(s.substr(3, 2));
    auto y = parse_fixed_int(s.substr(6, 4));
    if (!y || !m || !d) return std::nullopt;
    return civil_to_days(*y, static_cast<unsigned>(*m), static_cast<unsigned>(*d));
}

std::string format_date(int days) {
    const auto c = days_to_civil(days);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", c.year, c.month, c.day);
    return buf;
}

}  // namespace driveml
