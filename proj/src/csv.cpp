#include "driveml/error.hpp"
#include "driveml/table.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace driveml {

namespace {

struct Record {
    std::vector<std::string> fields;
    std::size_t line = 0;  // 1-based line on which the record starts
};

std::vector<Record> parse_records(std::string_view text) {
    std::vector<Record> records;
    Record current;
    std::string field;
    std::size_t line = 1;
    std::size_t i = 0;
    bool in_quotes = false;
    bool field_started = false;
    current.line = 1;

    auto end_field = [&] {
        current.fields.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        const bool blank = current.fields.size() == 1 && current.fields[0].empty();
        if (!blank) records.push_back(std::move(current));
        current = Record{};
        current.line = line;
    };

    while (i < text.size()) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    i += 2;
                    continue;
                }
                in_quotes = false;
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            ++i;
            continue;
        }
        if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
            ++i;
            ++line;
            end_record();
        } else if (c == '\n') {
            ++line;
            end_record();
        } else {
            field.push_back(c);
            field_started = true;
        }
        ++i;
    }
    if (in_quotes) throw DataError("csv: unterminated quoted field starting on line " + std::to_string(current.line));
    if (field_started || !field.empty() || !current.fields.empty()) end_record();
    return records;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_number(std::string_view s) {
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<bool> parse_bool(std::string_view s) {
    if (s == "true" || s == "TRUE" || s == "True" || s == "T" || s == "1") return true;
    if (s == "false" || s == "FALSE" || s == "False" || s == "F" || s == "0") return false;
    return std::nullopt;
}

Column infer_column(std::string name, const std::vector<std::optional<std::string_view>>& cells) {
    const std::size_t n = cells.size();
    std::vector<std::uint8_t> missing(n, 0);
    for (std::size_t i = 0; i < n; ++i) missing[i] = cells[i] ? 0 : 1;

    auto try_all = [&](auto&& parse) -> std::optional<std::vector<double>> {
        std::vector<double> out(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (!cells[i]) continue;
            auto v = parse(*cells[i]);
            if (!v) return std::nullopt;
            out[i] = static_cast<double>(*v);
        }
        return out;
    };

    if (auto nums = try_all(parse_number)) {
        // Non-finite numerics become missing.
        for (std::size_t i = 0; i < n; ++i) {
            if (!missing[i] && !std::isfinite((*nums)[i])) {
                missing[i] = 1;
                (*nums)[i] = 0.0;
            }
        }
        return Column::numeric(std::move(name), std::move(*nums), std::move(missing));
    }
    for (auto fmt : {DateFormat::Iso, DateFormat::DayMonthYear}) {
        if (auto days = try_all([fmt](std::string_view s) { return parse_date(s, fmt); })) {
            return Column::date(std::move(name), std::move(*days), std::move(missing));
        }
    }
    if (auto flags = try_all(parse_bool)) {
        return Column::boolean(std::move(name), std::move(*flags), std::move(missing));
    }
    std::vector<std::optional<std::string>> owned(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (cells[i]) owned[i] = std::string(*cells[i]);
    }
    return Column::categorical(std::move(name), owned);
}

bool needs_quotes(std::string_view s) {
    if (s.empty()) return false;
    if (s.front() == ' ' || s.back() == ' ' || s.front() == '\t' || s.back() == '\t') return true;
    return s.find_first_of(",\"\r\n") != std::string_view::npos;
}

void write_field(std::ostream& os, std::string_view s) {
    if (!needs_quotes(s)) {
        os << s;
        return;
    }
    os << '"';
    for (char c : s) {
        if (c == '"') os << '"';
        os << c;
    }
    os << '"';
}

}  // namespace

Table parse_csv(std::string_view text, std::string name, const CsvOptions& options) {
    if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
        static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF) {
        text.remove_prefix(3);
    }
    auto records = parse_records(text);
    if (records.empty()) throw DataError("csv: missing header row");

    const auto& header = records.front().fields;
    const std::size_t n_cols = header.size();
    const std::size_t n_rows = records.size() - 1;
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].fields.size() != n_cols) {
            throw DataError("csv: line " + std::to_string(records[r].line) + " has " +
                            std::to_string(records[r].fields.size()) + " fields, expected " +
                            std::to_string(n_cols));
        }
    }

    Table table(std::move(name));
    std::vector<std::optional<std::string_view>> cells(n_rows);
    for (std::size_t j = 0; j < n_cols; ++j) {
        for (std::size_t r = 0; r < n_rows; ++r) {
            std::string_view raw = trim(records[r + 1].fields[j]);
            if (options.missing_tokens.count(std::string(raw)) != 0) {
                cells[r] = std::nullopt;
            } else {
                cells[r] = raw;
            }
        }
        table.add_column(infer_column(std::string(trim(header[j])), cells));
    }
    return table;
}

Table read_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("csv: cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw DataError("csv: read failure on '" + path.string() + "'");
    return parse_csv(buf.str(), path.stem().string(), options);
}

std::string to_csv(const Table& table) {
    std::ostringstream os;
    for (std::size_t j = 0; j < table.n_cols(); ++j) {
        if (j) os << ',';
        write_field(os, table.column(j).name);
    }
    os << '\n';
    for (std::size_t i = 0; i < table.n_rows(); ++i) {
        for (std::size_t j = 0; j < table.n_cols(); ++j) {
            if (j) os << ',';
            const auto& c = table.column(j);
            if (c.is_missing(i)) {
                os << "NA";
            } else {
                write_field(os, c.text(i));
            }
        }
        os << '\n';
    }
    return os.str();
}

void write_csv(const Table& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("csv: cannot write '" + path.string() + "'");
    out << to_csv(table);
}

}  // namespace driveml
