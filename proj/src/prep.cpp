#include "driveml/prep.hpp"

#include "driveml/error.hpp"
#include "driveml/metrics.hpp"
#include "driveml/stats.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

namespace driveml::prep {

using nlohmann::json;

void PrepConfig::validate() const {
    if (!(aucv > 0.0 && aucv < 0.5)) throw ConfigError("prep: aucv must be in (0,0.5)");
    if (!(corr > 0.0 && corr <= 1.0)) throw ConfigError("corr must be in (0,1]");
    if (char_var_limit < 2) throw ConfigError("prep: char_var_limit must be >= 2");
    if (auto_mar) mar.validate();
}

std::string_view to_string(RejectReason r) {
    switch (r) {
        case RejectReason::ZeroVariance: return "ZeroVariance";
        case RejectReason::HighCorrelation: return "HighCorrelation";
        case RejectReason::LowAUC: return "LowAUC";
        case RejectReason::HighCardinality: return "HighCardinality";
        case RejectReason::Duplicate: return "Duplicate";
        case RejectReason::AllMissing: return "AllMissing";
    }
    return "unknown";
}

namespace {

RejectReason parse_reason(const std::string& s) {
    for (auto r : {RejectReason::ZeroVariance, RejectReason::HighCorrelation, RejectReason::LowAUC,
                   RejectReason::HighCardinality, RejectReason::Duplicate, RejectReason::AllMissing}) {
        if (to_string(r) == s) return r;
    }
    throw DataError("prep: unknown rejection reason '" + s + "'");
}

ColumnKind parse_kind(const std::string& s) {
    for (auto k : {ColumnKind::Numeric, ColumnKind::Categorical, ColumnKind::Date, ColumnKind::Boolean}) {
        if (to_string(k) == s) return k;
    }
    throw DataError("prep: unknown column kind '" + s + "'");
}

std::vector<double> present_values(const Column& c) {
    std::vector<double> out;
    out.reserve(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (!c.is_missing(i)) out.push_back(c.values[i]);
    }
    return out;
}

// Most frequent value; ties go to the smallest.
double value_mode(const Column& c) {
    std::map<double, std::size_t> counts;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (!c.is_missing(i)) ++counts[c.values[i]];
    }
    double best = 0.0;
    std::size_t best_n = 0;
    for (const auto& [v, n] : counts) {
        if (n > best_n) {
            best = v;
            best_n = n;
        }
    }
    return best;
}

// Most frequent level; ties go to the lexicographically smallest.
std::string level_mode(const Column& c) {
    std::map<std::string, std::size_t> counts;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (!c.is_missing(i)) ++counts[c.levels[static_cast<std::size_t>(c.codes[i])]];
    }
    std::string best;
    std::size_t best_n = 0;
    for (const auto& [level, n] : counts) {
        if (n > best_n) {
            best = level;
            best_n = n;
        }
    }
    return best;
}

std::vector<std::string> observed_levels(const Column& c) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (!c.is_missing(i)) seen.insert(c.levels[static_cast<std::size_t>(c.codes[i])]);
    }
    return {seen.begin(), seen.end()};
}

Column numeric_column(std::string name, std::vector<double> values, const std::vector<std::uint8_t>& missing) {
    return Column::numeric(std::move(name), std::move(values), missing);
}

void assert_finite(Table& t) {
    for (std::size_t j = 0; j < t.n_cols(); ++j) {
        Column& c = t.mutable_column(j);
        if (c.is_categorical()) continue;
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (!std::isfinite(c.values[i])) c.missing[i] = 1;
        }
    }
}

std::optional<double> parse_number(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<double> parse_bool(std::string_view s) {
    static const std::set<std::string_view> yes{"true", "TRUE", "True", "T", "1"};
    static const std::set<std::string_view> no{"false", "FALSE", "False", "F", "0"};
    if (yes.count(s)) return 1.0;
    if (no.count(s)) return 0.0;
    return std::nullopt;
}

// Brings a column read from another file to the kind seen at fit time.
Column coerce(const Column& c, ColumnKind kind) {
    if (c.kind == kind) return c;
    const std::size_t n = c.size();
    if (kind == ColumnKind::Categorical) {
        std::vector<std::optional<std::string>> cells(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!c.is_missing(i)) cells[i] = c.text(i);
        }
        return Column::categorical(c.name, cells);
    }
    Column out;
    out.name = c.name;
    out.kind = kind;
    out.values.assign(n, 0.0);
    out.missing = c.missing;
    for (std::size_t i = 0; i < n; ++i) {
        if (c.is_missing(i)) continue;
        std::optional<double> v;
        if (kind == ColumnKind::Numeric) {
            v = c.is_categorical() ? parse_number(c.text(i)) : std::optional<double>(c.values[i]);
        } else if (kind == ColumnKind::Boolean) {
            v = parse_bool(c.text(i));
        } else {
            const auto text = c.text(i);
            auto d = parse_date(text, DateFormat::Iso);
            if (!d) d = parse_date(text, DateFormat::DayMonthYear);
            if (d) v = *d;
        }
        if (!v) {
            throw DataError("prep: column '" + c.name + "' value '" + c.text(i) + "' is not " +
                            std::string(to_string(kind)));
        }
        out.values[i] = *v;
    }
    return out;
}

}  // namespace

// --- cleaning ---------------------------------------------------------------

std::string sanitize_name(std::string_view name) {
    std::string out;
    out.reserve(name.size());
    for (unsigned char ch : name) {
        out.push_back(std::isalnum(ch) ? static_cast<char>(std::tolower(ch)) : '_');
    }
    if (out.empty()) out = "column";
    return out;
}

Table clean_names(const Table& t) {
    std::vector<Column> cols = t.columns();
    std::unordered_set<std::string> used;
    for (auto& c : cols) {
        const auto base = sanitize_name(c.name);
        std::string name = base;
        for (int k = 2; used.count(name); ++k) name = base + "_" + std::to_string(k);
        used.insert(name);
        c.name = name;
    }
    return Table(t.name(), std::move(cols));
}

Table drop_duplicate_rows(const Table& t) {
    std::unordered_set<std::string> seen;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < t.n_rows(); ++i) {
        std::string key;
        for (const auto& c : t.columns()) {
            key += c.is_missing(i) ? "\x1e" : c.text(i);
            key += '\x1f';
        }
        if (seen.insert(std::move(key)).second) keep.push_back(i);
    }
    if (keep.size() == t.n_rows()) return t;
    return t.take_rows(keep);
}

Table clean(const Table& t) {
    Table out = drop_duplicate_rows(clean_names(t));
    assert_finite(out);
    return out;
}

// --- imputation -------------------------------------------------------------

std::vector<ImputeValue> fit_impute(const Table& train, const PrepConfig& config, std::vector<Rejection>& rejected) {
    if (train.n_rows() == 0) throw DataError("prep: cannot fit imputation on an empty table");
    std::vector<ImputeValue> out;
    for (const auto& c : train.columns()) {
        const auto missing = c.missing_count();
        if (missing == c.size()) {
            rejected.push_back({c.name, RejectReason::AllMissing, {}, 1.0});
            continue;
        }
        ImputeValue v{c.name, c.kind, 0.0, {}};
        if (c.is_categorical()) {
            v.level = level_mode(c);
        } else if (c.kind == ColumnKind::Numeric && config.missimpute == Imputation::MeanMedian) {
            v.value = stats::median(present_values(c));
        } else {
            v.value = value_mode(c);
        }
        out.push_back(std::move(v));
    }
    return out;
}

Table apply_impute(const Table& t, const std::vector<ImputeValue>& values) {
    Table out = t;
    for (const auto& v : values) {
        auto idx = out.find(v.column);
        if (!idx) continue;
        Column& c = out.mutable_column(*idx);
        if (c.is_categorical()) {
            auto it = std::find(c.levels.begin(), c.levels.end(), v.level);
            std::int32_t code = static_cast<std::int32_t>(it - c.levels.begin());
            bool added = false;
            for (std::size_t i = 0; i < c.size(); ++i) {
                if (!c.is_missing(i)) continue;
                if (it == c.levels.end() && !added) {
                    c.levels.push_back(v.level);
                    added = true;
                }
                c.codes[i] = code;
                c.missing[i] = 0;
            }
        } else {
            for (std::size_t i = 0; i < c.size(); ++i) {
                if (!c.is_missing(i)) continue;
                c.values[i] = v.value;
                c.missing[i] = 0;
            }
        }
    }
    return out;
}

// --- outliers ---------------------------------------------------------------

std::vector<OutlierSpec> fit_outliers(const Table& train) {
    std::vector<OutlierSpec> out;
    for (const auto& c : train.columns()) {
        if (c.kind != ColumnKind::Numeric) continue;
        auto v = present_values(c);
        if (v.empty()) continue;
        std::sort(v.begin(), v.end());
        const double q1 = stats::quantile_sorted(v, 0.25);
        const double q3 = stats::quantile_sorted(v, 0.75);
        OutlierSpec s;
        s.column = c.name;
        s.lower_fence = q1 - 1.5 * (q3 - q1);
        s.upper_fence = q3 + 1.5 * (q3 - q1);
        s.cap_low = stats::quantile_sorted(v, 0.05);
        s.cap_high = stats::quantile_sorted(v, 0.95);
        s.train_outliers = static_cast<std::size_t>(
            std::count_if(v.begin(), v.end(), [&](double x) { return x < s.lower_fence || x > s.upper_fence; }));
        out.push_back(std::move(s));
    }
    return out;
}

Table apply_outliers(const Table& t, const std::vector<OutlierSpec>& specs, bool add_flags) {
    std::map<std::string, const OutlierSpec*> by_name;
    for (const auto& s : specs) by_name[s.column] = &s;
    std::vector<Column> cols;
    for (const auto& src : t.columns()) {
        auto it = by_name.find(src.name);
        if (it == by_name.end() || src.kind != ColumnKind::Numeric) {
            cols.push_back(src);
            continue;
        }
        const OutlierSpec& s = *it->second;
        Column c = src;
        std::vector<double> flag(c.size(), 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (c.is_missing(i)) continue;
            if (c.values[i] < s.lower_fence) {
                c.values[i] = s.cap_low;
                flag[i] = 1.0;
            } else if (c.values[i] > s.upper_fence) {
                c.values[i] = s.cap_high;
                flag[i] = 1.0;
            }
        }
        cols.push_back(std::move(c));
        if (add_flags && s.train_outliers > 0) cols.push_back(Column::boolean(src.name + "_out_flag", std::move(flag)));
    }
    return Table(t.name(), std::move(cols));
}

// --- dates and interactions -------------------------------------------------

Table engineer_dates(const Table& t) {
    std::vector<Column> cols;
    for (const auto& c : t.columns()) {
        if (c.kind != ColumnKind::Date) {
            cols.push_back(c);
            continue;
        }
        const std::size_t n = c.size();
        std::vector<double> year(n), month(n), day(n), weekday(n), epoch(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (c.is_missing(i)) continue;
            const int days = static_cast<int>(c.values[i]);
            const auto d = days_to_civil(days);
            year[i] = d.year;
            month[i] = d.month;
            day[i] = d.day;
            weekday[i] = d.weekday;
            epoch[i] = days;
        }
        cols.push_back(numeric_column(c.name + "_year", std::move(year), c.missing));
        cols.push_back(numeric_column(c.name + "_month", std::move(month), c.missing));
        cols.push_back(numeric_column(c.name + "_day", std::move(day), c.missing));
        cols.push_back(numeric_column(c.name + "_weekday", std::move(weekday), c.missing));
        cols.push_back(numeric_column(c.name + "_epoch_days", std::move(epoch), c.missing));
    }
    return Table(t.name(), std::move(cols));
}

std::vector<std::pair<std::string, std::string>> interaction_pairs(const std::vector<std::string>& numeric_columns,
                                                                   std::size_t max_pairs) {
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t i = 0; i < numeric_columns.size(); ++i) {
        for (std::size_t j = i + 1; j < numeric_columns.size(); ++j) {
            if (out.size() >= max_pairs) return out;
            out.emplace_back(numeric_columns[i], numeric_columns[j]);
        }
    }
    return out;
}

Table apply_interactions(const Table& t, const std::vector<std::pair<std::string, std::string>>& pairs) {
    Table out = t;
    for (const auto& [a, b] : pairs) {
        const Column& ca = t.column(a);
        const Column& cb = t.column(b);
        std::vector<double> v(t.n_rows());
        std::vector<std::uint8_t> miss(t.n_rows(), 0);
        for (std::size_t i = 0; i < t.n_rows(); ++i) {
            miss[i] = ca.is_missing(i) || cb.is_missing(i);
            v[i] = miss[i] ? 0.0 : ca.values[i] * cb.values[i];
        }
        out.add_column(Column::numeric(a + "_x_" + b, std::move(v), std::move(miss)));
    }
    return out;
}

Table engineer_interactions(const Table& t, std::size_t max_pairs) {
    std::vector<std::string> numeric;
    for (const auto& c : t.columns()) {
        if (c.kind == ColumnKind::Numeric) numeric.push_back(c.name);
    }
    return apply_interactions(t, interaction_pairs(numeric, max_pairs));
}

// --- categorical encoding ---------------------------------------------------

std::vector<LevelMap> fit_onehot(const Table& train, const PrepConfig& config, std::vector<Rejection>& rejected) {
    std::vector<LevelMap> out;
    for (const auto& c : train.columns()) {
        if (!c.is_categorical()) continue;
        auto levels = observed_levels(c);
        if (levels.size() > config.char_var_limit) {
            rejected.push_back({c.name, RejectReason::HighCardinality, {}, static_cast<double>(levels.size())});
            continue;
        }
        LevelMap m;
        m.column = c.name;
        m.ordinal = !config.dummyvar;
        m.fallback_level = level_mode(c);
        if (m.ordinal) {
            m.names.push_back(c.name);
        } else {
            for (const auto& l : levels) m.names.push_back(c.name + "_" + sanitize_name(l));
        }
        m.levels = std::move(levels);
        out.push_back(std::move(m));
    }
    return out;
}

Table apply_onehot(const Table& t, const std::vector<LevelMap>& maps) {
    std::map<std::string, const LevelMap*> by_name;
    for (const auto& m : maps) by_name[m.column] = &m;
    std::vector<Column> cols;
    for (const auto& c : t.columns()) {
        auto it = by_name.find(c.name);
        if (it == by_name.end() || !c.is_categorical()) {
            cols.push_back(c);
            continue;
        }
        const LevelMap& m = *it->second;
        // Level code in this table -> position in the fitted level list (-1 if unseen).
        std::vector<int> rank(c.levels.size(), -1);
        for (std::size_t k = 0; k < c.levels.size(); ++k) {
            auto pos = std::lower_bound(m.levels.begin(), m.levels.end(), c.levels[k]);
            if (pos != m.levels.end() && *pos == c.levels[k]) rank[k] = static_cast<int>(pos - m.levels.begin());
        }
        const std::size_t n = c.size();
        auto rank_of = [&](std::size_t i) { return c.is_missing(i) ? -1 : rank[static_cast<std::size_t>(c.codes[i])]; };
        if (m.ordinal) {
            const auto fb = std::lower_bound(m.levels.begin(), m.levels.end(), m.fallback_level) - m.levels.begin();
            std::vector<double> v(n);
            for (std::size_t i = 0; i < n; ++i) {
                const int r = rank_of(i);
                v[i] = static_cast<double>(r < 0 ? fb : r);
            }
            cols.push_back(Column::numeric(m.names[0], std::move(v)));
        } else {
            for (std::size_t k = 0; k < m.levels.size(); ++k) {
                std::vector<double> v(n, 0.0);
                for (std::size_t i = 0; i < n; ++i) v[i] = rank_of(i) == static_cast<int>(k) ? 1.0 : 0.0;
                cols.push_back(Column::boolean(m.names[k], std::move(v)));
            }
        }
    }
    return Table(t.name(), std::move(cols));
}

// --- selection --------------------------------------------------------------

Selection select_features(const FeatureMatrix& x, std::span<const int> labels, const PrepConfig& config) {
    const std::size_t p = x.cols();
    Selection out;
    std::vector<std::size_t> alive;
    for (std::size_t j = 0; j < p; ++j) {
        auto col = x.column(j);
        const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
        if (col.empty() || *lo == *hi) {
            out.rejected.push_back({x.names()[j], RejectReason::ZeroVariance, {}, 0.0});
        } else {
            alive.push_back(j);
        }
    }

    std::vector<std::size_t> kept;
    for (auto j : alive) {
        bool drop = false;
        for (auto i : kept) {
            const double r = std::abs(stats::pearson(x.column(i), x.column(j)));
            if (r >= config.corr) {
                out.rejected.push_back({x.names()[j], RejectReason::HighCorrelation, x.names()[i], r});
                drop = true;
                break;
            }
        }
        if (!drop) kept.push_back(j);
    }

    for (auto j : kept) {
        const double a = metrics::auc(x.column(j), labels);
        if (std::max(a, 1.0 - a) - 0.5 < config.aucv) {
            out.rejected.push_back({x.names()[j], RejectReason::LowAUC, {}, a});
        } else {
            out.selected.push_back(x.names()[j]);
        }
    }
    if (out.selected.empty()) throw DataError("prep: no features selected");
    return out;
}

// --- pipeline ---------------------------------------------------------------

namespace {

// Source columns in pipeline order, coerced to their fitted kinds.
Table source_table(const PrepPipeline& p, const Table& cleaned) {
    Table out(cleaned.name());
    for (const auto& s : p.sources) {
        auto idx = cleaned.find(s.name);
        if (!idx) throw DataError("prep: input is missing required column '" + s.name + "'");
        out.add_column(coerce(cleaned.column(*idx), s.kind));
    }
    assert_finite(out);
    return out;
}

// Every candidate column, before selection.
Table engineer(const PrepPipeline& p, const Table& sources) {
    std::vector<Column> indicators;
    for (const auto& name : p.mar_indicators) {
        indicators.push_back(mar::mar_indicator(sources, *sources.find(name)));
    }
    Table t = apply_impute(sources, p.imputation);
    t = apply_outliers(t, p.outliers, true);
    t = engineer_dates(t);
    t = apply_interactions(t, p.interactions);
    t = apply_onehot(t, p.encodings);
    for (auto& c : indicators) t.add_column(std::move(c));
    return t;
}

Table cleaned_names(const Table& t) {
    Table out = clean_names(t);
    assert_finite(out);
    return out;
}

}  // namespace

PrepPipeline fit_prep(const Table& train, const Schema& schema, const PrepConfig& config) {
    config.validate();
    const Table named = cleaned_names(train);
    PrepPipeline p;
    p.target = named.column(schema.target).name;
    p.positive_label = schema.positive_label;
    p.rows_seen = train.n_rows();

    Table work(train.name());
    for (auto f : schema.features()) work.add_column(named.column(f));
    work.add_column(named.column(schema.target));
    work = drop_duplicate_rows(work);
    p.rows_after_dedupe = work.n_rows();
    const auto labels = target_labels(work.column(p.target), p.positive_label);
    work.remove_column(p.target);

    // Whole-column rejections first, so later stages only see usable sources.
    std::vector<Rejection> early;
    auto imputation = fit_impute(work, config, early);
    const auto imputed_all = apply_impute(work, imputation);
    fit_onehot(imputed_all, config, early);
    for (const auto& r : early) work.remove_column(r.feature);
    p.rejections = early;
    std::erase_if(imputation, [&](const ImputeValue& v) { return !work.find(v.column); });
    p.imputation = std::move(imputation);

    for (const auto& c : work.columns()) {
        p.sources.push_back({c.name, c.kind});
        if (c.kind == ColumnKind::Date) p.date_columns.push_back(c.name);
    }
    if (config.outlier_flag) p.outliers = fit_outliers(work);

    std::vector<std::string> numeric;
    for (const auto& c : work.columns()) {
        if (c.kind == ColumnKind::Numeric) numeric.push_back(c.name);
    }
    p.interactions = interaction_pairs(numeric, config.max_interaction_pairs);

    std::vector<Rejection> ignored;
    p.encodings = fit_onehot(apply_impute(work, p.imputation), config, ignored);

    if (config.auto_mar && work.n_cols() > 0) {
        Table with_target = work;
        std::vector<double> y(labels.begin(), labels.end());
        with_target.add_column(Column::numeric(p.target, std::move(y)));
        Schema s;
        s.roles.assign(with_target.n_cols(), Role::Feature);
        s.target = with_target.n_cols() - 1;
        s.roles[s.target] = Role::Target;
        s.target_name = p.target;
        s.positive_label = "1";
        auto result = mar::mar_scan(with_target, s, config.mar);
        for (const auto& f : result.report.findings) {
            if (f.verdict == mar::Verdict::Retained) p.mar_indicators.push_back(f.feature);
        }
        p.mar_report = std::move(result.report);
    }

    const Table candidates = engineer(p, work);
    std::vector<std::string> unique;
    std::unordered_set<std::string> seen;
    for (const auto& c : candidates.columns()) {
        p.candidates.push_back(c.name);
        if (seen.insert(c.name).second) {
            unique.push_back(c.name);
        } else {
            p.rejections.push_back({c.name, RejectReason::Duplicate, {}, 0.0});
        }
    }
    const auto x = FeatureMatrix::from_table(candidates, unique);
    auto selection = select_features(x, labels, config);
    p.selected = std::move(selection.selected);
    for (auto& r : selection.rejected) p.rejections.push_back(std::move(r));
    return p;
}

Table apply_prep(const PrepPipeline& p, const Table& t) {
    const Table named = cleaned_names(t);
    const Table candidates = engineer(p, source_table(p, named));
    Table out(t.name());
    for (const auto& name : p.selected) out.add_column(candidates.column(name));
    if (auto idx = named.find(p.target)) {
        const auto y = target_labels(named.column(*idx), p.positive_label);
        out.add_column(Column::numeric(p.target, std::vector<double>(y.begin(), y.end())));
    }
    return out;
}

// --- serialization ----------------------------------------------------------

json to_json(const PrepPipeline& p) {
    json sources = json::array();
    for (const auto& s : p.sources) sources.push_back({{"name", s.name}, {"kind", std::string(to_string(s.kind))}});
    json impute = json::array();
    for (const auto& v : p.imputation) {
        json e{{"column", v.column}, {"kind", std::string(to_string(v.kind))}};
        if (v.kind == ColumnKind::Categorical) {
            e["level"] = v.level;
        } else {
            e["value"] = v.value;
        }
        impute.push_back(std::move(e));
    }
    json outliers = json::array();
    for (const auto& o : p.outliers) {
        outliers.push_back({{"column", o.column},
                            {"lower_fence", o.lower_fence},
                            {"upper_fence", o.upper_fence},
                            {"cap_low", o.cap_low},
                            {"cap_high", o.cap_high},
                            {"train_outliers", o.train_outliers}});
    }
    json inter = json::array();
    for (const auto& [a, b] : p.interactions) inter.push_back({a, b});
    json enc = json::array();
    for (const auto& m : p.encodings) {
        enc.push_back({{"column", m.column},
                       {"levels", m.levels},
                       {"names", m.names},
                       {"ordinal", m.ordinal},
                       {"fallback_level", m.fallback_level}});
    }
    json rej = json::array();
    for (const auto& r : p.rejections) {
        json e{{"feature", r.feature}, {"reason", std::string(to_string(r.reason))}, {"statistic", r.statistic}};
        if (r.reason == RejectReason::HighCorrelation) e["partner"] = r.partner;
        rej.push_back(std::move(e));
    }
    return {{"format", "driveml.pipeline"},
            {"version", 1},
            {"target", p.target},
            {"positive_label", p.positive_label},
            {"rows_seen", p.rows_seen},
            {"rows_after_dedupe", p.rows_after_dedupe},
            {"sources", sources},
            {"imputation", impute},
            {"outliers", outliers},
            {"date_columns", p.date_columns},
            {"interactions", inter},
            {"encodings", enc},
            {"mar_indicators", p.mar_indicators},
            {"mar_report", mar::to_json(p.mar_report)},
            {"candidates", p.candidates},
            {"selected", p.selected},
            {"rejections", rej}};
}

PrepPipeline pipeline_from_json(const json& doc) {
    if (doc.value("format", "") != "driveml.pipeline" || doc.value("version", 0) != 1) {
        throw DataError("prep: not a driveml.pipeline version 1 document");
    }
    PrepPipeline p;
    try {
        p.target = doc.at("target").get<std::string>();
        p.positive_label = doc.at("positive_label").get<std::string>();
        p.rows_seen = doc.at("rows_seen").get<std::size_t>();
        p.rows_after_dedupe = doc.at("rows_after_dedupe").get<std::size_t>();
        for (const auto& s : doc.at("sources")) {
            p.sources.push_back({s.at("name").get<std::string>(), parse_kind(s.at("kind").get<std::string>())});
        }
        for (const auto& e : doc.at("imputation")) {
            ImputeValue v{e.at("column").get<std::string>(), parse_kind(e.at("kind").get<std::string>()), 0.0, {}};
            if (v.kind == ColumnKind::Categorical) {
                v.level = e.at("level").get<std::string>();
            } else {
                v.value = e.at("value").get<double>();
            }
            p.imputation.push_back(std::move(v));
        }
        for (const auto& e : doc.at("outliers")) {
            p.outliers.push_back({e.at("column").get<std::string>(), e.at("lower_fence").get<double>(),
                                  e.at("upper_fence").get<double>(), e.at("cap_low").get<double>(),
                                  e.at("cap_high").get<double>(), e.at("train_outliers").get<std::size_t>()});
        }
        p.date_columns = doc.at("date_columns").get<std::vector<std::string>>();
        for (const auto& e : doc.at("interactions")) {
            p.interactions.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
        }
        for (const auto& e : doc.at("encodings")) {
            p.encodings.push_back({e.at("column").get<std::string>(), e.at("levels").get<std::vector<std::string>>(),
                                   e.at("names").get<std::vector<std::string>>(), e.at("ordinal").get<bool>(),
                                   e.at("fallback_level").get<std::string>()});
        }
        p.mar_indicators = doc.at("mar_indicators").get<std::vector<std::string>>();
        for (const auto& f : doc.at("mar_report").at("findings")) {
            mar::MarFinding m;
            m.feature = f.at("feature").get<std::string>();
            m.missing_count = f.at("missing_count").get<std::size_t>();
            if (!f.at("aux_auc").is_null()) m.aux_auc = f.at("aux_auc").get<double>();
            const auto verdict = f.at("verdict").get<std::string>();
            m.verdict = verdict == "Retained" ? mar::Verdict::Retained
                        : verdict == "Dropped" ? mar::Verdict::Dropped
                                               : mar::Verdict::Skipped;
            m.note = f.at("note").get<std::string>();
            p.mar_report.findings.push_back(std::move(m));
        }
        p.mar_report.added_columns = doc.at("mar_report").at("added_columns").get<std::vector<std::string>>();
        p.candidates = doc.at("candidates").get<std::vector<std::string>>();
        p.selected = doc.at("selected").get<std::vector<std::string>>();
        for (const auto& e : doc.at("rejections")) {
            p.rejections.push_back({e.at("feature").get<std::string>(), parse_reason(e.at("reason").get<std::string>()),
                                    e.value("partner", std::string()), e.at("statistic").get<double>()});
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("prep: malformed pipeline document: ") + e.what());
    }
    return p;
}

}  // namespace driveml::prep
