#include "driveml/run.hpp"

#include "driveml/error.hpp"
#include "driveml/explain.hpp"
#include "driveml/matrix.hpp"
#include "driveml/report.hpp"
#include "driveml/table.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

namespace driveml {

using nlohmann::json;

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "input",      "target",         "uid",          "drop",   "onlykeep",     "test-split",    "tune-iters",
        "tune-type",  "models",         "var-imp",      "lift-group", "max-obs",  "seed",          "missimpute",
        "auto-mar",   "dummyvar",       "char-var-limit", "aucv", "corr",         "outlier-flag",  "mar-threshold",
        "pdp-features", "output",       "html-report",  "timings", "workers"};
    return keys;
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string normalize_key(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    if (std::find(config_keys().begin(), config_keys().end(), key) == config_keys().end()) {
        throw ConfigError("config: unknown key '" + key + "'");
    }
    return key;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
    return out;
}

long long to_int(const std::string& key, const std::string& v) {
    long long out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    }
    return out;
}

bool to_bool(const std::string& key, std::string v) {
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::string fmt(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("run: cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw DataError("run: write failed for '" + path.string() + "'");
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::map<std::string, std::string> parse_config_text(std::string_view text) {
    std::map<std::string, std::string> out;
    std::istringstream in{std::string(text)};
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: line " + std::to_string(number) + " is not 'key = value'");
        }
        out[normalize_key(trim(line.substr(0, eq)))] = trim(line.substr(eq + 1));
    }
    return out;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot read '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

RunConfig validate_config(const std::map<std::string, std::string>& file_values,
                          const std::map<std::string, std::string>& flag_values, std::optional<std::string> env_workers) {
    std::map<std::string, std::string> v;
    for (const auto& [k, val] : file_values) v[normalize_key(k)] = val;
    if (env_workers && !env_workers->empty()) v["workers"] = *env_workers;
    for (const auto& [k, val] : flag_values) v[normalize_key(k)] = val;

    RunConfig c;
    auto has = [&](const char* k) { return v.count(k) > 0; };
    if (has("input")) c.input = v["input"];
    if (c.input.empty()) throw ConfigError("input: no input file given (use --input)");
    if (has("target")) c.target = v["target"];
    if (c.target.empty()) throw ConfigError("target: no target column given (use --target)");
    if (has("uid") && !v["uid"].empty()) c.uid = v["uid"];
    if (has("drop")) c.drop = split_list(v["drop"]);
    if (has("onlykeep") && !v["onlykeep"].empty()) c.onlykeep = split_list(v["onlykeep"]);

    if (has("test-split")) c.test_split = to_double("test-split", v["test-split"]);
    if (!(c.test_split > 0.0 && c.test_split < 1.0)) throw ConfigError("test-split must be in (0,1)");
    if (has("tune-iters")) c.tune_iters = static_cast<int>(to_int("tune-iters", v["tune-iters"]));
    if (c.tune_iters < 1) throw ConfigError("tune-iters must be >= 1");
    if (has("tune-type")) c.tune_type = v["tune-type"];
    if (c.tune_type != "random") {
        throw ConfigError("tune-type '" + c.tune_type +
                          "' is not supported: only 'random' search is implemented (iterated racing is not)");
    }
    if (has("models")) {
        const auto names = split_list(v["models"]);
        if (names.size() == 1 && names[0] == "all") {
            c.models.assign(kAllModels.begin(), kAllModels.end());
        } else {
            c.models.clear();
            for (const auto& n : names) {
                auto id = parse_model_id(n);
                if (!id) throw ConfigError("models: unknown model '" + n + "'");
                if (std::find(c.models.begin(), c.models.end(), *id) == c.models.end()) c.models.push_back(*id);
            }
        }
        if (c.models.empty()) throw ConfigError("models: no model selected");
    }
    if (has("var-imp")) c.var_imp = static_cast<int>(to_int("var-imp", v["var-imp"]));
    if (c.var_imp < 1) throw ConfigError("var-imp must be >= 1");
    if (has("lift-group")) c.lift_group = static_cast<int>(to_int("lift-group", v["lift-group"]));
    if (c.lift_group < 1) throw ConfigError("lift-group must be >= 1");
    if (has("max-obs")) {
        const auto m = to_int("max-obs", v["max-obs"]);
        if (m < 10) throw ConfigError("max-obs must be >= 10");
        c.max_obs = static_cast<std::size_t>(m);
    }
    if (has("seed")) {
        const auto s = to_int("seed", v["seed"]);
        if (s < 0) throw ConfigError("seed must be >= 0");
        c.seed = static_cast<std::uint64_t>(s);
    }
    if (has("missimpute")) {
        const auto& m = v["missimpute"];
        if (m == "median" || m == "mean-median" || m == "default") {
            c.prep.missimpute = prep::Imputation::MeanMedian;
        } else if (m == "mode") {
            c.prep.missimpute = prep::Imputation::ModeOnly;
        } else {
            throw ConfigError("missimpute must be 'median' or 'mode', got '" + m + "'");
        }
    }
    if (has("auto-mar")) c.prep.auto_mar = to_bool("auto-mar", v["auto-mar"]);
    if (has("dummyvar")) c.prep.dummyvar = to_bool("dummyvar", v["dummyvar"]);
    if (has("char-var-limit")) {
        const auto l = to_int("char-var-limit", v["char-var-limit"]);
        if (l < 2) throw ConfigError("char-var-limit must be >= 2");
        c.prep.char_var_limit = static_cast<std::size_t>(l);
    }
    if (has("aucv")) c.prep.aucv = to_double("aucv", v["aucv"]);
    if (has("corr")) c.prep.corr = to_double("corr", v["corr"]);
    if (has("outlier-flag")) c.prep.outlier_flag = to_bool("outlier-flag", v["outlier-flag"]);
    if (has("mar-threshold")) c.prep.mar.auc_threshold = to_double("mar-threshold", v["mar-threshold"]);
    if (!(c.prep.mar.auc_threshold > 0.5 && c.prep.mar.auc_threshold < 1.0)) {
        throw ConfigError("mar-threshold must be in (0.5,1)");
    }
    if (!(c.prep.aucv > 0.0 && c.prep.aucv < 0.5)) throw ConfigError("aucv must be in (0,0.5)");
    if (!(c.prep.corr > 0.0 && c.prep.corr <= 1.0)) throw ConfigError("corr must be in (0,1]");
    if (has("pdp-features")) c.pdp_features = static_cast<int>(to_int("pdp-features", v["pdp-features"]));
    if (c.pdp_features < 0) throw ConfigError("pdp-features must be >= 0");
    if (has("output")) c.output_dir = v["output"];
    if (c.output_dir.empty()) throw ConfigError("output: empty output directory");
    if (has("html-report")) c.html_report = to_bool("html-report", v["html-report"]);
    if (has("timings")) c.timings = to_bool("timings", v["timings"]);
    if (has("workers")) {
        const auto w = to_int("workers", v["workers"]);
        if (w < 0) throw ConfigError("workers must be >= 0 (0 = all cores)");
        c.workers = resolve_workers(static_cast<int>(w));
    } else {
        c.workers = resolve_workers(0);
    }
    return c;
}

std::vector<std::pair<std::string, std::string>> describe_config(const RunConfig& c) {
    std::vector<std::string> models;
    for (auto id : c.models) models.emplace_back(to_string(id));
    return {{"input", c.input.filename().string()},
            {"target", c.target},
            {"uid", c.uid.value_or("")},
            {"drop", join(c.drop)},
            {"onlykeep", c.onlykeep ? join(*c.onlykeep) : ""},
            {"test-split", fmt(c.test_split)},
            {"tune-iters", std::to_string(c.tune_iters)},
            {"tune-type", c.tune_type},
            {"models", join(models)},
            {"var-imp", std::to_string(c.var_imp)},
            {"lift-group", std::to_string(c.lift_group)},
            {"max-obs", std::to_string(c.max_obs)},
            {"seed", std::to_string(c.seed)},
            {"missimpute", c.prep.missimpute == prep::Imputation::MeanMedian ? "median" : "mode"},
            {"auto-mar", c.prep.auto_mar ? "true" : "false"},
            {"dummyvar", c.prep.dummyvar ? "true" : "false"},
            {"char-var-limit", std::to_string(c.prep.char_var_limit)},
            {"aucv", fmt(c.prep.aucv)},
            {"corr", fmt(c.prep.corr)},
            {"outlier-flag", c.prep.outlier_flag ? "true" : "false"},
            {"mar-threshold", fmt(c.prep.mar.auc_threshold)},
            {"pdp-features", std::to_string(c.pdp_features)},
            {"html-report", c.html_report ? "true" : "false"},
            {"timings", c.timings ? "true" : "false"}};
}

namespace {

// Accepts a column name as written in the file or in its cleaned form.
std::string resolve_name(const Table& raw, const Table& cleaned, const std::string& name, const char* what) {
    if (auto idx = raw.find(name)) return cleaned.column(*idx).name;
    if (cleaned.find(name)) return name;
    throw ConfigError(std::string(what) + ": column '" + name + "' not found in input");
}

}  // namespace

RunResult run(const RunConfig& config, std::ostream* log) {
    auto say = [&](const std::string& msg) {
        if (log) *log << msg << '\n';
    };
    config.prep.validate();

    const Table raw = read_csv(config.input);
    Table data = prep::clean_names(raw);
    say("loaded " + config.input.string() + ": " + std::to_string(data.n_rows()) + " rows, " +
        std::to_string(data.n_cols()) + " columns");

    SchemaOptions so;
    so.target = resolve_name(raw, data, config.target, "target");
    if (config.uid) so.uid = resolve_name(raw, data, *config.uid, "uid");
    for (const auto& d : config.drop) so.drop.push_back(resolve_name(raw, data, d, "drop"));
    if (config.onlykeep) {
        so.onlykeep.emplace();
        for (const auto& k : *config.onlykeep) so.onlykeep->push_back(resolve_name(raw, data, k, "onlykeep"));
    }
    const Schema schema = infer_schema(data, so);

    const auto split = split_indices(data, schema, config.test_split, config.seed);
    const Table train = data.take_rows(split.train);
    const Table test = data.take_rows(split.test);
    say("split: " + std::to_string(train.n_rows()) + " train, " + std::to_string(test.n_rows()) + " test");

    prep::PrepConfig pc = config.prep;
    pc.mar.seed = config.seed;
    pc.mar.workers = config.workers;
    RunResult result;
    result.train_rows = train.n_rows();
    result.test_rows = test.n_rows();
    result.pipeline = prep::fit_prep(train, schema, pc);
    const auto& pipe = result.pipeline;
    say("prep: " + std::to_string(pipe.selected.size()) + " of " + std::to_string(pipe.candidates.size()) +
        " candidate features selected");

    const Table train_p = prep::apply_prep(pipe, train);
    const Table test_p = prep::apply_prep(pipe, test);
    const auto xtr = FeatureMatrix::from_table(train_p, pipe.selected);
    const auto xte = FeatureMatrix::from_table(test_p, pipe.selected);
    const auto ytr = target_labels(train_p.column(pipe.target), "1");
    const auto yte = target_labels(test_p.column(pipe.target), "1");

    const auto space = tuning::default_spaces(xtr.cols());
    tuning::SearchOptions so_tune;
    so_tune.tune_iters = config.tune_iters;
    so_tune.max_obs = config.max_obs;
    so_tune.seed = config.seed;
    so_tune.workers = config.workers;

    std::vector<tuning::TuneResult> tuned;
    for (auto id : config.models) {
        auto r = tuning::random_search(xtr, ytr, id, space, so_tune);
        auto e = tuning::evaluate(r, xte, yte, static_cast<std::size_t>(config.lift_group));
        if (e.failed) {
            say(std::string(to_string(id)) + ": failed (" + e.failure + ")");
        } else {
            say(std::string(to_string(id)) + ": cv AUC " + fmt(e.cv_auc) + ", test AUC " + fmt(e.test_auc));
        }
        result.evaluations.push_back(std::move(e));
        tuned.push_back(std::move(r));
    }
    result.best = tuning::select_best(result.evaluations);
    result.best_model = *tuned[result.best].model;
    const auto& best = result.best_model;
    say("best model: " + std::string(to_string(best.id)));

    std::filesystem::create_directories(config.output_dir);
    auto& art = result.artifacts;
    art.metrics = config.output_dir / "metrics.json";
    art.pipeline = config.output_dir / "pipeline.json";
    art.models = config.output_dir / "models.json";
    art.report = config.output_dir / "report.html";

    write_text(art.metrics, tuning::metrics_json(result.evaluations, result.best, config.timings).dump(2) + "\n");
    write_text(art.pipeline, prep::to_json(pipe).dump(2) + "\n");
    json models = json::array();
    for (const auto& r : tuned) {
        if (r.failed()) continue;
        auto m = *r.model;
        if (!config.timings) m.fit_time_s = 0.0;
        models.push_back(to_json(m));
    }
    write_text(art.models, json{{"format", "driveml.models"}, {"version", 1}, {"models", models}}.dump(2) + "\n");

    if (config.html_report) {
        report::ReportBundle b;
        b.title = "DriveML report: " + config.input.stem().string();
        b.dataset = config.input.filename().string() + " (target " + pipe.target + ", positive label '" +
                    pipe.positive_label + "')";
        b.summary = report::describe(data);
        b.train_rows = train.n_rows();
        b.test_rows = test.n_rows();
        b.selected = pipe.selected;
        b.rejections = pipe.rejections;
        b.mar_enabled = config.prep.auto_mar;
        b.mar = pipe.mar_report;
        b.evaluations = result.evaluations;
        b.best = result.best;
        const auto imp = importance(best);
        for (const auto& f : explain::top_features(best, static_cast<std::size_t>(config.var_imp))) {
            b.importance.emplace_back(f, imp.at(f));
        }
        for (const auto& f : explain::top_features(best, static_cast<std::size_t>(config.pdp_features))) {
            b.pdps.push_back(explain::pdp(best, xtr, f));
        }
        b.config = describe_config(config);
        b.timings = config.timings;
        b.footer = "Generated " + utc_timestamp();
        report::write_html(b, art.report);
    } else {
        art.report.clear();
    }
    return result;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return 2;
    if (dynamic_cast<const DataError*>(&e)) return 3;
    if (dynamic_cast<const TrainingError*>(&e)) return 4;
    return 1;
}

}  // namespace driveml
