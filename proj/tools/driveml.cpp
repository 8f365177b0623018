// Command-line front end: prepares data, tunes the six learners and writes
// metrics.json, pipeline.json, models.json and report.html.

#include "driveml/run.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>
#include <map>

namespace {

struct Flag {
    const char* key;
    const char* help;
};

constexpr Flag kFlags[] = {
    {"input", "CSV file with a header row"},
    {"target", "binary target column"},
    {"uid", "identifier column (excluded from modelling)"},
    {"drop", "comma-separated columns to exclude"},
    {"onlykeep", "comma-separated columns to keep (plus the target)"},
    {"test-split", "test fraction (default 0.2)"},
    {"tune-iters", "random-search draws per model (default 10)"},
    {"tune-type", "search type; only 'random'"},
    {"models", "'all' or a comma list of glmnet,logreg,randomForest,ranger,xgboost,rpart"},
    {"var-imp", "features shown in the importance chart (default 10)"},
    {"lift-group", "lift table bins (default 50)"},
    {"max-obs", "rows used for tuning before subsampling (default 4000)"},
    {"seed", "random seed (default 1991)"},
    {"missimpute", "median or mode"},
    {"auto-mar", "scan for informative missingness (true/false)"},
    {"dummyvar", "one-hot encode categoricals (true/false)"},
    {"char-var-limit", "maximum levels for a categorical (default 15)"},
    {"aucv", "minimum |AUC - 0.5| for a feature (default 0.002)"},
    {"corr", "correlation cut-off (default 0.98)"},
    {"outlier-flag", "cap outliers and add flags (true/false)"},
    {"mar-threshold", "auxiliary AUC needed to keep a missingness flag (default 0.8)"},
    {"pdp-features", "partial dependence plots for the best model (default 5)"},
    {"output", "output directory (default driveml_output)"},
    {"html-report", "write report.html (true/false)"},
    {"timings", "record wall-clock timings (true/false)"},
    {"workers", "worker threads, 0 = all cores (env DRIVEML_WORKERS)"},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DriveML: automated binary classification with an HTML report"};
    std::string config_path;
    app.add_option("--config", config_path, "key = value config file; flags override it");
    std::map<std::string, std::string> values;
    for (const auto& f : kFlags) {
        app.add_option("--" + std::string(f.key), values[f.key], f.help);
    }
    bool no_timings = false;
    app.add_flag("--no-timings", no_timings, "same as --timings false");
    bool quiet = false;
    app.add_flag("-q,--quiet", quiet, "no progress output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    std::map<std::string, std::string> flags;
    for (const auto& f : kFlags) {
        if (app.count("--" + std::string(f.key)) > 0) flags[f.key] = values[f.key];
    }
    if (no_timings) flags["timings"] = "false";

    try {
        std::map<std::string, std::string> file;
        if (!config_path.empty()) file = driveml::read_config_file(config_path);
        std::optional<std::string> env;
        if (const char* w = std::getenv("DRIVEML_WORKERS")) env = w;
        const auto config = driveml::validate_config(file, flags, env);
        const auto result = driveml::run(config, quiet ? nullptr : &std::cerr);
        std::cout << "best model: " << driveml::to_string(result.evaluations[result.best].id) << '\n';
        std::cout << "artifacts: " << config.output_dir.string() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "driveml: error: " << e.what() << '\n';
        return driveml::exit_code_for(e);
    }
    return 0;
}
