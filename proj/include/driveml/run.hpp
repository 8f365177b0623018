#pragma once

#include "driveml/learners.hpp"
#include "driveml/prep.hpp"
#include "driveml/tuning.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace driveml {

struct RunConfig {
    std::filesystem::path input;
    std::string target;
    std::optional<std::string> uid;
    std::vector<std::string> drop;
    std::optional<std::vector<std::string>> onlykeep;
    double test_split = 0.2;
    int tune_iters = 10;
    std::string tune_type = "random";
    std::vector<ModelId> models{kAllModels.begin(), kAllModels.end()};
    int var_imp = 10;
    int lift_group = 50;
    std::size_t max_obs = 4000;
    std::uint64_t seed = 1991;
    prep::PrepConfig prep;
    int pdp_features = 5;
    std::filesystem::path output_dir = "driveml_output";
    bool html_report = true;
    bool timings = true;
    int workers = 1;
};

/// Recognised keys, in kebab-case, for both the config file and flags.
const std::vector<std::string>& config_keys();

/// "key = value" lines; '#' starts a comment. Underscores in keys are
/// accepted as dashes.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);
std::map<std::string, std::string> parse_config_text(std::string_view text);

/// Defaults, then the config file, then DRIVEML_WORKERS (`env_workers`),
/// then flags. Every value is range-checked; throws ConfigError.
RunConfig validate_config(const std::map<std::string, std::string>& file_values,
                          const std::map<std::string, std::string>& flag_values,
                          std::optional<std::string> env_workers = std::nullopt);

/// Effective configuration as key/value text, in config_keys() order.
std::vector<std::pair<std::string, std::string>> describe_config(const RunConfig& config);

struct RunArtifacts {
    std::filesystem::path metrics;
    std::filesystem::path pipeline;
    std::filesystem::path models;
    std::filesystem::path report;
};

struct RunResult {
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
    prep::PrepPipeline pipeline;
    std::vector<tuning::Evaluation> evaluations;
    std::size_t best = 0;
    TrainedModel best_model;  // refit on the full training partition
    RunArtifacts artifacts;
};

/// load -> split -> prep -> tune every model -> pick the best -> explain ->
/// write artifacts. Throws ConfigError, DataError or TrainingError.
RunResult run(const RunConfig& config, std::ostream* log = nullptr);

/// Process exit code for an exception escaping run(): 2 config, 3 data, 4 training, 1 other.
int exit_code_for(const std::exception& e);

}  // namespace driveml
