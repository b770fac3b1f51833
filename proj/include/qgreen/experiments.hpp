// Batch experiment runner: every check the acceptance suite needs, each
// emitting plot-ready CSV data plus a JSON run report. Runs are fully
// determined by (experiment, seed, params).
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace qgreen::experiments {

struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = 1;
    std::map<std::string, double> params;  // missing keys take catalog defaults
    std::filesystem::path output_dir;
    bool overwrite = false;  // rerun into a non-empty directory only with this set
};

struct CheckResult {
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    std::string comparison;  // "<=" or ">="
    bool pass = false;
};

struct RunReport {
    ExperimentConfig config;
    std::vector<CheckResult> checks;
    double wall_seconds = 0.0;
    std::vector<std::string> artifacts;

    bool overall_pass() const;
};

struct ExperimentInfo {
    std::string name;
    std::string summary;
    std::map<std::string, double> defaults;
};

const std::vector<ExperimentInfo>& experiment_catalog();

// Validates the config (known experiment, known param keys, usable output
// directory), executes, writes artifacts plus <experiment>_report.json.
RunReport run(const ExperimentConfig& config);

struct VerifyAllReport {
    std::vector<RunReport> runs;
    double wall_seconds = 0.0;

    bool overall_pass() const;
};

// Runs the whole catalog in a fixed order into per-experiment subdirectories
// and writes verify_all_report.json. Check failures do not stop the batch.
VerifyAllReport verify_all(std::uint64_t seed, const std::filesystem::path& out_dir,
                           bool overwrite);

nlohmann::json to_json(const RunReport& report);
nlohmann::json to_json(const VerifyAllReport& report);

// Rejects unknown keys; "experiment" is required, everything else optional.
ExperimentConfig config_from_json(const nlohmann::json& j);

}  // namespace qgreen::experiments
