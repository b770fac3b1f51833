// qgreen command-line runner: scripted experiments with CSV/JSON outputs.
// Exit codes: 0 all checks pass, 1 check failure, 2 usage error.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qgreen/experiments.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;

void print_report_summary(const qgreen::experiments::RunReport& report) {
    std::printf("experiment %-16s %s  (%.2fs, %zu checks)\n", report.config.experiment.c_str(),
                report.overall_pass() ? "PASS" : "FAIL", report.wall_seconds,
                report.checks.size());
    for (const auto& check : report.checks) {
        if (!check.pass) {
            std::printf("  [FAIL] %s: measured %.6g, required %s %.6g\n", check.name.c_str(),
                        check.measured, check.comparison.c_str(), check.threshold);
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qgreen: phase-space negativity and fermionic entanglement experiments"};
    app.require_subcommand(1);

    // run
    auto* run_cmd = app.add_subcommand("run", "run one experiment");
    std::string config_path;
    std::string experiment;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir;
    std::vector<std::string> param_overrides;
    bool force = false;
    run_cmd->add_option("--config", config_path, "JSON config file");
    run_cmd->add_option("--experiment", experiment, "experiment name (overrides config)");
    run_cmd->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
        seed_set = true;
    });
    run_cmd->add_option("--out", out_dir, "output directory (overrides config)");
    run_cmd->add_option("--param", param_overrides, "key=value parameter override (repeatable)");
    run_cmd->add_flag("--force", force, "replace files in a non-empty output directory");

    // verify-all
    auto* verify_cmd = app.add_subcommand("verify-all", "run the full experiment battery");
    std::uint64_t verify_seed = 1;
    std::string verify_out = "qgreen-verify";
    bool verify_force = false;
    verify_cmd->add_option("--seed", verify_seed, "seed for every experiment");
    verify_cmd->add_option("--out", verify_out, "output directory");
    verify_cmd->add_flag("--force", verify_force, "replace files in a non-empty output directory");

    // list
    auto* list_cmd = app.add_subcommand("list", "print experiments and their parameters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        if (list_cmd->parsed()) {
            for (const auto& info : qgreen::experiments::experiment_catalog()) {
                std::printf("%-16s %s\n", info.name.c_str(), info.summary.c_str());
                for (const auto& [key, value] : info.defaults) {
                    std::printf("    --param %s=%g\n", key.c_str(), value);
                }
            }
            return kExitPass;
        }

        if (run_cmd->parsed()) {
            qgreen::experiments::ExperimentConfig config;
            if (!config_path.empty()) {
                std::ifstream f(config_path);
                if (!f) {
                    std::fprintf(stderr, "error: cannot open config %s\n", config_path.c_str());
                    return kExitUsage;
                }
                nlohmann::json j;
                f >> j;
                config = qgreen::experiments::config_from_json(j);
            }
            if (!experiment.empty()) config.experiment = experiment;
            if (seed_set) config.seed = seed;
            if (!out_dir.empty()) config.output_dir = out_dir;
            if (force) config.overwrite = true;
            for (const auto& kv : param_overrides) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) {
                    std::fprintf(stderr, "error: --param expects key=value, got %s\n", kv.c_str());
                    return kExitUsage;
                }
                config.params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
            }
            if (config.experiment.empty()) {
                std::fprintf(stderr, "error: no experiment given (use --experiment or --config)\n");
                return kExitUsage;
            }
            if (config.output_dir.empty()) config.output_dir = "qgreen-out/" + config.experiment;

            const auto report = qgreen::experiments::run(config);
            print_report_summary(report);
            return report.overall_pass() ? kExitPass : kExitCheckFailure;
        }

        // verify-all
        const auto report =
            qgreen::experiments::verify_all(verify_seed, verify_out, verify_force);
        for (const auto& run_report : report.runs) print_report_summary(run_report);
        std::printf("verify-all: %s in %.1fs (%zu experiments)\n",
                    report.overall_pass() ? "PASS" : "FAIL", report.wall_seconds,
                    report.runs.size());
        return report.overall_pass() ? kExitPass : kExitCheckFailure;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitCheckFailure;
    }
}
