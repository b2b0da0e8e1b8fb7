#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "specrad/lab.hpp"

namespace specrad {

inline constexpr const char* kConfigSchema = "specrad-lab/1";

/// Command-line overrides applied on top of a config.
struct RunOptions {
    std::size_t jobs = 1;
    std::optional<double> tolerance;
    /// Element cap for convolution supports, product sets and truncation balls.
    std::optional<std::size_t> budget_elems;
};

enum class RunStatus { Completed, BudgetAbort, Rejected };
std::string to_string(RunStatus s);

/// One validated experiment, ready to run.
struct Job {
    std::string id;
    std::string kind;
    nlohmann::json spec;
    std::function<ExperimentReport()> run;
};

struct RunConfig {
    std::vector<Job> jobs;
    /// Top-level "out" field, if any.
    std::optional<std::string> out;
};

/// Validates `config` against the schema and binds every experiment.
/// Relative element files resolve against `base_dir`. Throws SchemaError.
RunConfig parse_config(const nlohmann::json& config, const std::filesystem::path& base_dir,
                       const RunOptions& options = {});
RunConfig load_config(const std::filesystem::path& path, const RunOptions& options = {});

struct ExperimentResult {
    ExperimentReport report;
    nlohmann::json spec;
    RunStatus status = RunStatus::Completed;
    double wall_ms = 0.0;
};

struct RunResult {
    std::vector<ExperimentResult> results;
    /// 2 rejected input, 1 certified failure, 3 budget abort, 0 otherwise;
    /// the first that applies wins.
    int exit_code() const;
};

/// Runs the jobs on up to options.jobs threads. Results keep config order.
RunResult run_jobs(const RunConfig& config, const RunOptions& options = {});

/// Per-experiment JSON document. Contains no timing, so identical configs
/// give byte-identical documents.
nlohmann::json report_document(const ExperimentResult& r);

/// experiment_id,kind,group,verdict,margin,lower,upper,wall_ms; lower and
/// upper are the bracket of the left side of the tightest comparison.
std::string summary_csv(const RunResult& r);

/// Writes <id>.json for every experiment and summary.csv.
void write_outputs(const RunResult& r, const std::filesystem::path& dir);

/// Output directory: explicit flag, then SPECRAD_LAB_OUT, then the config's
/// "out" field, then "specrad-out".
std::filesystem::path resolve_out_dir(const std::optional<std::string>& flag, const RunConfig& config);

std::vector<std::string> experiment_kinds();

/// Groups with their default generators, then the experiment kinds.
std::string catalog_listing();

}  // namespace specrad
