#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "winrestart/analysis.hpp"
#include "winrestart/config.hpp"
#include "winrestart/theory.hpp"

namespace winrestart {

// A continuous experiment: speed-restarted trajectory of the power quadratic
// described by cfg, optional non-restarted baseline, exponential fit,
// restart-interval statistics and the parameter-only bounds.
struct ContinuousRun {
    ExperimentConfig cfg;
    double gamma = 0.0;
    RestartedTrajectory trajectory;
    std::optional<std::vector<TrajectorySample>> baseline;
    std::optional<RegressionFit> fit;  // absent when too few positive samples
    IntervalStats stats;               // count 0 when no cycle completed
    TheoreticalBounds bounds;
    bool already_optimal = false;
};

ContinuousRun run_continuous(const ExperimentConfig& cfg);

struct DiscreteRun {
    ExperimentConfig cfg;
    double gamma = 0.0;
    RestartPolicy policy = RestartPolicy::Speed;
    std::vector<IterateRecord> records;
    std::optional<RegressionFit> fit;
    std::vector<std::string> warnings;
    bool already_optimal = false;
};

DiscreteRun run_discrete(const ExperimentConfig& cfg, RestartPolicy policy);

// Writes <stem>.csv and <stem>.svg (and the baseline pair when present);
// returns the created paths.
std::vector<std::filesystem::path> write_continuous_outputs(
    const ContinuousRun& run, const std::filesystem::path& out_dir, const std::string& stem);
std::vector<std::filesystem::path> write_discrete_outputs(
    const DiscreteRun& run, const std::filesystem::path& out_dir, const std::string& stem);

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct CellOutcome {
    std::string name;
    bool ok = false;     // the cell ran without an error
    std::string error;   // exception text when !ok
    std::vector<std::pair<std::string, std::string>> metrics;
    std::vector<CheckResult> checks;
};

struct ReproduceReport {
    std::vector<CellOutcome> cells;
    bool any_error() const;
    int failed_checks() const;
};

struct ReproduceOptions {
    std::filesystem::path out_dir = "out";
    int threads = 0;  // 0: WINRESTART_THREADS, else hardware concurrency
};

// Full experiment grid: six continuous cells (beta x epsilon), three
// discrete cells (epsilon, all three policies), the mildly and strongly
// ill-conditioned no-restart comparison runs, the three summary tables as
// CSV and one plot per trajectory. Deterministic output bytes.
ReproduceReport run_reproduce_paper(const ReproduceOptions& opts);

std::string report_to_text(const ReproduceReport& report);
std::string report_to_json(const ReproduceReport& report);

// Reference targets for the reproduction checks.
struct ReferenceEntry {
    double beta;
    double eps;
    double value;
    double rel_tol;
};
const std::vector<ReferenceEntry>& reference_continuous_B();
const std::vector<ReferenceEntry>& reference_interval_mean();
const std::vector<ReferenceEntry>& reference_interval_variance();
const std::vector<ReferenceEntry>& reference_discrete_B();

}  // namespace winrestart
