#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "exolink/evo.hpp"
#include "exolink/grid.hpp"
#include "exolink/problem.hpp"
#include "exolink/stats.hpp"

namespace exo {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AlgorithmSpec {
    std::string algo;  // "ga" | "bbbc" | "bf"
    GaParams ga;
    BbbcParams bbbc;
    // bf only:
    std::vector<double> grid_steps;          // empty = 1 mm everywhere
    std::uint64_t grid_safety_cap = 10'000'000;
    std::uint64_t grid_checkpoint_interval = 100'000;
};

struct ExperimentConfig {
    int format_version = 1;
    std::string model_ref = "builtin";  // "builtin" or a model-file path
    ProblemConfig problem;
    std::vector<AlgorithmSpec> algorithms;
    int repetitions = 20;
    std::vector<std::uint64_t> seeds;  // explicit list wins over base_seed
    std::uint64_t base_seed = 1;
    std::string output_dir = "out";
    std::vector<std::string> formats = {"csv", "json"};

    std::vector<std::uint64_t> effective_seeds() const;
    void validate() const;  // throws ConfigError
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);
std::string experiment_config_canonical_json(const ExperimentConfig& c);

/** One persisted run: an optimizer run or the single deterministic bf run. */
struct RunRecord {
    std::string algorithm;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;

    std::vector<double> trace;
    std::vector<long> eval_counts;
    long total_evaluations = 0;
    int convergence_generation = 0;
    DesignVector best_genes;
    double best_objective = 0.0;
    bool best_feasible = false;
    double best_total_violation = 0.0;
    double tau_mcp = 0.0, tau_pip = 0.0;
    std::uint64_t grid_visited = 0;  // bf only
    std::uint64_t config_hash = 0;

    double wall_time_s = 0.0;  // sidecar only, never in the canonical record
};

/** Canonical JSON (sorted keys, no timing) — the byte-identity surface. */
std::string run_record_canonical_json(const RunRecord& r);
RunRecord parse_run_record(const std::string& json_text);

struct AlgorithmSummary {
    std::string algorithm;
    int runs = 0;
    int failed = 0;
    int infeasible_best = 0;
    SummaryStats objective;
    SummaryStats run_time;
    SummaryStats convergence_generation;
    long evaluations_per_run = 0;
    RunRecord best;  // deb-best run
};

struct ExperimentReport {
    std::string code_version;
    std::uint64_t config_hash = 0;
    std::string objective_mode;
    std::string bounds_set;
    std::vector<std::uint64_t> seeds;
    std::map<std::string, AlgorithmSummary> algorithms;
    std::optional<AnovaResult> anova;  // across algorithms' objective groups
    struct PairwiseT {
        std::string a, b;
        TTestResult test;
    };
    std::vector<PairwiseT> pairwise_t;
    std::string best_algorithm;
    RunRecord best_overall;
    std::uint64_t grid_cardinality_step1 = 0;  // on the active bounds
    double eval_budget_ratio = 0.0;  // cardinality / max EC evaluations
    std::vector<std::string> warnings;
};

struct HarnessOptions {
    int workers = 1;  // parallel (algorithm, seed) tasks; results unaffected
};

/** Returns the number of workers implied by the environment (EXOLINK_WORKERS)
 *  falling back to the given default. */
int env_workers(int fallback);

/**
 * Runs every (algorithm, seed) pair, persisting each raw run record before
 * aggregation, then writes the report atomically. Invalid configs abort
 * before any run starts; failed runs are recorded and excluded with a
 * warning (flagged when more than 10% fail).
 */
ExperimentReport run_experiment(const ExperimentConfig& config,
                                const HarnessOptions& opts = {});

/** Rebuilds the report purely from the persisted records in `dir`. */
ExperimentReport report_from_dir(const std::string& dir);

/** Aggregation core shared by run_experiment and report_from_dir. */
ExperimentReport build_report(const std::vector<RunRecord>& records,
                              const ExperimentConfig& config);

/** Writes report.json / runs.csv / traces.csv per `formats`. */
void emit_report(const ExperimentReport& report,
                 const std::vector<RunRecord>& records,
                 const std::string& out_dir,
                 const std::vector<std::string>& formats);

std::string report_json(const ExperimentReport& report);

}  // namespace exo
