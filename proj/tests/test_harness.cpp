#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "exolink/harness.hpp"
#include "exolink/util.hpp"
#include "json.hpp"

using namespace exo;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Small but real: bundled model, trimmed sweep and populations.
std::string tiny_config(const std::string& out_dir,
                        const std::string& extra_algorithms = "") {
    std::ostringstream ss;
    ss << R"({
  "problem": {"dv_count": 6, "sweep_steps": 8},
  "algorithms": [
    {"algo": "ga", "population_size": 8, "generations": 3},
    {"algo": "bbbc", "population_size": 8, "generations": 3})"
       << extra_algorithms << R"(
  ],
  "repetitions": 2,
  "base_seed": 11,
  "output_dir": ")"
       << out_dir << R"("
})";
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name)
        : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

bool has_warning(const ExperimentReport& r, const std::string& needle) {
    return std::any_of(r.warnings.begin(), r.warnings.end(),
                       [&](const std::string& w) {
                           return w.find(needle) != std::string::npos;
                       });
}

}  // namespace

// ============================================================================
// config parsing
// ============================================================================

TEST_CASE("minimal config materializes the documented defaults") {
    ExperimentConfig c = parse_experiment_config(
        R"({"algorithms": [{"algo": "ga"}]})");
    CHECK(c.format_version == 1);
    CHECK(c.model_ref == "builtin");
    CHECK(c.problem.dv_count == 6);
    CHECK(c.problem.sweep_steps == 46);
    CHECK(c.repetitions == 20);
    CHECK(c.base_seed == 1);
    CHECK(c.formats == std::vector<std::string>({"csv", "json"}));
    REQUIRE(c.algorithms.size() == 1);
    CHECK(c.algorithms[0].ga.population_size == 300);
    CHECK(c.algorithms[0].ga.generations == 50);
    CHECK(c.algorithms[0].ga.mutation_probability ==
          doctest::Approx(0.2));
}

TEST_CASE("effective seeds derive from the base seed unless listed") {
    ExperimentConfig c = parse_experiment_config(
        R"({"algorithms": [{"algo": "ga"}], "repetitions": 3, "base_seed": 40})");
    CHECK(c.effective_seeds() ==
          std::vector<std::uint64_t>({40, 41, 42}));

    ExperimentConfig e = parse_experiment_config(
        R"({"algorithms": [{"algo": "ga"}], "repetitions": 3,
            "seeds": [7, 9]})");
    CHECK(e.effective_seeds() == std::vector<std::uint64_t>({7, 9}));
}

TEST_CASE("unknown keys are rejected at every level") {
    CHECK_THROWS_AS((void)parse_experiment_config(
                        R"({"algorithms": [{"algo": "ga"}], "extra": 1})"),
                    ConfigError);
    CHECK_THROWS_AS(
        (void)parse_experiment_config(
            R"({"algorithms": [{"algo": "ga"}], "problem": {"dvs": 6}})"),
        ConfigError);
    CHECK_THROWS_AS(
        (void)parse_experiment_config(
            R"({"algorithms": [{"algo": "ga", "pop": 10}]})"),
        ConfigError);
    CHECK_THROWS_AS(
        (void)parse_experiment_config(
            R"({"algorithms": [{"algo": "annealing"}]})"),
        ConfigError);
}

TEST_CASE("structural validation") {
    CHECK_THROWS_AS((void)parse_experiment_config("{}"), ConfigError);
    CHECK_THROWS_AS((void)parse_experiment_config("not json"), ConfigError);
    CHECK_THROWS_AS((void)parse_experiment_config(
                        R"({"algorithms": [{"algo": "ga"}],
                            "repetitions": 0})"),
                    ConfigError);
    CHECK_THROWS_AS((void)parse_experiment_config(
                        R"({"algorithms": [{"algo": "ga"}],
                            "formats": []})"),
                    ConfigError);
    CHECK_THROWS_AS((void)parse_experiment_config(
                        R"({"algorithms": [{"algo": "ga"}],
                            "formats": ["xml"]})"),
                    ConfigError);
    // the same algorithm twice is ambiguous in reports
    CHECK_THROWS_AS((void)parse_experiment_config(
                        R"({"algorithms": [{"algo": "ga"}, {"algo": "ga"}]})"),
                    ConfigError);
    // bad GA parameters surface at parse time, before any run
    CHECK_THROWS_AS((void)parse_experiment_config(
                        R"({"algorithms": [{"algo": "ga",
                            "population_size": 7}]})"),
                    ConfigError);
}

TEST_CASE("canonical form is stable across reparsing") {
    ExperimentConfig c = parse_experiment_config(tiny_config("somewhere"));
    std::string canon = experiment_config_canonical_json(c);
    ExperimentConfig re = parse_experiment_config(canon);
    CHECK(experiment_config_canonical_json(re) == canon);
}

TEST_CASE("worker override comes from the environment") {
    unsetenv("EXOLINK_WORKERS");
    CHECK(env_workers(3) == 3);
    setenv("EXOLINK_WORKERS", "5", 1);
    CHECK(env_workers(3) == 5);
    setenv("EXOLINK_WORKERS", "junk", 1);
    CHECK(env_workers(3) == 3);
    setenv("EXOLINK_WORKERS", "0", 1);
    CHECK(env_workers(3) == 3);
    unsetenv("EXOLINK_WORKERS");
}

// ============================================================================
// run records
// ============================================================================

TEST_CASE("run records round-trip through their canonical JSON") {
    RunRecord r;
    r.algorithm = "ga";
    r.seed = 17;
    r.trace = {1.0, 2.5, 2.5};
    r.eval_counts = {8, 8, 8};
    r.total_evaluations = 24;
    r.convergence_generation = 2;
    r.best_genes = {58, 10, 15, 51, 56, 100};
    r.best_objective = 22.25;
    r.best_feasible = true;
    r.config_hash = 0xabcdef0123456789ull;
    r.wall_time_s = 3.25;  // must NOT survive the canonical form

    std::string canon = run_record_canonical_json(r);
    CHECK(canon.find("wall_time") == std::string::npos);
    RunRecord back = parse_run_record(canon);
    CHECK(back.algorithm == r.algorithm);
    CHECK(back.seed == r.seed);
    CHECK(back.trace == r.trace);
    CHECK(back.best_genes == r.best_genes);
    CHECK(back.best_objective == r.best_objective);
    CHECK(back.config_hash == r.config_hash);
    CHECK(back.wall_time_s == 0.0);
    CHECK(run_record_canonical_json(back) == canon);
}

// ============================================================================
// end-to-end experiment
// ============================================================================

TEST_CASE("a small experiment produces records, report, and csv files") {
    TempDir dir("exolink_harness_e2e");
    ExperimentConfig c = parse_experiment_config(tiny_config(dir.str()));
    HarnessOptions opts;
    opts.workers = 4;
    ExperimentReport rep = run_experiment(c, opts);

    CHECK(fs::exists(dir.path / "config.json"));
    CHECK(fs::exists(dir.path / "report.json"));
    CHECK(fs::exists(dir.path / "runs.csv"));
    CHECK(fs::exists(dir.path / "traces.csv"));
    for (const char* name : {"ga_11.json", "ga_12.json", "bbbc_11.json",
                             "bbbc_12.json"}) {
        CHECK(fs::exists(dir.path / "runs" / name));
        CHECK(fs::exists(dir.path / "runs" /
                         (std::string(name).substr(
                              0, std::string(name).size() - 5) +
                          ".timing.json")));
    }

    REQUIRE(rep.algorithms.count("ga"));
    REQUIRE(rep.algorithms.count("bbbc"));
    CHECK(rep.algorithms.at("ga").runs == 2);
    CHECK(rep.algorithms.at("ga").evaluations_per_run == 24);
    CHECK(rep.seeds == std::vector<std::uint64_t>({11, 12}));
    CHECK(rep.grid_cardinality_step1 == 905'219'763ull);
    CHECK(rep.eval_budget_ratio > 1e6);  // 905M / 24

    // runs.csv: header + one row per run
    std::ifstream csv(dir.path / "runs.csv");
    std::string line;
    std::getline(csv, line);
    CHECK(line.find("algorithm") != std::string::npos);
    CHECK(line.find("seed") != std::string::npos);
    int rows = 0;
    while (std::getline(csv, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 4);
}

TEST_CASE("every reported number is recomputable from the raw records") {
    TempDir dir("exolink_harness_recompute");
    ExperimentConfig c = parse_experiment_config(tiny_config(dir.str()));
    ExperimentReport rep = run_experiment(c);

    // independent re-aggregation: read the persisted records back
    std::vector<RunRecord> records;
    for (const auto& entry : fs::directory_iterator(dir.path / "runs")) {
        std::string name = entry.path().filename().string();
        if (name.find(".timing.") != std::string::npos) continue;
        records.push_back(parse_run_record(read_file(entry.path().string())));
    }
    REQUIRE(records.size() == 4);

    for (const auto& [name, s] : rep.algorithms) {
        std::vector<double> objs;
        for (const auto& r : records)
            if (r.algorithm == name && r.best_feasible)
                objs.push_back(r.best_objective);
        REQUIRE((int)objs.size() == s.runs - s.failed - s.infeasible_best);
        double mean = 0.0;
        for (double o : objs) mean += o;
        mean /= (double)objs.size();
        CHECK(s.objective.mean == doctest::Approx(mean).epsilon(1e-12));
    }
}

TEST_CASE("reaggregation from the output directory reproduces the report") {
    TempDir dir("exolink_harness_reagg");
    ExperimentConfig c = parse_experiment_config(tiny_config(dir.str()));
    ExperimentReport rep = run_experiment(c);
    ExperimentReport again = report_from_dir(dir.str());
    CHECK(report_json(again) == report_json(rep));
}

TEST_CASE("identical configs rerun to byte-identical records") {
    TempDir a("exolink_harness_det_a"), b("exolink_harness_det_b");
    ExperimentConfig ca = parse_experiment_config(tiny_config(a.str()));
    ExperimentConfig cb = parse_experiment_config(tiny_config(b.str()));
    HarnessOptions w1, w8;
    w1.workers = 1;
    w8.workers = 8;
    (void)run_experiment(ca, w8);
    (void)run_experiment(cb, w1);
    for (const char* name : {"ga_11.json", "ga_12.json", "bbbc_11.json",
                             "bbbc_12.json"}) {
        CAPTURE(name);
        CHECK(read_file((a.path / "runs" / name).string()) ==
              read_file((b.path / "runs" / name).string()));
    }
}

TEST_CASE("seed isolation: other runs do not disturb a seed's record") {
    TempDir a("exolink_harness_iso_a"), b("exolink_harness_iso_b");
    ExperimentConfig ca = parse_experiment_config(tiny_config(a.str()));
    ExperimentConfig cb = parse_experiment_config(tiny_config(b.str()));
    cb.seeds = {11};  // drop the second repetition
    (void)run_experiment(ca);
    (void)run_experiment(cb);
    // identical results apart from the config fingerprint
    json ja = json::parse(read_file((a.path / "runs" / "ga_11.json").string()));
    json jb = json::parse(read_file((b.path / "runs" / "ga_11.json").string()));
    ja.erase("config_hash");
    jb.erase("config_hash");
    CHECK(ja == jb);
}

TEST_CASE("single-seed experiments are flagged as degenerate") {
    TempDir dir("exolink_harness_single");
    ExperimentConfig c = parse_experiment_config(tiny_config(dir.str()));
    c.repetitions = 1;
    c.seeds.clear();
    ExperimentReport rep = run_experiment(c);
    CHECK(has_warning(rep, "degenerate"));
    CHECK(rep.algorithms.at("ga").objective.stddev == 0.0);
}

TEST_CASE("failed runs are recorded and flagged, never dropped") {
    TempDir dir("exolink_harness_failed");
    // bf grid above its safety cap: the task fails by refusal
    std::string cfg = tiny_config(
        dir.str(),
        R"(,
    {"algo": "bf", "grid_steps": [1, 1, 1, 1, 1, 1], "safety_cap": 1000}
)");
    ExperimentConfig c = parse_experiment_config(cfg);
    ExperimentReport rep = run_experiment(c);
    REQUIRE(rep.algorithms.count("bf"));
    CHECK(rep.algorithms.at("bf").failed == 1);
    CHECK(has_warning(rep, "bf"));

    // the record itself is on disk with the cause
    json r = json::parse(read_file((dir.path / "runs" / "bf_0.json").string()));
    CHECK(r.at("failed").get<bool>());
    CHECK(r.at("error").get<std::string>().find("safety cap") !=
          std::string::npos);
}

TEST_CASE("unusable output locations abort the run") {
    ExperimentConfig c = parse_experiment_config(
        tiny_config("/proc/exolink_cannot_write_here"));
    CHECK_THROWS((void)run_experiment(c));
}

TEST_CASE("report_from_dir requires a config") {
    TempDir dir("exolink_harness_noconfig");
    fs::create_directories(dir.path);
    CHECK_THROWS_AS((void)report_from_dir(dir.str()), ConfigError);
}
