#include "exolink/harness.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <initializer_list>
#include <set>
#include <sstream>

#include "exolink/model.hpp"
#include "exolink/util.hpp"
#include "json_io.hpp"
#include "json.hpp"

namespace exo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------- utilities

void require_keys(const json& obj,
                  std::initializer_list<const char*> allowed,
                  const std::string& ctx) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (item.key() == a) {
                known = true;
                break;
            }
        if (!known)
            throw ConfigError("unknown key '" + item.key() + "' in " + ctx);
    }
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string join_genes(const DesignVector& g) {
    std::string out;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (i) out += ';';
        out += fmt_double(g[i]);
    }
    return out;
}

// deb ordering lifted onto persisted records (failed runs always lose)
bool record_better(const RunRecord& a, const RunRecord& b) {
    if (a.failed != b.failed) return !a.failed;
    if (a.failed) return false;
    if (a.best_feasible != b.best_feasible) return a.best_feasible;
    if (!a.best_feasible) {
        if (a.best_total_violation != b.best_total_violation)
            return a.best_total_violation < b.best_total_violation;
    } else if (a.best_objective != b.best_objective) {
        return a.best_objective > b.best_objective;
    }
    return a.best_genes < b.best_genes;
}

json record_to_json(const RunRecord& r) {
    json doc;
    doc["algorithm"] = r.algorithm;
    doc["seed"] = r.seed;
    doc["failed"] = r.failed;
    doc["error"] = r.error;
    doc["trace"] = r.trace;
    doc["eval_counts"] = r.eval_counts;
    doc["total_evaluations"] = r.total_evaluations;
    doc["convergence_generation"] = r.convergence_generation;
    doc["best_genes"] = r.best_genes;
    doc["best_objective"] = r.best_objective;
    doc["best_feasible"] = r.best_feasible;
    doc["best_total_violation"] = r.best_total_violation;
    doc["tau_mcp"] = r.tau_mcp;
    doc["tau_pip"] = r.tau_pip;
    doc["grid_visited"] = r.grid_visited;
    doc["config_hash"] = to_hex(r.config_hash);
    return doc;
}

json summary_to_json(const SummaryStats& s) {
    return {{"n", s.n},       {"mean", s.mean}, {"stddev", s.stddev},
            {"median", s.median}, {"iqr", s.iqr},   {"min", s.min},
            {"max", s.max}};
}

SummaryStats summarize_or_empty(const std::vector<double>& v) {
    if (v.empty()) return {};
    return summarize(v);
}

}  // namespace

// ------------------------------------------------------------ configuration

std::vector<std::uint64_t> ExperimentConfig::effective_seeds() const {
    if (!seeds.empty()) return seeds;
    std::vector<std::uint64_t> out;
    out.reserve(static_cast<std::size_t>(repetitions));
    for (int i = 0; i < repetitions; ++i)
        out.push_back(base_seed + static_cast<std::uint64_t>(i));
    return out;
}

void ExperimentConfig::validate() const {
    if (format_version != 1)
        throw ConfigError("unsupported experiment format_version");
    if (model_ref.empty()) throw ConfigError("model reference is empty");
    if (algorithms.empty())
        throw ConfigError("experiment lists no algorithms");
    std::set<std::string> names;
    for (const auto& a : algorithms) {
        if (a.algo != "ga" && a.algo != "bbbc" && a.algo != "bf")
            throw ConfigError("unknown algorithm '" + a.algo + "'");
        if (!names.insert(a.algo).second)
            throw ConfigError("algorithm '" + a.algo + "' listed twice");
        try {
            if (a.algo == "ga") a.ga.validate();
            if (a.algo == "bbbc") a.bbbc.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string(e.what()));
        }
        if (a.algo == "bf")
            for (double s : a.grid_steps)
                if (!(s > 0.0))
                    throw ConfigError("grid steps must be positive");
    }
    if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
    if (seeds.empty() && repetitions < 1)
        throw ConfigError("no seeds to run");
    std::set<std::uint64_t> uniq(seeds.begin(), seeds.end());
    if (uniq.size() != seeds.size())
        throw ConfigError("duplicate seeds in the explicit seed list");
    if (output_dir.empty()) throw ConfigError("output_dir is empty");
    if (formats.empty())
        throw ConfigError("formats is empty; use \"csv\" and/or \"json\"");
    for (const auto& f : formats)
        if (f != "csv" && f != "json")
            throw ConfigError("unknown output format '" + f + "'");
    try {
        ProblemConfig pc = problem;
        if (pc.dv_count != 6 && pc.dv_count != 9)
            throw std::invalid_argument("dv_count must be 6 or 9");
        if (pc.sweep_steps < 2)
            throw std::invalid_argument("sweep_steps must be >= 2");
        if (!(pc.ratio_lo < pc.ratio_hi))
            throw std::invalid_argument("torque ratio window is empty");
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string(e.what()));
    }
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config JSON parse error: ") + e.what());
    }
    try {
        require_keys(doc,
                     {"format_version", "model", "problem", "algorithms",
                      "repetitions", "seeds", "base_seed", "output_dir",
                      "formats"},
                     "the experiment config");
        ExperimentConfig c;
        c.format_version = doc.value("format_version", 1);
        c.model_ref = doc.value("model", std::string("builtin"));
        if (doc.contains("problem")) {
            const json& p = doc.at("problem");
            require_keys(p,
                         {"dv_count", "objective_mode", "sweep_steps",
                          "ratio_lo", "ratio_hi", "penalty_ceiling",
                          "slider_min", "slider1_max", "slider2_max"},
                         "problem");
            c.problem.dv_count = p.value("dv_count", 6);
            if (p.contains("objective_mode"))
                c.problem.objective_mode = objective_mode_from_string(
                    p.at("objective_mode").get<std::string>());
            c.problem.sweep_steps = p.value("sweep_steps", 46);
            c.problem.ratio_lo = p.value("ratio_lo", 0.05);
            c.problem.ratio_hi = p.value("ratio_hi", 20.0);
            c.problem.penalty_ceiling = p.value("penalty_ceiling", 1e3);
            c.problem.slider_min = p.value("slider_min", -1.0);
            c.problem.slider1_max = p.value("slider1_max", -1.0);
            c.problem.slider2_max = p.value("slider2_max", -1.0);
        }
        if (!doc.contains("algorithms") || !doc.at("algorithms").is_array())
            throw ConfigError("experiment config needs an algorithms array");
        for (const json& a : doc.at("algorithms")) {
            AlgorithmSpec spec;
            spec.algo = a.at("algo").get<std::string>();
            if (spec.algo == "ga") {
                require_keys(a,
                             {"algo", "population_size", "generations",
                              "crossover_probability", "blx_alpha",
                              "mutation_probability", "mutation_eta"},
                             "ga algorithm entry");
                spec.ga.population_size = a.value("population_size", 300);
                spec.ga.generations = a.value("generations", 50);
                spec.ga.crossover_probability =
                    a.value("crossover_probability", 1.0);
                spec.ga.blx_alpha = a.value("blx_alpha", 0.5);
                spec.ga.mutation_probability =
                    a.value("mutation_probability", 0.2);
                spec.ga.mutation_eta = a.value("mutation_eta", 20.0);
            } else if (spec.algo == "bbbc") {
                require_keys(a,
                             {"algo", "population_size", "generations",
                              "crunch_mode", "bang_scale"},
                             "bbbc algorithm entry");
                spec.bbbc.population_size = a.value("population_size", 300);
                spec.bbbc.generations = a.value("generations", 50);
                if (a.contains("crunch_mode"))
                    spec.bbbc.crunch_mode = crunch_mode_from_string(
                        a.at("crunch_mode").get<std::string>());
                spec.bbbc.bang_scale = a.value("bang_scale", 1.0);
            } else if (spec.algo == "bf") {
                require_keys(a,
                             {"algo", "grid_steps", "safety_cap",
                              "checkpoint_interval"},
                             "bf algorithm entry");
                if (a.contains("grid_steps"))
                    spec.grid_steps =
                        a.at("grid_steps").get<std::vector<double>>();
                spec.grid_safety_cap = a.value("safety_cap", std::uint64_t{
                                                                 10'000'000});
                spec.grid_checkpoint_interval =
                    a.value("checkpoint_interval", std::uint64_t{100'000});
            } else {
                throw ConfigError("unknown algorithm '" + spec.algo + "'");
            }
            c.algorithms.push_back(std::move(spec));
        }
        c.repetitions = doc.value("repetitions", 20);
        if (doc.contains("seeds"))
            c.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
        c.base_seed = doc.value("base_seed", std::uint64_t{1});
        c.output_dir = doc.value("output_dir", std::string("out"));
        if (doc.contains("formats"))
            c.formats = doc.at("formats").get<std::vector<std::string>>();
        c.validate();
        return c;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid experiment config: ") +
                          e.what());
    }
}

ExperimentConfig load_experiment_config(const std::string& path) {
    return parse_experiment_config(read_file(path));
}

std::string experiment_config_canonical_json(const ExperimentConfig& c) {
    json doc;
    doc["format_version"] = c.format_version;
    doc["model"] = c.model_ref;
    doc["problem"] = {
        {"dv_count", c.problem.dv_count},
        {"objective_mode", to_string(c.problem.objective_mode)},
        {"sweep_steps", c.problem.sweep_steps},
        {"ratio_lo", c.problem.ratio_lo},
        {"ratio_hi", c.problem.ratio_hi},
        {"penalty_ceiling", c.problem.penalty_ceiling},
        {"slider_min", c.problem.slider_min},
        {"slider1_max", c.problem.slider1_max},
        {"slider2_max", c.problem.slider2_max},
    };
    json algos = json::array();
    for (const auto& a : c.algorithms) {
        json ja;
        ja["algo"] = a.algo;
        if (a.algo == "ga") {
            ja["population_size"] = a.ga.population_size;
            ja["generations"] = a.ga.generations;
            ja["crossover_probability"] = a.ga.crossover_probability;
            ja["blx_alpha"] = a.ga.blx_alpha;
            ja["mutation_probability"] = a.ga.mutation_probability;
            ja["mutation_eta"] = a.ga.mutation_eta;
        } else if (a.algo == "bbbc") {
            ja["population_size"] = a.bbbc.population_size;
            ja["generations"] = a.bbbc.generations;
            ja["crunch_mode"] = to_string(a.bbbc.crunch_mode);
            ja["bang_scale"] = a.bbbc.bang_scale;
        } else {
            ja["grid_steps"] = a.grid_steps;
            ja["safety_cap"] = a.grid_safety_cap;
            ja["checkpoint_interval"] = a.grid_checkpoint_interval;
        }
        algos.push_back(std::move(ja));
    }
    doc["algorithms"] = algos;
    doc["repetitions"] = c.repetitions;
    doc["seeds"] = c.effective_seeds();
    doc["base_seed"] = c.base_seed;
    // output_dir and formats are delivery options: they do not affect any
    // computed result, so they stay out of the canonical form and the hash.
    return doc.dump(2) + "\n";
}

// ------------------------------------------------------------- run records

std::string run_record_canonical_json(const RunRecord& r) {
    return record_to_json(r).dump(2) + "\n";
}

RunRecord parse_run_record(const std::string& json_text) {
    try {
        const json doc = json::parse(json_text);
        RunRecord r;
        r.algorithm = doc.at("algorithm").get<std::string>();
        r.seed = doc.at("seed").get<std::uint64_t>();
        r.failed = doc.at("failed").get<bool>();
        r.error = doc.at("error").get<std::string>();
        r.trace = doc.at("trace").get<std::vector<double>>();
        r.eval_counts = doc.at("eval_counts").get<std::vector<long>>();
        r.total_evaluations = doc.at("total_evaluations").get<long>();
        r.convergence_generation =
            doc.at("convergence_generation").get<int>();
        r.best_genes = doc.at("best_genes").get<std::vector<double>>();
        r.best_objective = doc.at("best_objective").get<double>();
        r.best_feasible = doc.at("best_feasible").get<bool>();
        r.best_total_violation = doc.at("best_total_violation").get<double>();
        r.tau_mcp = doc.at("tau_mcp").get<double>();
        r.tau_pip = doc.at("tau_pip").get<double>();
        r.grid_visited = doc.at("grid_visited").get<std::uint64_t>();
        r.config_hash =
            std::stoull(doc.at("config_hash").get<std::string>(), nullptr, 16);
        return r;
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("corrupt run record: ") +
                                 e.what());
    }
}

// ---------------------------------------------------------------- reporting

int env_workers(int fallback) {
    const char* v = std::getenv("EXOLINK_WORKERS");
    if (!v || !*v) return fallback;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (end == v || *end != '\0' || n < 1 || n > 4096) return fallback;
    return static_cast<int>(n);
}

ExperimentReport build_report(const std::vector<RunRecord>& records,
                              const ExperimentConfig& config) {
    ExperimentReport rep;
    rep.code_version = kVersionString;
    rep.config_hash = fnv1a64(experiment_config_canonical_json(config));
    rep.objective_mode = to_string(config.problem.objective_mode);
    rep.bounds_set = config.problem.dv_count == 6 ? "6dv" : "9dv";
    rep.seeds = config.effective_seeds();

    // step-1 brute-force budget on the active bounds (1 mm everywhere)
    GridSpec step1;
    step1.bounds = config.problem.dv_count == 6 ? default_bounds_6dv()
                                                : default_bounds_9dv();
    rep.grid_cardinality_step1 = grid_cardinality(step1);

    int total = 0, failures = 0;
    for (const auto& r : records) {
        if (r.config_hash != rep.config_hash)
            rep.warnings.push_back("record " + r.algorithm + "/seed " +
                                   std::to_string(r.seed) +
                                   " carries a different config hash");
        AlgorithmSummary& s = rep.algorithms[r.algorithm];
        s.algorithm = r.algorithm;
        ++s.runs;
        ++total;
        if (r.failed) {
            ++s.failed;
            ++failures;
            continue;
        }
        if (!r.best_feasible) ++s.infeasible_best;
        if (s.best.algorithm.empty() || record_better(r, s.best)) s.best = r;
        s.evaluations_per_run = std::max(s.evaluations_per_run,
                                         r.total_evaluations);
    }

    long max_ec_evals = 0;
    for (auto& [name, s] : rep.algorithms) {
        std::vector<double> objs, times, convs;
        for (const auto& r : records) {
            if (r.algorithm != name || r.failed) continue;
            if (r.best_feasible) objs.push_back(r.best_objective);
            times.push_back(r.wall_time_s);
            if (name != "bf") convs.push_back(r.convergence_generation);
        }
        s.objective = summarize_or_empty(objs);
        s.run_time = summarize_or_empty(times);
        s.convergence_generation = summarize_or_empty(convs);
        if (name != "bf") max_ec_evals = std::max(max_ec_evals,
                                                  s.evaluations_per_run);
        if (s.failed == s.runs)
            rep.warnings.push_back("all " + name + " runs failed");
        if (!objs.empty() && s.infeasible_best > 0)
            rep.warnings.push_back(
                name + " produced infeasible best designs in " +
                std::to_string(s.infeasible_best) + " run(s)");
    }
    if (max_ec_evals > 0)
        rep.eval_budget_ratio = static_cast<double>(rep.grid_cardinality_step1) /
                                static_cast<double>(max_ec_evals);

    if (total > 0 && failures * 10 > total)
        rep.warnings.push_back(
            "more than 10% of runs failed (" + std::to_string(failures) +
            " of " + std::to_string(total) + ")");
    if (rep.seeds.size() < 2)
        rep.warnings.push_back(
            "single repetition: dispersion statistics are degenerate");

    // comparative statistics over the feasible best objectives
    std::vector<std::string> usable;
    std::vector<std::vector<double>> groups;
    for (const auto& [name, s] : rep.algorithms) {
        std::vector<double> objs;
        for (const auto& r : records)
            if (r.algorithm == name && !r.failed && r.best_feasible)
                objs.push_back(r.best_objective);
        if (objs.size() >= 2) {
            usable.push_back(name);
            groups.push_back(std::move(objs));
        } else if (!s.best.algorithm.empty()) {
            rep.warnings.push_back("algorithm " + name +
                                   " excluded from comparative statistics "
                                   "(fewer than 2 usable runs)");
        }
    }
    if (groups.size() >= 2) {
        rep.anova = one_way_anova(groups);
        for (std::size_t i = 0; i < groups.size(); ++i)
            for (std::size_t j = i + 1; j < groups.size(); ++j)
                rep.pairwise_t.push_back(
                    {usable[i], usable[j],
                     two_sample_t(groups[i], groups[j])});
    } else {
        rep.warnings.push_back(
            "comparative statistics skipped: fewer than two algorithms with "
            "enough usable runs");
    }

    for (const auto& [name, s] : rep.algorithms) {
        if (s.best.algorithm.empty()) continue;
        if (rep.best_overall.algorithm.empty() ||
            record_better(s.best, rep.best_overall)) {
            rep.best_overall = s.best;
            rep.best_algorithm = name;
        }
    }
    return rep;
}

std::string report_json(const ExperimentReport& report) {
    json doc;
    doc["code_version"] = report.code_version;
    doc["config_hash"] = to_hex(report.config_hash);
    doc["objective_mode"] = report.objective_mode;
    doc["bounds_set"] = report.bounds_set;
    doc["seeds"] = report.seeds;
    json algos;
    for (const auto& [name, s] : report.algorithms) {
        algos[name] = {
            {"runs", s.runs},
            {"failed", s.failed},
            {"infeasible_best", s.infeasible_best},
            {"objective", summary_to_json(s.objective)},
            {"run_time", summary_to_json(s.run_time)},
            {"convergence_generation",
             summary_to_json(s.convergence_generation)},
            {"evaluations_per_run", s.evaluations_per_run},
            {"best", record_to_json(s.best)},
        };
    }
    doc["algorithms"] = algos;
    if (report.anova) {
        doc["anova"] = {{"F", report.anova->F},
                        {"p", report.anova->p},
                        {"eta_squared", report.anova->eta_squared},
                        {"ss_between", report.anova->ss_between},
                        {"ss_within", report.anova->ss_within},
                        {"df_between", report.anova->df_between},
                        {"df_within", report.anova->df_within}};
    } else {
        doc["anova"] = nullptr;
    }
    json pt = json::array();
    for (const auto& p : report.pairwise_t)
        pt.push_back({{"a", p.a},
                      {"b", p.b},
                      {"t", p.test.t},
                      {"p", p.test.p},
                      {"df", p.test.df}});
    doc["pairwise_t"] = pt;
    doc["best_algorithm"] = report.best_algorithm;
    doc["best_overall"] = record_to_json(report.best_overall);
    doc["grid_cardinality_step1"] = report.grid_cardinality_step1;
    doc["eval_budget_ratio"] = report.eval_budget_ratio;
    doc["warnings"] = report.warnings;
    return doc.dump(2) + "\n";
}

void emit_report(const ExperimentReport& report,
                 const std::vector<RunRecord>& records,
                 const std::string& out_dir,
                 const std::vector<std::string>& formats) {
    fs::create_directories(out_dir);
    const bool want_json = std::find(formats.begin(), formats.end(),
                                     "json") != formats.end();
    const bool want_csv = std::find(formats.begin(), formats.end(),
                                    "csv") != formats.end();
    if (want_json)
        atomic_write_file((fs::path(out_dir) / "report.json").string(),
                          report_json(report));
    if (want_csv) {
        std::ostringstream runs;
        runs << "algorithm,seed,failed,error,best_objective,best_feasible,"
                "best_total_violation,tau_mcp,tau_pip,convergence_generation,"
                "total_evaluations,grid_visited,wall_time_s,best_genes\n";
        for (const auto& r : records) {
            runs << r.algorithm << ',' << r.seed << ',' << (r.failed ? 1 : 0)
                 << ',' << csv_escape(r.error) << ','
                 << fmt_double(r.best_objective) << ','
                 << (r.best_feasible ? 1 : 0) << ','
                 << fmt_double(r.best_total_violation) << ','
                 << fmt_double(r.tau_mcp) << ',' << fmt_double(r.tau_pip)
                 << ',' << r.convergence_generation << ','
                 << r.total_evaluations << ',' << r.grid_visited << ','
                 << fmt_double(r.wall_time_s) << ','
                 << csv_escape(join_genes(r.best_genes)) << '\n';
        }
        atomic_write_file((fs::path(out_dir) / "runs.csv").string(),
                          runs.str());

        std::ostringstream traces;
        traces << "algorithm,seed,generation,best_score\n";
        for (const auto& r : records) {
            if (r.failed) continue;
            for (std::size_t g = 0; g < r.trace.size(); ++g)
                traces << r.algorithm << ',' << r.seed << ',' << g + 1 << ','
                       << fmt_double(r.trace[g]) << '\n';
        }
        atomic_write_file((fs::path(out_dir) / "traces.csv").string(),
                          traces.str());
    }
}

// ------------------------------------------------------------------ running

namespace {

struct Task {
    AlgorithmSpec spec;
    std::uint64_t seed = 0;
    bool seeded = true;  // bf runs once, unseeded
};

RunRecord execute_task(const Task& task, const DesignProblem& problem,
                       std::uint64_t config_hash) {
    RunRecord rec;
    rec.algorithm = task.spec.algo;
    rec.seed = task.seed;
    rec.config_hash = config_hash;
    const ObjectiveFn fn = [&problem](const DesignVector& d) {
        return problem.evaluate(d);
    };
    const double t0 = monotonic_seconds();
    try {
        if (task.spec.algo == "bf") {
            GridSpec spec;
            spec.bounds = problem.bounds();
            spec.steps = task.spec.grid_steps;
            GridOptions gopts;
            gopts.safety_cap = task.spec.grid_safety_cap;
            gopts.checkpoint_interval = task.spec.grid_checkpoint_interval;
            const GridResult res = run_grid(spec, fn, gopts);
            rec.total_evaluations = static_cast<long>(res.visited);
            rec.grid_visited = res.visited;
            if (res.has_best) {
                rec.best_genes = res.best.design;
                rec.best_objective = res.best.objective;
                rec.best_feasible = res.best.feasible;
                rec.best_total_violation = res.best.constraints.total_violation;
                rec.tau_mcp = res.best.torques_at_closed.tau_mcp;
                rec.tau_pip = res.best.torques_at_closed.tau_pip;
            }
        } else {
            OptimizerRun run;
            if (task.spec.algo == "ga")
                run = run_ga(task.spec.ga, fn, problem.bounds(), task.seed);
            else
                run = run_bbbc(task.spec.bbbc, fn, problem.bounds(), task.seed);
            rec.trace = run.trace;
            rec.eval_counts = run.eval_counts;
            rec.total_evaluations = run.total_evaluations;
            rec.convergence_generation = run.convergence_generation;
            rec.best_genes = run.best.genes;
            rec.best_objective = run.best.outcome.objective;
            rec.best_feasible = run.best.outcome.feasible;
            rec.best_total_violation =
                run.best.outcome.constraints.total_violation;
            rec.tau_mcp = run.best.outcome.torques_at_closed.tau_mcp;
            rec.tau_pip = run.best.outcome.torques_at_closed.tau_pip;
        }
    } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
    }
    rec.wall_time_s = monotonic_seconds() - t0;
    return rec;
}

std::string record_basename(const RunRecord& r) {
    return r.algorithm + "_" + std::to_string(r.seed);
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config,
                                const HarnessOptions& opts) {
    config.validate();
    std::shared_ptr<const LinkageModel> model;
    if (config.model_ref == "builtin")
        model = std::shared_ptr<const LinkageModel>(&builtin_model(),
                                                    [](const LinkageModel*) {});
    else
        model = std::make_shared<LinkageModel>(load_model(config.model_ref));
    const DesignProblem problem(model, config.problem);

    const std::string canonical = experiment_config_canonical_json(config);
    const std::uint64_t config_hash = fnv1a64(canonical);

    const fs::path out(config.output_dir);
    fs::create_directories(out / "runs");
    atomic_write_file((out / "config.json").string(), canonical);

    std::vector<Task> tasks;
    for (const auto& spec : config.algorithms) {
        if (spec.algo == "bf") {
            tasks.push_back({spec, 0, false});
        } else {
            for (std::uint64_t s : config.effective_seeds())
                tasks.push_back({spec, s, true});
        }
    }

    std::vector<RunRecord> records(tasks.size());
    parallel_for(tasks.size(), opts.workers, [&](std::size_t i) {
        records[i] = execute_task(tasks[i], problem, config_hash);
        const std::string base =
            (out / "runs" / record_basename(records[i])).string();
        atomic_write_file(base + ".json",
                          run_record_canonical_json(records[i]));
        json timing;
        timing["wall_time_s"] = records[i].wall_time_s;
        atomic_write_file(base + ".timing.json", timing.dump(2) + "\n");
    });

    ExperimentReport report = build_report(records, config);
    emit_report(report, records, config.output_dir, config.formats);
    return report;
}

ExperimentReport report_from_dir(const std::string& dir) {
    const fs::path base(dir);
    if (!fs::exists(base / "config.json"))
        throw ConfigError("no config.json in '" + dir +
                          "'; is this an experiment output directory?");
    const ExperimentConfig config =
        parse_experiment_config(read_file((base / "config.json").string()));

    std::vector<std::string> names;
    const fs::path runs = base / "runs";
    if (fs::exists(runs))
        for (const auto& entry : fs::directory_iterator(runs)) {
            const std::string name = entry.path().filename().string();
            if (entry.is_regular_file() && name.size() > 5 &&
                name.ends_with(".json") && !name.ends_with(".timing.json"))
                names.push_back(entry.path().string());
        }
    std::sort(names.begin(), names.end());
    if (names.empty())
        throw std::runtime_error("no run records found under '" +
                                 runs.string() + "'");

    std::vector<RunRecord> records;
    records.reserve(names.size());
    for (const auto& path : names) {
        RunRecord r = parse_run_record(read_file(path));
        const std::string timing_path =
            path.substr(0, path.size() - 5) + ".timing.json";
        if (fs::exists(timing_path)) {
            try {
                const json t = json::parse(read_file(timing_path));
                r.wall_time_s = t.value("wall_time_s", 0.0);
            } catch (const std::exception&) {
                // timing sidecars are informational; ignore damage
            }
        }
        records.push_back(std::move(r));
    }

    ExperimentReport report = build_report(records, config);
    emit_report(report, records, dir, config.formats);
    return report;
}

}  // namespace exo
