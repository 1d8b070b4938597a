#include "exolink.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "exolink/evo.hpp"
#include "exolink/grid.hpp"
#include "exolink/harness.hpp"
#include "exolink/model.hpp"
#include "exolink/problem.hpp"
#include "exolink/util.hpp"
#include "json_io.hpp"
#include "json.hpp"

using nlohmann::json;

struct exo_model {
    exo::LinkageModel impl;
};

struct exo_problem {
    std::unique_ptr<const exo::DesignProblem> impl;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

/* Runs fn, translating C++ exceptions into status codes. */
template <typename Fn>
exo_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const exo::ConfigError& e) {
        set_error(e.what());
        return EXO_ERR_CONFIG;
    } catch (const exo::ModelError& e) {
        set_error(e.what());
        return EXO_ERR_CONFIG;
    } catch (const exo::IoError& e) {
        set_error(e.what());
        return EXO_ERR_IO;
    } catch (const std::invalid_argument& e) {
        set_error(e.what());
        return EXO_ERR_INVALID_ARGUMENT;
    } catch (const std::exception& e) {
        set_error(e.what());
        return EXO_ERR_RUNTIME;
    } catch (...) {
        set_error("unknown error");
        return EXO_ERR_RUNTIME;
    }
}

exo_status require(bool ok, const char* what) {
    if (ok) return EXO_OK;
    set_error(std::string("null ") + what);
    return EXO_ERR_INVALID_ARGUMENT;
}

exo::ProblemConfig parse_problem_config(const char* text) {
    const std::string body = (text && *text) ? text : "{}";
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::exception& e) {
        throw exo::ConfigError(std::string("problem config parse error: ") +
                               e.what());
    }
    exo::ProblemConfig cfg;
    try {
        for (const auto& item : doc.items()) {
            const std::string& k = item.key();
            if (k == "dv_count") cfg.dv_count = item.value().get<int>();
            else if (k == "objective_mode")
                cfg.objective_mode = exo::objective_mode_from_string(
                    item.value().get<std::string>());
            else if (k == "sweep_steps") cfg.sweep_steps = item.value().get<int>();
            else if (k == "ratio_lo") cfg.ratio_lo = item.value().get<double>();
            else if (k == "ratio_hi") cfg.ratio_hi = item.value().get<double>();
            else if (k == "penalty_ceiling")
                cfg.penalty_ceiling = item.value().get<double>();
            else if (k == "slider_min") cfg.slider_min = item.value().get<double>();
            else if (k == "slider1_max")
                cfg.slider1_max = item.value().get<double>();
            else if (k == "slider2_max")
                cfg.slider2_max = item.value().get<double>();
            else
                throw exo::ConfigError("unknown key '" + k +
                                       "' in the problem config");
        }
    } catch (const json::exception& e) {
        throw exo::ConfigError(std::string("problem config: ") + e.what());
    }
    return cfg;
}

exo::RunRecord record_of(const exo::OptimizerRun& run, std::uint64_t hash) {
    exo::RunRecord rec;
    rec.algorithm = run.algorithm;
    rec.seed = run.seed;
    rec.trace = run.trace;
    rec.eval_counts = run.eval_counts;
    rec.total_evaluations = run.total_evaluations;
    rec.convergence_generation = run.convergence_generation;
    rec.best_genes = run.best.genes;
    rec.best_objective = run.best.outcome.objective;
    rec.best_feasible = run.best.outcome.feasible;
    rec.best_total_violation = run.best.outcome.constraints.total_violation;
    rec.tau_mcp = run.best.outcome.torques_at_closed.tau_mcp;
    rec.tau_pip = run.best.outcome.torques_at_closed.tau_pip;
    rec.config_hash = hash;
    rec.wall_time_s = run.wall_time_s;
    return rec;
}

}  // namespace

extern "C" {

const char* exo_version(void) { return exo::kVersionString; }

const char* exo_last_error_message(void) { return g_last_error.c_str(); }

void exo_string_free(char* s) { std::free(s); }

/* -------------------------------------------------------------------- model */

exo_status exo_model_load(const char* path_or_builtin, exo_model** out) {
    if (exo_status st = require(path_or_builtin, "model path")) return st;
    if (exo_status st = require(out, "output pointer")) return st;
    return guarded([&]() {
        auto handle = std::make_unique<exo_model>();
        if (std::strcmp(path_or_builtin, "builtin") == 0)
            handle->impl = exo::builtin_model();
        else
            handle->impl = exo::load_model(path_or_builtin);
        *out = handle.release();
        return EXO_OK;
    });
}

exo_status exo_model_from_json(const char* json_text, exo_model** out) {
    if (exo_status st = require(json_text, "model JSON")) return st;
    if (exo_status st = require(out, "output pointer")) return st;
    return guarded([&]() {
        auto handle = std::make_unique<exo_model>();
        handle->impl = exo::parse_model(json_text);
        *out = handle.release();
        return EXO_OK;
    });
}

exo_status exo_model_to_json(const exo_model* m, char** out_json) {
    if (exo_status st = require(m, "model")) return st;
    if (exo_status st = require(out_json, "output pointer")) return st;
    return guarded([&]() {
        *out_json = dup_string(exo::serialize_model(m->impl));
        return *out_json ? EXO_OK : EXO_ERR_RUNTIME;
    });
}

void exo_model_free(exo_model* m) { delete m; }

/* ------------------------------------------------------------------ problem */

exo_status exo_problem_create(const exo_model* m,
                              const char* problem_config_json,
                              exo_problem** out) {
    if (exo_status st = require(m, "model")) return st;
    if (exo_status st = require(out, "output pointer")) return st;
    return guarded([&]() {
        const exo::ProblemConfig cfg = parse_problem_config(problem_config_json);
        auto model = std::make_shared<exo::LinkageModel>(m->impl);
        auto handle = std::make_unique<exo_problem>();
        handle->impl =
            std::make_unique<exo::DesignProblem>(std::move(model), cfg);
        *out = handle.release();
        return EXO_OK;
    });
}

void exo_problem_free(exo_problem* p) { delete p; }

exo_status exo_problem_evaluate(const exo_problem* p, const double* design,
                                size_t len, char** out_json) {
    if (exo_status st = require(p, "problem")) return st;
    if (exo_status st = require(design, "design")) return st;
    if (exo_status st = require(out_json, "output pointer")) return st;
    return guarded([&]() {
        const exo::DesignVector d(design, design + len);
        const exo::EvaluationOutcome o = p->impl->evaluate(d);
        *out_json = dup_string(exo::detail::outcome_to_json(o).dump(2) + "\n");
        return *out_json ? EXO_OK : EXO_ERR_RUNTIME;
    });
}

/* --------------------------------------------------------------- optimizers */

exo_status exo_optimize(const exo_problem* p, const char* algo,
                        const char* params_json, uint64_t seed, int workers,
                        char** out_run_json) {
    if (exo_status st = require(p, "problem")) return st;
    if (exo_status st = require(algo, "algorithm name")) return st;
    if (exo_status st = require(out_run_json, "output pointer")) return st;
    return guarded([&]() {
        const std::string body =
            (params_json && *params_json) ? params_json : "{}";
        json doc;
        try {
            doc = json::parse(body);
        } catch (const json::exception& e) {
            throw exo::ConfigError(
                std::string("algorithm params parse error: ") + e.what());
        }

        const exo::ObjectiveFn fn = [p](const exo::DesignVector& d) {
            return p->impl->evaluate(d);
        };
        exo::RunOptions opts;
        opts.workers = workers > 0 ? workers : exo::env_workers(1);

        const std::uint64_t hash =
            exo::fnv1a64(std::string(algo) + "\n" + doc.dump() + "\n" +
                         std::to_string(seed));

        exo::OptimizerRun run;
        if (std::strcmp(algo, "ga") == 0) {
            exo::GaParams params;
            for (const auto& item : doc.items()) {
                const std::string& k = item.key();
                if (k == "population_size")
                    params.population_size = item.value().get<int>();
                else if (k == "generations")
                    params.generations = item.value().get<int>();
                else if (k == "crossover_probability")
                    params.crossover_probability = item.value().get<double>();
                else if (k == "blx_alpha")
                    params.blx_alpha = item.value().get<double>();
                else if (k == "mutation_probability")
                    params.mutation_probability = item.value().get<double>();
                else if (k == "mutation_eta")
                    params.mutation_eta = item.value().get<double>();
                else
                    throw exo::ConfigError("unknown key '" + k +
                                           "' in ga params");
            }
            try {
                params.validate();
            } catch (const std::invalid_argument& e) {
                throw exo::ConfigError(e.what());
            }
            run = exo::run_ga(params, fn, p->impl->bounds(), seed, opts);
        } else if (std::strcmp(algo, "bbbc") == 0) {
            exo::BbbcParams params;
            for (const auto& item : doc.items()) {
                const std::string& k = item.key();
                if (k == "population_size")
                    params.population_size = item.value().get<int>();
                else if (k == "generations")
                    params.generations = item.value().get<int>();
                else if (k == "crunch_mode")
                    params.crunch_mode = exo::crunch_mode_from_string(
                        item.value().get<std::string>());
                else if (k == "bang_scale")
                    params.bang_scale = item.value().get<double>();
                else
                    throw exo::ConfigError("unknown key '" + k +
                                           "' in bbbc params");
            }
            try {
                params.validate();
            } catch (const std::invalid_argument& e) {
                throw exo::ConfigError(e.what());
            }
            run = exo::run_bbbc(params, fn, p->impl->bounds(), seed, opts);
        } else {
            throw exo::ConfigError("unknown algorithm '" + std::string(algo) +
                                   "'");
        }

        *out_run_json =
            dup_string(exo::run_record_canonical_json(record_of(run, hash)));
        return *out_run_json ? EXO_OK : EXO_ERR_RUNTIME;
    });
}

exo_status exo_grid_search(const exo_problem* p, const char* grid_json,
                           int workers, char** out_json) {
    if (exo_status st = require(p, "problem")) return st;
    if (exo_status st = require(out_json, "output pointer")) return st;
    return guarded([&]() {
        const std::string body = (grid_json && *grid_json) ? grid_json : "{}";
        json doc;
        try {
            doc = json::parse(body);
        } catch (const json::exception& e) {
            throw exo::ConfigError(std::string("grid config parse error: ") +
                                   e.what());
        }

        exo::GridSpec spec;
        spec.bounds = p->impl->bounds();
        exo::GridOptions opts;
        opts.workers = workers > 0 ? workers : exo::env_workers(1);
        bool resume = false;
        for (const auto& item : doc.items()) {
            const std::string& k = item.key();
            if (k == "steps")
                spec.steps = item.value().get<std::vector<double>>();
            else if (k == "safety_cap")
                opts.safety_cap = item.value().get<std::uint64_t>();
            else if (k == "force")
                opts.force = item.value().get<bool>();
            else if (k == "checkpoint_path")
                opts.checkpoint_path = item.value().get<std::string>();
            else if (k == "checkpoint_interval")
                opts.checkpoint_interval = item.value().get<std::uint64_t>();
            else if (k == "stop_after")
                opts.stop_after = item.value().get<std::uint64_t>();
            else if (k == "resume")
                resume = item.value().get<bool>();
            else
                throw exo::ConfigError("unknown key '" + k +
                                       "' in the grid config");
        }
        if (resume && opts.checkpoint_path.empty())
            throw exo::ConfigError("resume requires checkpoint_path");

        const exo::ObjectiveFn fn = [p](const exo::DesignVector& d) {
            return p->impl->evaluate(d);
        };

        exo::GridResult res;
        if (resume) {
            const exo::GridCheckpoint ckpt =
                exo::load_checkpoint(opts.checkpoint_path);
            res = exo::run_grid(spec, fn, opts, &ckpt);
        } else {
            res = exo::run_grid(spec, fn, opts);
        }

        json out;
        out["cardinality"] = res.cardinality;
        out["visited"] = res.visited;
        out["stopped_early"] = res.stopped_early;
        out["best"] = res.has_best ? exo::detail::outcome_to_json(res.best)
                                   : json(nullptr);
        *out_json = dup_string(out.dump(2) + "\n");
        return *out_json ? EXO_OK : EXO_ERR_RUNTIME;
    });
}

/* ------------------------------------------------------------------ harness */

exo_status exo_experiment_run(const char* config_path,
                              const char* output_dir_override, int workers,
                              char** out_report_json) {
    if (exo_status st = require(config_path, "config path")) return st;
    if (exo_status st = require(out_report_json, "output pointer")) return st;
    return guarded([&]() {
        exo::ExperimentConfig config =
            exo::load_experiment_config(config_path);
        if (output_dir_override && *output_dir_override)
            config.output_dir = output_dir_override;
        exo::HarnessOptions opts;
        opts.workers = workers > 0 ? workers : exo::env_workers(1);
        const exo::ExperimentReport report = exo::run_experiment(config, opts);
        *out_report_json = dup_string(exo::report_json(report));
        return *out_report_json ? EXO_OK : EXO_ERR_RUNTIME;
    });
}

exo_status exo_report_from_dir(const char* dir, char** out_report_json) {
    if (exo_status st = require(dir, "directory")) return st;
    if (exo_status st = require(out_report_json, "output pointer")) return st;
    return guarded([&]() {
        const exo::ExperimentReport report = exo::report_from_dir(dir);
        *out_report_json = dup_string(exo::report_json(report));
        return *out_report_json ? EXO_OK : EXO_ERR_RUNTIME;
    });
}

}  // extern "C"
