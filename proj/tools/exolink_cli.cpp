// exolink command-line front end. Talks to the library strictly through the
// C API so it doubles as a smoke test of the shared-library surface.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "exolink.h"
#include "json.hpp"

namespace {

// ---------------------------------------------------------------- plumbing

int exit_code_of(exo_status st) {
    switch (st) {
        case EXO_OK:
            return 0;
        case EXO_ERR_INVALID_ARGUMENT:
        case EXO_ERR_CONFIG:
            return 2;
        default:
            return 3;
    }
}

int fail(exo_status st) {
    std::cerr << "error: " << exo_last_error_message() << "\n";
    return exit_code_of(st);
}

bool read_text_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

int emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out.good()) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return 3;
    }
    return 0;
}

struct StringGuard {
    char* s = nullptr;
    ~StringGuard() { exo_string_free(s); }
};

struct ModelGuard {
    exo_model* m = nullptr;
    ~ModelGuard() { exo_model_free(m); }
};

struct ProblemGuard {
    exo_problem* p = nullptr;
    ~ProblemGuard() { exo_problem_free(p); }
};

/* Builds the problem-config JSON: an explicit file wins; otherwise the
 * defaults with the requested decision-variable count. */
int problem_json(const std::string& problem_path, int dv_count,
                 std::string& out) {
    if (!problem_path.empty()) {
        if (!read_text_file(problem_path, out)) {
            std::cerr << "error: cannot read " << problem_path << "\n";
            return 3;
        }
        return 0;
    }
    out = "{\"dv_count\": " + std::to_string(dv_count) + "}";
    return 0;
}

int open_problem(const std::string& model_ref, const std::string& pj,
                 ModelGuard& model, ProblemGuard& problem) {
    if (exo_status st = exo_model_load(model_ref.c_str(), &model.m))
        return fail(st);
    if (exo_status st = exo_problem_create(model.m, pj.c_str(), &problem.p))
        return fail(st);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Planar closed-chain linkage design optimization"};
    app.set_version_flag("--version", exo_version());
    app.require_subcommand(1);

    std::string model_ref = "builtin";
    std::string problem_path;
    std::string config_path;
    std::string out_path;
    int dv_count = 6;
    int workers = 0;  // 0 = EXOLINK_WORKERS or 1

    // ------------------------------------------------------------- evaluate
    auto* cmd_eval = app.add_subcommand(
        "evaluate", "Evaluate one design (objective, feasibility, torques)");
    std::vector<double> design;
    cmd_eval->add_option("model", model_ref,
                         "Model file, or 'builtin' for the bundled one")
        ->required();
    cmd_eval->add_option("design", design, "Design lengths in mm (6 or 9)")
        ->required()
        ->expected(-1);
    cmd_eval->add_option("--problem", problem_path,
                         "Problem-config JSON file (overrides defaults)");
    cmd_eval->add_option("--out", out_path, "Write the result here");

    // ------------------------------------------------------------- optimize
    auto* cmd_opt = app.add_subcommand(
        "optimize", "Run an evolutionary search on the link lengths");
    std::string algo = "ga";
    std::uint64_t seed = 1;
    cmd_opt->add_option("--algo", algo, "ga | bbbc")
        ->check(CLI::IsMember({"ga", "bbbc"}));
    cmd_opt->add_option("--config", config_path,
                        "Algorithm-parameter JSON file");
    cmd_opt->add_option("--seed", seed, "Random seed");
    cmd_opt->add_option("--model", model_ref, "Model file or 'builtin'");
    cmd_opt->add_option("--problem", problem_path,
                        "Problem-config JSON file");
    cmd_opt->add_option("--dv", dv_count, "Decision variables (6 or 9)")
        ->check(CLI::IsMember({6, 9}));
    cmd_opt->add_option("--workers", workers, "Evaluation threads");
    cmd_opt->add_option("--out", out_path, "Write the run record here");

    // ----------------------------------------------------------------- grid
    auto* cmd_grid = app.add_subcommand(
        "grid", "Brute-force grid enumeration of the search box");
    std::string resume_path;
    bool force = false;
    cmd_grid->add_option("--config", config_path,
                         "Grid-config JSON file (steps, cap, checkpointing)");
    cmd_grid->add_option("--resume", resume_path,
                         "Resume from this checkpoint file");
    cmd_grid->add_flag("--force", force, "Ignore the safety cap");
    cmd_grid->add_option("--model", model_ref, "Model file or 'builtin'");
    cmd_grid->add_option("--problem", problem_path,
                         "Problem-config JSON file");
    cmd_grid->add_option("--dv", dv_count, "Decision variables (6 or 9)")
        ->check(CLI::IsMember({6, 9}));
    cmd_grid->add_option("--workers", workers, "Evaluation threads");
    cmd_grid->add_option("--out", out_path, "Write the result here");

    // ----------------------------------------------------------- experiment
    auto* cmd_exp = app.add_subcommand(
        "experiment", "Run a full multi-seed algorithm comparison");
    std::string output_dir;
    cmd_exp->add_option("--config", config_path, "Experiment JSON file")
        ->required();
    cmd_exp->add_option("--output-dir", output_dir,
                        "Override the config's output directory");
    cmd_exp->add_option("--workers", workers, "Parallel runs");
    cmd_exp->add_option("--out", out_path, "Write the report here too");

    // ---------------------------------------------------------------- report
    auto* cmd_rep = app.add_subcommand(
        "report", "Rebuild a report from persisted run records");
    std::string from_dir;
    cmd_rep->add_option("--from", from_dir, "Experiment output directory")
        ->required();
    cmd_rep->add_option("--out", out_path, "Write the report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (cmd_eval->parsed()) {
        std::string pj;
        if (int rc = problem_json(problem_path,
                                  static_cast<int>(design.size()), pj))
            return rc;
        ModelGuard model;
        ProblemGuard problem;
        if (int rc = open_problem(model_ref, pj, model, problem)) return rc;
        StringGuard result;
        if (exo_status st = exo_problem_evaluate(problem.p, design.data(),
                                                 design.size(), &result.s))
            return fail(st);
        return emit(result.s, out_path);
    }

    if (cmd_opt->parsed()) {
        std::string pj;
        if (int rc = problem_json(problem_path, dv_count, pj)) return rc;
        std::string params = "{}";
        if (!config_path.empty() && !read_text_file(config_path, params)) {
            std::cerr << "error: cannot read " << config_path << "\n";
            return 3;
        }
        ModelGuard model;
        ProblemGuard problem;
        if (int rc = open_problem(model_ref, pj, model, problem)) return rc;
        StringGuard result;
        if (exo_status st = exo_optimize(problem.p, algo.c_str(),
                                         params.c_str(), seed, workers,
                                         &result.s))
            return fail(st);
        return emit(result.s, out_path);
    }

    if (cmd_grid->parsed()) {
        std::string pj;
        if (int rc = problem_json(problem_path, dv_count, pj)) return rc;
        std::string grid_cfg = "{}";
        if (!config_path.empty() && !read_text_file(config_path, grid_cfg)) {
            std::cerr << "error: cannot read " << config_path << "\n";
            return 3;
        }
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(grid_cfg);
        } catch (const nlohmann::json::exception& e) {
            std::cerr << "error: bad grid config: " << e.what() << "\n";
            return 2;
        }
        if (!resume_path.empty()) {
            doc["checkpoint_path"] = resume_path;
            doc["resume"] = true;
        }
        if (force) doc["force"] = true;
        ModelGuard model;
        ProblemGuard problem;
        if (int rc = open_problem(model_ref, pj, model, problem)) return rc;
        StringGuard result;
        if (exo_status st = exo_grid_search(problem.p, doc.dump().c_str(),
                                            workers, &result.s))
            return fail(st);
        return emit(result.s, out_path);
    }

    if (cmd_exp->parsed()) {
        StringGuard result;
        if (exo_status st = exo_experiment_run(
                config_path.c_str(),
                output_dir.empty() ? nullptr : output_dir.c_str(), workers,
                &result.s))
            return fail(st);
        return emit(result.s, out_path);
    }

    if (cmd_rep->parsed()) {
        StringGuard result;
        if (exo_status st = exo_report_from_dir(from_dir.c_str(), &result.s))
            return fail(st);
        return emit(result.s, out_path);
    }

    return 0;
}
