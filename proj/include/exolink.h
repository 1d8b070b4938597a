/* exolink — planar linkage design-optimization toolkit, C API.
 *
 * Opaque handles + integer status codes. Every function that can fail
 * returns an exo_status; on failure, exo_last_error_message() describes the
 * problem for the calling thread. Strings returned through char** out
 * parameters are heap-allocated and must be released with exo_string_free().
 */
#ifndef EXOLINK_H
#define EXOLINK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define EXO_API __declspec(dllexport)
#else
#define EXO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum exo_status {
    EXO_OK = 0,
    EXO_ERR_INVALID_ARGUMENT = 1,
    EXO_ERR_CONFIG = 2,
    EXO_ERR_RUNTIME = 3,
    EXO_ERR_IO = 4
} exo_status;

typedef struct exo_model exo_model;
typedef struct exo_problem exo_problem;

/* Library semantic version string (static storage, do not free). */
EXO_API const char* exo_version(void);

/* Last error message for the calling thread (static storage, do not free). */
EXO_API const char* exo_last_error_message(void);

EXO_API void exo_string_free(char* s);

/* ------------------------------------------------------------------ model */

/* Loads a model file; the literal name "builtin" loads the bundled model. */
EXO_API exo_status exo_model_load(const char* path_or_builtin, exo_model** out);
EXO_API exo_status exo_model_from_json(const char* json_text, exo_model** out);
EXO_API exo_status exo_model_to_json(const exo_model* m, char** out_json);
EXO_API void exo_model_free(exo_model* m);

/* ---------------------------------------------------------------- problem */

/* problem_config_json: the experiment file's "problem" block (may be "{}"
 * for defaults: 6 decision variables, magnitude objective, 46 sweep steps). */
EXO_API exo_status exo_problem_create(const exo_model* m,
                                      const char* problem_config_json,
                                      exo_problem** out);
EXO_API void exo_problem_free(exo_problem* p);

/* Evaluates one design (len = 6 or 9, matching the problem's bounds set).
 * out_json: objective, feasibility, violations, closed-pose torques. */
EXO_API exo_status exo_problem_evaluate(const exo_problem* p,
                                        const double* design, size_t len,
                                        char** out_json);

/* ------------------------------------------------------------- optimizers */

/* algo: "ga" | "bbbc". params_json: algorithm parameter block ("{}" for the
 * defaults). Returns the canonical run record as JSON. */
EXO_API exo_status exo_optimize(const exo_problem* p, const char* algo,
                                const char* params_json, uint64_t seed,
                                int workers, char** out_run_json);

/* grid_json: {"steps": [...], "safety_cap": N, "force": bool,
 * "checkpoint_path": "...", "checkpoint_interval": N, "resume": bool}.
 * All fields optional except that runs above the cap require force. */
EXO_API exo_status exo_grid_search(const exo_problem* p, const char* grid_json,
                                   int workers, char** out_json);

/* ---------------------------------------------------------------- harness */

EXO_API exo_status exo_experiment_run(const char* config_path,
                                      const char* output_dir_override,
                                      int workers, char** out_report_json);

EXO_API exo_status exo_report_from_dir(const char* dir,
                                       char** out_report_json);

#ifdef __cplusplus
}
#endif

#endif /* EXOLINK_H */
