#ifndef GLFRONT_GLFRONT_H
#define GLFRONT_GLFRONT_H

#include <stddef.h>
#include <stdint.h>

#if defined(GLF_BUILDING_LIBRARY)
#define GLF_API __attribute__((visibility("default")))
#else
#define GLF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Return codes. GLF_OK is zero; every other value names the failure class. */
typedef enum glf_status {
    GLF_OK = 0,
    GLF_INVALID_ARGUMENT = 1,
    GLF_GRID_MISMATCH = 2,
    GLF_SINGULAR_MATRIX = 3,
    GLF_NON_CONVERGENCE = 4,
    GLF_DOMAIN_TOO_SMALL = 5,
    GLF_WINDOW_TOO_NOISY = 6,
    GLF_DEGENERATE_ROOT = 7,
    GLF_EIGENSOLVE_FAILURE = 8,
    GLF_GAMMA_AT_ORIGIN = 9,
    GLF_BRANCH_POINT = 10,
    GLF_BORDERED_SINGULAR = 11,
    GLF_QUADRATURE_DIVERGENCE = 12,
    GLF_FIT_WINDOW_TOO_SHORT = 13,
    GLF_SOLVE_FAILURE = 14,
    GLF_GUARD_VIOLATION = 15,
    GLF_POLAR_SINGULARITY = 16,
    GLF_MISSING_NORM = 17,
    GLF_NON_POSITIVE_VALUE = 18,
    GLF_TOO_FEW_POINTS = 19,
    GLF_CONFIG_INVALID = 20,
    GLF_IO_ERROR = 21,
    GLF_OUT_OF_MEMORY = 100,
    GLF_INTERNAL = 101
} glf_status;

typedef struct glf_config glf_config;
typedef struct glf_report glf_report;
typedef struct glf_front glf_front;

GLF_API const char* glf_version(void);
GLF_API const char* glf_status_name(glf_status status);

/* Message of the last failed call on this thread; empty when none. */
GLF_API const char* glf_last_error(void);

/* Strings returned through char** are owned by the caller. */
GLF_API void glf_string_free(char* s);

/* ---- configuration ---- */

GLF_API glf_status glf_config_default(glf_config** out);
GLF_API glf_status glf_config_load(const char* path, glf_config** out);
GLF_API glf_status glf_config_parse(const char* toml_text, glf_config** out);
/* key is "section.key"; value is TOML text, strings may be bare. */
GLF_API glf_status glf_config_set(glf_config* cfg, const char* key, const char* value);
GLF_API glf_status glf_config_get(const glf_config* cfg, const char* key, char** value);
/* Applies GLF_<SECTION>_<KEY> variables from the process environment. */
GLF_API glf_status glf_config_apply_env(glf_config* cfg);
GLF_API glf_status glf_config_validate(const glf_config* cfg);
GLF_API glf_status glf_config_to_toml(const glf_config* cfg, char** toml_text);
GLF_API void glf_config_free(glf_config* cfg);

/* ---- experiments ---- */

GLF_API size_t glf_experiment_count(void);
GLF_API const char* glf_experiment_name(size_t i);

/* Runs an experiment and writes its artifacts plus summary.txt into out_dir.
   A report is returned whether or not the criteria pass. */
GLF_API glf_status glf_run(const glf_config* cfg, const char* experiment, const char* out_dir, glf_report** out);

typedef struct glf_criterion {
    int id;
    int pass;
    double seconds;
    double runtime_limit;
    size_t n_measured;
    const char* title;
    const char* note; /* empty unless the experiment aborted */
} glf_criterion;

GLF_API const char* glf_report_experiment(const glf_report* r);
GLF_API int glf_report_all_pass(const glf_report* r);
GLF_API size_t glf_report_criterion_count(const glf_report* r);
GLF_API glf_status glf_report_criterion(const glf_report* r, size_t i, glf_criterion* out);
GLF_API glf_status glf_report_measurement(const glf_report* r, size_t i, size_t j, const char** key, double* value);
GLF_API size_t glf_report_file_count(const glf_report* r);
GLF_API const char* glf_report_file(const glf_report* r, size_t i);
GLF_API void glf_report_free(glf_report* r);

/* ---- building blocks ---- */

GLF_API glf_status glf_front_solve(double x_min, double x_max, size_t n, double tol, glf_front** out);
GLF_API size_t glf_front_size(const glf_front* f);
/* Pointers stay valid until glf_front_free. */
GLF_API glf_status glf_front_data(const glf_front* f, const double** x, const double** q, const double** qprime);
GLF_API double glf_front_residual(const glf_front* f);
GLF_API void glf_front_free(glf_front* f);

/* Least squares fit of log v against log t over t in [lo, hi]. */
GLF_API glf_status glf_fit_power_law(const double* t, const double* v, size_t n, double lo, double hi,
                                     double* exponent, double* stderr_out);

#ifdef __cplusplus
}
#endif

#endif
