/*
 * C interface to the mixed local-nonlocal variational lab.
 *
 * All functions return nlab_status; every handle created by this library is
 * released with the matching *_free call. Error details for the last failing
 * call on the current thread are available through nlab_last_error().
 */
#ifndef NEHARI_LAB_H
#define NEHARI_LAB_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nlab_status {
    NLAB_OK = 0,
    NLAB_INVALID_ARGUMENT = 1,
    NLAB_VALIDATION_FAILED = 2,
    NLAB_RUNTIME_ERROR = 3
} nlab_status;

typedef struct nlab_problem nlab_problem;
typedef struct nlab_result nlab_result;

typedef struct nlab_run_options {
    long long seed;            /* RNG seed for multi-start machinery */
    int deterministic;         /* fixed-order reductions + pinned metadata */
    int force;                 /* bypass the lambda-threshold refusal */
    int grid_n_override;       /* <= 0 keeps the configured grid */
    const char* mode_override; /* "subcritical" | "critical" | "bn" | NULL */
    const char* branch;        /* "plus" | "minus" | "both" | NULL (= both) */
    const char* params;        /* extra "key=value" lines per subcommand */
} nlab_run_options;

/* Fills the options with defaults (seed 1, both branches, nothing forced). */
void nlab_run_options_init(nlab_run_options* opts);

nlab_status nlab_problem_from_file(const char* path, nlab_problem** out);
nlab_status nlab_problem_from_text(const char* text, nlab_problem** out);
void nlab_problem_free(nlab_problem* prob);

/*
 * Runs one subcommand: validate | constants | fibering | solve | sweep |
 * talenti | gev. `opts` may be NULL for defaults. On NLAB_OK (and on
 * NLAB_VALIDATION_FAILED for `validate`) a result handle is produced.
 */
nlab_status nlab_run(const nlab_problem* prob, const char* subcommand,
                     const nlab_run_options* opts, nlab_result** out);

/* Main report as a JSON document (owned by the result handle). */
const char* nlab_result_json(const nlab_result* res);
/* CSV side tables emitted by the subcommand. */
int nlab_result_table_count(const nlab_result* res);
const char* nlab_result_table_name(const nlab_result* res, int index);
const char* nlab_result_table_csv(const nlab_result* res, int index);
/* 0 for success, 2 when `validate` found violations. */
int nlab_result_exit_code(const nlab_result* res);
void nlab_result_free(nlab_result* res);

/* Message for the last failing call on this thread. */
const char* nlab_last_error(void);
const char* nlab_version(void);

#ifdef __cplusplus
}
#endif

#endif /* NEHARI_LAB_H */
