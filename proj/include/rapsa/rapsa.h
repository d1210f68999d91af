/* rapsa — parallel block-stochastic optimization library.
 *
 * C interface to the solver core. All functions that can fail return a
 * rapsa_status; on any non-OK status a human-readable explanation is
 * available from rapsa_last_error_message() until the next failing call on
 * the same thread. Objects returned through out-parameters are owned by the
 * caller and released with the matching *_destroy / rapsa_string_free.
 *
 * Thread safety: distinct handles may be used from distinct threads; a
 * single handle must not be used concurrently.
 */
#ifndef RAPSA_H
#define RAPSA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RAPSA_API __declspec(dllexport)
#else
#define RAPSA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct rapsa_problem rapsa_problem;
typedef struct rapsa_trace rapsa_trace;

typedef enum rapsa_status {
  RAPSA_OK = 0,
  RAPSA_ERR_INVALID_ARGUMENT = 1, /* bad argument value or null pointer */
  RAPSA_ERR_CONFIG = 2,           /* experiment config rejected */
  RAPSA_ERR_IO = 3,               /* file could not be opened/written */
  RAPSA_ERR_PARSE = 4,            /* malformed file contents */
  RAPSA_ERR_DIVERGED = 5,         /* iterate left the finite/bounded region */
  RAPSA_ERR_SINGULAR = 6,         /* linear solve failed */
  RAPSA_ERR_PRECONDITION = 7,     /* a stated assumption does not hold */
  RAPSA_ERR_INTERNAL = 8
} rapsa_status;

/* Library version as "major.minor.patch". Static storage; do not free. */
RAPSA_API const char* rapsa_version(void);

/* Explanation of the most recent failure on this thread ("" if none).
 * Static storage; do not free. */
RAPSA_API const char* rapsa_last_error_message(void);

/* Frees strings returned through char** out-parameters. NULL is a no-op. */
RAPSA_API void rapsa_string_free(char* text);

/* ------------------------------------------------------------------ *
 * Problems. Row-major feature matrices: rows[i*p + j] is sample i,
 * coordinate j. Arrays are copied; the caller keeps ownership.
 * ------------------------------------------------------------------ */

/* Mean squared residual objective (1/n) sum (h_i . x - z_i)^2. */
RAPSA_API rapsa_status rapsa_problem_create_least_squares(size_t num_samples, size_t dimension,
                                                          const double* rows,
                                                          const double* targets,
                                                          rapsa_problem** out);

/* L2-regularized logistic loss; labels are +1 / -1. */
RAPSA_API rapsa_status rapsa_problem_create_logistic(size_t num_samples, size_t dimension,
                                                     const double* rows, const int8_t* labels,
                                                     double lambda, rapsa_problem** out);

/* Synthetic least-squares instance: near-tridiagonal random design, planted
 * parameter vector, Gaussian observation noise. Deterministic in seed. */
RAPSA_API rapsa_status rapsa_problem_create_linear_synthetic(size_t dimension,
                                                             size_t num_samples,
                                                             double noise_variance,
                                                             uint64_t seed,
                                                             rapsa_problem** out);

RAPSA_API void rapsa_problem_destroy(rapsa_problem* problem);

RAPSA_API rapsa_status rapsa_problem_dimension(const rapsa_problem* problem, size_t* out);
RAPSA_API rapsa_status rapsa_problem_num_samples(const rapsa_problem* problem, size_t* out);

/* Full-dataset objective at x (dimension doubles). */
RAPSA_API rapsa_status rapsa_problem_objective(const rapsa_problem* problem, const double* x,
                                               double* out);

/* Full-dataset gradient at x, written to out (dimension doubles). */
RAPSA_API rapsa_status rapsa_problem_gradient(const rapsa_problem* problem, const double* x,
                                              double* out);

/* Minimizer and minimal objective. x_out may be NULL if only the value is
 * wanted; otherwise it receives dimension doubles. Cached after first call. */
RAPSA_API rapsa_status rapsa_problem_optimum(const rapsa_problem* problem, double* x_out,
                                             double* objective_out);

/* Curvature and noise constants of the objective:
 *   strong_convexity   lower curvature bound m
 *   lipschitz          gradient Lipschitz constant M
 *   grad_second_moment bound K on E ||grad of a single sample||^2, taken as
 *                      the worst case over probe points between the start
 *                      point and the minimizer.
 * Any out-pointer may be NULL. */
RAPSA_API rapsa_status rapsa_problem_constants(const rapsa_problem* problem,
                                               double* strong_convexity, double* lipschitz,
                                               double* grad_second_moment);

/* ------------------------------------------------------------------ *
 * Solver runs.
 * ------------------------------------------------------------------ */

typedef enum rapsa_algorithm {
  RAPSA_ALG_RAPSA = 0,  /* plain stochastic gradient block updates */
  RAPSA_ALG_ARAPSA = 1  /* limited-memory curvature-scaled block updates */
} rapsa_algorithm;

typedef enum rapsa_schedule_kind {
  RAPSA_SCHEDULE_CONSTANT = 0,    /* a               */
  RAPSA_SCHEDULE_DIMINISHING = 1, /* a * b / (t + b) */
  RAPSA_SCHEDULE_HYBRID = 2       /* min(a, a*b/t)   */
} rapsa_schedule_kind;

typedef struct rapsa_run_config {
  size_t blocks;     /* B: number of coordinate blocks */
  size_t processors; /* I: parallel updaters, I <= B for synchronous runs */
  size_t minibatch;  /* L: samples per stochastic gradient */
  int algorithm;     /* rapsa_algorithm */
  size_t memory;     /* curvature pairs kept per block (ARAPSA only) */
  int schedule_kind; /* rapsa_schedule_kind */
  double schedule_a;
  double schedule_b; /* unused for the constant schedule */
  int64_t iterations;
  uint64_t seed;
  int64_t record_every;
  int threads;              /* worker threads for the synchronous engine */
  double divergence_factor; /* abort when objective exceeds factor * max(F(x0), 1) */
  /* Asynchronous runs only: per-update duration ~ Normal(mean, stddev) in
   * local clock ticks, clipped to [1, max]; max is also the hard bound on
   * how stale a committed update's snapshot may be. */
  double delay_mean;
  double delay_stddev;
  int64_t delay_max;
  /* Optimal objective used for the trace's objective_gap column; pass NaN
   * when unknown (the column is then NaN). */
  double f_star;
} rapsa_run_config;

/* Fills defaults: B=1, I=1, L=1, RAPSA, memory 10, constant schedule 1e-2,
 * 0 iterations, seed 0, record_every 1, 1 thread, divergence factor 1e6,
 * delay (1, 0, 1), f_star NaN. */
RAPSA_API void rapsa_run_config_init(rapsa_run_config* config);

/* Synchronous engine: each iteration, I distinct blocks are updated from
 * the same frozen iterate. Deterministic in (problem, config, x0) and
 * independent of config->threads. x0 may be NULL for the origin. final_x
 * may be NULL, otherwise it receives dimension doubles. */
RAPSA_API rapsa_status rapsa_run_sync(const rapsa_problem* problem,
                                      const rapsa_run_config* config, const double* x0,
                                      rapsa_trace** trace_out, double* final_x);

/* Event-driven asynchronous model: processors read, compute, and commit
 * under the configured delay distribution; conflicting same-instant writes
 * keep one uniformly chosen survivor. Deterministic in (problem, config,
 * x0). With processors=1, delay_stddev=0 it reproduces rapsa_run_sync. */
RAPSA_API rapsa_status rapsa_run_async_sim(const rapsa_problem* problem,
                                           const rapsa_run_config* config, const double* x0,
                                           rapsa_trace** trace_out, double* final_x);

/* Lock-per-block OS-thread engine driven by real timing. Not reproducible
 * across runs; the delay model fields are ignored. */
RAPSA_API rapsa_status rapsa_run_async_threads(const rapsa_problem* problem,
                                               const rapsa_run_config* config,
                                               const double* x0, rapsa_trace** trace_out,
                                               double* final_x);

/* ------------------------------------------------------------------ *
 * Traces: iteration-indexed progress records.
 * ------------------------------------------------------------------ */

RAPSA_API size_t rapsa_trace_size(const rapsa_trace* trace);

/* Any out-pointer may be NULL. Fails on index out of range. */
RAPSA_API rapsa_status rapsa_trace_row(const rapsa_trace* trace, size_t index, int64_t* t,
                                       double* features_processed, double* wall_clock_s,
                                       double* objective, double* objective_gap);

/* CSV with header t,features_processed,wall_clock_s,objective,objective_gap
 * and full round-trip precision. */
RAPSA_API rapsa_status rapsa_trace_write_csv(const rapsa_trace* trace, const char* path);
RAPSA_API rapsa_status rapsa_trace_read_csv(const char* path, rapsa_trace** out);

RAPSA_API void rapsa_trace_destroy(rapsa_trace* trace);

/* ------------------------------------------------------------------ *
 * Convergence guarantees (closed forms in the problem constants).
 * Preconditions that fail produce RAPSA_ERR_PRECONDITION with the violated
 * inequality in the error message.
 * ------------------------------------------------------------------ */

/* Constant C with E[F(x^t) - F*] <= C / (t + t0) for the synchronous engine
 * under the diminishing schedule; r = processors / blocks. */
RAPSA_API rapsa_status rapsa_sync_rate_constant(double m, double big_m, double k, double r,
                                                double gamma0, double t0, double f0_gap,
                                                double* out);

/* Radius gamma*M*K/(4m) of the constant-step limit neighborhood. */
RAPSA_API rapsa_status rapsa_neighborhood_bound(double gamma, double m, double big_m,
                                                double k, double* out);

/* Smallest iteration budget (and the constant step achieving it) that
 * guarantees E[F - F*] <= eps, splitting eps at fraction phi. */
RAPSA_API rapsa_status rapsa_min_iterations(double m, double big_m, double k, double r,
                                            double phi, double eps, double f0_gap,
                                            int64_t* iterations_out, double* step_out);

/* Asynchronous analog of rapsa_sync_rate_constant under delay bound tau;
 * rho is the free parameter of the bound (rho * M < 2). */
RAPSA_API rapsa_status rapsa_async_rate_constant(double m, double big_m, double k,
                                                 double blocks, double gamma0, double t0,
                                                 double tau, double rho, double f0_gap,
                                                 double* out);

/* ------------------------------------------------------------------ *
 * Experiment harness: versioned JSON config in, artifact directory out.
 * ------------------------------------------------------------------ */

/* Runs the experiment described by the JSON file at config_path, writing
 * traces, manifest.json, summary.txt, bound_report.txt and metrics.csv.
 *   out_dir        NULL keeps the config's output directory
 *   seed_override  >= 0 replaces the config's seed list with this one seed
 *   threads        >= 1 overrides the config's thread count
 *   report_out     if non-NULL receives the human-readable run summary
 *                  (free with rapsa_string_free) */
RAPSA_API rapsa_status rapsa_run_experiment_file(const char* config_path, const char* out_dir,
                                                 int64_t seed_override, int threads,
                                                 char** report_out);

/* Computes the guarantee report for a config without running any engine. */
RAPSA_API rapsa_status rapsa_bound_report_file(const char* config_path, char** report_out);

/* Reports, for each trace CSV, the first t at which objective_gap <= eps. */
RAPSA_API rapsa_status rapsa_compare_traces(const char* trace_a_path, const char* trace_b_path,
                                            double eps, char** report_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RAPSA_H */
