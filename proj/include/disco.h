/* disco.h - C API for the DiSCO distributed-optimization library.
 *
 * All objects are opaque handles created and destroyed by the library.
 * Functions return DISCO_OK (0) on success or a negative error code;
 * disco_last_error() returns a message for the most recent failure on the
 * calling thread.
 */
#ifndef DISCO_H
#define DISCO_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  DISCO_OK = 0,
  DISCO_ERR_INVALID_ARG = -1,
  DISCO_ERR_PARSE = -2,
  DISCO_ERR_DIM_MISMATCH = -3,
  DISCO_ERR_NO_CONVERGENCE = -4,
  DISCO_ERR_IO = -5,
  DISCO_ERR_INTERNAL = -6
} disco_status;

typedef struct disco_dataset disco_dataset;
typedef struct disco_cluster disco_cluster;
typedef struct disco_trace disco_trace;

const char* disco_last_error(void);

/* ---- datasets ---- */

disco_status disco_dataset_parse_libsvm(const char* text, disco_dataset** out);
disco_status disco_dataset_parse_libsvm_file(const char* path, disco_dataset** out);
disco_status disco_dataset_synth_classification(int64_t n, int d, uint64_t seed,
                                                double noise, disco_dataset** out);
disco_status disco_dataset_normalize_rows(disco_dataset* ds);
int64_t disco_dataset_size(const disco_dataset* ds);
int disco_dataset_dim(const disco_dataset* ds);
void disco_dataset_free(disco_dataset* ds);

/* ---- clusters ---- */

typedef enum {
  DISCO_LOSS_QUADRATIC = 0,
  DISCO_LOSS_LOGISTIC = 1,
  DISCO_LOSS_SMOOTHED_HINGE = 2
} disco_loss_kind;

typedef struct {
  disco_loss_kind kind;
  double p;     /* smoothed-hinge exponent, >= 3 */
  double gamma; /* regularization of the unscaled loss, > 0 */
  double eta;   /* scaling factor; <= 0 selects the theory scaling */
} disco_loss_spec;

/* Shards `ds` across m machines with the given shuffle seed. */
disco_status disco_cluster_create(const disco_dataset* ds, int m, uint64_t seed,
                                  const disco_loss_spec* loss,
                                  disco_cluster** out);
int disco_cluster_machines(const disco_cluster* c);
int disco_cluster_dim(const disco_cluster* c);
int64_t disco_cluster_rounds(const disco_cluster* c);
disco_status disco_cluster_write_ledger_csv(const disco_cluster* c,
                                            const char* path);
void disco_cluster_free(disco_cluster* c);

/* ---- solvers ---- */

typedef enum {
  DISCO_ALG_DISCO = 0,
  DISCO_ALG_ADAPTIVE_DISCO = 1,
  DISCO_ALG_SIMPLE_DISCO = 2,
  DISCO_ALG_GD = 3,
  DISCO_ALG_AFG = 4,
  DISCO_ALG_LBFGS = 5,
  DISCO_ALG_DANE = 6,
  DISCO_ALG_DISCO_COMPOSITE = 7
} disco_algorithm;

typedef enum {
  DISCO_TOL_LINEAR = 0,
  DISCO_TOL_SUPERLINEAR = 1,
  DISCO_TOL_PRACTICAL = 2
} disco_tolerance_mode;

typedef struct {
  disco_algorithm algorithm;
  double epsilon;     /* target suboptimality of the scaled objective */
  double beta;        /* <= 0 selects the default 1/20 */
  double mu;          /* preconditioner ridge (disco/simple), DANE prox */
  double mu0;         /* adaptive initial ridge; <= 0 selects 1e-4 */
  double rho;         /* initialization regularizer */
  disco_tolerance_mode tolerance_mode;
  double practical_c; /* <= 0 selects 0.1 */
  int max_outer;      /* <= 0 selects 500 */
  int64_t max_rounds; /* <= 0 means unbounded (baselines: 1000) */
  int lbfgs_memory;   /* <= 0 selects 30 */
  double sigma;       /* l1 weight for the composite solver */
  int zero_init;      /* nonzero: start at w = 0 instead of local averaging */
} disco_solver_spec;

/* Fills `spec` with defaults for `alg`. */
void disco_solver_spec_init(disco_solver_spec* spec, disco_algorithm alg);

/* Runs one solver on the cluster (mutating its round counters). */
disco_status disco_run(disco_cluster* c, const disco_solver_spec* spec,
                       disco_trace** out);

/* ---- traces ---- */

int64_t disco_trace_num_rows(const disco_trace* t);
/* Column order: k, rounds, f, ell, grad_norm, delta, pcg_iters, mu. */
disco_status disco_trace_row(const disco_trace* t, int64_t i, double out[8]);
/* Final scaled objective f and iterate; w may be NULL to query only f. */
disco_status disco_trace_final(const disco_trace* t, double* f_final, double* w,
                               size_t w_len);
/* Status string: converged, max_outer_exceeded, ... */
const char* disco_trace_status(const disco_trace* t);
/* Sets the unscaled-reference value used for the ell_gap CSV column. */
void disco_trace_set_reference(disco_trace* t, double ell_star);
disco_status disco_trace_write_csv(const disco_trace* t, const char* path);
void disco_trace_free(disco_trace* t);

/* High-precision centralized reference solve; returns ell(w*) through out. */
disco_status disco_reference_gap(const disco_cluster* c, double* ell_star);

/* ---- experiments (config-file driven; see README for the key set) ---- */

disco_status disco_run_experiment(const char* config_path, const char* out_dir);
disco_status disco_summarize(const char* dir, char* buf, size_t buf_len);
disco_status disco_plot(const char* dir, const char* out_svg);

#ifdef __cplusplus
}
#endif

#endif /* DISCO_H */
