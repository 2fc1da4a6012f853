#ifndef OMBAND_H
#define OMBAND_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define OMBAND_OK 0

#define OMBAND_ERR_INVALID 2

#define OMBAND_ERR_NONCONVERGENCE 3

#define OMBAND_ERR_DEGENERATE 4

#define OMBAND_ERR_NULL 10

#define OMBAND_ERR_BUFFER_TOO_SMALL 11

#define OMBAND_ERR_PANIC 12

typedef enum OmbandTqRule {
  /**
   * t_q = value / gap(kd)
   */
  OMBAND_TQ_RULE_PER_K = 0,
  /**
   * t_q = value / min gap
   */
  OMBAND_TQ_RULE_GLOBAL_MIN_GAP = 1,
  /**
   * t_q = value
   */
  OMBAND_TQ_RULE_FIXED = 2,
} OmbandTqRule;

/**
 * Opaque parameter set.
 */
typedef struct OmbandParams OmbandParams;

typedef struct OmbandLattice {
  double omega_m;
  double detuning;
  double j_hop;
  double k_hop;
  double coupling;
  double phase;
  double kappa;
  double gamma;
  double n_th;
} OmbandLattice;

typedef struct OmbandHybridBasis {
  double omega_plus;
  double omega_minus;
  double u_a;
  double v_a;
  double u_b;
  double v_b;
  double alpha_a;
  double beta_a;
  double alpha_b;
  double beta_b;
} OmbandHybridBasis;

typedef struct OmbandBandRow {
  double kd;
  double omega_plus;
  double omega_minus;
  double gap;
  double alpha_a;
  double beta_a;
  double alpha_b;
  double beta_b;
} OmbandBandRow;

/**
 * `kind`: -1 minimum, +1 maximum, 0 flat band.
 */
typedef struct OmbandGapExtremum {
  double kd;
  double gap;
  int32_t kind;
} OmbandGapExtremum;

typedef struct OmbandComplex {
  double re;
  double im;
} OmbandComplex;

/**
 * Row-major 2×2 complex matrix.
 */
typedef struct OmbandPropagator {
  struct OmbandComplex m[4];
} OmbandPropagator;

typedef struct OmbandQuenchRecord {
  double kd;
  double t;
  double t_q;
  double n_a;
  double n_b;
  double nq_a;
  double nq_b;
} OmbandQuenchRecord;

typedef struct OmbandDrive {
  double rabi;
  double g_vacuum;
  double gamma_m;
  double detuning;
  double j_hop;
  double k_hop;
  double omega_m;
  double kappa;
  double phase;
} OmbandDrive;

typedef struct OmbandMeanField {
  struct OmbandComplex alpha;
  struct OmbandComplex beta;
  double g_enhanced;
  double residual;
  size_t iterations;
} OmbandMeanField;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * NUL-terminated version string with static lifetime.
 */
const char *omband_version(void);

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `cap`). Returns the full message length excluding the NUL.
 */
size_t omband_last_error(char *buf, size_t cap);

/**
 * Validates `lattice` and stores a new handle in `*out_params`.
 */
int32_t omband_params_new(const struct OmbandLattice *lattice, struct OmbandParams **out_params);

/**
 * Preset with hopping stronger than the coupling. Never null.
 */
struct OmbandParams *omband_params_strong_hopping(void);

/**
 * Preset with hopping weaker than the coupling. Never null.
 */
struct OmbandParams *omband_params_weak_hopping(void);

/**
 * Releases a handle; null is ignored.
 */
void omband_params_free(struct OmbandParams *params);

int32_t omband_params_get(const struct OmbandParams *params, struct OmbandLattice *out_lattice);

/**
 * Sets θ, reduced to (−π, π].
 */
int32_t omband_params_set_phase(struct OmbandParams *params, double theta);

int32_t omband_params_set_coupling(struct OmbandParams *params, double g);

int32_t omband_band_energies(const struct OmbandParams *params,
                             double kd,
                             double *out_plus,
                             double *out_minus);

int32_t omband_hybrid_basis(const struct OmbandParams *params,
                            double kd,
                            struct OmbandHybridBasis *out_basis);

/**
 * `n_k` rows over [−π, π].
 */
int32_t omband_band_scan(const struct OmbandParams *params,
                         size_t n_k,
                         struct OmbandBandRow *buf,
                         size_t cap,
                         size_t *out_len);

int32_t omband_gap_extrema(const struct OmbandParams *params,
                           size_t n_coarse,
                           double refine_tol,
                           struct OmbandGapExtremum *buf,
                           size_t cap,
                           size_t *out_len);

/**
 * Thermal occupations of A and B for photon weight `alpha_a`.
 */
int32_t omband_thermal(const struct OmbandParams *params,
                       double alpha_a,
                       double *out_n_a,
                       double *out_n_b);

/**
 * Magnus propagator of the ramp g0(1 − 2t/t_q) at half-detuning `delta_half`.
 */
int32_t omband_magnus_propagator(double g0,
                                 double delta_half,
                                 double t_q,
                                 double t,
                                 struct OmbandPropagator *out_prop);

/**
 * `n_t` instants of [0, t_q] at `kd`; `rule` is an `OmbandTqRule` and
 * `value` its factor or fixed time.
 */
int32_t omband_quench_trace(const struct OmbandParams *params,
                            double kd,
                            int32_t rule,
                            double value,
                            size_t n_t,
                            struct OmbandQuenchRecord *buf,
                            size_t cap,
                            size_t *out_len);

/**
 * End-of-quench populations on `n_k` points over [−π, π]; `rule` and
 * `value` as for `omband_quench_trace`.
 */
int32_t omband_quench_scan(const struct OmbandParams *params,
                           int32_t rule,
                           double value,
                           size_t n_k,
                           struct OmbandQuenchRecord *buf,
                           size_t cap,
                           size_t *out_len);

int32_t omband_meanfield(const struct OmbandDrive *drive,
                         double tol,
                         size_t max_iter,
                         double damping,
                         struct OmbandMeanField *out_solution);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OMBAND_H */
