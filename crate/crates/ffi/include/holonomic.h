#ifndef HOLONOMIC_H
#define HOLONOMIC_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// A per-branch quantity of an evolution report.
typedef enum HgBranchQuantity {
  HG_BRANCH_QUANTITY_ALPHA_NUMERIC = 0,
  HG_BRANCH_QUANTITY_ALPHA_CLOSED_FORM = 1,
  HG_BRANCH_QUANTITY_GAMMA_GEOMETRIC = 2,
  HG_BRANCH_QUANTITY_GAMMA_DYNAMICAL = 3,
  HG_BRANCH_QUANTITY_AA_EIGENPHASES = 4,
} HgBranchQuantity;

typedef enum HgNamedGate {
  HG_NAMED_GATE_NOT = 0,
  HG_NAMED_GATE_HADAMARD = 1,
  HG_NAMED_GATE_PHASE = 2,
  HG_NAMED_GATE_T = 3,
} HgNamedGate;

// Which fidelity `hg_synthesize` maximises.
typedef enum HgObjective {
  HG_OBJECTIVE_MAGNITUDE = 0,
  HG_OBJECTIVE_PHASE_SENSITIVE = 1,
} HgObjective;

// Result code of every fallible call.
typedef enum HgStatus {
  HG_STATUS_OK = 0,
  HG_STATUS_NULL_POINTER = 1,
  HG_STATUS_OUT_OF_RANGE = 2,
  HG_STATUS_NOT_UNITARY = 3,
  HG_STATUS_ZERO_AXIS = 4,
  HG_STATUS_NOT_NORMALIZED = 5,
  HG_STATUS_INCONSISTENT = 6,
  HG_STATUS_BUFFER_TOO_SMALL = 7,
  HG_STATUS_PANIC = 8,
} HgStatus;

// Opaque evolution report.
typedef struct HgEvolutionReport HgEvolutionReport;

// Opaque synthesis result.
typedef struct HgSynthesisResult HgSynthesisResult;

// A 2×2 complex matrix, row-major: index `2 * row + col`.
typedef struct HgMatrix2 {
  double re[4];
  double im[4];
} HgMatrix2;

// Drive amplitude, detuning and drive frequency.
typedef struct HgDriveParams {
  double omega_rabi;
  double detuning;
  double omega_drive;
} HgDriveParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *hg_version(void);

// Message for the last failed call on this thread, or an empty string.
// Valid until the next `hg_` call on the same thread.
const char *hg_last_error_message(void);

// `U_β` for drive frequency `omega_drive`.
//
// # Safety
// `out_gate` must be null or point to writable memory for one `HgMatrix2`.
enum HgStatus hg_analytic_gate(double beta, double omega_drive, struct HgMatrix2 *out_gate);

// Drive parameters that realise `U_β`.
//
// # Safety
// `out_params` must be null or valid for writes.
enum HgStatus hg_params_from_beta(double beta,
                                  double omega_drive,
                                  struct HgDriveParams *out_params);

// Propagator `U(duration)` from `steps` midpoint slices.
//
// # Safety
// `params` must be null or valid for reads; `out_propagator` null or valid
// for writes.
enum HgStatus hg_propagate(const struct HgDriveParams *params,
                           double duration,
                           size_t steps,
                           struct HgMatrix2 *out_propagator);

// `|tr(U†V)|/2` and `Re tr(U†V)/2`.
//
// # Safety
// `u` and `v` must be null or valid for reads; the two outputs null or
// valid for writes.
enum HgStatus hg_fidelity(const struct HgMatrix2 *u,
                          const struct HgMatrix2 *v,
                          double *out_magnitude,
                          double *out_phase_sensitive);

// Product of `U_β` for `len` angles, first-acting first (ω = 1).
//
// # Safety
// `betas` must point to `len` readable doubles (may be null when `len` is
// 0); `out_gate` null or valid for writes.
enum HgStatus hg_compose(const double *betas, size_t len, struct HgMatrix2 *out_gate);

// Standard gate matrix, including its conventional global phase.
//
// # Safety
// `out_gate` must be null or valid for writes.
enum HgStatus hg_named_gate(enum HgNamedGate gate, struct HgMatrix2 *out_gate);

// Propagates one period and computes the phase bookkeeping.
//
// # Safety
// `params` must be null or valid for reads; `out_report` null or valid for
// writes. The handle written to `out_report` must be released with
// `hg_evolution_report_free`.
enum HgStatus hg_evolution_report_new(const struct HgDriveParams *params,
                                      size_t steps,
                                      struct HgEvolutionReport **out_report);

// # Safety
// `report` must be null or a handle from `hg_evolution_report_new` that has
// not been freed.
void hg_evolution_report_free(struct HgEvolutionReport *report);

// # Safety
// `report` must be a live handle or null; `out_propagator` null or valid
// for writes.
enum HgStatus hg_evolution_report_propagator(const struct HgEvolutionReport *report,
                                             struct HgMatrix2 *out_propagator);

// Writes the `(+, −)` pair of `quantity`.
//
// # Safety
// `report` must be a live handle or null; both outputs null or valid for
// writes.
enum HgStatus hg_evolution_report_branches(const struct HgEvolutionReport *report,
                                           enum HgBranchQuantity quantity,
                                           double *out_plus,
                                           double *out_minus);

// Scalar diagnostics of an evolution report.
//
// # Safety
// `report` must be a live handle or null; outputs null or valid for writes.
enum HgStatus hg_evolution_report_diagnostics(const struct HgEvolutionReport *report,
                                              double *out_unitarity_defect,
                                              double *out_max_integrand,
                                              double *out_transitionless_defect);

// Multi-start search for a `length`-pulse sequence approximating `target`.
// Deterministic for fixed arguments.
//
// # Safety
// `target` must be null or valid for reads; `out_result` null or valid for
// writes. Release the handle with `hg_synthesis_result_free`.
enum HgStatus hg_synthesize(const struct HgMatrix2 *target,
                            size_t length,
                            size_t restarts,
                            uint64_t seed,
                            enum HgObjective objective,
                            struct HgSynthesisResult **out_result);

// # Safety
// `result` must be null or a handle from `hg_synthesize` that has not been
// freed.
void hg_synthesis_result_free(struct HgSynthesisResult *result);

// Number of pulses in the result; 0 for a null handle.
//
// # Safety
// `result` must be a live handle or null.
size_t hg_synthesis_result_len(const struct HgSynthesisResult *result);

// Copies the β values into `buf`, which must hold at least
// `hg_synthesis_result_len` doubles.
//
// # Safety
// `result` must be a live handle or null; `buf` must point to `capacity`
// writable doubles.
enum HgStatus hg_synthesis_result_betas(const struct HgSynthesisResult *result,
                                        double *buf,
                                        size_t capacity);

// Summary numbers of a synthesis result.
//
// # Safety
// `result` must be a live handle or null; outputs null or valid for writes.
enum HgStatus hg_synthesis_result_summary(const struct HgSynthesisResult *result,
                                          double *out_infidelity,
                                          double *out_fidelity_magnitude,
                                          double *out_fidelity_phase_sensitive,
                                          bool *out_converged);

// Objective evaluations and restarts spent.
//
// # Safety
// `result` must be a live handle or null; outputs null or valid for writes.
enum HgStatus hg_synthesis_result_effort(const struct HgSynthesisResult *result,
                                         size_t *out_evaluations,
                                         size_t *out_restarts_used);

// Composes a result's sequence.
//
// # Safety
// `result` must be a live handle or null; `out_gate` null or valid for
// writes.
enum HgStatus hg_synthesis_result_compose(const struct HgSynthesisResult *result,
                                          struct HgMatrix2 *out_gate);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HOLONOMIC_H */
