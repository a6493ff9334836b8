#ifndef QCFA_H
#define QCFA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum QcfaStatus {
  QCFA_STATUS_OK = 0,
  // Null pointer, bad UTF-8 or an out-of-range parameter.
  QCFA_STATUS_INVALID_ARGUMENT = 1,
  // Input string not over the machine's alphabet.
  QCFA_STATUS_INVALID_INPUT = 2,
  // Malformed or invalid machine spec.
  QCFA_STATUS_INVALID_MACHINE = 3,
  // A requested computation exceeds its resource limit.
  QCFA_STATUS_RESOURCE = 4,
  QCFA_STATUS_IO = 5,
  // Any other library error, or a caught panic.
  QCFA_STATUS_INTERNAL = 6,
} QcfaStatus;

typedef enum QcfaVerdict {
  QCFA_VERDICT_ACCEPTED = 0,
  QCFA_VERDICT_REJECTED = 1,
  QCFA_VERDICT_STEP_CAP_EXCEEDED = 2,
} QcfaVerdict;

// A compiled machine.
typedef struct QcfaMachine QcfaMachine;

typedef struct QcfaOutcome {
  enum QcfaVerdict verdict;
  uint64_t steps_used;
  uint64_t passes_completed;
} QcfaOutcome;

typedef struct QcfaTrialStats {
  uint64_t trials;
  uint64_t accepted;
  uint64_t rejected;
  uint64_t capped;
  double mean_steps;
  double variance_steps;
  uint64_t seed;
} QcfaTrialStats;

// Per-pass and aggregate halting probabilities as doubles.
typedef struct QcfaHalting {
  double p_rej;
  double p_acc;
  // True when `p_rej` is rational and computed exactly.
  bool p_rej_exact;
  double accept;
  double reject;
  double expected_iterations;
} QcfaHalting;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next call into this library on the same thread.
const char *qcfa_last_error(void);

// Library version as a static NUL-terminated string.
const char *qcfa_version(void);

// Builds a built-in machine (`palindrome3`, `palindrome-qubit`, `anbn`).
//
// # Safety
// `name` must be a NUL-terminated string; `out` must point to writable storage.
enum QcfaStatus qcfa_machine_build(const char *name, double epsilon, struct QcfaMachine **out);

// Loads and validates a machine spec file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must point to writable storage.
enum QcfaStatus qcfa_machine_load(const char *path, struct QcfaMachine **out);

// Releases a machine. Null is ignored.
//
// # Safety
// `m` must be null or a handle from this library that has not been freed.
void qcfa_machine_free(struct QcfaMachine *m);

// Number of classical states.
//
// # Safety
// `m` must be a live handle; `out` must point to writable storage.
enum QcfaStatus qcfa_machine_classical_states(const struct QcfaMachine *m, uintptr_t *out);

// Dimension of the quantum register.
//
// # Safety
// `m` must be a live handle; `out` must point to writable storage.
enum QcfaStatus qcfa_machine_quantum_dim(const struct QcfaMachine *m, uintptr_t *out);

// Step cap used when 0 is passed as `step_cap`: `10⁴·(n+2)⁴`.
uint64_t qcfa_default_step_cap(uintptr_t input_len);

// Runs one trial. `step_cap = 0` selects the default cap.
//
// # Safety
// `m` must be a live handle, `input` a NUL-terminated string and `out`
// writable.
enum QcfaStatus qcfa_run_trial(const struct QcfaMachine *m,
                               const char *input,
                               uint64_t seed,
                               uint64_t step_cap,
                               struct QcfaOutcome *out);

// Runs `trials` seeded trials; identical to the library's `run_trials`.
//
// # Safety
// `m` must be a live handle, `input` a NUL-terminated string and `out`
// writable.
enum QcfaStatus qcfa_run_trials(const struct QcfaMachine *m,
                                const char *input,
                                uint64_t trials,
                                uint64_t master_seed,
                                uint64_t step_cap,
                                struct QcfaTrialStats *out);

// Closed-form halting probabilities of a built-in machine on `input`.
//
// # Safety
// `machine` and `input` must be NUL-terminated strings; `out` writable.
enum QcfaStatus qcfa_analyze(const char *machine,
                             double epsilon,
                             const char *input,
                             struct QcfaHalting *out);

// Runs all lemma checks with word length up to `n_max` (at most 8) and
// stores whether every check passed.
//
// # Safety
// `all_passed` must be writable.
enum QcfaStatus qcfa_verify(uint32_t n_max, bool *all_passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCFA_H */
