/* C interface to the cnotsim conditional-quantum-dynamics workbench. */

#pragma once

/* Generated with cbindgen:0.27.0 */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible call.
typedef enum CnotsimStatus {
  CNOTSIM_STATUS_OK = 0,
  CNOTSIM_STATUS_NULL_POINTER = 1,
  CNOTSIM_STATUS_INVALID_ARGUMENT = 2,
  CNOTSIM_STATUS_NOT_NORMALIZED = 3,
  CNOTSIM_STATUS_DIMENSION_MISMATCH = 4,
  CNOTSIM_STATUS_RUNTIME_ERROR = 5,
} CnotsimStatus;

// Opaque handle to a normalized multi-qubit state.
typedef struct CnotsimState CnotsimState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Last error message for this thread, or NULL when no error was recorded.
// The caller frees the string with [`cnotsim_string_free`].
char *cnotsim_last_error_message(void);

// Frees a string returned by this library. NULL is accepted.
//
// # Safety
// `s` must have been returned by a cnotsim function and not freed before.
void cnotsim_string_free(char *s);

// Frees a state handle. NULL is accepted.
//
// # Safety
// `state` must have come from a cnotsim constructor and not be freed twice.
void cnotsim_state_free(struct CnotsimState *state);

// Creates the computational basis state |basis_index⟩ on `n_qubits` qubits.
//
// # Safety
// `out` must be a valid pointer.
enum CnotsimStatus cnotsim_state_basis(uint32_t n_qubits,
                                       uint32_t basis_index,
                                       struct CnotsimState **out);

// Creates a state from `2 * 2^n_qubits` doubles: interleaved re, im pairs
// in basis order. The amplitudes must already be normalized.
//
// # Safety
// `re_im` must point to `len` readable doubles; `out` must be valid.
enum CnotsimStatus cnotsim_state_from_amplitudes(uint32_t n_qubits,
                                                 const double *re_im,
                                                 size_t len,
                                                 struct CnotsimState **out);

// Number of qubits in the state.
//
// # Safety
// `state` and `out` must be valid pointers.
enum CnotsimStatus cnotsim_state_qubits(const struct CnotsimState *state, uint32_t *out);

// Copies the amplitudes out as interleaved re, im doubles; `len` must be
// exactly `2 * 2^n`.
//
// # Safety
// `state` must be valid; `out` must point to `len` writable doubles.
enum CnotsimStatus cnotsim_state_amplitudes(const struct CnotsimState *state,
                                            double *out,
                                            size_t len);

// Applies a named single-qubit gate ("X", "H" or "Z") in place.
//
// # Safety
// `state` must be a valid handle; `name` a valid NUL-terminated string.
enum CnotsimStatus cnotsim_state_apply_gate(struct CnotsimState *state,
                                            const char *name,
                                            uint32_t qubit);

// Applies a controlled-NOT with the given control and target qubits.
//
// # Safety
// `state` must be a valid handle.
enum CnotsimStatus cnotsim_state_apply_cnot(struct CnotsimState *state,
                                            uint32_t control,
                                            uint32_t target);

// Measurement probabilities of one qubit without collapsing the state.
//
// # Safety
// All pointers must be valid.
enum CnotsimStatus cnotsim_state_measure_probabilities(const struct CnotsimState *state,
                                                       uint32_t qubit,
                                                       double *out_p0,
                                                       double *out_p1);

// Samples one measurement outcome with a seeded generator and collapses the
// state in place.
//
// # Safety
// `state` and `out_bit` must be valid pointers.
enum CnotsimStatus cnotsim_state_sample_measure(struct CnotsimState *state,
                                                uint32_t qubit,
                                                uint64_t seed,
                                                uint8_t *out_bit);

// |⟨a|b⟩|².
//
// # Safety
// All pointers must be valid.
enum CnotsimStatus cnotsim_fidelity(const struct CnotsimState *a,
                                    const struct CnotsimState *b,
                                    double *out);

// Runs the distributed swap of `alpha` and `beta` (each four doubles:
// re0, im0, re1, im1). `sample` false enumerates all 16 branches; true runs
// one seeded trajectory. Returns the branch reports as a JSON array.
//
// # Safety
// `alpha` and `beta` must point to four readable doubles; `out_json` must
// be valid.
enum CnotsimStatus cnotsim_distributed_swap_json(const double *alpha,
                                                 const double *beta,
                                                 bool sample,
                                                 uint64_t seed,
                                                 char **out_json);

// Runs the networked protocol session over TCP loopback (port 0 picks an
// ephemeral port) and returns `{branch, transcript}` as JSON.
//
// # Safety
// Pointer arguments as in [`cnotsim_distributed_swap_json`].
enum CnotsimStatus cnotsim_distributed_swap_tcp_json(const double *alpha,
                                                     const double *beta,
                                                     uint16_t port,
                                                     uint64_t seed,
                                                     char **out_json);

// Teleports `xi` (four doubles) and returns the branch reports as JSON.
//
// # Safety
// `xi` must point to four readable doubles; `out_json` must be valid.
enum CnotsimStatus cnotsim_teleport_json(const double *xi,
                                         bool sample,
                                         uint64_t seed,
                                         char **out_json);

// Searches per-branch Pauli corrections over `inputs` random input pairs
// and returns the calibration table as JSON.
//
// # Safety
// `out_json` must be valid.
enum CnotsimStatus cnotsim_calibrate_corrections_json(uint32_t inputs,
                                                      uint64_t seed,
                                                      char **out_json);

// Runs the Ramsey phase search. `model` is "literal" or "lightshift";
// `theta` may be NULL for a full three-axis scan or point to a fixed
// dispersive phase for a two-axis scan.
//
// # Safety
// `model` must be a valid NUL-terminated string; `theta` NULL or readable;
// `out_json` valid.
enum CnotsimStatus cnotsim_ramsey_solve_json(const char *model,
                                             uint32_t grid,
                                             bool refine,
                                             const double *theta,
                                             char **out_json);

// Dipole-dipole coupling −d1·d2/(4π·ε0·ħ·r³) in rad/s.
//
// # Safety
// `out` must be valid.
enum CnotsimStatus cnotsim_dot_omega_bar(double d1, double d2, double r, double *out);

// Timescale feasibility report for a params document of the same shape as
// the CLI parameter file; returns JSON.
//
// # Safety
// `params_json` must be a valid NUL-terminated string; `out_json` valid.
enum CnotsimStatus cnotsim_dot_feasibility_json(const char *params_json, char **out_json);

// Drives one pulse for a params document and returns the flip-probability
// and gate-fidelity report as JSON.
//
// # Safety
// `params_json` must be a valid NUL-terminated string; `out_json` valid.
enum CnotsimStatus cnotsim_dot_pulse_json(const char *params_json, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
