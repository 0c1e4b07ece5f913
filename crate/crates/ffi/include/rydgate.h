#ifndef RYDGATE_H
#define RYDGATE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RgStatus {
  RG_STATUS_OK = 0,
  RG_STATUS_NULL_POINTER = 1,
  RG_STATUS_INVALID_ARGUMENT = 2,
  RG_STATUS_IO = 3,
  RG_STATUS_SPECIES_DATA = 4,
  RG_STATUS_NUMERICS = 5,
  RG_STATUS_FORSTER_RESONANCE = 6,
  RG_STATUS_CALIBRATION = 7,
  RG_STATUS_BUFFER_TOO_SMALL = 8,
  RG_STATUS_PANIC = 9,
} RgStatus;

typedef enum RgScheme {
  // 70s1/2-type excitation.
  RG_SCHEME_S = 0,
  // 70d3/2-type excitation.
  RG_SCHEME_D = 1,
} RgScheme;

// Opaque pair-interaction handle for one initial state.
typedef struct RgPairModel RgPairModel;

// Opaque species handle.
typedef struct RgSpecies RgSpecies;

// Gate parameters; frequencies are Ω/2π in MHz, γ in 1/μs, τ in ns.
typedef struct RgGateParams {
  double omega_mhz;
  double delta_mhz;
  double xi;
  double tau_ns;
  double delta_r_mhz;
  double gamma_r;
  double stark_phase;
  // Nonzero drops the doubly excited state.
  int32_t perfect_blockade;
} RgGateParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. The pointer is
// valid until the next failing call on the same thread.
const char *rg_last_error_message(void);

// Loads a species TOML file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum RgStatus rg_species_load(const char *path, struct RgSpecies **out);

// Parses species TOML text.
//
// # Safety
// `toml` must be a NUL-terminated string; `out` must be writable.
enum RgStatus rg_species_from_toml(const char *toml, struct RgSpecies **out);

// The bundled Rb87 table.
//
// # Safety
// `out` must be writable.
enum RgStatus rg_species_rb87(struct RgSpecies **out);

// # Safety
// `species` must come from an `rg_species_*` constructor and not be used
// afterwards. NULL is ignored.
void rg_species_free(struct RgSpecies *species);

// Level energy in GHz below the ionization limit (negative), for orbital
// l and doubled total angular momentum j2.
//
// # Safety
// `species` must be a live handle; `out_ghz` must be writable.
enum RgStatus rg_level_energy(const struct RgSpecies *species,
                              uint32_t n,
                              uint32_t l,
                              uint32_t j2,
                              double *out_ghz);

// Channels, C6 coefficients and pair spectrum for nl_j + nl_j with the
// default C6 options.
//
// # Safety
// `species` must be a live handle; `out` must be writable.
enum RgStatus rg_pair_model_new(const struct RgSpecies *species,
                                uint32_t n,
                                enum RgScheme scheme,
                                struct RgPairModel **out);

// # Safety
// `pair` must come from `rg_pair_model_new` and not be used afterwards.
// NULL is ignored.
void rg_pair_model_free(struct RgPairModel *pair);

// # Safety
// `pair` must be a live handle; `out` must be writable.
enum RgStatus rg_pair_model_channel_count(const struct RgPairModel *pair, size_t *out);

// Signed C6 of channel `index` in GHz·μm⁶.
//
// # Safety
// `pair` must be a live handle; `out` must be writable.
enum RgStatus rg_pair_model_channel_c6(const struct RgPairModel *pair, size_t index, double *out);

// Writes the NUL-terminated label of channel `index` (e.g. "p1/2+p3/2")
// into `buf`. Returns `RG_STATUS_BUFFER_TOO_SMALL` if `len` cannot hold it.
//
// # Safety
// `pair` must be a live handle; `buf` must have room for `len` bytes.
enum RgStatus rg_pair_model_channel_label(const struct RgPairModel *pair,
                                          size_t index,
                                          char *buf,
                                          size_t len);

// Mean blockade shift of the bright pair state in MHz at separation
// `r_um` and angle `theta` ∈ [0, π]. `out_signed_mhz` may be NULL.
//
// # Safety
// `pair` must be a live handle; `out_mhz` must be writable.
enum RgStatus rg_blockade_shift(const struct RgPairModel *pair,
                                double r_um,
                                double theta,
                                double *out_mhz,
                                double *out_signed_mhz);

// Calibrated Δ/2π (MHz) and ξ (rad) for Ω/2π = `omega_mhz`.
//
// # Safety
// Both out pointers must be writable.
enum RgStatus rg_calibrate(double omega_mhz, double *out_delta_mhz, double *out_xi);

// Single-pulse duration τ in ns.
//
// # Safety
// `out_ns` must be writable.
enum RgStatus rg_pulse_duration(double omega_mhz, double delta_mhz, double *out_ns);

// Fills `out` with calibrated parameters for the given drive and shift.
//
// # Safety
// `out` must be writable.
enum RgStatus rg_gate_params_calibrated(double omega_mhz,
                                        double delta_r_mhz,
                                        double gamma_r,
                                        int32_t perfect_blockade,
                                        struct RgGateParams *out);

// Bell-state fidelity of the two-pulse gate.
//
// # Safety
// `params` must point to a valid struct; `out_fidelity` must be writable.
enum RgStatus rg_bell_fidelity(const struct RgGateParams *params, double *out_fidelity);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RYDGATE_H */
