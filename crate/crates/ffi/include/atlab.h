#ifndef ATLAB_H
#define ATLAB_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum AtlabStatus {
  ATLAB_STATUS_OK = 0,
  ATLAB_STATUS_INVALID_ARGUMENT = 1,
  // Quadrature or finite differences could not reach the requested accuracy.
  ATLAB_STATUS_NUMERICAL = 2,
  ATLAB_STATUS_IO = 3,
  ATLAB_STATUS_CONFIG = 4,
  ATLAB_STATUS_NULL_POINTER = 5,
  // A Rust panic was caught at the boundary.
  ATLAB_STATUS_PANIC = 6,
} AtlabStatus;

// Time change applied to a one-dimensional plane wave `cos(kappa x)`.
// Passed to [`atlab_plane_wave_u`] as its integer value.
typedef enum AtlabVariant {
  ATLAB_VARIANT_CAUCHY_TIME = 0,
  // `param` is epsilon.
  ATLAB_VARIANT_EPS_WEIGHTED = 1,
  // `param` is the constant potential, `<= 0`.
  ATLAB_VARIANT_FEYNMAN_KAC = 2,
  ATLAB_VARIANT_ICTBAP = 3,
  // Uses the `l/m` index.
  ATLAB_VARIANT_ALPHA_TIME = 4,
  ATLAB_VARIANT_BTP = 5,
} AtlabVariant;

// Experiment configuration.
typedef struct AtlabConfig AtlabConfig;

// Seeded random stream.
typedef struct AtlabRng AtlabRng;

// Sine expansion of an initial function on `(0, a)`.
typedef struct AtlabSpectral AtlabSpectral;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, static and NUL-terminated.
const char *atlab_version(void);

// Density `p_t^alpha(0, s)` of the symmetric stable law, `alpha = l/m`.
//
// # Safety
// `out_value` must be valid for one write.
enum AtlabStatus atlab_stable_density(uint32_t l,
                                      uint32_t m,
                                      double t,
                                      double s,
                                      double *out_value);

// `2 ∫_0^∞ p_t^alpha(0,s) e^{-beta s} ds` with its quadrature error.
//
// # Safety
// `out_value` and `out_error` must be valid for one write each.
enum AtlabStatus atlab_weighted_kernel_integral(uint32_t l,
                                                uint32_t m,
                                                double beta,
                                                double t,
                                                double *out_value,
                                                double *out_error);

// Mean exit time `(R² - |x|²)/(2n)` from the centred ball of radius `radius`
// in `dim` dimensions; `x` has `dim` entries.
//
// # Safety
// `x` must point to `dim` readable doubles; `out_value` must be valid for one write.
enum AtlabStatus atlab_exit_oracle(size_t dim, double radius, const double *x, double *out_value);

// Mean exit time of the symmetric `l/m`-stable process from the ball of
// radius `radius` in `n` dimensions, started at distance `y` from the centre.
//
// # Safety
// `out_value` must be valid for one write.
enum AtlabStatus atlab_getoor_mean(uint32_t l,
                                   uint32_t m,
                                   size_t n,
                                   double radius,
                                   double y,
                                   double *out_value);

// `u(t, x)` for the plane wave `cos(kappa x)` under `variant`, by quadrature.
//
// `param` is read by the eps-weighted and Feynman-Kac variants; `l/m` only
// by the alpha-time variant. For ICTBAP the real part is returned.
//
// # Safety
// `out_value` and `out_error` must be valid for one write each.
enum AtlabStatus atlab_plane_wave_u(uint32_t variant,
                                    double kappa,
                                    double param,
                                    uint32_t l,
                                    uint32_t m,
                                    double t,
                                    double x,
                                    double *out_value,
                                    double *out_error);

// New stream `(seed, stream_id)`. Never returns NULL.
struct AtlabRng *atlab_rng_new(uint64_t seed, uint64_t stream_id);

// # Safety
// `rng` must come from [`atlab_rng_new`] and not be used afterwards. NULL is ignored.
void atlab_rng_free(struct AtlabRng *rng);

// Fills `out` with `len` draws of `Y(t)` for the symmetric `l/m`-stable process.
//
// # Safety
// `rng` must be a live handle; `out` must be valid for `len` writes.
enum AtlabStatus atlab_sample_stable(struct AtlabRng *rng,
                                     uint32_t l,
                                     uint32_t m,
                                     double t,
                                     double *out,
                                     size_t len);

// Fills `out` with `len` draws of the `num/den` stable subordinator at time `t`.
//
// # Safety
// `rng` must be a live handle; `out` must be valid for `len` writes.
enum AtlabStatus atlab_sample_subordinator(struct AtlabRng *rng,
                                           uint32_t num,
                                           uint32_t den,
                                           double t,
                                           double *out,
                                           size_t len);

// `f(x) = Σ amplitudes[i] sin(modes[i] π x / a)` on `(0, a)`.
//
// # Safety
// `modes` and `amplitudes` must hold `count` entries; `out_handle` must be
// valid for one write.
enum AtlabStatus atlab_spectral_sine_sum(double a,
                                         const uint32_t *modes,
                                         const double *amplitudes,
                                         size_t count,
                                         struct AtlabSpectral **out_handle);

// Indicator of `[lo, hi]` on `(0, a)` truncated to `modes` sine modes.
//
// # Safety
// `out_handle` must be valid for one write.
enum AtlabStatus atlab_spectral_indicator(double a,
                                          double lo,
                                          double hi,
                                          uint32_t modes,
                                          struct AtlabSpectral **out_handle);

// # Safety
// `handle` must come from an `atlab_spectral_*` constructor and not be used
// afterwards. NULL is ignored.
void atlab_spectral_free(struct AtlabSpectral *handle);

// Subordinate killed Brownian motion semigroup `Q_t f(x)` for `alpha = l/m`.
//
// # Safety
// `handle` must be live; `out_value` must be valid for one write.
enum AtlabStatus atlab_q_apply(const struct AtlabSpectral *handle,
                               uint32_t l,
                               uint32_t m,
                               double t,
                               double x,
                               double *out_value);

// Config with all defaults for the named experiment.
//
// # Safety
// `experiment` must be a NUL-terminated string; `out_handle` must be valid
// for one write.
enum AtlabStatus atlab_config_new(const char *experiment, struct AtlabConfig **out_handle);

// Config parsed from TOML text.
//
// # Safety
// `toml` must be a NUL-terminated string; `out_handle` must be valid for one write.
enum AtlabStatus atlab_config_from_toml(const char *toml, struct AtlabConfig **out_handle);

// # Safety
// `config` must be live.
enum AtlabStatus atlab_config_set_seed(struct AtlabConfig *config, uint64_t seed);

// # Safety
// `config` must be live.
enum AtlabStatus atlab_config_set_workers(struct AtlabConfig *config, size_t workers);

// # Safety
// `config` must be live.
enum AtlabStatus atlab_config_set_samples(struct AtlabConfig *config, size_t samples);

// # Safety
// `config` must come from an `atlab_config_*` constructor and not be used
// afterwards. NULL is ignored.
void atlab_config_free(struct AtlabConfig *config);

// Runs the experiment in memory. `out_json` receives the JSON report, to be
// released with [`atlab_string_free`]; `out_pass` is 1 when every criterion
// passed. A run whose criteria fail still returns `ATLAB_STATUS_OK`.
//
// # Safety
// `config` must be live; the out-pointers must be valid for one write each.
enum AtlabStatus atlab_run_experiment(const struct AtlabConfig *config,
                                      char **out_json,
                                      int32_t *out_pass);

// Runs the experiment and writes `<id>.json` and `<id>.csv` into `out_dir`.
//
// # Safety
// `config` must be live; `out_dir` must be NUL-terminated; `out_pass` must be
// valid for one write.
enum AtlabStatus atlab_run_experiment_to_dir(const struct AtlabConfig *config,
                                             const char *out_dir,
                                             int32_t *out_pass);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void atlab_string_free(char *s);

// Message of the last failed call on this thread, or NULL.
//
// The pointer stays valid until the next call into the library on the same
// thread.
const char *atlab_last_error_message(void);

// Static, NUL-terminated name of a status code.
const char *atlab_status_name(int32_t status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ATLAB_H */
