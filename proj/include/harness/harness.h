/*
 * C interface to the harness library.
 *
 * Objects are opaque handles created by *_create functions and released by
 * the matching *_destroy. Every fallible call returns a harness_status; on
 * failure harness_last_error() describes it (per thread, valid until the
 * next failing call on that thread). Strings returned through char** are
 * owned by the caller and released with harness_string_free.
 *
 * Site order is lexicographic in the coordinates everywhere: arrays of box
 * values are laid out in harness_model_site_coords order, boundary arrays in
 * harness_model_shell_coords order.
 */
#ifndef HARNESS_HARNESS_H
#define HARNESS_HARNESS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(HARNESS_BUILDING_LIBRARY)
#    define HARNESS_API __declspec(dllexport)
#  else
#    define HARNESS_API __declspec(dllimport)
#  endif
#else
#  define HARNESS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum harness_status {
  HARNESS_OK = 0,
  HARNESS_E_INVALID_ARGUMENT = 1,
  HARNESS_E_ASYMMETRIC_KERNEL = 2,
  HARNESS_E_NON_STOCHASTIC = 3,
  HARNESS_E_SELF_LOOP = 4,
  HARNESS_E_RANGE_VIOLATION = 5,
  HARNESS_E_DOMAIN_MISMATCH = 6,
  HARNESS_E_NO_CONVERGENCE = 7,
  HARNESS_E_SIZE_LIMIT = 8,
  HARNESS_E_SITE_OUTSIDE_BOX = 9,
  HARNESS_E_WALK_CAP_EXCEEDED = 10,
  HARNESS_E_BOUND_VIOLATED = 11,
  HARNESS_E_ABSORPTION_OCCURRED = 12,
  HARNESS_E_FACTORIZATION_FAILURE = 13,
  HARNESS_E_CONFIG_INVALID = 14,
  HARNESS_E_INTERNAL = 99
} harness_status;

typedef struct harness_model harness_model;
typedef struct harness_epochs harness_epochs;
typedef struct harness_gaussian harness_gaussian;

HARNESS_API const char* harness_version(void);
HARNESS_API const char* harness_status_name(harness_status status);
HARNESS_API const char* harness_last_error(void);
HARNESS_API void harness_string_free(char* s);

/* Worker threads used by parallel loops (walks, reconstructions). */
HARNESS_API void harness_set_workers(int workers);
HARNESS_API int harness_get_workers(void);

/* Seed of substream `stream` under master seed `seed`. */
HARNESS_API uint64_t harness_derive_seed(uint64_t seed, uint64_t stream);

/* ---- model ------------------------------------------------------------
 * model_json (the same layout as a CLI run config; other keys are ignored):
 *   {"model": {"dim": 1, "alpha": 0.5, "sigma2": 0.5,
 *              "kernel": {"range": 2, "offsets": {"1": 0.5, "-1": 0.5}}},
 *    "geometry": {"box": {"lower": [0], "upper": [7]}},   (or {"half_width": 4})
 *    "fields": {"d": ..., "y": ..., "z_init": ...}}
 * Fields are literals or generators; missing fields default to zero. d and
 * z_init live on the box, y on the boundary shell, whose width is the
 * kernel's longest jump (geometry.shell, if given, must equal it).
 */
HARNESS_API harness_status harness_model_create(const char* model_json, harness_model** out);
HARNESS_API void harness_model_destroy(harness_model* model);
HARNESS_API harness_status harness_model_describe(const harness_model* model, char** json_out);
HARNESS_API int harness_model_dim(const harness_model* model);
HARNESS_API size_t harness_model_site_count(const harness_model* model);
HARNESS_API size_t harness_model_shell_count(const harness_model* model);
/* coords receives site_count * dim integers. */
HARNESS_API harness_status harness_model_site_coords(const harness_model* model, int* coords, size_t capacity);
HARNESS_API harness_status harness_model_shell_coords(const harness_model* model, int* coords, size_t capacity);
/* name is "d" or "z_init" (box values) or "y" (shell values). */
HARNESS_API harness_status harness_model_field(const harness_model* model, const char* name, double* values,
                                               size_t n);

/* ---- hamiltonian ------------------------------------------------------ */
HARNESS_API harness_status harness_energy(const harness_model* model, const double* x, size_t n, char** json_out);
HARNESS_API harness_status harness_gradient(const harness_model* model, const double* x, size_t n, double* grad_out);

/* ---- ground state ------------------------------------------------------
 * method: "jacobi" or "exact". Result JSON holds m, residual, iterations.
 */
HARNESS_API harness_status harness_ground_state(const harness_model* model, const char* method, double tol,
                                                int max_iter, char** json_out);
/* method: "exact" or "monte_carlo" (n_walks, seed used). The exact row also
 * carries the decay-bound report and the recomposed m(site). */
HARNESS_API harness_status harness_kernel_row(const harness_model* model, const int* site, const char* method,
                                              uint64_t n_walks, uint64_t seed, char** json_out);
/* Neumann series on Z^d for the model's data field taken as finitely supported. */
HARNESS_API harness_status harness_ground_state_infinite(const harness_model* model, double tol, char** json_out);

/* ---- epochs and forward dynamics --------------------------------------- */
HARNESS_API harness_status harness_epochs_generate(const harness_model* model, double start, double end,
                                                   uint64_t seed, harness_epochs** out);
HARNESS_API harness_status harness_epochs_from_json(const char* json, harness_epochs** out);
HARNESS_API harness_status harness_epochs_to_json(const harness_epochs* epochs, char** json_out);
HARNESS_API size_t harness_epochs_count(const harness_epochs* epochs);
HARNESS_API void harness_epochs_destroy(harness_epochs* epochs);

typedef void (*harness_snapshot_fn)(double time, const double* values, size_t n, void* user);

/* Replays the epochs from z_init (the model's z_init when NULL). When
 * snapshot_every > 0 the callback sees the state on that time grid. */
HARNESS_API harness_status harness_simulate(const harness_model* model, const harness_epochs* epochs,
                                            const double* z_init, double* final_out, size_t n,
                                            double snapshot_every, harness_snapshot_fn callback, void* user);
/* out receives n_samples * site_count values, one sample per row. */
HARNESS_API harness_status harness_sample_stationary(const harness_model* model, double burn_in, double thin,
                                                     size_t n_samples, uint64_t seed, double* out, size_t capacity);

/* ---- backward duality -------------------------------------------------- */
HARNESS_API harness_status harness_backward_weights(const harness_model* model, const harness_epochs* epochs,
                                                    const int* site, char** json_out);
/* values_out: n reconstructed values. terms_out (nullable): 4 * n values,
 * per site (noise, data, boundary, initial). */
HARNESS_API harness_status harness_reconstruct(const harness_model* model, const harness_epochs* epochs,
                                               const double* z_init, double* values_out, double* terms_out,
                                               size_t n);

/* ---- exact Gibbs measure ---------------------------------------------- */
HARNESS_API harness_status harness_gaussian_create(const harness_model* model, harness_gaussian** out);
HARNESS_API void harness_gaussian_destroy(harness_gaussian* spec);
HARNESS_API harness_status harness_gaussian_to_json(const harness_gaussian* spec, char** json_out);
HARNESS_API harness_status harness_gaussian_log_density(const harness_gaussian* spec, const double* x, size_t n,
                                                        double* out);
HARNESS_API harness_status harness_gaussian_sample(const harness_gaussian* spec, size_t count, uint64_t seed,
                                                   double* out, size_t capacity);

/* ---- verification ------------------------------------------------------
 * Runs a named check against the model and writes a report
 * {"name","statistic","threshold","passed","details"} (a JSON array for
 * checks producing several reports). A failed check is not an error: the
 * status is HARNESS_OK and "passed" is false.
 *
 * Names and options (all optional unless noted):
 *   stationary-law      n_samples, seed (required), burn_in, thin, oracle_sigma2
 *   ergodic-forgetting  seed (required), n_seeds, u_grid, shift
 *   variance-bound      seed (required), n_windows, max_window, half_width
 *   survival-mass       seed (required), n_seeds, u, half_width
 *   thermo-limit        boundary_values, half_widths, tol
 *   beta-scaling        betas
 *   duality             seed (required), window
 *   detailed-balance    seed (required), n_states
 *   dlr                 seed (required), n_states
 *   minimizer           seed (required), n_probes
 *   ground-state-agreement  tol
 *   kernel-row-mc       seed (required), n_walks, site
 *
 * variance-bound and survival-mass treat their box as all of Z^d and fail
 * with HARNESS_E_ABSORPTION_OCCURRED if the walk leaves it; half_width
 * replaces the model box by a centered box of that half-width.
 */
HARNESS_API harness_status harness_check(const harness_model* model, const char* name, const char* options_json,
                                         char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* HARNESS_HARNESS_H */
