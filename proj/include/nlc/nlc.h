/* C interface to the nonlocal-current library.
 *
 * Complex arrays are interleaved doubles (re, im). Sites are 1-based in
 * every argument that names a site or a domain bound. Functions return
 * NLC_OK or an error status; the message for the most recent failure on
 * the calling thread is available from nlc_last_error(). Strings returned
 * through char** out-parameters are owned by the caller and released with
 * nlc_string_free().
 */
#ifndef NLC_NLC_H
#define NLC_NLC_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(NLC_BUILDING_LIBRARY)
#    define NLC_API __declspec(dllexport)
#  else
#    define NLC_API __declspec(dllimport)
#  endif
#else
#  define NLC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nlc_status {
  NLC_OK = 0,
  NLC_ERR_INVALID_ARGUMENT = 1,
  NLC_ERR_CONFIG = 2,
  NLC_ERR_DOMAIN = 3,
  NLC_ERR_SINGULAR_RATIO = 4,
  NLC_ERR_SINGULAR_CURRENT = 5,
  NLC_ERR_ZERO_AMPLITUDE_ON_PATH = 6,
  NLC_ERR_SINGULAR_SYSTEM = 7,
  NLC_ERR_RESONANT_DENOMINATOR = 8,
  NLC_ERR_ZERO_TRANSMISSION = 9,
  NLC_ERR_NON_CONVERGENCE = 10,
  NLC_ERR_UNCONVERGED_TRUNCATION = 11,
  NLC_ERR_GRID_MISMATCH = 12,
  NLC_ERR_IO = 13,
  NLC_ERR_INTERNAL = 100
} nlc_status;

typedef enum nlc_transform_kind {
  NLC_INVERSION = 0,
  NLC_TRANSLATION = 1
} nlc_transform_kind;

typedef struct nlc_model nlc_model;
typedef struct nlc_transform nlc_transform;
typedef struct nlc_eigen nlc_eigen;

NLC_API const char* nlc_version(void);
NLC_API const char* nlc_last_error(void);
NLC_API const char* nlc_status_name(nlc_status status);
NLC_API void nlc_string_free(char* s);

/* Tight-binding chain. hop_down may be NULL for equidirectional hoppings. */
NLC_API nlc_status nlc_model_create(size_t n_sites, const double* onsite, const double* hop_up,
                                    const double* hop_down, nlc_model** out);
/* Model block of an experiment config ({"onsite": ..., "hop_up": ..., ...}). */
NLC_API nlc_status nlc_model_from_json(const char* json, nlc_model** out);
NLC_API void nlc_model_free(nlc_model* model);
NLC_API size_t nlc_model_size(const nlc_model* model);
/* Row-major N x N, 2 N^2 doubles. */
NLC_API nlc_status nlc_model_hamiltonian(const nlc_model* model, double* out);

NLC_API nlc_status nlc_transform_create(nlc_transform_kind kind, int d_lo, int d_hi, int shift,
                                        int time_reversal, nlc_transform** out);
NLC_API void nlc_transform_free(nlc_transform* t);
NLC_API nlc_status nlc_symmetry_residual(const nlc_model* model, const nlc_transform* t,
                                         double* out);
/* JSON array of {lo, hi, shift, center2} for the maximal domains. */
NLC_API nlc_status nlc_detect_domains_json(const nlc_model* model, nlc_transform_kind kind,
                                           int time_reversal, char** out_json);

NLC_API nlc_status nlc_eigen_compute(const nlc_model* model, nlc_eigen** out);
NLC_API void nlc_eigen_free(nlc_eigen* e);
NLC_API size_t nlc_eigen_size(const nlc_eigen* e);
/* N complex eigenvalues. */
NLC_API nlc_status nlc_eigen_values(const nlc_eigen* e, double* out);
/* Mode nu, N complex amplitudes, unit norm. */
NLC_API nlc_status nlc_eigen_vector(const nlc_eigen* e, size_t nu, double* out);

/* q+ and q- per site for state psi (N complex each). Either output may be NULL. */
NLC_API nlc_status nlc_field_compute(const nlc_model* model, const double* psi,
                                     const nlc_transform* t, double* q_plus, double* q_minus);

/* r, t, t', r' as four complex numbers for leads with onsite v and hopping h. */
NLC_API nlc_status nlc_smatrix(const nlc_model* model, double lead_v, double lead_h, double k,
                               double* out);

/* Same semantics and exit codes as the command-line run/verify. report
 * receives the check table text and may be NULL; threads <= 0 means 1. */
NLC_API int nlc_run_experiment(const char* config_path, const char* out_dir, int threads,
                               const char* format, char** report);
NLC_API int nlc_verify_experiment(const char* config_path, const char* out_dir, int threads,
                                  char** report);

#ifdef __cplusplus
}
#endif

#endif
