#ifndef ANYTIME_VILLE_H
#define ANYTIME_VILLE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define AV_API __declspec(dllexport)
#else
#define AV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum av_status {
  AV_OK = 0,
  AV_ERR_DOMAIN = 1,
  AV_ERR_EXTRAPOLATION = 2,
  AV_ERR_UNSUPPORTED = 3,
  AV_ERR_INVALID_QUERY = 4,
  AV_ERR_CALIBRATION = 5,
  AV_ERR_OVERFLOW = 6,
  AV_ERR_NUMERICAL = 7,
  AV_ERR_PARSE = 8,
  AV_ERR_IO = 9,
  AV_ERR_ARGUMENT = 10,
  AV_ERR_INTERNAL = 11
} av_status;

typedef struct av_curve av_curve;
typedef struct av_dampener av_dampener;
typedef struct av_coverage_report av_coverage_report;

/* Message for the most recent failure on the calling thread ("" if none). */
AV_API const char* av_last_error(void);
AV_API const char* av_status_name(av_status status);

/* Strings returned through char** are owned by the caller. */
AV_API void av_string_free(char* s);

/* ---- curves ---- */

AV_API av_status av_curve_from_json(const char* json, av_curve** out);
AV_API av_status av_curve_to_json(const av_curve* curve, char** out);
AV_API av_status av_curve_clone(const av_curve* curve, av_curve** out);
AV_API void av_curve_free(av_curve* curve);

AV_API av_status av_curve_eval(const av_curve* curve, double x, double* out);
AV_API av_status av_curve_derivative(const av_curve* curve, double x, double* out);
AV_API av_status av_curve_equal(const av_curve* a, const av_curve* b, int* out);

AV_API av_status av_dampener_from_json(const char* json, av_dampener** out);
AV_API av_status av_dampener_to_json(const av_dampener* h, char** out);
AV_API av_status av_dampener_value(const av_dampener* h, double xi, double* out);
AV_API void av_dampener_free(av_dampener* h);

/* ---- generalized Ville bound ---- */

typedef struct av_bracket {
  double lower;
  double upper;
  int64_t truncation_horizon;
} av_bracket;

typedef struct av_continuous {
  double value;
  double exponent;
  int divergent;
} av_continuous;

/* horizon <= 0 selects the default truncation horizon. */
AV_API av_status av_crossing_bound(const av_curve* f, const av_curve* g, double m0,
                                   int64_t horizon, av_bracket* out);
AV_API av_status av_s_tail(const av_curve* f, const av_curve* g, int64_t n, int64_t horizon,
                           av_bracket* out);
AV_API av_status av_continuous_bound(const av_curve* f, const av_curve* g, double m0,
                                     av_continuous* out);
AV_API av_status av_calibrate_quadratic(double delta, double a, double* b_out);
AV_API av_status av_calibrate_expconcave(const av_dampener* h, double delta,
                                         av_dampener** out);

/* ---- floor-hugger simulation ---- */

typedef struct av_sim_config {
  double m0;
  int64_t horizon;
  int64_t n_paths;
  uint64_t seed;
  unsigned threads; /* 0 = hardware concurrency */
} av_sim_config;

typedef struct av_sim_summary {
  int64_t n_paths;
  int64_t n_crossed;
  double empirical_prob;
  double std_error;
} av_sim_summary;

AV_API av_status av_jump_prob(const av_curve* f, const av_curve* g, int64_t n, double* out);
AV_API av_status av_simulate(const av_curve* f, const av_curve* g, const av_sim_config* cfg,
                             av_sim_summary* out);
/* Writes CSV `path_id,n,M,K` for the first `count` paths. */
AV_API av_status av_dump_paths(const av_curve* f, const av_curve* g, const av_sim_config* cfg,
                               int64_t count, const char* path);

/* ---- LIL bounds ---- */

typedef enum av_lil_form {
  AV_LIL_EXPLICIT = 0,
  AV_LIL_SIMPLER = 1,
  AV_LIL_IMPLICIT = 2
} av_lil_form;

AV_API av_status av_lil_I(double x, double* out);
AV_API av_status av_lil_ell(double x, double* out);
AV_API av_status av_lil_remainder(double tau, double* out);
AV_API av_status av_lil_invert_threshold(double tau, double* out);
AV_API av_status av_lil_martingale_value(double n, double s, double* out);

/* Bound on |S_n| (normalized = 0) or on |S_n|/sqrt(n+1) (normalized = 1)
   at each of the `count` times in `ns`, with the kappa rescaling applied. */
AV_API av_status av_lil_curve(double delta, double kappa, av_lil_form form, int normalized,
                              const double* ns, size_t count, double* out);

/* ---- coverage ---- */

typedef struct av_coverage_config {
  double delta;
  int64_t n_steps;
  int64_t n_reps;
  uint64_t seed;
  double kappa;
  double sigma; /* data are N(0, sigma^2), standardized before checking */
  av_lil_form form;
  unsigned threads;
} av_coverage_config;

AV_API av_status av_coverage_run(const av_coverage_config* cfg, av_coverage_report** out);
AV_API int64_t av_coverage_violations(const av_coverage_report* r);
AV_API int64_t av_coverage_reps(const av_coverage_report* r);
AV_API double av_coverage_violation_rate(const av_coverage_report* r);
AV_API size_t av_coverage_histogram_size(const av_coverage_report* r);
AV_API av_status av_coverage_histogram_entry(const av_coverage_report* r, size_t i, int64_t* t,
                                             int64_t* count);
AV_API void av_coverage_free(av_coverage_report* r);

#ifdef __cplusplus
}
#endif

#endif
