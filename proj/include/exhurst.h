/*
 * exhurst — expectile-based Hurst exponent estimation for fractional
 * Brownian motion via discrete variations.
 *
 * C API of the shared library. Every function returns an exh_status; on
 * failure a human-readable detail message is available from exh_last_error()
 * (thread-local). Objects returned through exh_* out-parameters are owned by
 * the caller and released with the matching *_free function. All functions
 * are thread-safe as long as each handle is used by one thread at a time.
 */
#ifndef EXHURST_H
#define EXHURST_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum exh_status {
  EXH_OK = 0,
  EXH_ERR_INVALID_ARGUMENT = 1,
  EXH_ERR_DOMAIN = 2,           /* parameter outside its mathematical domain */
  EXH_ERR_EMBEDDING = 3,        /* circulant embedding eigenvalue failure */
  EXH_ERR_SHORT_SERIES = 4,     /* series too short for the filter support */
  EXH_ERR_DEGENERATE_SCALE = 5, /* nonpositive statistic, log regression undefined */
  EXH_ERR_UNKNOWN_NAME = 6,     /* unrecognized filter/transform/method name */
  EXH_ERR_IO = 7,
  EXH_ERR_PARSE = 8,
  EXH_ERR_INTERNAL = 9
} exh_status;

const char* exh_status_name(exh_status status);

/* Detail message of the most recent failing call on this thread ("" if none). */
const char* exh_last_error(void);

const char* exh_version(void);

/* Frees strings returned through char** out-parameters. */
void exh_string_free(char* s);

/* ---------------- filters ---------------- */

typedef struct exh_filter exh_filter;

/* name: "inc1" (length 2, one vanishing moment) or "d4" (Daubechies-4
 * high-pass, two vanishing moments). */
exh_status exh_filter_make(const char* name, exh_filter** out);
exh_status exh_filter_dilate(const exh_filter* filter, int m, exh_filter** out);
void exh_filter_free(exh_filter* filter);
int exh_filter_length(const exh_filter* filter); /* l+1 */
int exh_filter_order(const exh_filter* filter);  /* nu  */
const double* exh_filter_coeffs(const exh_filter* filter);

/* out must hold n - (length-1) values; *out_len receives that count. */
exh_status exh_filter_apply(const exh_filter* filter, const double* x, int64_t n, double* out,
                            int64_t* out_len);
exh_status exh_filter_kappa(const exh_filter* filter, double hurst, double* out);
exh_status exh_filtered_autocovariance(const exh_filter* a1, int m1, const exh_filter* a2, int m2,
                                       double hurst, double sigma2, int64_t lag, double* out);

/* ---------------- synthesis ---------------- */

typedef struct exh_path exh_path;

exh_status exh_fgn_autocovariance(double hurst, double sigma2, int64_t lag, double* out);

/* kind: "fgn" or "fbm". Exact synthesis via circulant embedding;
 * deterministic in (hurst, sigma, n, seed). */
exh_status exh_simulate(double hurst, double sigma, int64_t n, uint64_t seed, const char* kind,
                        exh_path** out);

/* Wraps caller-provided values (copied). Metadata defaults to kind=fbm with
 * unknown parameters; attach provenance with exh_path_set_meta_json. */
exh_status exh_path_wrap(const double* values, int64_t n, exh_path** out);
void exh_path_free(exh_path* path);
int64_t exh_path_length(const exh_path* path);
const double* exh_path_values(const exh_path* path);

/* Provenance sidecar JSON: {"n", "kind", "contamination", "seed", "hurst", "sigma"}. */
exh_status exh_path_meta_json(const exh_path* path, char** json_out);
exh_status exh_path_set_meta_json(exh_path* path, const char* json_text);

/* ---------------- contamination ---------------- */

/* Adds N(0, sigma2_increment*10^(-snr_db/10)) noise to floor(fraction*n)
 * uniformly chosen increments, then re-accumulates the path. */
exh_status exh_contaminate_outliers(const exh_path* path, double fraction, double snr_db,
                                    double sigma2_increment, uint64_t seed, exh_path** out);
/* Integer part (floor) of every value; idempotent. */
exh_status exh_contaminate_round(const exh_path* path, exh_path** out);
/* Rounds each increment to the nearest integer and re-accumulates (the
 * rounding model the benchmark tables use); idempotent. */
exh_status exh_contaminate_round_increments(const exh_path* path, exh_path** out);

/* ---------------- expectiles & robust statistics ---------------- */

exh_status exh_sample_expectile(const double* x, int64_t n, double p, double* out);
exh_status exh_sample_quantile(const double* x, int64_t n, double q, double* out);
exh_status exh_trimmed_mean(const double* x, int64_t n, double trim, double* out);

/* transform: "identity", "square", "abs_pow" (uses beta), "log_abs". */
exh_status exh_theoretical_expectile(const char* transform, double beta, double p, double* out);

/* ---------------- Hurst estimation ---------------- */

typedef struct exh_estimate exh_estimate;

/* method: "expectile" (p, beta), "expectile_log" (p), "st", "med", "tm" (trim).
 * filter_name: "inc1" | "d4"; scales: number of dilations M >= 2. */
exh_status exh_estimate_hurst(const exh_path* path, const char* method, double p, double beta,
                              double trim, const char* filter_name, int scales, exh_estimate** out);
double exh_estimate_h(const exh_estimate* est);
int exh_estimate_scales(const exh_estimate* est);
exh_status exh_estimate_scale_stat(const exh_estimate* est, int index, int* m, double* statistic,
                                   int64_t* sample_count);
void exh_estimate_free(exh_estimate* est);

exh_status exh_estimate_sigma2(const exh_path* path, const char* filter_name, double h_hat,
                               double* out);

/* ---------------- Monte-Carlo p selection ---------------- */

typedef struct exh_pselect exh_pselect;

/* contaminator: "none" | "outliers" | "rounding" (applied to every pilot
 * replication); grid must be strictly increasing inside (0,1). */
exh_status exh_select_p(const exh_path* path, const double* grid, int grid_len, int replications,
                        const char* contaminator, double fraction, double snr_db,
                        const char* filter_name, int scales, double beta, uint64_t seed,
                        exh_pselect** out);
double exh_pselect_popt(const exh_pselect* sel);
int exh_pselect_curve_len(const exh_pselect* sel);
exh_status exh_pselect_curve_point(const exh_pselect* sel, int index, double* p, double* mse);
int exh_pselect_dropped(const exh_pselect* sel);
double exh_pselect_h0(const exh_pselect* sel);
double exh_pselect_sigma2_0(const exh_pselect* sel);
int exh_pselect_h0_clamped(const exh_pselect* sel);
void exh_pselect_free(exh_pselect* sel);

/* ---------------- experiment harness ---------------- */

/* Runs the table/figure experiment described by config_json (pass "" or NULL
 * for the built-in desk-scale defaults) and writes tables.csv, fig1.csv,
 * fig2.csv, fig3.csv, report.json and log.txt into out_dir. On success
 * *report_json_out (if non-NULL) receives the report; free with
 * exh_string_free. */
exh_status exh_run_experiment(const char* config_json, const char* out_dir, char** report_json_out);

/* The built-in default config as JSON (free with exh_string_free). */
exh_status exh_default_experiment_config(char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* EXHURST_H */
