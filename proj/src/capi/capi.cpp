#include "exhurst.h"

#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "core/contamination.hpp"
#include "core/errors.hpp"
#include "core/estimators.hpp"
#include "core/expectile.hpp"
#include "core/filters.hpp"
#include "core/gaussian_synth.hpp"
#include "core/harness.hpp"
#include "core/pselect.hpp"

using namespace exhurst;

struct exh_filter {
  FilterSpec spec;
};

struct exh_path {
  SamplePath path;
};

struct exh_estimate {
  HurstEstimate estimate;
};

struct exh_pselect {
  PSelectResult result;
};

namespace {

thread_local std::string g_last_error;

exh_status status_from(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return EXH_ERR_INVALID_ARGUMENT;
    case ErrorCode::domain: return EXH_ERR_DOMAIN;
    case ErrorCode::embedding: return EXH_ERR_EMBEDDING;
    case ErrorCode::short_series: return EXH_ERR_SHORT_SERIES;
    case ErrorCode::degenerate_scale: return EXH_ERR_DEGENERATE_SCALE;
    case ErrorCode::unknown_name: return EXH_ERR_UNKNOWN_NAME;
    case ErrorCode::io: return EXH_ERR_IO;
    case ErrorCode::parse: return EXH_ERR_PARSE;
    case ErrorCode::internal: return EXH_ERR_INTERNAL;
  }
  return EXH_ERR_INTERNAL;
}

// Runs fn, translating exceptions into status codes + thread-local detail.
template <typename Fn>
exh_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return EXH_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_from(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return EXH_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return EXH_ERR_INTERNAL;
  }
}

exh_status fail_invalid(const char* msg) {
  g_last_error = msg;
  return EXH_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* exh_status_name(exh_status status) {
  switch (status) {
    case EXH_OK: return "ok";
    case EXH_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case EXH_ERR_DOMAIN: return "domain";
    case EXH_ERR_EMBEDDING: return "embedding";
    case EXH_ERR_SHORT_SERIES: return "short_series";
    case EXH_ERR_DEGENERATE_SCALE: return "degenerate_scale";
    case EXH_ERR_UNKNOWN_NAME: return "unknown_name";
    case EXH_ERR_IO: return "io";
    case EXH_ERR_PARSE: return "parse";
    case EXH_ERR_INTERNAL: return "internal";
  }
  return "internal";
}

const char* exh_last_error(void) { return g_last_error.c_str(); }

const char* exh_version(void) { return "0.1.0"; }

void exh_string_free(char* s) { delete[] s; }

/* ---------------- filters ---------------- */

exh_status exh_filter_make(const char* name, exh_filter** out) {
  if (!name || !out) return fail_invalid("exh_filter_make: null argument");
  return guarded([&] { *out = new exh_filter{FilterSpec::named(name)}; });
}

exh_status exh_filter_dilate(const exh_filter* filter, int m, exh_filter** out) {
  if (!filter || !out) return fail_invalid("exh_filter_dilate: null argument");
  return guarded([&] { *out = new exh_filter{filter->spec.dilated(m)}; });
}

void exh_filter_free(exh_filter* filter) { delete filter; }

int exh_filter_length(const exh_filter* filter) {
  return filter ? static_cast<int>(filter->spec.length()) : 0;
}

int exh_filter_order(const exh_filter* filter) { return filter ? filter->spec.order() : 0; }

const double* exh_filter_coeffs(const exh_filter* filter) {
  return filter ? filter->spec.coeffs().data() : nullptr;
}

exh_status exh_filter_apply(const exh_filter* filter, const double* x, int64_t n, double* out,
                            int64_t* out_len) {
  if (!filter || !x || !out || !out_len || n < 0) return fail_invalid("exh_filter_apply: bad argument");
  return guarded([&] {
    const auto filtered =
        apply_filter(std::span<const double>(x, static_cast<std::size_t>(n)), filter->spec);
    std::memcpy(out, filtered.data(), filtered.size() * sizeof(double));
    *out_len = static_cast<int64_t>(filtered.size());
  });
}

exh_status exh_filter_kappa(const exh_filter* filter, double hurst, double* out) {
  if (!filter || !out) return fail_invalid("exh_filter_kappa: null argument");
  return guarded([&] { *out = kappa(filter->spec, hurst); });
}

exh_status exh_filtered_autocovariance(const exh_filter* a1, int m1, const exh_filter* a2, int m2,
                                       double hurst, double sigma2, int64_t lag, double* out) {
  if (!a1 || !a2 || !out) return fail_invalid("exh_filtered_autocovariance: null argument");
  return guarded([&] { *out = filtered_autocovariance(a1->spec, m1, a2->spec, m2, hurst, sigma2, lag); });
}

/* ---------------- synthesis ---------------- */

exh_status exh_fgn_autocovariance(double hurst, double sigma2, int64_t lag, double* out) {
  if (!out) return fail_invalid("exh_fgn_autocovariance: null output");
  return guarded([&] { *out = fgn_autocovariance(hurst, sigma2, lag); });
}

exh_status exh_simulate(double hurst, double sigma, int64_t n, uint64_t seed, const char* kind,
                        exh_path** out) {
  if (!kind || !out || n < 0) return fail_invalid("exh_simulate: bad argument");
  return guarded([&] {
    const HurstParams params(hurst, sigma);
    const PathKind path_kind = path_kind_from_string(kind);
    auto* handle = new exh_path{};
    handle->path = path_kind == PathKind::fgn ? simulate_fgn(params, static_cast<std::size_t>(n), seed)
                                              : simulate_fbm(params, static_cast<std::size_t>(n), seed);
    *out = handle;
  });
}

exh_status exh_path_wrap(const double* values, int64_t n, exh_path** out) {
  if (!values || !out || n < 1) return fail_invalid("exh_path_wrap: bad argument");
  return guarded([&] {
    auto* handle = new exh_path{};
    handle->path.values.assign(values, values + n);
    handle->path.meta = PathMeta{};  // kind=fbm, unknown provenance
    *out = handle;
  });
}

void exh_path_free(exh_path* path) { delete path; }

int64_t exh_path_length(const exh_path* path) {
  return path ? static_cast<int64_t>(path->path.values.size()) : 0;
}

const double* exh_path_values(const exh_path* path) {
  return path ? path->path.values.data() : nullptr;
}

exh_status exh_path_meta_json(const exh_path* path, char** json_out) {
  if (!path || !json_out) return fail_invalid("exh_path_meta_json: null argument");
  return guarded([&] { *json_out = dup_string(path_meta_to_json(path->path.meta, path->path.values.size())); });
}

exh_status exh_path_set_meta_json(exh_path* path, const char* json_text) {
  if (!path || !json_text) return fail_invalid("exh_path_set_meta_json: null argument");
  return guarded([&] { path->path.meta = path_meta_from_json(json_text); });
}

/* ---------------- contamination ---------------- */

exh_status exh_contaminate_outliers(const exh_path* path, double fraction, double snr_db,
                                    double sigma2_increment, uint64_t seed, exh_path** out) {
  if (!path || !out) return fail_invalid("exh_contaminate_outliers: null argument");
  return guarded([&] {
    *out = new exh_path{add_outliers(path->path, fraction, snr_db, sigma2_increment, seed)};
  });
}

exh_status exh_contaminate_round(const exh_path* path, exh_path** out) {
  if (!path || !out) return fail_invalid("exh_contaminate_round: null argument");
  return guarded([&] { *out = new exh_path{round_path(path->path)}; });
}

exh_status exh_contaminate_round_increments(const exh_path* path, exh_path** out) {
  if (!path || !out) return fail_invalid("exh_contaminate_round_increments: null argument");
  return guarded([&] { *out = new exh_path{round_increments(path->path)}; });
}

/* ---------------- expectiles & robust statistics ---------------- */

exh_status exh_sample_expectile(const double* x, int64_t n, double p, double* out) {
  if (!x || !out || n < 1) return fail_invalid("exh_sample_expectile: bad argument");
  return guarded([&] { *out = sample_expectile(std::span<const double>(x, static_cast<std::size_t>(n)), p); });
}

exh_status exh_sample_quantile(const double* x, int64_t n, double q, double* out) {
  if (!x || !out || n < 1) return fail_invalid("exh_sample_quantile: bad argument");
  return guarded([&] { *out = sample_quantile(std::span<const double>(x, static_cast<std::size_t>(n)), q); });
}

exh_status exh_trimmed_mean(const double* x, int64_t n, double trim, double* out) {
  if (!x || !out || n < 1) return fail_invalid("exh_trimmed_mean: bad argument");
  return guarded([&] { *out = trimmed_mean(std::span<const double>(x, static_cast<std::size_t>(n)), trim); });
}

exh_status exh_theoretical_expectile(const char* transform, double beta, double p, double* out) {
  if (!transform || !out) return fail_invalid("exh_theoretical_expectile: null argument");
  return guarded([&] { *out = theoretical_expectile(Transform::from_string(transform, beta), p); });
}

/* ---------------- Hurst estimation ---------------- */

exh_status exh_estimate_hurst(const exh_path* path, const char* method, double p, double beta,
                              double trim, const char* filter_name, int scales, exh_estimate** out) {
  if (!path || !method || !filter_name || !out) return fail_invalid("exh_estimate_hurst: null argument");
  return guarded([&] {
    EstimatorConfig cfg;
    cfg.method = EstimatorConfig::method_from_string(method);
    cfg.p = p;
    cfg.beta = beta;
    cfg.trim = trim;
    cfg.filter = FilterSpec::named(filter_name);
    cfg.num_scales = scales;
    *out = new exh_estimate{estimate_hurst(path->path, cfg)};
  });
}

double exh_estimate_h(const exh_estimate* est) { return est ? est->estimate.h_hat : 0.0; }

int exh_estimate_scales(const exh_estimate* est) {
  return est ? static_cast<int>(est->estimate.per_scale.size()) : 0;
}

exh_status exh_estimate_scale_stat(const exh_estimate* est, int index, int* m, double* statistic,
                                   int64_t* sample_count) {
  if (!est || index < 0 || index >= exh_estimate_scales(est)) {
    return fail_invalid("exh_estimate_scale_stat: index out of range");
  }
  const ScaleStat& s = est->estimate.per_scale[static_cast<std::size_t>(index)];
  if (m) *m = s.m;
  if (statistic) *statistic = s.statistic;
  if (sample_count) *sample_count = static_cast<int64_t>(s.sample_count);
  g_last_error.clear();
  return EXH_OK;
}

void exh_estimate_free(exh_estimate* est) { delete est; }

exh_status exh_estimate_sigma2(const exh_path* path, const char* filter_name, double h_hat,
                               double* out) {
  if (!path || !filter_name || !out) return fail_invalid("exh_estimate_sigma2: null argument");
  return guarded([&] { *out = estimate_sigma2(path->path, FilterSpec::named(filter_name), h_hat); });
}

/* ---------------- Monte-Carlo p selection ---------------- */

exh_status exh_select_p(const exh_path* path, const double* grid, int grid_len, int replications,
                        const char* contaminator, double fraction, double snr_db,
                        const char* filter_name, int scales, double beta, uint64_t seed,
                        exh_pselect** out) {
  if (!path || !contaminator || !filter_name || !out) return fail_invalid("exh_select_p: null argument");
  if (grid_len > 0 && !grid) return fail_invalid("exh_select_p: null grid with positive length");
  return guarded([&] {
    PSelectConfig cfg;
    cfg.grid = grid_len > 0 ? std::vector<double>(grid, grid + grid_len) : PSelectConfig::default_grid();
    cfg.replications = replications;
    cfg.contaminator.kind = ContaminationSpec::kind_from_string(contaminator);
    cfg.contaminator.fraction = fraction;
    cfg.contaminator.snr_db = snr_db;
    cfg.filter = FilterSpec::named(filter_name);
    cfg.num_scales = scales;
    cfg.beta = beta;
    *out = new exh_pselect{select_p(path->path, cfg, seed)};
  });
}

double exh_pselect_popt(const exh_pselect* sel) { return sel ? sel->result.p_opt : 0.0; }

int exh_pselect_curve_len(const exh_pselect* sel) {
  return sel ? static_cast<int>(sel->result.mse_curve.size()) : 0;
}

exh_status exh_pselect_curve_point(const exh_pselect* sel, int index, double* p, double* mse) {
  if (!sel || index < 0 || index >= exh_pselect_curve_len(sel)) {
    return fail_invalid("exh_pselect_curve_point: index out of range");
  }
  const auto& pt = sel->result.mse_curve[static_cast<std::size_t>(index)];
  if (p) *p = pt.first;
  if (mse) *mse = pt.second;
  g_last_error.clear();
  return EXH_OK;
}

int exh_pselect_dropped(const exh_pselect* sel) { return sel ? sel->result.dropped : 0; }

double exh_pselect_h0(const exh_pselect* sel) { return sel ? sel->result.h0 : 0.0; }

double exh_pselect_sigma2_0(const exh_pselect* sel) { return sel ? sel->result.sigma2_0 : 0.0; }

int exh_pselect_h0_clamped(const exh_pselect* sel) { return sel && sel->result.h0_clamped ? 1 : 0; }

void exh_pselect_free(exh_pselect* sel) { delete sel; }

/* ---------------- experiment harness ---------------- */

exh_status exh_run_experiment(const char* config_json, const char* out_dir, char** report_json_out) {
  if (!out_dir) return fail_invalid("exh_run_experiment: null out_dir");
  return guarded([&] {
    ExperimentConfig cfg = (config_json && config_json[0])
                               ? ExperimentConfig::from_json_text(config_json)
                               : ExperimentConfig::paper_defaults();
    const ExperimentReport report = run_experiment(cfg, out_dir);
    if (report_json_out) *report_json_out = dup_string(report.report_json());
  });
}

exh_status exh_default_experiment_config(char** json_out) {
  if (!json_out) return fail_invalid("exh_default_experiment_config: null output");
  return guarded([&] { *json_out = dup_string(ExperimentConfig::paper_defaults().to_json_text()); });
}

}  // extern "C"
