#pragma once

#include <span>
#include <string>
#include <vector>

#include "core/filters.hpp"
#include "core/gaussian_synth.hpp"

namespace exhurst {

// Per-scale statistic fed to the log-log regression and the divisor that maps
// the regression slope back to H:
//   expectile      log E^(p; |X^{a^m}|^beta)            slope / beta
//   expectile_log  E^(p; log|X^{a^m}|)                  slope / 1
//   st             log mean((X^{a^m})^2)                slope / 2
//   med            log median((X^{a^m})^2)              slope / 2
//   tm             log trimmed_mean((X^{a^m})^2, trim)  slope / 2
struct EstimatorConfig {
  enum class Method { expectile, expectile_log, st, med, tm };

  Method method = Method::st;
  double p = 0.5;       // expectile order, methods expectile / expectile_log
  double beta = 2.0;    // power of |.|, method expectile
  double trim = 0.05;   // per-tail trim fraction, method tm
  FilterSpec filter = FilterSpec::named("d4");
  int num_scales = 5;   // M, dilations m = 1..M

  void validate() const;
  std::string method_name() const;
  static Method method_from_string(const std::string& name);
};

struct ScaleStat {
  int m;
  double statistic;          // the per-scale statistic on its natural scale
  std::size_t sample_count;  // n - m*l
};

struct HurstEstimate {
  double h_hat;
  std::vector<ScaleStat> per_scale;
  EstimatorConfig::Method method;
};

// A_m = log m - (1/M) sum log m for m = 1..M; sums to zero.
std::vector<double> design_vector(int num_scales);

// H = (A . y) / (divisor * ||A||^2) for ordinates y_m, m = 1..M. Exposed so
// exact synthetic ordinates can drive the regression directly.
double regress_scales(std::span<const double> y, double divisor);

// Discrete-variations estimate of H on an fBm sample path. The estimate is
// invariant to the path scale (sigma moves only the regression intercept).
// Throws ErrorCode::degenerate_scale naming the scale m whenever a statistic
// is nonpositive where a log is required (or a filtered value is exactly zero
// for expectile_log).
HurstEstimate estimate_hurst(const SamplePath& x, const EstimatorConfig& cfg);

// Moment inversion at m=1: sigma2_hat = mean((X^a)^2) / kappa_{h_hat}^a.
double estimate_sigma2(const SamplePath& x, const FilterSpec& filter, double h_hat);

}  // namespace exhurst
