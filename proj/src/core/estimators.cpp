#include "core/estimators.hpp"

#include <cmath>

#include "core/errors.hpp"
#include "core/expectile.hpp"

namespace exhurst {

void EstimatorConfig::validate() const {
  if (num_scales < 2) {
    throw Error(ErrorCode::invalid_argument, "the scale regression needs M >= 2 dilations");
  }
  if (method == Method::expectile || method == Method::expectile_log) {
    if (!(p > 0.0) || !(p < 1.0)) {
      throw Error(ErrorCode::domain, "expectile order p must lie strictly in (0,1)");
    }
  }
  if (method == Method::expectile && !(beta > 0.0)) {
    throw Error(ErrorCode::domain, "beta must be positive");
  }
  if (method == Method::tm && (!(trim >= 0.0) || !(trim < 0.5))) {
    throw Error(ErrorCode::domain, "trim fraction must lie in [0, 0.5)");
  }
}

std::string EstimatorConfig::method_name() const {
  switch (method) {
    case Method::expectile: return "expectile";
    case Method::expectile_log: return "expectile_log";
    case Method::st: return "st";
    case Method::med: return "med";
    case Method::tm: return "tm";
  }
  return "st";
}

EstimatorConfig::Method EstimatorConfig::method_from_string(const std::string& name) {
  if (name == "expectile" || name == "E" || name == "e") return Method::expectile;
  if (name == "expectile_log" || name == "ELOG" || name == "elog") return Method::expectile_log;
  if (name == "st" || name == "ST") return Method::st;
  if (name == "med" || name == "MED") return Method::med;
  if (name == "tm" || name == "TM") return Method::tm;
  throw Error(ErrorCode::unknown_name, "unknown estimation method '" + name + "'");
}

std::vector<double> design_vector(int num_scales) {
  if (num_scales < 2) {
    throw Error(ErrorCode::invalid_argument, "design vector needs M >= 2");
  }
  std::vector<double> a(static_cast<std::size_t>(num_scales));
  double mean = 0.0;
  for (int m = 1; m <= num_scales; ++m) mean += std::log(static_cast<double>(m));
  mean /= static_cast<double>(num_scales);
  for (int m = 1; m <= num_scales; ++m) a[static_cast<std::size_t>(m - 1)] = std::log(static_cast<double>(m)) - mean;
  return a;
}

double regress_scales(std::span<const double> y, double divisor) {
  const std::vector<double> a = design_vector(static_cast<int>(y.size()));
  double dot = 0.0, norm2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * y[i];
    norm2 += a[i] * a[i];
  }
  return dot / (divisor * norm2);
}

namespace {

double mean_of(std::span<const double> x) {
  long double acc = 0.0L;
  for (double v : x) acc += v;
  return static_cast<double>(acc / static_cast<long double>(x.size()));
}

}  // namespace

HurstEstimate estimate_hurst(const SamplePath& x, const EstimatorConfig& cfg) {
  cfg.validate();
  if (x.meta.kind == PathKind::fgn) {
    throw Error(ErrorCode::invalid_argument,
                "estimate_hurst expects an fBm path (cumulative), not fGn increments");
  }
  const std::size_t l = cfg.filter.support();
  const std::size_t n = x.values.size();
  const std::size_t min_len = static_cast<std::size_t>(cfg.num_scales) * l + 1;
  if (n <= min_len) {
    throw Error(ErrorCode::short_series, "path of length " + std::to_string(n) +
                                             " is too short for M=" + std::to_string(cfg.num_scales) +
                                             " dilations of a support-" + std::to_string(l) + " filter");
  }

  using Method = EstimatorConfig::Method;
  double divisor = 2.0;
  if (cfg.method == Method::expectile) divisor = cfg.beta;
  if (cfg.method == Method::expectile_log) divisor = 1.0;

  std::vector<double> y(static_cast<std::size_t>(cfg.num_scales));
  HurstEstimate out;
  out.method = cfg.method;
  out.per_scale.reserve(y.size());

  for (int m = 1; m <= cfg.num_scales; ++m) {
    std::vector<double> fx = apply_dilated_filter(x.values, cfg.filter, m);
    const std::size_t count = fx.size();

    double stat = 0.0;
    bool needs_log = true;
    switch (cfg.method) {
      case Method::expectile: {
        abs_power_inplace(fx, cfg.beta);
        stat = ExpectileSolver(std::move(fx)).solve(cfg.p);
        break;
      }
      case Method::expectile_log: {
        for (double& v : fx) {
          if (v == 0.0) {
            throw Error(ErrorCode::degenerate_scale,
                        "scale m=" + std::to_string(m) + ": filtered value is exactly zero, log|.| undefined");
          }
          v = std::log(std::abs(v));
        }
        stat = ExpectileSolver(std::move(fx)).solve(cfg.p);
        needs_log = false;
        break;
      }
      case Method::st: {
        for (double& v : fx) v = v * v;
        stat = mean_of(fx);
        break;
      }
      case Method::med: {
        for (double& v : fx) v = v * v;
        stat = sample_quantile(fx, 0.5);
        break;
      }
      case Method::tm: {
        for (double& v : fx) v = v * v;
        stat = trimmed_mean(fx, cfg.trim);
        break;
      }
    }

    if (needs_log && !(stat > 0.0)) {
      throw Error(ErrorCode::degenerate_scale,
                  "scale m=" + std::to_string(m) + ": statistic " + std::to_string(stat) +
                      " is nonpositive, log regression undefined");
    }
    y[static_cast<std::size_t>(m - 1)] = needs_log ? std::log(stat) : stat;
    out.per_scale.push_back({m, stat, count});
  }

  out.h_hat = regress_scales(y, divisor);
  return out;
}

double estimate_sigma2(const SamplePath& x, const FilterSpec& filter, double h_hat) {
  if (!(h_hat > 0.0) || !(h_hat < 1.0)) {
    throw Error(ErrorCode::domain, "estimate_sigma2: H estimate must lie in (0,1)");
  }
  std::vector<double> fx = apply_filter(x.values, filter);
  for (double& v : fx) v = v * v;
  return mean_of(fx) / kappa(filter, h_hat);
}

}  // namespace exhurst
