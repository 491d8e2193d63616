#include "core/expectile.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "core/errors.hpp"

namespace exhurst {

Transform Transform::abs_pow(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::domain, "abs_pow transform requires beta > 0");
  }
  return {Kind::abs_pow, beta};
}

Transform Transform::from_string(const std::string& name, double beta) {
  if (name == "identity") return identity();
  if (name == "square") return square();
  if (name == "abs_pow") return abs_pow(beta);
  if (name == "log_abs") return log_abs();
  throw Error(ErrorCode::unknown_name, "unknown transform '" + name + "'");
}

double Transform::operator()(double y) const {
  switch (kind) {
    case Kind::identity: return y;
    case Kind::square: return y * y;
    case Kind::abs_pow: return std::pow(std::abs(y), beta);
    case Kind::log_abs: return std::log(std::abs(y));
  }
  return y;
}

std::string Transform::name() const {
  switch (kind) {
    case Kind::identity: return "identity";
    case Kind::square: return "square";
    case Kind::abs_pow: return "abs_pow";
    case Kind::log_abs: return "log_abs";
  }
  return "identity";
}

ExpectileSolver::ExpectileSolver(std::vector<double> data) : sorted_(std::move(data)) {
  if (sorted_.empty()) {
    throw Error(ErrorCode::invalid_argument, "sample expectile of an empty sample");
  }
  for (double v : sorted_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::invalid_argument, "sample expectile input contains a non-finite value");
    }
  }
  std::sort(sorted_.begin(), sorted_.end());
  prefix_.resize(sorted_.size() + 1);
  prefix_[0] = 0.0L;
  for (std::size_t i = 0; i < sorted_.size(); ++i) prefix_[i + 1] = prefix_[i] + sorted_[i];
}

double ExpectileSolver::psi(double theta, double p) const {
  const std::size_t n = sorted_.size();
  const std::size_t cnt = static_cast<std::size_t>(
      std::upper_bound(sorted_.begin(), sorted_.end(), theta) - sorted_.begin());
  const long double s_le = prefix_[cnt];
  const long double s_gt = prefix_[n] - s_le;
  const long double lo = (1.0L - p) * (s_le - static_cast<long double>(cnt) * theta);
  const long double hi = p * (s_gt - static_cast<long double>(n - cnt) * theta);
  return static_cast<double>((lo + hi) / static_cast<long double>(n));
}

double ExpectileSolver::solve(double p) const {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw Error(ErrorCode::domain, "expectile order p must lie strictly in (0,1), got " + std::to_string(p));
  }
  const std::size_t n = sorted_.size();

  // psi at breakpoint index i (values <= sorted_[i] count as the lower side;
  // ties sitting exactly at the breakpoint contribute zero either way).
  auto psi_at = [&](std::size_t i) -> long double {
    const long double theta = sorted_[i];
    const long double cnt = static_cast<long double>(i + 1);
    const long double s_le = prefix_[i + 1];
    const long double s_gt = prefix_[n] - s_le;
    return (1.0L - p) * (s_le - cnt * theta) + p * (s_gt - (static_cast<long double>(n) - cnt) * theta);
  };

  // Largest breakpoint with psi >= 0; psi(min) >= 0 always, so it exists.
  std::size_t lo = 0, hi = n - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    if (psi_at(mid) >= 0.0L) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }

  const long double cnt = static_cast<long double>(lo + 1);
  const long double s_le = prefix_[lo + 1];
  const long double s_gt = prefix_[n] - s_le;
  const long double num = (1.0L - p) * s_le + p * s_gt;
  const long double den = (1.0L - p) * cnt + p * (static_cast<long double>(n) - cnt);
  double theta = static_cast<double>(num / den);

  const double left = sorted_[lo];
  const double right = (lo + 1 < n) ? sorted_[lo + 1] : sorted_[n - 1];
  return std::clamp(theta, left, std::max(left, right));
}

double sample_expectile(std::span<const double> x, double p) {
  return ExpectileSolver(std::vector<double>(x.begin(), x.end())).solve(p);
}

void abs_power_inplace(std::vector<double>& v, double beta) {
  if (beta == 2.0) {
    for (double& x : v) x = x * x;
  } else if (beta == 1.0) {
    for (double& x : v) x = std::abs(x);
  } else {
    for (double& x : v) x = std::pow(std::abs(x), beta);
  }
}

double sample_quantile(std::span<const double> x, double q) {
  if (x.empty()) {
    throw Error(ErrorCode::invalid_argument, "quantile of an empty sample");
  }
  if (!(q >= 0.0) || !(q <= 1.0)) {
    throw Error(ErrorCode::domain, "quantile order must lie in [0,1]");
  }
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = q * static_cast<double>(sorted.size() - 1);
  const std::size_t k = static_cast<std::size_t>(h);
  if (k + 1 >= sorted.size()) return sorted.back();
  return sorted[k] + (h - static_cast<double>(k)) * (sorted[k + 1] - sorted[k]);
}

double trimmed_mean(std::span<const double> x, double trim) {
  if (x.empty()) {
    throw Error(ErrorCode::invalid_argument, "trimmed mean of an empty sample");
  }
  if (!(trim >= 0.0) || !(trim < 0.5)) {
    throw Error(ErrorCode::domain, "trim fraction must lie in [0, 0.5)");
  }
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t k = static_cast<std::size_t>(trim * static_cast<double>(sorted.size()));
  long double acc = 0.0L;
  for (std::size_t i = k; i < sorted.size() - k; ++i) acc += sorted[i];
  return static_cast<double>(acc / static_cast<long double>(sorted.size() - 2 * k));
}

namespace {

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// E|Y|^beta = 2^{beta/2} Gamma((beta+1)/2) / sqrt(pi)
double abs_moment(double beta) {
  return std::pow(2.0, 0.5 * beta) * std::tgamma(0.5 * (beta + 1.0)) / std::sqrt(std::numbers::pi);
}

// Distribution pieces of h(Y): cdf F(theta), partial moment
// M(theta) = E[h(Y) 1{h(Y) <= theta}], and mean mu = E[h(Y)].
struct TransformLaw {
  double mu;
  std::function<double(double)> cdf;
  std::function<double(double)> partial_moment;
};

TransformLaw law_for(const Transform& h) {
  using Kind = Transform::Kind;
  switch (h.kind) {
    case Kind::identity:
      return {0.0, [](double t) { return norm_cdf(t); }, [](double t) { return -norm_pdf(t); }};
    case Kind::square:
      return {1.0,
              [](double t) { return t <= 0.0 ? 0.0 : 2.0 * norm_cdf(std::sqrt(t)) - 1.0; },
              [](double t) {
                if (t <= 0.0) return 0.0;
                const double s = std::sqrt(t);
                return 2.0 * norm_cdf(s) - 1.0 - 2.0 * s * norm_pdf(s);
              }};
    case Kind::abs_pow: {
      const double beta = h.beta;
      return {abs_moment(beta),
              [beta](double t) { return t <= 0.0 ? 0.0 : 2.0 * norm_cdf(std::pow(t, 1.0 / beta)) - 1.0; },
              [beta](double t) {
                if (t <= 0.0) return 0.0;
                const double upper = std::pow(t, 1.0 / beta);
                thread_local boost::math::quadrature::tanh_sinh<double> integrator;
                return 2.0 * integrator.integrate(
                           [beta](double y) { return std::pow(y, beta) * norm_pdf(y); }, 0.0, upper,
                           1e-12);
              }};
    }
    case Kind::log_abs:
      return {-0.5 * (std::numbers::egamma + std::numbers::ln2),
              [](double t) { return 2.0 * norm_cdf(std::exp(t)) - 1.0; },
              [](double t) {
                const double upper = std::exp(t);
                thread_local boost::math::quadrature::tanh_sinh<double> integrator;
                // log singularity at 0 is integrable; tanh_sinh absorbs it
                return 2.0 * integrator.integrate(
                           [](double y) { return std::log(y) * norm_pdf(y); }, 0.0, upper, 1e-12);
              }};
  }
  throw Error(ErrorCode::internal, "unhandled transform kind");
}

}  // namespace

double theoretical_expectile(const Transform& h, double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw Error(ErrorCode::domain, "expectile order p must lie strictly in (0,1)");
  }
  const TransformLaw law = law_for(h);
  auto psi = [&](double theta) {
    const double F = law.cdf(theta);
    const double M = law.partial_moment(theta);
    return p * ((law.mu - M) - theta * (1.0 - F)) + (1.0 - p) * (M - theta * F);
  };

  // psi is strictly decreasing with psi(-inf) = +inf, psi(+inf) = -inf; for
  // the nonnegative transforms the root lies in (0, inf) and psi(0) = p*mu > 0.
  double lo, hi;
  if (h.kind == Transform::Kind::square || h.kind == Transform::Kind::abs_pow) {
    lo = 0.0;
    hi = std::max(1.0, 2.0 * law.mu);
    while (psi(hi) > 0.0) {
      hi *= 2.0;
      if (hi > 1e12) throw Error(ErrorCode::internal, "theoretical expectile bracketing failed (upper)");
    }
  } else {
    lo = law.mu - 1.0;
    hi = law.mu + 1.0;
    while (psi(lo) < 0.0) {
      lo = law.mu + 2.0 * (lo - law.mu);
      if (lo < -1e12) throw Error(ErrorCode::internal, "theoretical expectile bracketing failed (lower)");
    }
    while (psi(hi) > 0.0) {
      hi = law.mu + 2.0 * (hi - law.mu);
      if (hi > 1e12) throw Error(ErrorCode::internal, "theoretical expectile bracketing failed (upper)");
    }
  }

  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (psi(mid) >= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace exhurst
