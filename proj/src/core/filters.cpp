#include "core/filters.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace exhurst {

namespace {

constexpr double kMomentTol = 1e-10;

double moment(std::span<const double> a, int j) {
  double s = 0.0;
  for (std::size_t q = 0; q < a.size(); ++q) {
    s += (j == 0 ? 1.0 : std::pow(static_cast<double>(q), j)) * a[q];
  }
  return s;
}

}  // namespace

FilterSpec::FilterSpec(std::vector<double> coeffs, int order)
    : coeffs_(std::move(coeffs)), order_(order) {
  if (coeffs_.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "filter needs length >= 2 (l >= 1)");
  }
  if (order_ < 1) {
    throw Error(ErrorCode::invalid_argument, "filter order nu must be >= 1");
  }
  double inf_norm = 0.0;
  for (double c : coeffs_) inf_norm = std::max(inf_norm, std::abs(c));
  if (!(inf_norm > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "filter coefficients are all zero");
  }
  std::vector<double> unit(coeffs_.size());
  for (std::size_t q = 0; q < coeffs_.size(); ++q) unit[q] = coeffs_[q] / inf_norm;
  // Moment scale grows with the support; compare against l^j to keep the
  // tolerance meaningful for dilated filters.
  const double l = static_cast<double>(coeffs_.size() - 1);
  for (int j = 0; j < order_; ++j) {
    const double m = moment(unit, j);
    if (std::abs(m) > kMomentTol * std::pow(l, j)) {
      throw Error(ErrorCode::invalid_argument,
                  "filter moment " + std::to_string(j) + " does not vanish (got " + std::to_string(m) + ")");
    }
  }
  if (std::abs(moment(unit, order_)) <= kMomentTol * std::pow(l, order_)) {
    throw Error(ErrorCode::invalid_argument,
                "filter moment nu=" + std::to_string(order_) + " vanishes; declared order too low");
  }
}

FilterSpec FilterSpec::named(const std::string& name) {
  if (name == "inc1") {
    return FilterSpec({1.0, -1.0}, 1);
  }
  if (name == "d4") {
    // Daubechies-4 wavelet (high-pass) filter, two vanishing moments.
    return FilterSpec({0.48296291314453416, -0.83651630373780790, 0.22414386804201339,
                       0.12940952255126037},
                      2);
  }
  throw Error(ErrorCode::unknown_name, "unknown filter '" + name + "' (known: inc1, d4)");
}

std::vector<std::string> FilterSpec::known_names() { return {"inc1", "d4"}; }

FilterSpec FilterSpec::dilated(int m) const {
  if (m < 1) {
    throw Error(ErrorCode::invalid_argument, "dilation factor must be >= 1");
  }
  if (m == 1) return *this;
  std::vector<double> out(static_cast<std::size_t>(m) * support() + 1, 0.0);
  for (std::size_t j = 0; j < coeffs_.size(); ++j) out[j * static_cast<std::size_t>(m)] = coeffs_[j];
  return FilterSpec(std::move(out), order_);
}

std::vector<double> apply_filter(std::span<const double> x, const FilterSpec& a) {
  const std::size_t l = a.support();
  if (x.size() <= l) {
    throw Error(ErrorCode::short_series,
                "series of length " + std::to_string(x.size()) + " is too short for filter support " +
                    std::to_string(l));
  }
  const auto c = a.coeffs();
  std::vector<double> out(x.size() - l);
  for (std::size_t k = 0; k < out.size(); ++k) {
    double s = 0.0;
    for (std::size_t q = 0; q < c.size(); ++q) s += c[q] * x[k + l - q];
    out[k] = s;
  }
  return out;
}

std::vector<double> apply_dilated_filter(std::span<const double> x, const FilterSpec& base, int m) {
  if (m < 1) {
    throw Error(ErrorCode::invalid_argument, "dilation factor must be >= 1");
  }
  const std::size_t l = static_cast<std::size_t>(m) * base.support();
  if (x.size() <= l) {
    throw Error(ErrorCode::short_series,
                "series of length " + std::to_string(x.size()) + " is too short for filter support " +
                    std::to_string(l));
  }
  const auto c = base.coeffs();
  std::vector<double> out(x.size() - l);
  for (std::size_t k = 0; k < out.size(); ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) s += c[j] * x[k + l - j * static_cast<std::size_t>(m)];
    out[k] = s;
  }
  return out;
}

double kappa(const FilterSpec& a, double hurst) {
  if (!(hurst > 0.0) || !(hurst < 1.0)) {
    throw Error(ErrorCode::domain, "kappa: H must lie in (0,1)");
  }
  const auto c = a.coeffs();
  const double two_h = 2.0 * hurst;
  double s = 0.0;
  for (std::size_t q = 0; q < c.size(); ++q) {
    for (std::size_t qp = 0; qp < c.size(); ++qp) {
      if (q == qp) continue;
      const double d = std::abs(static_cast<double>(q) - static_cast<double>(qp));
      s += c[q] * c[qp] * std::pow(d, two_h);
    }
  }
  return -0.5 * s;
}

double filtered_autocovariance(const FilterSpec& a1, int m1, const FilterSpec& a2, int m2,
                               double hurst, double sigma2, std::int64_t lag) {
  if (!(hurst > 0.0) || !(hurst < 1.0)) {
    throw Error(ErrorCode::domain, "filtered_autocovariance: H must lie in (0,1)");
  }
  if (m1 < 1 || m2 < 1) {
    throw Error(ErrorCode::invalid_argument, "filtered_autocovariance: dilations must be >= 1");
  }
  const auto c1 = a1.coeffs();
  const auto c2 = a2.coeffs();
  const double two_h = 2.0 * hurst;
  double s = 0.0;
  for (std::size_t q = 0; q < c1.size(); ++q) {
    for (std::size_t r = 0; r < c2.size(); ++r) {
      const double d = std::abs(static_cast<double>(m1) * static_cast<double>(q) -
                                static_cast<double>(m2) * static_cast<double>(r) +
                                static_cast<double>(lag));
      if (d == 0.0) continue;  // 0^2H term contributes nothing
      s += c1[q] * c2[r] * std::pow(d, two_h);
    }
  }
  return -0.5 * sigma2 * s;
}

}  // namespace exhurst
