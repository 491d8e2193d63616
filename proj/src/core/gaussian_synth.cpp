#include "core/gaussian_synth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace exhurst {

HurstParams::HurstParams(double hurst_, double sigma_) : hurst(hurst_), sigma(sigma_) {
  if (!(hurst > 0.0) || !(hurst < 1.0)) {
    throw Error(ErrorCode::domain, "Hurst exponent must lie strictly in (0,1), got " + std::to_string(hurst_));
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::domain, "sigma must be positive and finite, got " + std::to_string(sigma_));
  }
}

const char* to_string(PathKind kind) noexcept { return kind == PathKind::fgn ? "fgn" : "fbm"; }

const char* to_string(ContaminationTag tag) noexcept {
  switch (tag) {
    case ContaminationTag::outliers: return "outliers";
    case ContaminationTag::rounded: return "rounded";
    case ContaminationTag::rounded_increments: return "rounded_increments";
    default: return "none";
  }
}

PathKind path_kind_from_string(const std::string& s) {
  if (s == "fgn") return PathKind::fgn;
  if (s == "fbm") return PathKind::fbm;
  throw Error(ErrorCode::unknown_name, "unknown path kind '" + s + "' (expected fgn|fbm)");
}

ContaminationTag contamination_from_string(const std::string& s) {
  if (s == "none") return ContaminationTag::none;
  if (s == "outliers") return ContaminationTag::outliers;
  if (s == "rounded") return ContaminationTag::rounded;
  if (s == "rounded_increments") return ContaminationTag::rounded_increments;
  throw Error(ErrorCode::unknown_name, "unknown contamination tag '" + s + "'");
}

double fgn_autocovariance(double hurst, double sigma2, std::int64_t lag) {
  if (!(hurst > 0.0) || !(hurst < 1.0)) {
    throw Error(ErrorCode::domain, "fgn_autocovariance: H must lie in (0,1)");
  }
  if (!(sigma2 > 0.0)) {
    throw Error(ErrorCode::domain, "fgn_autocovariance: sigma2 must be positive");
  }
  if (lag < 0) {
    throw Error(ErrorCode::invalid_argument, "fgn_autocovariance: lag must be >= 0");
  }
  if (lag == 0) return sigma2;
  const double two_h = 2.0 * hurst;
  const double k = static_cast<double>(lag);
  return 0.5 * sigma2 * (std::pow(k + 1.0, two_h) - 2.0 * std::pow(k, two_h) + std::pow(k - 1.0, two_h));
}

namespace {

std::size_t embedding_size_for(std::size_t n) {
  // smallest power of two g >= 2(n-1)
  const std::size_t target = 2 * (n - 1);
  std::size_t g = 1;
  while (g < target) g <<= 1;
  return std::max<std::size_t>(g, 2);
}

}  // namespace

CirculantFgnSampler::CirculantFgnSampler(const HurstParams& params, std::size_t n)
    : params_(params), n_(n), g_(n >= 2 ? embedding_size_for(n) : 0), fft_(n >= 2 ? embedding_size_for(n) : 1) {
  if (n < 2) {
    throw Error(ErrorCode::invalid_argument, "path length must be >= 2, got " + std::to_string(n));
  }
  const double sigma2 = params_.sigma * params_.sigma;

  // First row of the circulant extension: gamma(0..g/2), then mirrored back
  // down to gamma(1).
  std::vector<std::complex<double>> row(g_);
  for (std::size_t k = 0; k <= g_ / 2; ++k) {
    row[k] = fgn_autocovariance(params_.hurst, sigma2, static_cast<std::int64_t>(k));
  }
  for (std::size_t k = g_ / 2 + 1; k < g_; ++k) row[k] = row[g_ - k];

  fft_.forward(row);

  eigenvalues_.resize(g_);
  double max_eig = 0.0;
  for (std::size_t k = 0; k < g_; ++k) {
    eigenvalues_[k] = row[k].real();  // spectrum of a symmetric circulant is real
    max_eig = std::max(max_eig, eigenvalues_[k]);
  }
  const double tol = -1e-9 * max_eig;
  for (std::size_t k = 0; k < g_; ++k) {
    if (eigenvalues_[k] < tol) {
      throw Error(ErrorCode::embedding,
                  "circulant embedding failed: eigenvalue " + std::to_string(eigenvalues_[k]) +
                      " at H=" + std::to_string(params_.hurst) + ", n=" + std::to_string(n_));
    }
    if (eigenvalues_[k] < 0.0) eigenvalues_[k] = 0.0;
  }
}

SamplePath CirculantFgnSampler::sample_fgn(std::uint64_t seed) const {
  NormalSampler normal(seed);
  const double g = static_cast<double>(g_);
  std::vector<std::complex<double>> a(g_);

  // Hermitian-symmetric Gaussian spectrum; draw order is fixed as k = 0,
  // 1..g/2-1 (pairs), g/2. The DFT of it carries two independent real fGn
  // samples (real and imaginary parts); the second is discarded.
  a[0] = std::sqrt(eigenvalues_[0] / g) * normal.next();
  for (std::size_t k = 1; k < g_ / 2; ++k) {
    const double scale = std::sqrt(eigenvalues_[k] / (2.0 * g));
    const double u = normal.next();
    const double v = normal.next();
    a[k] = {scale * u, scale * v};
    a[g_ - k] = std::conj(a[k]);
  }
  a[g_ / 2] = std::sqrt(eigenvalues_[g_ / 2] / g) * normal.next();

  fft_.forward(a);

  SamplePath path;
  path.values.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) path.values[i] = a[i].real();
  path.meta = {params_.hurst, params_.sigma, seed, PathKind::fgn, ContaminationTag::none};
  return path;
}

SamplePath CirculantFgnSampler::sample_fbm(std::uint64_t seed) const {
  SamplePath path = sample_fgn(seed);
  double acc = 0.0;
  for (auto& v : path.values) {
    acc += v;
    v = acc;
  }
  path.meta.kind = PathKind::fbm;
  return path;
}

SamplePath simulate_fgn(const HurstParams& params, std::size_t n, std::uint64_t seed) {
  return CirculantFgnSampler(params, n).sample_fgn(seed);
}

SamplePath simulate_fbm(const HurstParams& params, std::size_t n, std::uint64_t seed) {
  return CirculantFgnSampler(params, n).sample_fbm(seed);
}

std::vector<double> increments(std::span<const double> fbm_values) {
  std::vector<double> out(fbm_values.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < fbm_values.size(); ++i) {
    out[i] = fbm_values[i] - prev;
    prev = fbm_values[i];
  }
  return out;
}

}  // namespace exhurst
