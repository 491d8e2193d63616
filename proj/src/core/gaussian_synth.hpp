#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "core/fft.hpp"

namespace exhurst {

// Parameters of a fractional Brownian motion: Hurst exponent H in (0,1)
// strictly and scale sigma = sqrt(E[B_H(1)^2]) > 0.
struct HurstParams {
  double hurst;
  double sigma;

  HurstParams(double hurst_, double sigma_);  // validates, throws ErrorCode::domain
};

enum class PathKind { fgn, fbm };
enum class ContaminationTag { none, outliers, rounded, rounded_increments };

struct PathMeta {
  double hurst = std::numeric_limits<double>::quiet_NaN();
  double sigma = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  PathKind kind = PathKind::fbm;
  ContaminationTag contamination = ContaminationTag::none;
};

// A finite sample path with provenance. For kind=fbm the stored values are
// X(1..n) = sigma*B_H(1..n) at unit spacing; B(0)=0 is not stored, so
// values[0] is itself the first increment.
struct SamplePath {
  std::vector<double> values;
  PathMeta meta;
};

const char* to_string(PathKind kind) noexcept;
const char* to_string(ContaminationTag tag) noexcept;
PathKind path_kind_from_string(const std::string& s);
ContaminationTag contamination_from_string(const std::string& s);

// Autocovariance of fractional Gaussian noise at unit spacing:
//   gamma(k) = sigma2/2 * (|k+1|^2H - 2|k|^2H + |k-1|^2H),   gamma(0) = sigma2.
double fgn_autocovariance(double hurst, double sigma2, std::int64_t lag);

// Exact stationary Gaussian synthesis by circulant embedding (Wood-Chan).
// The embedding size is the smallest power of two g >= 2(n-1); eigenvalues of
// the circulant extension are computed once at construction and must be
// nonnegative up to a 1e-9 relative tolerance (tiny negatives are clipped,
// anything worse throws ErrorCode::embedding). sample_* are const and
// deterministic in the seed, so one sampler serves many threads.
class CirculantFgnSampler {
 public:
  CirculantFgnSampler(const HurstParams& params, std::size_t n);

  SamplePath sample_fgn(std::uint64_t seed) const;
  SamplePath sample_fbm(std::uint64_t seed) const;

  std::size_t path_length() const noexcept { return n_; }
  std::size_t embedding_size() const noexcept { return g_; }
  std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }

 private:
  HurstParams params_;
  std::size_t n_;
  std::size_t g_;
  Radix2Fft fft_;
  std::vector<double> eigenvalues_;  // clipped spectrum of the circulant row
};

// One-shot conveniences; construction cost is one FFT of the embedding row.
SamplePath simulate_fgn(const HurstParams& params, std::size_t n, std::uint64_t seed);
SamplePath simulate_fbm(const HurstParams& params, std::size_t n, std::uint64_t seed);

// First differences with the convention values[0] = first increment (B(0)=0),
// so increments(simulate_fbm(p,n,s)) == simulate_fgn(p,n,s).values exactly.
std::vector<double> increments(std::span<const double> fbm_values);

}  // namespace exhurst
