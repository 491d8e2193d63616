#include "core/contamination.hpp"

#include <cmath>
#include <numeric>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace exhurst {

ContaminationSpec::Kind ContaminationSpec::kind_from_string(const std::string& s) {
  if (s == "none") return Kind::none;
  if (s == "outliers") return Kind::outliers;
  if (s == "rounding") return Kind::rounding;
  if (s == "rounding-increments" || s == "rounding_increments") return Kind::rounding_increments;
  throw Error(ErrorCode::unknown_name,
              "unknown contaminator '" + s + "' (none|outliers|rounding|rounding-increments)");
}

const char* ContaminationSpec::kind_name() const noexcept {
  switch (kind) {
    case Kind::outliers: return "outliers";
    case Kind::rounding: return "rounding";
    case Kind::rounding_increments: return "rounding-increments";
    default: return "none";
  }
}

SamplePath add_outliers(const SamplePath& x, double fraction, double snr_db,
                        double sigma2_increment, std::uint64_t seed) {
  if (!(fraction >= 0.0) || !(fraction < 1.0)) {
    throw Error(ErrorCode::domain, "outlier fraction must lie in [0,1)");
  }
  if (!std::isfinite(snr_db)) {
    throw Error(ErrorCode::domain, "snr_db must be finite");
  }
  if (!(sigma2_increment > 0.0)) {
    throw Error(ErrorCode::domain, "sigma2_increment must be positive");
  }

  const std::size_t n = x.values.size();
  const std::size_t k = static_cast<std::size_t>(fraction * static_cast<double>(n));
  std::vector<double> incr = increments(x.values);

  if (k > 0) {
    // Partial Fisher-Yates over the increment indices, then Gaussian noise
    // with variance sigma2_increment * 10^(-snr/10); the index draws and the
    // noise draws come from separate derived streams so k does not shift the
    // noise sequence.
    std::vector<std::uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0u);
    SplitMix64 pick(mix_seed(seed, 1));
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(pick.uniform01() * static_cast<double>(n - i));
      std::swap(idx[i], idx[std::min(j, n - 1)]);
    }
    const double noise_sd = std::sqrt(sigma2_increment * std::pow(10.0, -snr_db / 10.0));
    NormalSampler noise(mix_seed(seed, 2));
    for (std::size_t i = 0; i < k; ++i) incr[idx[i]] += noise_sd * noise.next();
  }

  SamplePath out;
  out.values.resize(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += incr[i];
    out.values[i] = acc;
  }
  out.meta = x.meta;
  out.meta.contamination = ContaminationTag::outliers;
  return out;
}

SamplePath round_path(const SamplePath& x) {
  SamplePath out = x;
  for (double& v : out.values) v = std::floor(v);
  out.meta.contamination = ContaminationTag::rounded;
  return out;
}

SamplePath round_increments(const SamplePath& x) {
  const std::vector<double> incr = increments(x.values);
  SamplePath out;
  out.values.resize(x.values.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < incr.size(); ++i) {
    acc += std::round(incr[i]);
    out.values[i] = acc;
  }
  out.meta = x.meta;
  out.meta.contamination = ContaminationTag::rounded_increments;
  return out;
}

SamplePath contaminate(const SamplePath& x, const ContaminationSpec& spec, double sigma2_increment,
                       std::uint64_t seed) {
  switch (spec.kind) {
    case ContaminationSpec::Kind::outliers:
      return add_outliers(x, spec.fraction, spec.snr_db, sigma2_increment, seed);
    case ContaminationSpec::Kind::rounding:
      return round_path(x);
    case ContaminationSpec::Kind::rounding_increments:
      return round_increments(x);
    default:
      return x;
  }
}

}  // namespace exhurst
