#pragma once

#include <cstdint>

#include "core/gaussian_synth.hpp"

namespace exhurst {

struct ContaminationSpec {
  enum class Kind { none, outliers, rounding, rounding_increments };

  Kind kind = Kind::none;
  double fraction = 0.05;  // share of increments hit by outliers, in [0,1)
  double snr_db = -20.0;   // 10*log10(sigma2_increment / sigma2_noise)

  static Kind kind_from_string(const std::string& s);
  const char* kind_name() const noexcept;
};

// Contaminates floor(fraction*n) increments (chosen uniformly without
// replacement, seeded) with i.i.d. Gaussian noise of variance
// sigma2_increment * 10^(-snr_db/10), then rebuilds the path by cumulative
// sum so every dilation scale sees the outliers. fraction may be 0 (identity).
SamplePath add_outliers(const SamplePath& x, double fraction, double snr_db,
                        double sigma2_increment, std::uint64_t seed);

// Integer part of the path, floor convention; idempotent.
SamplePath round_path(const SamplePath& x);

// Rounds every increment to the nearest integer and re-accumulates. This is
// the rounding the paper-style benchmark tables are built on: the kept
// rounding error forms an H=1/2 random-walk component that pulls estimates
// toward 1/2 at every dilation scale. Idempotent (integer increments are
// fixed points).
SamplePath round_increments(const SamplePath& x);

// Applies spec to x; sigma2_increment feeds the outlier SNR and is ignored
// otherwise. seed is consumed only by the outlier draw.
SamplePath contaminate(const SamplePath& x, const ContaminationSpec& spec, double sigma2_increment,
                       std::uint64_t seed);

}  // namespace exhurst
