#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "core/contamination.hpp"
#include "core/estimators.hpp"

namespace exhurst {

struct PSelectConfig {
  std::vector<double> grid;        // strictly increasing, inside (0,1)
  int replications = 100;          // B
  ContaminationSpec contaminator;  // applied to every pilot replication
  FilterSpec filter = FilterSpec::named("d4");
  int num_scales = 5;
  double beta = 2.0;

  void validate() const;
  static std::vector<double> default_grid();  // 0.05, 0.10, ..., 0.95
};

struct PSelectResult {
  double p_opt;
  std::vector<std::pair<double, double>> mse_curve;  // (p, mse), one per grid point
  int dropped;                                       // degenerate pilot replications
  double h0;                                         // pilot ST estimate (possibly clamped)
  double sigma2_0;                                   // pilot scale estimate
  bool h0_clamped;
};

// Monte-Carlo selection of the expectile order: estimate (H0, sigma2_0) from
// x by the standard method, regenerate B contaminated fBm replicas at those
// parameters, and pick the grid p whose expectile estimator has the smallest
// mean squared error around H0. Ties break toward the p nearest 0.5.
// Deterministic in (x, cfg, seed).
PSelectResult select_p(const SamplePath& x, const PSelectConfig& cfg, std::uint64_t seed);

}  // namespace exhurst
