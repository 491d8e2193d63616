#include "core/pselect.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/expectile.hpp"
#include "core/rng.hpp"

namespace exhurst {

void PSelectConfig::validate() const {
  if (grid.empty()) {
    throw Error(ErrorCode::invalid_argument, "p grid must be nonempty");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || !(grid[i] < 1.0)) {
      throw Error(ErrorCode::domain, "p grid values must lie strictly in (0,1)");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw Error(ErrorCode::invalid_argument, "p grid must be strictly increasing");
    }
  }
  if (replications < 2) {
    throw Error(ErrorCode::invalid_argument, "p selection needs B >= 2 replications");
  }
  if (!(beta > 0.0)) {
    throw Error(ErrorCode::domain, "beta must be positive");
  }
}

std::vector<double> PSelectConfig::default_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 19; ++i) g.push_back(0.05 * i);
  return g;
}

PSelectResult select_p(const SamplePath& x, const PSelectConfig& cfg, std::uint64_t seed) {
  cfg.validate();

  PSelectResult res{};

  EstimatorConfig pilot;
  pilot.method = EstimatorConfig::Method::st;
  pilot.filter = cfg.filter;
  pilot.num_scales = cfg.num_scales;
  res.h0 = estimate_hurst(x, pilot).h_hat;
  res.h0_clamped = false;
  if (res.h0 < 0.01 || res.h0 > 0.99) {
    res.h0 = std::clamp(res.h0, 0.01, 0.99);
    res.h0_clamped = true;  // keeps fGn synthesis valid under heavy contamination
  }
  res.sigma2_0 = estimate_sigma2(x, cfg.filter, res.h0);
  if (!(res.sigma2_0 > 0.0) || !std::isfinite(res.sigma2_0)) {
    throw Error(ErrorCode::degenerate_scale, "pilot sigma2 estimate is not positive");
  }

  const CirculantFgnSampler sampler(HurstParams(res.h0, std::sqrt(res.sigma2_0)), x.values.size());
  const std::size_t l = cfg.filter.support();

  std::vector<double> mse(cfg.grid.size(), 0.0);
  res.dropped = 0;
  int kept = 0;

  for (int b = 0; b < cfg.replications; ++b) {
    const std::uint64_t rep_seed = mix_seed(seed, static_cast<std::uint64_t>(b) + 1);
    SamplePath replica = sampler.sample_fbm(rep_seed);
    replica = contaminate(replica, cfg.contaminator, res.sigma2_0, mix_seed(rep_seed, 0xC0u));

    // Per-scale solvers of |X^{a^m}|^beta are shared by the whole p grid. A
    // scale whose filtered values are all zero has expectile 0 at every p;
    // that replication is degenerate as a whole and is dropped.
    std::vector<ExpectileSolver> solvers;
    solvers.reserve(static_cast<std::size_t>(cfg.num_scales));
    bool degenerate = false;
    for (int m = 1; m <= cfg.num_scales && !degenerate; ++m) {
      std::vector<double> fx = apply_dilated_filter(replica.values, cfg.filter, m);
      abs_power_inplace(fx, cfg.beta);
      solvers.emplace_back(std::move(fx));
      if (!(solvers.back().max() > 0.0)) degenerate = true;
    }
    // Estimate for every grid p before touching the accumulators, so a
    // degenerate replication is dropped from the whole curve at once.
    std::vector<double> h_b(cfg.grid.size());
    std::vector<double> y(static_cast<std::size_t>(cfg.num_scales));
    for (std::size_t gi = 0; gi < cfg.grid.size() && !degenerate; ++gi) {
      for (int m = 0; m < cfg.num_scales; ++m) {
        const double stat = solvers[static_cast<std::size_t>(m)].solve(cfg.grid[gi]);
        if (!(stat > 0.0)) {
          degenerate = true;
          break;
        }
        y[static_cast<std::size_t>(m)] = std::log(stat);
      }
      if (!degenerate) h_b[gi] = regress_scales(y, cfg.beta);
    }
    if (degenerate) {
      ++res.dropped;
      continue;
    }
    ++kept;
    for (std::size_t gi = 0; gi < cfg.grid.size(); ++gi) {
      const double err = h_b[gi] - res.h0;
      mse[gi] += err * err;
    }
  }

  if (kept == 0) {
    throw Error(ErrorCode::degenerate_scale, "all p-selection replications were degenerate");
  }

  res.mse_curve.reserve(cfg.grid.size());
  for (std::size_t gi = 0; gi < cfg.grid.size(); ++gi) {
    res.mse_curve.emplace_back(cfg.grid[gi], mse[gi] / static_cast<double>(kept));
  }

  std::size_t best = 0;
  for (std::size_t gi = 1; gi < cfg.grid.size(); ++gi) {
    const double cur = res.mse_curve[gi].second;
    const double best_mse = res.mse_curve[best].second;
    if (cur < best_mse ||
        (cur == best_mse && std::abs(cfg.grid[gi] - 0.5) < std::abs(cfg.grid[best] - 0.5))) {
      best = gi;
    }
  }
  res.p_opt = cfg.grid[best];
  return res;
}

}  // namespace exhurst
