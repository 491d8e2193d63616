#include <cmath>
#include <doctest.h>
#include <vector>

#include "core/contamination.hpp"
#include "core/errors.hpp"
#include "core/estimators.hpp"
#include "core/pselect.hpp"

using namespace exhurst;

namespace {

PSelectConfig base_config() {
  PSelectConfig cfg;
  cfg.grid = PSelectConfig::default_grid();
  cfg.replications = 100;
  return cfg;
}

}  // namespace

TEST_CASE("config validation") {
  PSelectConfig cfg = base_config();
  cfg.grid.clear();
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.grid = {0.2, 0.2};
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.grid = {0.0, 0.5};
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.grid = {0.2, 0.8};
  cfg.replications = 1;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.replications = 10;
  cfg.beta = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK(PSelectConfig::default_grid().size() == 19);
}

TEST_CASE("degenerate one-point grid returns that point") {
  const SamplePath path = simulate_fbm(HurstParams(0.5, 1.0), 400, 9);
  PSelectConfig cfg = base_config();
  cfg.grid = {0.3};
  cfg.replications = 10;
  const PSelectResult res = select_p(path, cfg, 77);
  CHECK(res.p_opt == 0.3);
  REQUIRE(res.mse_curve.size() == 1);
  CHECK(res.mse_curve[0].first == 0.3);
  CHECK(res.mse_curve[0].second >= 0.0);
}

TEST_CASE("selection is deterministic and well-formed on clean fbm") {
  const SamplePath path = simulate_fbm(HurstParams(0.5, 1.0), 500, 31);
  PSelectConfig cfg = base_config();
  const PSelectResult a = select_p(path, cfg, 2024);
  const PSelectResult b = select_p(path, cfg, 2024);
  CHECK(a.p_opt == b.p_opt);
  REQUIRE(a.mse_curve.size() == cfg.grid.size());
  for (std::size_t i = 0; i < a.mse_curve.size(); ++i) {
    CHECK(a.mse_curve[i].first == cfg.grid[i]);
    CHECK(a.mse_curve[i].second == b.mse_curve[i].second);
    CHECK(std::isfinite(a.mse_curve[i].second));
    CHECK(a.mse_curve[i].second >= 0.0);
  }
  CHECK(a.dropped == 0);
  CHECK_FALSE(a.h0_clamped);
  CHECK(a.sigma2_0 > 0.0);

  // pilot H0 echoes the standard estimate of the input
  EstimatorConfig st;
  CHECK(a.h0 == doctest::Approx(estimate_hurst(path, st).h_hat).epsilon(1e-14));

  // clean data: the central region is near-optimal (ST ~ E(0.5))
  double mse_at_half = 0.0;
  for (const auto& [p, mse] : a.mse_curve) {
    if (p == 0.5) mse_at_half = mse;
  }
  double mse_opt = 1e300;
  for (const auto& [p, mse] : a.mse_curve) mse_opt = std::min(mse_opt, mse);
  CHECK(mse_opt <= 1.1 * mse_at_half);
  CHECK(mse_opt > 0.0);
}

TEST_CASE("increment-rounding contamination pushes the optimum away from low p") {
  // H=0.2 rounded-increment fBm: the low-p expectile overshoots hardest
  // (E(0.2) ~ 0.34 vs E(0.8) ~ 0.28 in the benchmark tables), so its MSE
  // around the pilot estimate dominates
  const SamplePath clean = simulate_fbm(HurstParams(0.2, 0.5), 1000, 555);
  const SamplePath observed = round_increments(clean);

  PSelectConfig cfg = base_config();
  cfg.replications = 60;
  cfg.contaminator.kind = ContaminationSpec::Kind::rounding_increments;
  const PSelectResult res = select_p(observed, cfg, 99);

  double mse_low = 0.0;
  double mse_best = 1e300;
  for (const auto& [p, mse] : res.mse_curve) {
    if (std::abs(p - 0.1) < 1e-9) mse_low = mse;
    mse_best = std::min(mse_best, mse);
  }
  CHECK(mse_best < mse_low);
  CHECK(res.p_opt > 0.15);
  CHECK(res.dropped <= 6);  // <= 10% of B
}

TEST_CASE("heavily contaminated pilot estimates are clamped with a flag") {
  // a near-constant path drives the ST pilot estimate far above 1
  SamplePath weird;
  weird.values.resize(300);
  for (std::size_t i = 0; i < weird.values.size(); ++i) {
    weird.values[i] = std::pow(static_cast<double>(i + 1), 1.6) * 1e-3;
  }
  PSelectConfig cfg = base_config();
  cfg.replications = 10;
  const PSelectResult res = select_p(weird, cfg, 5);
  CHECK(res.h0_clamped);
  CHECK(res.h0 >= 0.01);
  CHECK(res.h0 <= 0.99);
}
