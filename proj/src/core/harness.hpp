#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/contamination.hpp"
#include "core/estimators.hpp"
#include "core/expectile.hpp"
#include "core/pselect.hpp"

namespace exhurst {

struct ScenarioSpec {
  enum class Model { standard, outliers, rounded };

  Model model = Model::standard;
  double hurst = 0.5;
  double sigma = 1.0;
  std::size_t n = 500;

  static Model model_from_string(const std::string& s);
  const char* model_name() const noexcept;
  std::string label() const;  // e.g. "standard H=0.2 n=500"
};

struct MethodSpec {
  enum class Kind { expectile_fixed, expectile_popt, expectile_log, st, med, tm };

  Kind kind = Kind::st;
  double p = 0.5;  // order for expectile_fixed / expectile_log

  std::string label() const;  // table row label, e.g. "E(p=0.2)"
  static Kind kind_from_string(const std::string& s);
};

struct FigureConfig {
  bool enabled = true;
  std::vector<double> hursts = {0.3, 0.7};
  std::size_t n = 500;                    // sample size for figs 1-2
  int replications = 200;                 // desk scale
  std::vector<double> p_grid;             // defaults to 0.1..0.9
  std::vector<std::size_t> n_grid = {250, 500, 1000, 2000, 4000};  // fig 3
};

struct ExperimentConfig {
  std::vector<ScenarioSpec> scenarios;
  std::vector<MethodSpec> methods;
  int replications = 200;
  std::uint64_t master_seed = 20240101;

  // estimator defaults shared by every method
  std::string filter_name = "d4";
  int num_scales = 5;
  double beta = 2.0;
  double trim = 0.05;

  // contamination parameters for scenario model (b). The benchmark tables
  // correspond to 0.5% of increments hit at -20 dB; see README.
  double outlier_fraction = 0.005;
  double outlier_snr_db = -20.0;

  // p^opt selection
  std::vector<double> p_select_grid;  // defaults to 0.05..0.95
  int p_select_replications = 100;    // B

  FigureConfig figures;
  unsigned threads = 0;  // 0 = hardware concurrency

  void validate() const;
  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig paper_defaults();  // Tables 1-2 + figures, desk scale
  std::string to_json_text() const;
};

struct CellStats {
  double mean = 0.0;
  double sd = 0.0;
  double mae = 0.0;  // mean |H_hat - H_true| over kept replications
  int failures = 0;  // replications excluded from this cell
  int count = 0;     // replications aggregated
};

struct SlopeEntry {
  std::string transform;
  double hurst;
  double slope;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<std::vector<CellStats>> cells;            // [scenario][method]
  std::vector<std::map<double, int>> popt_histograms;   // [scenario], empty if no popt method
  std::vector<SlopeEntry> fig3_slopes;                  // filled by run_experiment
  std::vector<std::string> log_lines;

  std::string tables_csv() const;  // paper-shaped: one row per (H, method)
  std::string report_json() const;
};

// One row of the figure CSVs.
struct ExpectileSampleRow {
  std::string transform;
  double hurst;
  double p;
  int rep;
  double value;
  double theoretical;
};

struct VarianceScalingRow {
  std::string transform;
  double hurst;
  std::size_t n;
  double mean_variance;  // (1/|p_grid|) sum_p Var_rep[expectile_p]
};

struct VarianceScalingResult {
  std::vector<VarianceScalingRow> rows;
  std::map<std::string, double> slopes;  // transform -> log-log OLS slope
};

// Tables 1-2 style Monte-Carlo study. Deterministic in (config, master_seed);
// replication seeds are mix(mix(master, scenario_index), rep), so the path
// set is invariant to the method list.
ExperimentReport run_tables(const ExperimentConfig& cfg);

// Sample expectiles of h(fGn) per (transform, p, replication) with the
// theoretical N(0,1) expectile curve for overlay; the fGn has unit variance.
std::vector<ExpectileSampleRow> run_expectile_convergence(double hurst,
                                                          const std::vector<Transform>& transforms,
                                                          const std::vector<double>& p_grid,
                                                          std::size_t n, int replications,
                                                          std::uint64_t seed, unsigned threads = 0);

// Mean (over p = p_grid) of empirical expectile variances per sample size,
// plus the fitted log-log slope per transform (Theorem 1's rate check).
VarianceScalingResult run_variance_scaling(double hurst, const std::vector<Transform>& transforms,
                                           const std::vector<double>& p_grid,
                                           const std::vector<std::size_t>& n_grid, int replications,
                                           std::uint64_t seed, unsigned threads = 0);

// Full experiment: tables + figures written to out_dir as tables.csv,
// fig1.csv, fig2.csv, fig3.csv, report.json, log.txt. Returns the report.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

std::string expectile_rows_csv(const std::vector<ExpectileSampleRow>& rows);
std::string variance_rows_csv(const std::vector<VarianceScalingRow>& rows);

// PathMeta <-> JSON sidecar text (schema owned by the library; the CLI just
// moves it between files and handles).
std::string path_meta_to_json(const PathMeta& meta, std::size_t n);
PathMeta path_meta_from_json(const std::string& text);

}  // namespace exhurst
