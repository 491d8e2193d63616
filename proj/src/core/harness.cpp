#include "core/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace exhurst {

namespace {

using nlohmann::json;

// derived-seed stream tags (see rng.hpp for the mixing scheme)
constexpr std::uint64_t kStreamContaminate = 3;
constexpr std::uint64_t kStreamPSelect = 4;

std::string format_double(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

double slope_of_loglog(const std::vector<std::size_t>& n_grid, const std::vector<double>& values) {
  const std::size_t k = n_grid.size();
  double mx = 0.0, my = 0.0;
  std::vector<double> xs(k), ys(k);
  for (std::size_t i = 0; i < k; ++i) {
    xs[i] = std::log(static_cast<double>(n_grid[i]));
    ys[i] = std::log(values[i]);
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

std::vector<double> default_fig_p_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 9; ++i) g.push_back(0.1 * i);
  return g;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  }
  out << content;
  if (!out) {
    throw Error(ErrorCode::io, "failed writing '" + path.string() + "'");
  }
}

}  // namespace

ScenarioSpec::Model ScenarioSpec::model_from_string(const std::string& s) {
  if (s == "standard") return Model::standard;
  if (s == "outliers") return Model::outliers;
  if (s == "rounded") return Model::rounded;
  throw Error(ErrorCode::unknown_name, "unknown scenario model '" + s + "' (standard|outliers|rounded)");
}

const char* ScenarioSpec::model_name() const noexcept {
  switch (model) {
    case Model::outliers: return "outliers";
    case Model::rounded: return "rounded";
    default: return "standard";
  }
}

std::string ScenarioSpec::label() const {
  std::ostringstream os;
  os << model_name() << " H=" << format_double("%g", hurst) << " n=" << n;
  return os.str();
}

std::string MethodSpec::label() const {
  switch (kind) {
    case Kind::expectile_fixed: return "E(p=" + format_double("%g", p) + ")";
    case Kind::expectile_popt: return "E(p=p_opt)";
    case Kind::expectile_log: return "ELOG(p=" + format_double("%g", p) + ")";
    case Kind::st: return "ST";
    case Kind::med: return "MED";
    case Kind::tm: return "TM";
  }
  return "ST";
}

MethodSpec::Kind MethodSpec::kind_from_string(const std::string& s) {
  if (s == "expectile" || s == "E") return Kind::expectile_fixed;
  if (s == "expectile_popt" || s == "E_popt" || s == "popt") return Kind::expectile_popt;
  if (s == "expectile_log" || s == "ELOG" || s == "elog") return Kind::expectile_log;
  if (s == "st" || s == "ST") return Kind::st;
  if (s == "med" || s == "MED") return Kind::med;
  if (s == "tm" || s == "TM") return Kind::tm;
  throw Error(ErrorCode::unknown_name, "unknown method '" + s + "'");
}

void ExperimentConfig::validate() const {
  if (scenarios.empty()) throw Error(ErrorCode::invalid_argument, "no scenarios configured");
  if (methods.empty()) throw Error(ErrorCode::invalid_argument, "no methods configured");
  if (replications < 10) throw Error(ErrorCode::invalid_argument, "need at least 10 replications");
  for (const auto& s : scenarios) {
    (void)HurstParams(s.hurst, s.sigma);  // throws on bad (H, sigma)
    if (s.n < 2) throw Error(ErrorCode::invalid_argument, "scenario n must be >= 2");
  }
  FilterSpec::named(filter_name);
  if (num_scales < 2) throw Error(ErrorCode::invalid_argument, "estimator needs M >= 2 scales");
  if (!(beta > 0.0)) throw Error(ErrorCode::domain, "beta must be positive");
  if (!(trim >= 0.0) || !(trim < 0.5)) throw Error(ErrorCode::domain, "trim must lie in [0,0.5)");
  if (!(outlier_fraction >= 0.0) || !(outlier_fraction < 1.0)) {
    throw Error(ErrorCode::domain, "outlier fraction must lie in [0,1)");
  }
  if (figures.enabled && figures.replications < 2) {
    throw Error(ErrorCode::invalid_argument, "figures need at least 2 replications");
  }
}

ExperimentConfig ExperimentConfig::paper_defaults() {
  ExperimentConfig cfg;
  for (double hurst : {0.2, 0.8}) {
    for (auto model : {ScenarioSpec::Model::standard, ScenarioSpec::Model::outliers,
                       ScenarioSpec::Model::rounded}) {
      for (std::size_t n : {std::size_t{500}, std::size_t{5000}}) {
        cfg.scenarios.push_back({model, hurst, 0.5, n});
      }
    }
  }
  for (double p : {0.2, 0.4, 0.6, 0.8}) {
    cfg.methods.push_back({MethodSpec::Kind::expectile_fixed, p});
  }
  cfg.methods.push_back({MethodSpec::Kind::expectile_popt, 0.5});
  cfg.methods.push_back({MethodSpec::Kind::med, 0.5});
  cfg.methods.push_back({MethodSpec::Kind::tm, 0.5});
  cfg.methods.push_back({MethodSpec::Kind::st, 0.5});
  cfg.p_select_grid = PSelectConfig::default_grid();
  cfg.figures.p_grid = default_fig_p_grid();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, std::string("config JSON parse error: ") + e.what());
  }
  try {
    ExperimentConfig cfg = paper_defaults();
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    cfg.replications = j.value("replications", cfg.replications);
    cfg.threads = j.value("threads", cfg.threads);

    if (j.contains("scenarios")) {
      cfg.scenarios.clear();
      for (const auto& js : j.at("scenarios")) {
        ScenarioSpec s;
        s.model = ScenarioSpec::model_from_string(js.value("model", "standard"));
        s.hurst = js.at("hurst").get<double>();
        s.sigma = js.value("sigma", 0.5);
        s.n = js.at("n").get<std::size_t>();
        cfg.scenarios.push_back(s);
      }
    }
    if (j.contains("methods")) {
      cfg.methods.clear();
      for (const auto& jm : j.at("methods")) {
        MethodSpec m;
        m.kind = MethodSpec::kind_from_string(jm.at("method").get<std::string>());
        m.p = jm.value("p", 0.5);
        cfg.methods.push_back(m);
      }
    }
    if (j.contains("estimator")) {
      const auto& je = j.at("estimator");
      cfg.filter_name = je.value("filter", cfg.filter_name);
      cfg.num_scales = je.value("scales", cfg.num_scales);
      cfg.beta = je.value("beta", cfg.beta);
      cfg.trim = je.value("trim", cfg.trim);
    }
    if (j.contains("contamination")) {
      const auto& jc = j.at("contamination");
      cfg.outlier_fraction = jc.value("fraction", cfg.outlier_fraction);
      cfg.outlier_snr_db = jc.value("snr_db", cfg.outlier_snr_db);
    }
    if (j.contains("pselect")) {
      const auto& jp = j.at("pselect");
      cfg.p_select_replications = jp.value("replications", cfg.p_select_replications);
      if (jp.contains("grid")) {
        const auto& jg = jp.at("grid");
        if (jg.is_array()) {
          cfg.p_select_grid = jg.get<std::vector<double>>();
        } else {
          const double lo = jg.value("min", 0.05);
          const double hi = jg.value("max", 0.95);
          const double step = jg.value("step", 0.05);
          if (!(step > 0.0)) throw Error(ErrorCode::invalid_argument, "grid step must be positive");
          cfg.p_select_grid.clear();
          for (double p = lo; p <= hi + 1e-12; p += step) cfg.p_select_grid.push_back(p);
        }
      }
    }
    if (j.contains("figures")) {
      const auto& jf = j.at("figures");
      cfg.figures.enabled = jf.value("enabled", cfg.figures.enabled);
      if (jf.contains("hursts")) cfg.figures.hursts = jf.at("hursts").get<std::vector<double>>();
      cfg.figures.n = jf.value("n", cfg.figures.n);
      cfg.figures.replications = jf.value("replications", cfg.figures.replications);
      if (jf.contains("p_grid")) cfg.figures.p_grid = jf.at("p_grid").get<std::vector<double>>();
      if (jf.contains("n_grid")) cfg.figures.n_grid = jf.at("n_grid").get<std::vector<std::size_t>>();
    }
    return cfg;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, std::string("config JSON field error: ") + e.what());
  }
}

namespace {

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["master_seed"] = cfg.master_seed;
  j["replications"] = cfg.replications;
  j["threads"] = cfg.threads;
  j["scenarios"] = json::array();
  for (const auto& s : cfg.scenarios) {
    j["scenarios"].push_back({{"model", s.model_name()}, {"hurst", s.hurst}, {"sigma", s.sigma}, {"n", s.n}});
  }
  j["methods"] = json::array();
  for (const auto& m : cfg.methods) {
    json jm;
    switch (m.kind) {
      case MethodSpec::Kind::expectile_fixed: jm = {{"method", "expectile"}, {"p", m.p}}; break;
      case MethodSpec::Kind::expectile_popt: jm = {{"method", "expectile_popt"}}; break;
      case MethodSpec::Kind::expectile_log: jm = {{"method", "expectile_log"}, {"p", m.p}}; break;
      case MethodSpec::Kind::st: jm = {{"method", "st"}}; break;
      case MethodSpec::Kind::med: jm = {{"method", "med"}}; break;
      case MethodSpec::Kind::tm: jm = {{"method", "tm"}}; break;
    }
    j["methods"].push_back(jm);
  }
  j["estimator"] = {{"filter", cfg.filter_name}, {"scales", cfg.num_scales}, {"beta", cfg.beta}, {"trim", cfg.trim}};
  j["contamination"] = {{"fraction", cfg.outlier_fraction}, {"snr_db", cfg.outlier_snr_db}};
  j["pselect"] = {{"replications", cfg.p_select_replications}, {"grid", cfg.p_select_grid}};
  j["figures"] = {{"enabled", cfg.figures.enabled}, {"hursts", cfg.figures.hursts},
                  {"n", cfg.figures.n},           {"replications", cfg.figures.replications},
                  {"p_grid", cfg.figures.p_grid}, {"n_grid", cfg.figures.n_grid}};
  return j;
}

}  // namespace

std::string ExperimentConfig::to_json_text() const { return config_to_json(*this).dump(2); }

namespace {

ContaminationSpec scenario_contaminator(const ExperimentConfig& cfg, const ScenarioSpec& s) {
  ContaminationSpec spec;
  switch (s.model) {
    case ScenarioSpec::Model::outliers:
      spec.kind = ContaminationSpec::Kind::outliers;
      spec.fraction = cfg.outlier_fraction;
      spec.snr_db = cfg.outlier_snr_db;
      break;
    case ScenarioSpec::Model::rounded:
      // the benchmark tables' model (c): rounded increments, re-accumulated
      spec.kind = ContaminationSpec::Kind::rounding_increments;
      break;
    default:
      spec.kind = ContaminationSpec::Kind::none;
      break;
  }
  return spec;
}

struct RepOutcome {
  std::vector<double> h;        // NaN on failure
  double popt = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace

ExperimentReport run_tables(const ExperimentConfig& cfg) {
  cfg.validate();

  ExperimentReport report;
  report.config = cfg;
  const std::size_t n_scen = cfg.scenarios.size();
  const std::size_t n_meth = cfg.methods.size();
  const std::size_t reps = static_cast<std::size_t>(cfg.replications);
  report.cells.assign(n_scen, std::vector<CellStats>(n_meth));
  report.popt_histograms.assign(n_scen, {});

  const FilterSpec filter = FilterSpec::named(cfg.filter_name);
  const bool wants_popt = std::any_of(cfg.methods.begin(), cfg.methods.end(), [](const MethodSpec& m) {
    return m.kind == MethodSpec::Kind::expectile_popt;
  });
  const std::vector<double> grid =
      cfg.p_select_grid.empty() ? PSelectConfig::default_grid() : cfg.p_select_grid;

  for (std::size_t si = 0; si < n_scen; ++si) {
    const auto t0 = std::chrono::steady_clock::now();
    const ScenarioSpec& scen = cfg.scenarios[si];
    const CirculantFgnSampler sampler(HurstParams(scen.hurst, scen.sigma), scen.n);
    const ContaminationSpec contaminator = scenario_contaminator(cfg, scen);
    const std::uint64_t scenario_seed = mix_seed(cfg.master_seed, si);
    const double sigma2_true = scen.sigma * scen.sigma;

    std::vector<RepOutcome> outcomes(reps);

    parallel_for(
        reps,
        [&](std::size_t r) {
          const std::uint64_t rep_seed = mix_seed(scenario_seed, r);
          SamplePath observed = sampler.sample_fbm(rep_seed);
          observed = contaminate(observed, contaminator, sigma2_true,
                                 mix_seed(rep_seed, kStreamContaminate));

          RepOutcome& out = outcomes[r];
          out.h.assign(n_meth, std::numeric_limits<double>::quiet_NaN());

          double popt = std::numeric_limits<double>::quiet_NaN();
          if (wants_popt) {
            PSelectConfig psel;
            psel.grid = grid;
            psel.replications = cfg.p_select_replications;
            psel.contaminator = contaminator;
            psel.filter = filter;
            psel.num_scales = cfg.num_scales;
            psel.beta = cfg.beta;
            try {
              popt = select_p(observed, psel, mix_seed(rep_seed, kStreamPSelect)).p_opt;
            } catch (const Error&) {
              // leave NaN; the popt method records a failure below
            }
            out.popt = popt;
          }

          for (std::size_t mi = 0; mi < n_meth; ++mi) {
            const MethodSpec& ms = cfg.methods[mi];
            EstimatorConfig ecfg;
            ecfg.filter = filter;
            ecfg.num_scales = cfg.num_scales;
            ecfg.beta = cfg.beta;
            ecfg.trim = cfg.trim;
            switch (ms.kind) {
              case MethodSpec::Kind::expectile_fixed:
                ecfg.method = EstimatorConfig::Method::expectile;
                ecfg.p = ms.p;
                break;
              case MethodSpec::Kind::expectile_popt:
                if (std::isnan(popt)) continue;  // selection failed
                ecfg.method = EstimatorConfig::Method::expectile;
                ecfg.p = popt;
                break;
              case MethodSpec::Kind::expectile_log:
                ecfg.method = EstimatorConfig::Method::expectile_log;
                ecfg.p = ms.p;
                break;
              case MethodSpec::Kind::st: ecfg.method = EstimatorConfig::Method::st; break;
              case MethodSpec::Kind::med: ecfg.method = EstimatorConfig::Method::med; break;
              case MethodSpec::Kind::tm: ecfg.method = EstimatorConfig::Method::tm; break;
            }
            try {
              out.h[mi] = estimate_hurst(observed, ecfg).h_hat;
            } catch (const Error&) {
              // degenerate replication for this method; stays NaN
            }
          }
        },
        cfg.threads);

    // fixed-order reduction keeps parallel and serial runs byte-identical
    for (std::size_t mi = 0; mi < n_meth; ++mi) {
      long double sum = 0.0L, sum2 = 0.0L, abs_sum = 0.0L;
      int count = 0;
      for (std::size_t r = 0; r < reps; ++r) {
        const double h = outcomes[r].h[mi];
        if (std::isnan(h)) continue;
        sum += h;
        sum2 += static_cast<long double>(h) * h;
        abs_sum += std::abs(h - scen.hurst);
        ++count;
      }
      CellStats& cell = report.cells[si][mi];
      cell.count = count;
      cell.failures = static_cast<int>(reps) - count;
      if (count > 0) {
        cell.mean = static_cast<double>(sum / count);
        cell.mae = static_cast<double>(abs_sum / count);
        if (count > 1) {
          const long double var = (sum2 - sum * sum / count) / (count - 1);
          cell.sd = var > 0.0L ? static_cast<double>(std::sqrt(static_cast<double>(var))) : 0.0;
        }
      }
    }
    if (wants_popt) {
      auto& hist = report.popt_histograms[si];
      for (std::size_t r = 0; r < reps; ++r) {
        if (!std::isnan(outcomes[r].popt)) ++hist[outcomes[r].popt];
      }
    }

    const auto t1 = std::chrono::steady_clock::now();
    std::ostringstream line;
    line << "scenario " << scen.label() << ": " << reps << " replications in "
         << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count() << " ms";
    for (std::size_t mi = 0; mi < n_meth; ++mi) {
      if (report.cells[si][mi].failures > 0) {
        line << "; " << cfg.methods[mi].label() << " failures=" << report.cells[si][mi].failures;
      }
    }
    report.log_lines.push_back(line.str());
  }

  return report;
}

std::string ExperimentReport::tables_csv() const {
  // columns: fixed model order x ascending n, mirroring the paper's tables
  std::vector<std::pair<ScenarioSpec::Model, std::size_t>> columns;
  std::vector<double> hursts;
  for (const auto& s : config.scenarios) {
    if (std::find(hursts.begin(), hursts.end(), s.hurst) == hursts.end()) hursts.push_back(s.hurst);
    std::pair<ScenarioSpec::Model, std::size_t> key{s.model, s.n};
    if (std::find(columns.begin(), columns.end(), key) == columns.end()) columns.push_back(key);
  }
  std::sort(columns.begin(), columns.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return static_cast<int>(a.first) < static_cast<int>(b.first);
    return a.second < b.second;
  });

  std::ostringstream os;
  os << "H,method";
  for (const auto& [model, n] : columns) {
    os << "," << ScenarioSpec{model, 0.5, 1.0, n}.model_name() << " n=" << n;
  }
  os << "\n";
  for (double hurst : hursts) {
    for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
      os << format_double("%g", hurst) << "," << config.methods[mi].label();
      for (const auto& [model, n] : columns) {
        os << ",";
        for (std::size_t si = 0; si < config.scenarios.size(); ++si) {
          const auto& s = config.scenarios[si];
          if (s.hurst == hurst && s.model == model && s.n == n) {
            const auto& cell = cells[si][mi];
            if (cell.count > 0) {
              os << format_double("%.3f", cell.mean) << " (" << format_double("%.3f", cell.sd) << ")";
            }
            break;
          }
        }
      }
      os << "\n";
    }
  }
  return os.str();
}

std::string ExperimentReport::report_json() const {
  json j;
  j["config"] = config_to_json(config);
  j["results"] = json::array();
  for (std::size_t si = 0; si < config.scenarios.size(); ++si) {
    const auto& s = config.scenarios[si];
    json js;
    js["scenario"] = {{"model", s.model_name()}, {"hurst", s.hurst}, {"sigma", s.sigma}, {"n", s.n}};
    js["methods"] = json::array();
    for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
      const auto& c = cells[si][mi];
      js["methods"].push_back({{"label", config.methods[mi].label()},
                               {"mean", c.mean},
                               {"sd", c.sd},
                               {"mae", c.mae},
                               {"count", c.count},
                               {"failures", c.failures}});
    }
    if (si < popt_histograms.size() && !popt_histograms[si].empty()) {
      json h = json::array();
      for (const auto& [p, cnt] : popt_histograms[si]) h.push_back({{"p", p}, {"count", cnt}});
      js["popt_histogram"] = h;
    }
    j["results"].push_back(js);
  }
  if (!fig3_slopes.empty()) {
    j["fig3_slopes"] = json::array();
    for (const auto& e : fig3_slopes) {
      j["fig3_slopes"].push_back({{"transform", e.transform}, {"hurst", e.hurst}, {"slope", e.slope}});
    }
  }
  return j.dump(2);
}

std::vector<ExpectileSampleRow> run_expectile_convergence(double hurst,
                                                          const std::vector<Transform>& transforms,
                                                          const std::vector<double>& p_grid,
                                                          std::size_t n, int replications,
                                                          std::uint64_t seed, unsigned threads) {
  const std::vector<double>& grid = p_grid;
  const CirculantFgnSampler sampler(HurstParams(hurst, 1.0), n);

  std::vector<std::vector<std::vector<double>>> values(
      static_cast<std::size_t>(replications),
      std::vector<std::vector<double>>(transforms.size(), std::vector<double>(grid.size())));

  parallel_for(
      static_cast<std::size_t>(replications),
      [&](std::size_t r) {
        const SamplePath path = sampler.sample_fgn(mix_seed(seed, r));
        for (std::size_t ti = 0; ti < transforms.size(); ++ti) {
          std::vector<double> data(path.values.size());
          for (std::size_t i = 0; i < data.size(); ++i) data[i] = transforms[ti](path.values[i]);
          const ExpectileSolver solver(std::move(data));
          for (std::size_t pi = 0; pi < grid.size(); ++pi) values[r][ti][pi] = solver.solve(grid[pi]);
        }
      },
      threads);

  std::vector<ExpectileSampleRow> rows;
  rows.reserve(static_cast<std::size_t>(replications) * transforms.size() * grid.size());
  for (std::size_t ti = 0; ti < transforms.size(); ++ti) {
    std::vector<double> theo(grid.size());
    for (std::size_t pi = 0; pi < grid.size(); ++pi) theo[pi] = theoretical_expectile(transforms[ti], grid[pi]);
    for (std::size_t pi = 0; pi < grid.size(); ++pi) {
      for (int r = 0; r < replications; ++r) {
        rows.push_back({transforms[ti].name(), hurst, grid[pi], r,
                        values[static_cast<std::size_t>(r)][ti][pi], theo[pi]});
      }
    }
  }
  return rows;
}

VarianceScalingResult run_variance_scaling(double hurst, const std::vector<Transform>& transforms,
                                           const std::vector<double>& p_grid,
                                           const std::vector<std::size_t>& n_grid, int replications,
                                           std::uint64_t seed, unsigned threads) {
  if (n_grid.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "variance scaling needs at least 2 sample sizes");
  }
  for (std::size_t i = 1; i < n_grid.size(); ++i) {
    if (n_grid[i] <= n_grid[i - 1]) {
      throw Error(ErrorCode::invalid_argument, "variance scaling n grid must be increasing");
    }
  }

  VarianceScalingResult result;
  std::vector<std::vector<double>> per_transform(transforms.size());  // sigma2_hat per n

  for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
    const std::size_t n = n_grid[ni];
    const CirculantFgnSampler sampler(HurstParams(hurst, 1.0), n);
    const std::uint64_t n_seed = mix_seed(seed, ni);

    std::vector<std::vector<std::vector<double>>> values(
        static_cast<std::size_t>(replications),
        std::vector<std::vector<double>>(transforms.size(), std::vector<double>(p_grid.size())));

    parallel_for(
        static_cast<std::size_t>(replications),
        [&](std::size_t r) {
          const SamplePath path = sampler.sample_fgn(mix_seed(n_seed, r));
          for (std::size_t ti = 0; ti < transforms.size(); ++ti) {
            std::vector<double> data(path.values.size());
            for (std::size_t i = 0; i < data.size(); ++i) data[i] = transforms[ti](path.values[i]);
            const ExpectileSolver solver(std::move(data));
            for (std::size_t pi = 0; pi < p_grid.size(); ++pi) values[r][ti][pi] = solver.solve(p_grid[pi]);
          }
        },
        threads);

    for (std::size_t ti = 0; ti < transforms.size(); ++ti) {
      long double var_sum = 0.0L;
      for (std::size_t pi = 0; pi < p_grid.size(); ++pi) {
        long double sum = 0.0L, sum2 = 0.0L;
        for (int r = 0; r < replications; ++r) {
          const double v = values[static_cast<std::size_t>(r)][ti][pi];
          sum += v;
          sum2 += static_cast<long double>(v) * v;
        }
        var_sum += (sum2 - sum * sum / replications) / (replications - 1);
      }
      const double sigma2_hat = static_cast<double>(var_sum / static_cast<long double>(p_grid.size()));
      per_transform[ti].push_back(sigma2_hat);
      result.rows.push_back({transforms[ti].name(), hurst, n, sigma2_hat});
    }
  }

  for (std::size_t ti = 0; ti < transforms.size(); ++ti) {
    result.slopes[transforms[ti].name()] = slope_of_loglog(n_grid, per_transform[ti]);
  }
  return result;
}

std::string expectile_rows_csv(const std::vector<ExpectileSampleRow>& rows) {
  std::ostringstream os;
  os << "transform,hurst,p,rep,sample_expectile,theoretical\n";
  for (const auto& r : rows) {
    os << r.transform << "," << format_double("%g", r.hurst) << "," << format_double("%g", r.p) << ","
       << r.rep << "," << format_double("%.12g", r.value) << "," << format_double("%.12g", r.theoretical)
       << "\n";
  }
  return os.str();
}

std::string variance_rows_csv(const std::vector<VarianceScalingRow>& rows) {
  std::ostringstream os;
  os << "transform,hurst,n,mean_variance\n";
  for (const auto& r : rows) {
    os << r.transform << "," << format_double("%g", r.hurst) << "," << r.n << ","
       << format_double("%.12g", r.mean_variance) << "\n";
  }
  return os.str();
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw Error(ErrorCode::io, "cannot create output directory '" + out_dir + "': " + ec.message());
  }

  ExperimentReport report = run_tables(cfg);
  write_text_file(fs::path(out_dir) / "tables.csv", report.tables_csv());

  if (cfg.figures.enabled) {
    const std::vector<double> p_grid =
        cfg.figures.p_grid.empty() ? default_fig_p_grid() : cfg.figures.p_grid;

    std::vector<ExpectileSampleRow> fig1, fig2;
    std::vector<VarianceScalingRow> fig3;
    for (std::size_t hi = 0; hi < cfg.figures.hursts.size(); ++hi) {
      const double hurst = cfg.figures.hursts[hi];
      auto rows1 = run_expectile_convergence(hurst, {Transform::identity()}, p_grid, cfg.figures.n,
                                             cfg.figures.replications,
                                             mix_seed(cfg.master_seed, 1000 + hi), cfg.threads);
      fig1.insert(fig1.end(), rows1.begin(), rows1.end());
      auto rows2 = run_expectile_convergence(hurst, {Transform::square(), Transform::log_abs()},
                                             p_grid, cfg.figures.n, cfg.figures.replications,
                                             mix_seed(cfg.master_seed, 2000 + hi), cfg.threads);
      fig2.insert(fig2.end(), rows2.begin(), rows2.end());
      auto scaling = run_variance_scaling(
          hurst, {Transform::identity(), Transform::square(), Transform::log_abs()}, p_grid,
          cfg.figures.n_grid, cfg.figures.replications, mix_seed(cfg.master_seed, 3000 + hi),
          cfg.threads);
      fig3.insert(fig3.end(), scaling.rows.begin(), scaling.rows.end());
      for (const auto& [name, slope] : scaling.slopes) {
        report.fig3_slopes.push_back({name, hurst, slope});
        std::ostringstream line;
        line << "fig3 slope " << name << " H=" << format_double("%g", hurst) << ": "
             << format_double("%.4f", slope);
        report.log_lines.push_back(line.str());
      }
    }
    write_text_file(fs::path(out_dir) / "fig1.csv", expectile_rows_csv(fig1));
    write_text_file(fs::path(out_dir) / "fig2.csv", expectile_rows_csv(fig2));
    write_text_file(fs::path(out_dir) / "fig3.csv", variance_rows_csv(fig3));
  }

  write_text_file(fs::path(out_dir) / "report.json", report.report_json());

  std::ostringstream log;
  for (const auto& line : report.log_lines) log << line << "\n";
  write_text_file(fs::path(out_dir) / "log.txt", log.str());
  return report;
}

std::string path_meta_to_json(const PathMeta& meta, std::size_t n) {
  json j;
  j["n"] = n;
  j["kind"] = to_string(meta.kind);
  j["contamination"] = to_string(meta.contamination);
  j["seed"] = meta.seed;
  if (std::isfinite(meta.hurst)) j["hurst"] = meta.hurst;
  if (std::isfinite(meta.sigma)) j["sigma"] = meta.sigma;
  return j.dump(2);
}

PathMeta path_meta_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, std::string("metadata JSON parse error: ") + e.what());
  }
  PathMeta meta;
  try {
    meta.kind = path_kind_from_string(j.value("kind", "fbm"));
    meta.contamination = contamination_from_string(j.value("contamination", "none"));
    meta.seed = j.value("seed", std::uint64_t{0});
    meta.hurst = j.value("hurst", std::numeric_limits<double>::quiet_NaN());
    meta.sigma = j.value("sigma", std::numeric_limits<double>::quiet_NaN());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, std::string("metadata JSON field error: ") + e.what());
  }
  return meta;
}

}  // namespace exhurst
