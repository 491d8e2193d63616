// exhurst command line: simulate / contaminate / estimate / select-p /
// experiment. Deliberately speaks only the public C API of libexhurst; file
// handling and argument parsing live here.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "exhurst.h"

namespace {

using nlohmann::json;

struct PathDeleter {
  void operator()(exh_path* p) const { exh_path_free(p); }
};
struct EstimateDeleter {
  void operator()(exh_estimate* e) const { exh_estimate_free(e); }
};
struct PSelectDeleter {
  void operator()(exh_pselect* s) const { exh_pselect_free(s); }
};
using PathHandle = std::unique_ptr<exh_path, PathDeleter>;
using EstimateHandle = std::unique_ptr<exh_estimate, EstimateDeleter>;
using PSelectHandle = std::unique_ptr<exh_pselect, PSelectDeleter>;

std::string take_string(char* s) {
  std::string out = s ? s : "";
  exh_string_free(s);
  return out;
}

// Machine-readable failure report on stderr; exit code = status value.
int fail(exh_status status, const std::string& context) {
  json err;
  err["errors"] = json::array();
  err["errors"].push_back({{"code", exh_status_name(status)},
                           {"message", std::string(exh_last_error())},
                           {"context", context}});
  std::cerr << err.dump() << "\n";
  return static_cast<int>(status);
}

int fail_io(const std::string& message, const std::string& context) {
  json err;
  err["errors"] = json::array();
  err["errors"].push_back({{"code", "io"}, {"message", message}, {"context", context}});
  std::cerr << err.dump() << "\n";
  return static_cast<int>(EXH_ERR_IO);
}

std::string sidecar_name(const std::string& path) { return path + ".meta.json"; }

bool read_values_file(const std::string& file, std::vector<double>& out, std::string& error) {
  std::ifstream in(file);
  if (!in) {
    error = "cannot open '" + file + "'";
    return false;
  }
  out.clear();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      std::size_t pos = 0;
      const double v = std::stod(line, &pos);
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      if (pos != line.size()) throw std::invalid_argument("trailing characters");
      out.push_back(v);
    } catch (const std::exception&) {
      error = file + ":" + std::to_string(lineno) + ": not a number: '" + line + "'";
      return false;
    }
  }
  if (out.empty()) {
    error = file + ": no values";
    return false;
  }
  return true;
}

bool write_values_file(const std::string& file, const exh_path* path, std::string& error) {
  std::ofstream out(file, std::ios::binary);
  if (!out) {
    error = "cannot open '" + file + "' for writing";
    return false;
  }
  const double* values = exh_path_values(path);
  const int64_t n = exh_path_length(path);
  char buf[64];
  for (int64_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", values[i]);
    out << buf;
  }
  if (!out) {
    error = "failed writing '" + file + "'";
    return false;
  }
  return true;
}

bool write_sidecar(const std::string& values_file, const exh_path* path, std::string& error) {
  char* meta = nullptr;
  if (exh_path_meta_json(path, &meta) != EXH_OK) {
    error = exh_last_error();
    return false;
  }
  std::ofstream out(sidecar_name(values_file), std::ios::binary);
  if (!out) {
    error = "cannot open '" + sidecar_name(values_file) + "' for writing";
    exh_string_free(meta);
    return false;
  }
  out << take_string(meta) << "\n";
  return true;
}

// Loads a path plus its sidecar metadata when present.
int load_path(const std::string& file, PathHandle& out, std::optional<json>& meta_out,
              const std::string& context) {
  std::vector<double> values;
  std::string error;
  if (!read_values_file(file, values, error)) return fail_io(error, context);

  exh_path* raw = nullptr;
  exh_status st = exh_path_wrap(values.data(), static_cast<int64_t>(values.size()), &raw);
  if (st != EXH_OK) return fail(st, context);
  out.reset(raw);

  meta_out.reset();
  const std::string sidecar = sidecar_name(file);
  if (std::filesystem::exists(sidecar)) {
    std::ifstream in(sidecar);
    std::stringstream ss;
    ss << in.rdbuf();
    st = exh_path_set_meta_json(out.get(), ss.str().c_str());
    if (st != EXH_OK) return fail(st, context + " (metadata sidecar)");
    try {
      meta_out = json::parse(ss.str());
    } catch (const json::exception&) {
      // set_meta_json already validated; unreachable in practice
    }
  }
  return 0;
}

std::vector<double> parse_grid(const std::string& text) {
  // "min:max:step" or a comma-separated list
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    double lo = 0, hi = 0, step = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0) {
      throw CLI::ValidationError("--grid", "expected min:max:step with step > 0");
    }
    for (double p = lo; p <= hi + 1e-12; p += step) grid.push_back(p);
  } else {
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) grid.push_back(std::stod(tok));
    }
  }
  if (grid.empty()) throw CLI::ValidationError("--grid", "empty grid");
  return grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"expectile-based Hurst exponent estimation for fBm (discrete variations)"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(exh_version()));

  // -------- simulate --------
  double sim_hurst = 0.5, sim_sigma = 1.0;
  int64_t sim_n = 1000;
  std::uint64_t sim_seed = 0;
  std::string sim_kind = "fbm", sim_out;
  auto* sim = app.add_subcommand("simulate", "generate an exact fGn/fBm sample path");
  sim->add_option("--hurst", sim_hurst, "Hurst exponent in (0,1)")->required();
  sim->add_option("--sigma", sim_sigma, "scale sigma > 0")->capture_default_str();
  sim->add_option("--n", sim_n, "path length")->required();
  sim->add_option("--seed", sim_seed, "RNG seed")->capture_default_str();
  sim->add_option("--kind", sim_kind, "fgn|fbm")->capture_default_str();
  sim->add_option("--out", sim_out, "output file (one value per line; metadata sidecar alongside)")
      ->required();

  // -------- contaminate --------
  std::string con_in, con_kind, con_out;
  double con_fraction = 0.05, con_snr = -20.0;
  std::uint64_t con_seed = 0;
  auto* con = app.add_subcommand("contaminate", "apply outliers or rounding to an fBm path");
  con->add_option("--in", con_in, "input path file")->required();
  con->add_option("--kind", con_kind, "outliers|rounding|rounding-increments")->required();
  con->add_option("--fraction", con_fraction, "fraction of contaminated increments")->capture_default_str();
  con->add_option("--snr", con_snr, "SNR in dB (signal = clean increment variance)")->capture_default_str();
  con->add_option("--seed", con_seed, "RNG seed")->capture_default_str();
  con->add_option("--out", con_out, "output path file")->required();

  // -------- estimate --------
  std::string est_in, est_method = "ST", est_filter = "d4", est_out;
  double est_p = 0.5, est_beta = 2.0, est_trim = 0.05;
  int est_scales = 5;
  auto* est = app.add_subcommand("estimate", "estimate the Hurst exponent of a path");
  est->add_option("--in", est_in, "input path file")->required();
  est->add_option("--method", est_method, "E|ELOG|ST|MED|TM")->capture_default_str();
  est->add_option("--p", est_p, "expectile order (E/ELOG)")->capture_default_str();
  est->add_option("--beta", est_beta, "power of |.| (E)")->capture_default_str();
  est->add_option("--trim", est_trim, "per-tail trim fraction (TM)")->capture_default_str();
  est->add_option("--filter", est_filter, "inc1|d4")->capture_default_str();
  est->add_option("--M", est_scales, "number of dilated scales")->capture_default_str();
  est->add_option("--out", est_out, "JSON report file (stdout if omitted)");

  // -------- select-p --------
  std::string sel_in, sel_contaminator = "none", sel_filter = "d4", sel_grid = "0.05:0.95:0.05", sel_out;
  double sel_fraction = 0.05, sel_snr = -20.0, sel_beta = 2.0;
  int sel_reps = 100, sel_scales = 5;
  std::uint64_t sel_seed = 0;
  auto* sel = app.add_subcommand("select-p", "Monte-Carlo selection of the expectile order");
  sel->add_option("--in", sel_in, "input path file")->required();
  sel->add_option("--contaminator", sel_contaminator, "none|outliers|rounding|rounding-increments")->capture_default_str();
  sel->add_option("--fraction", sel_fraction, "outlier fraction")->capture_default_str();
  sel->add_option("--snr", sel_snr, "outlier SNR in dB")->capture_default_str();
  sel->add_option("--grid", sel_grid, "p grid, min:max:step or comma list")->capture_default_str();
  sel->add_option("--B", sel_reps, "pilot replications")->capture_default_str();
  sel->add_option("--filter", sel_filter, "inc1|d4")->capture_default_str();
  sel->add_option("--M", sel_scales, "number of dilated scales")->capture_default_str();
  sel->add_option("--beta", sel_beta, "power of |.|")->capture_default_str();
  sel->add_option("--seed", sel_seed, "RNG seed")->capture_default_str();
  sel->add_option("--out", sel_out, "MSE curve CSV file")->required();

  // -------- experiment --------
  std::string exp_config, exp_out_dir;
  bool exp_print_default = false;
  auto* exp = app.add_subcommand("experiment", "run the table/figure reproduction harness");
  exp->add_option("--config", exp_config, "experiment config JSON (defaults when omitted)");
  exp->add_option("--out-dir", exp_out_dir, "output directory");
  exp->add_flag("--print-default-config", exp_print_default, "dump the built-in config and exit");

  CLI11_PARSE(app, argc, argv);

  if (sim->parsed()) {
    exh_path* raw = nullptr;
    const exh_status st = exh_simulate(sim_hurst, sim_sigma, sim_n, sim_seed, sim_kind.c_str(), &raw);
    if (st != EXH_OK) return fail(st, "simulate");
    PathHandle path(raw);
    std::string error;
    if (!write_values_file(sim_out, path.get(), error)) return fail_io(error, "simulate");
    if (!write_sidecar(sim_out, path.get(), error)) return fail_io(error, "simulate");
    return 0;
  }

  if (con->parsed()) {
    PathHandle input;
    std::optional<json> meta;
    if (int rc = load_path(con_in, input, meta, "contaminate")) return rc;

    exh_path* raw = nullptr;
    if (con_kind == "rounding") {
      const exh_status st = exh_contaminate_round(input.get(), &raw);
      if (st != EXH_OK) return fail(st, "contaminate");
    } else if (con_kind == "rounding-increments") {
      const exh_status st = exh_contaminate_round_increments(input.get(), &raw);
      if (st != EXH_OK) return fail(st, "contaminate");
    } else if (con_kind == "outliers") {
      // noise power is defined against the clean increment variance sigma^2,
      // which must come from the provenance sidecar
      if (!meta || !meta->contains("sigma")) {
        return fail_io("outlier contamination needs 'sigma' in " + sidecar_name(con_in),
                       "contaminate");
      }
      const double sigma = (*meta)["sigma"].get<double>();
      const exh_status st = exh_contaminate_outliers(input.get(), con_fraction, con_snr,
                                                     sigma * sigma, con_seed, &raw);
      if (st != EXH_OK) return fail(st, "contaminate");
    } else {
      return fail_io("unknown contamination kind '" + con_kind + "' (outliers|rounding|rounding-increments)", "contaminate");
    }
    PathHandle out(raw);
    std::string error;
    if (!write_values_file(con_out, out.get(), error)) return fail_io(error, "contaminate");
    if (!write_sidecar(con_out, out.get(), error)) return fail_io(error, "contaminate");
    return 0;
  }

  if (est->parsed()) {
    PathHandle input;
    std::optional<json> meta;
    if (int rc = load_path(est_in, input, meta, "estimate")) return rc;

    exh_estimate* raw = nullptr;
    const exh_status st = exh_estimate_hurst(input.get(), est_method.c_str(), est_p, est_beta,
                                             est_trim, est_filter.c_str(), est_scales, &raw);
    if (st != EXH_OK) return fail(st, "estimate");
    EstimateHandle result(raw);

    json report;
    report["h_hat"] = exh_estimate_h(result.get());
    report["method"] = est_method;
    report["p"] = est_p;
    report["beta"] = est_beta;
    report["trim"] = est_trim;
    report["filter"] = est_filter;
    report["per_scale"] = json::array();
    for (int i = 0; i < exh_estimate_scales(result.get()); ++i) {
      int m = 0;
      double stat = 0.0;
      int64_t count = 0;
      exh_estimate_scale_stat(result.get(), i, &m, &stat, &count);
      report["per_scale"].push_back({{"m", m}, {"statistic", stat}, {"sample_count", count}});
    }
    if (meta) report["input_meta"] = *meta;

    if (est_out.empty()) {
      std::cout << report.dump(2) << "\n";
    } else {
      std::ofstream out(est_out, std::ios::binary);
      if (!out) return fail_io("cannot open '" + est_out + "' for writing", "estimate");
      out << report.dump(2) << "\n";
    }
    return 0;
  }

  if (sel->parsed()) {
    PathHandle input;
    std::optional<json> meta;
    if (int rc = load_path(sel_in, input, meta, "select-p")) return rc;

    std::vector<double> grid;
    try {
      grid = parse_grid(sel_grid);
    } catch (const CLI::Error& e) {
      return fail_io(e.what(), "select-p");
    }

    exh_pselect* raw = nullptr;
    const exh_status st =
        exh_select_p(input.get(), grid.data(), static_cast<int>(grid.size()), sel_reps,
                     sel_contaminator.c_str(), sel_fraction, sel_snr, sel_filter.c_str(),
                     sel_scales, sel_beta, sel_seed, &raw);
    if (st != EXH_OK) return fail(st, "select-p");
    PSelectHandle result(raw);

    std::ofstream out(sel_out, std::ios::binary);
    if (!out) return fail_io("cannot open '" + sel_out + "' for writing", "select-p");
    out << "p,mse\n";
    char buf[96];
    for (int i = 0; i < exh_pselect_curve_len(result.get()); ++i) {
      double p = 0.0, mse = 0.0;
      exh_pselect_curve_point(result.get(), i, &p, &mse);
      std::snprintf(buf, sizeof(buf), "%g,%.12g\n", p, mse);
      out << buf;
    }

    json summary;
    summary["p_opt"] = exh_pselect_popt(result.get());
    summary["h0"] = exh_pselect_h0(result.get());
    summary["sigma2_0"] = exh_pselect_sigma2_0(result.get());
    summary["h0_clamped"] = exh_pselect_h0_clamped(result.get()) != 0;
    summary["dropped"] = exh_pselect_dropped(result.get());
    summary["curve_file"] = sel_out;
    std::cout << summary.dump() << "\n";
    return 0;
  }

  if (exp->parsed()) {
    if (exp_print_default) {
      char* text = nullptr;
      const exh_status st = exh_default_experiment_config(&text);
      if (st != EXH_OK) return fail(st, "experiment");
      std::cout << take_string(text) << "\n";
      return 0;
    }
    if (exp_out_dir.empty()) return fail_io("--out-dir is required", "experiment");

    std::string config_text;
    if (!exp_config.empty()) {
      std::ifstream in(exp_config);
      if (!in) return fail_io("cannot open config '" + exp_config + "'", "experiment");
      std::stringstream ss;
      ss << in.rdbuf();
      config_text = ss.str();
    }
    const exh_status st = exh_run_experiment(config_text.c_str(), exp_out_dir.c_str(), nullptr);
    if (st != EXH_OK) return fail(st, "experiment");
    std::cout << "experiment outputs written to " << exp_out_dir << "\n";
    return 0;
  }

  return 0;
}
