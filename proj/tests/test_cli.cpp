// End-to-end checks of the exhurst CLI binary (path from $EXHURST_CLI).
#include <cmath>
#include <cstdlib>
#include <doctest.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Workspace {
  fs::path dir;
  std::string cli;

  Workspace() {
    const char* env = std::getenv("EXHURST_CLI");
    REQUIRE_MESSAGE(env != nullptr, "EXHURST_CLI must point at the CLI binary");
    cli = env;
    dir = fs::temp_directory_path() / ("exhurst_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Workspace() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }

  // returns the exit code; stdout/stderr captured into files
  int run(const std::string& args, std::string* out = nullptr, std::string* err = nullptr) const {
    const fs::path out_file = dir / "stdout.txt";
    const fs::path err_file = dir / "stderr.txt";
    const std::string cmd =
        cli + " " + args + " > " + out_file.string() + " 2> " + err_file.string();
    const int rc = std::system(cmd.c_str());
    if (out) *out = slurp(out_file);
    if (err) *err = slurp(err_file);
    if (WIFEXITED(rc)) return WEXITSTATUS(rc);
    return -1;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static std::size_t line_count(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      if (!line.empty()) ++n;
    }
    return n;
  }
};

}  // namespace

TEST_CASE("cli round trip: simulate, contaminate, estimate, select-p, experiment") {
  Workspace ws;
  const fs::path path_file = ws.dir / "path.txt";

  SUBCASE("simulate writes values and a sidecar") {
    const int rc = ws.run("simulate --hurst 0.7 --sigma 0.5 --n 400 --seed 11 --kind fbm --out " +
                          path_file.string());
    REQUIRE(rc == 0);
    CHECK(Workspace::line_count(path_file) == 400);
    const auto meta = json::parse(Workspace::slurp(fs::path(path_file.string() + ".meta.json")));
    CHECK(meta["hurst"] == 0.7);
    CHECK(meta["kind"] == "fbm");
    CHECK(meta["n"] == 400);
  }

  SUBCASE("determinism: same seed, same file") {
    const fs::path copy = ws.dir / "path2.txt";
    REQUIRE(ws.run("simulate --hurst 0.6 --n 100 --seed 5 --out " + path_file.string()) == 0);
    REQUIRE(ws.run("simulate --hurst 0.6 --n 100 --seed 5 --out " + copy.string()) == 0);
    CHECK(Workspace::slurp(path_file) == Workspace::slurp(copy));
  }

  SUBCASE("estimate reports h_hat") {
    REQUIRE(ws.run("simulate --hurst 0.7 --sigma 0.5 --n 2000 --seed 11 --out " +
                   path_file.string()) == 0);
    std::string out;
    const int rc = ws.run("estimate --in " + path_file.string() + " --method ST --filter d4 --M 5", &out);
    REQUIRE(rc == 0);
    const auto report = json::parse(out);
    CHECK(report["h_hat"].get<double>() == doctest::Approx(0.7).epsilon(0.15));
    CHECK(report["per_scale"].size() == 5);
    CHECK(report["input_meta"]["hurst"] == 0.7);

    const fs::path report_file = ws.dir / "report.json";
    REQUIRE(ws.run("estimate --in " + path_file.string() + " --method E --p 0.6 --out " +
                   report_file.string()) == 0);
    const auto file_report = json::parse(Workspace::slurp(report_file));
    CHECK(file_report["method"] == "E");
  }

  SUBCASE("contaminate rounding floors the path") {
    REQUIRE(ws.run("simulate --hurst 0.8 --sigma 0.5 --n 50 --seed 3 --out " + path_file.string()) == 0);
    const fs::path rounded = ws.dir / "rounded.txt";
    REQUIRE(ws.run("contaminate --in " + path_file.string() + " --kind rounding --out " +
                   rounded.string()) == 0);
    std::ifstream in(rounded);
    double v = 0.0;
    while (in >> v) CHECK(v == std::floor(v));
    const auto meta = json::parse(Workspace::slurp(fs::path(rounded.string() + ".meta.json")));
    CHECK(meta["contamination"] == "rounded");
  }

  SUBCASE("contaminate outliers needs the sidecar sigma") {
    REQUIRE(ws.run("simulate --hurst 0.5 --sigma 0.5 --n 300 --seed 9 --out " + path_file.string()) == 0);
    const fs::path dirty = ws.dir / "dirty.txt";
    REQUIRE(ws.run("contaminate --in " + path_file.string() +
                   " --kind outliers --fraction 0.05 --snr -20 --seed 4 --out " + dirty.string()) == 0);
    CHECK(Workspace::line_count(dirty) == 300);

    fs::remove(fs::path(path_file.string() + ".meta.json"));
    std::string err;
    const int rc = ws.run("contaminate --in " + path_file.string() +
                          " --kind outliers --seed 4 --out " + dirty.string(), nullptr, &err);
    CHECK(rc != 0);
    const auto parsed = json::parse(err);
    CHECK(parsed["errors"][0]["code"] == "io");
  }

  SUBCASE("select-p emits a curve and a summary") {
    REQUIRE(ws.run("simulate --hurst 0.5 --n 400 --seed 21 --out " + path_file.string()) == 0);
    const fs::path curve = ws.dir / "curve.csv";
    std::string out;
    const int rc = ws.run("select-p --in " + path_file.string() +
                          " --contaminator none --grid 0.2:0.8:0.3 --B 20 --seed 7 --out " +
                          curve.string(), &out);
    REQUIRE(rc == 0);
    const auto summary = json::parse(out);
    CHECK(summary.contains("p_opt"));
    CHECK(summary["dropped"] == 0);
    CHECK(Workspace::line_count(curve) == 4);  // header + 3 grid points
  }

  SUBCASE("experiment runs a tiny config end to end") {
    const fs::path cfg_file = ws.dir / "cfg.json";
    {
      std::ofstream cfg(cfg_file);
      cfg << R"({
        "replications": 10,
        "master_seed": 31,
        "scenarios": [{"model": "standard", "hurst": 0.4, "sigma": 1.0, "n": 128}],
        "methods": [{"method": "st"}, {"method": "tm"}],
        "figures": {"enabled": false}
      })";
    }
    const fs::path out_dir = ws.dir / "exp";
    REQUIRE(ws.run("experiment --config " + cfg_file.string() + " --out-dir " + out_dir.string()) == 0);
    for (const char* name : {"tables.csv", "report.json", "log.txt"}) {
      CAPTURE(name);
      CHECK(fs::exists(out_dir / name));
    }

    std::string err;
    CHECK(ws.run("experiment --config " + (ws.dir / "missing.json").string() + " --out-dir " +
                 out_dir.string(), nullptr, &err) != 0);
    CHECK(json::parse(err)["errors"][0]["code"] == "io");
  }

  SUBCASE("default config can be printed") {
    std::string out;
    REQUIRE(ws.run("experiment --print-default-config", &out) == 0);
    const auto cfg = json::parse(out);
    CHECK(cfg["replications"] == 200);
    CHECK(cfg["scenarios"].size() == 12);
  }

  SUBCASE("bad invocations fail with machine-readable errors") {
    std::string err;
    CHECK(ws.run("simulate --hurst 1.7 --n 100 --seed 1 --out " + path_file.string(), nullptr,
                 &err) != 0);
    CHECK(json::parse(err)["errors"][0]["code"] == "domain");
    CHECK(ws.run("estimate --in " + (ws.dir / "nope.txt").string(), nullptr, &err) != 0);
  }
}
