// End-to-end CLI behavior, in process: exit codes, artifacts, determinism.
#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "../tools/cli_app.hpp"

using namespace gradflow;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("gradflow_cli_" + std::to_string(Catch::rngSeed()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::vector<std::string>& args, std::string* out_text = nullptr,
            std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = cli::cli_main(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

const char* kRunConfig = R"({
  "name": "clitest",
  "model": {"name": "allen-cahn", "eps": 0.08, "lambda": 1.0, "s": 4.0},
  "grid": {"Lx": "2*pi", "Ly": "2*pi", "Nx": 32, "Ny": 32},
  "scheme": {"name": "csav-cn", "dt": 0.01, "alpha": 1e-4},
  "initial": {"kind": "two_bubbles", "eps": 0.08,
              "bubbles": [["pi-0.8", "pi", 1.4], ["pi+1.7", "pi", 0.5]]},
  "output": {"snapshot_times": [0.0, 0.05]},
  "experiment": {"kind": "run", "T_final": 0.05}
})";

std::string write_config(const TempDir& tmp, const std::string& name, const std::string& text) {
  const std::string path = tmp.file(name);
  std::ofstream f(path);
  f << text;
  return path;
}

size_t line_count(const std::string& path) {
  std::ifstream f(path);
  size_t n = 0;
  std::string line;
  while (std::getline(f, line)) ++n;
  return n;
}

}  // namespace

TEST_CASE("cli lists presets") {
  std::string out;
  REQUIRE(run_cli({"list-presets"}, &out) == cli::kExitOk);
  REQUIRE(out.find("table1-ac") != std::string::npos);
  REQUIRE(out.find("example8") != std::string::npos);
}

TEST_CASE("cli argument and config errors exit with the validation code") {
  REQUIRE(run_cli({}) == cli::kExitValidation);                       // no subcommand
  REQUIRE(run_cli({"run", "--bogus-flag"}) == cli::kExitValidation);  // unknown option
  REQUIRE(run_cli({"run", "--no-artifacts"}) == cli::kExitValidation);  // no config source
  REQUIRE(run_cli({"run", "--preset", "no-such"}) == cli::kExitValidation);
  TempDir tmp;
  const std::string bad = write_config(tmp, "bad.json", "{ not json");
  REQUIRE(run_cli({"run", "--config", bad}) == cli::kExitValidation);
  const std::string both = write_config(tmp, "ok.json", kRunConfig);
  REQUIRE(run_cli({"run", "--config", both, "--preset", "table1-ac"}) ==
          cli::kExitValidation);
  REQUIRE(run_cli({"--help"}) == cli::kExitOk);
}

TEST_CASE("cli reports a missing config file as an i/o failure") {
  REQUIRE(run_cli({"run", "--config", "/nonexistent/path.json"}) == cli::kExitIo);
}

TEST_CASE("cli run writes the full artifact set") {
  TempDir tmp;
  const std::string cfg = write_config(tmp, "cfg.json", kRunConfig);
  const std::string dir = tmp.file("run1");
  std::string out;
  REQUIRE(run_cli({"run", "--config", cfg, "--output", dir}, &out) == cli::kExitOk);
  REQUIRE(out.find("5 steps") != std::string::npos);

  REQUIRE(fs::exists(dir + "/trace.csv"));
  REQUIRE(fs::exists(dir + "/summary.json"));
  REQUIRE(fs::exists(dir + "/manifest.json"));
  REQUIRE(fs::exists(dir + "/snap_00_t0.bin"));
  REQUIRE(fs::exists(dir + "/snap_01_t0.05.bin"));
  REQUIRE(line_count(dir + "/trace.csv") == 7);  // header + 6 records

  const Json summary = Json::parse(read_text_file(dir + "/summary.json"));
  REQUIRE(summary["diverged"] == false);
  REQUIRE(summary["steps"] == 5);
  REQUIRE(summary["energy_monotone"] == true);

  SECTION("manifest config round-trips") {
    const Json manifest = Json::parse(read_text_file(dir + "/manifest.json"));
    REQUIRE(manifest["library_version"] == kVersion);
    REQUIRE(manifest["scheme"] == "csav-cn");
    const Json stored = manifest["config"];
    REQUIRE_NOTHROW(parse_config(stored));
    REQUIRE(stored == Json::parse(kRunConfig));  // echoed verbatim, no injected defaults
  }

  SECTION("identical configs give byte-identical traces") {
    const std::string dir2 = tmp.file("run2");
    REQUIRE(run_cli({"run", "--config", cfg, "--output", dir2}) == cli::kExitOk);
    REQUIRE(read_text_file(dir + "/trace.csv") == read_text_file(dir2 + "/trace.csv"));
  }

  SECTION("an existing output directory is refused") {
    REQUIRE(run_cli({"run", "--config", cfg, "--output", dir}) == cli::kExitIo);
  }
}

TEST_CASE("cli --set overrides reach the run and the manifest") {
  TempDir tmp;
  const std::string cfg = write_config(tmp, "cfg.json", kRunConfig);
  const std::string dir = tmp.file("run");
  std::string out;
  REQUIRE(run_cli({"run", "--config", cfg, "--set", "scheme.dt=0.025", "--output", dir},
                  &out) == cli::kExitOk);
  REQUIRE(out.find("2 steps") != std::string::npos);
  const Json manifest = Json::parse(read_text_file(dir + "/manifest.json"));
  REQUIRE(manifest["config"]["scheme"]["dt"] == 0.025);
}

TEST_CASE("cli run flushes partial artifacts and exits 2 on divergence") {
  TempDir tmp;
  Json doc = Json::parse(kRunConfig);
  doc["scheme"]["name"] = "csav-bdf1";
  doc["initial"] = Json::parse(R"({"kind": "constant", "value": 1e80})");
  doc["output"] = Json::parse(R"({"snapshot_times": []})");
  const std::string cfg = write_config(tmp, "boom.json", doc.dump());
  const std::string dir = tmp.file("boom");
  std::string err;
  REQUIRE(run_cli({"run", "--config", cfg, "--output", dir}, nullptr, &err) ==
          cli::kExitDiverged);
  REQUIRE(err.find("divergence") != std::string::npos);
  REQUIRE(fs::exists(dir + "/trace.csv"));
  REQUIRE(line_count(dir + "/trace.csv") >= 2);  // header + the initial record
  const Json summary = Json::parse(read_text_file(dir + "/summary.json"));
  REQUIRE(summary["diverged"] == true);
}

TEST_CASE("cli run rejects out-of-range snapshots before creating the directory") {
  TempDir tmp;
  const std::string cfg = write_config(tmp, "cfg.json", kRunConfig);
  const std::string dir = tmp.file("late_snap");
  std::string err;
  REQUIRE(run_cli({"run", "--config", cfg, "-o", dir, "--set",
                   "output.snapshot_times=[0.0,9.0]"},
                  nullptr, &err) == cli::kExitValidation);
  REQUIRE(err.find("snapshot times") != std::string::npos);
  REQUIRE(!fs::exists(dir));  // a rejected request must not strand an empty directory
}

TEST_CASE("cli subcommand and experiment kind must agree") {
  TempDir tmp;
  const std::string cfg = write_config(tmp, "cfg.json", kRunConfig);
  REQUIRE(run_cli({"converge", "--config", cfg, "--no-artifacts"}) == cli::kExitValidation);
}

TEST_CASE("cli converge asserts the order band") {
  TempDir tmp;
  Json doc = Json::parse(kRunConfig);
  doc["experiment"] = Json::parse(
      R"({"kind": "converge", "T_final": 0.1, "dt_list": [0.02, 0.01], "alpha_list": [1e-4]})");
  const std::string cfg = write_config(tmp, "conv.json", doc.dump());

  SECTION("orders inside the band pass") {
    const std::string dir = tmp.file("conv");
    std::string out;
    REQUIRE(run_cli({"converge", "--config", cfg, "--output", dir, "--jobs", "2"}, &out) ==
            cli::kExitOk);
    REQUIRE(out.find("all orders in band") != std::string::npos);
    REQUIRE(fs::exists(dir + "/convergence.csv"));
    REQUIRE(line_count(dir + "/convergence.csv") == 3);
    const Json summary = Json::parse(read_text_file(dir + "/summary.json"));
    REQUIRE(summary["pass"] == true);
  }

  SECTION("an impossible band fails with the assertion code, artifacts intact") {
    const std::string dir = tmp.file("conv-bad");
    REQUIRE(run_cli({"converge", "--config", cfg, "--set",
                     "experiment.order_band=[3.0,3.5]", "--output", dir}) ==
            cli::kExitAssert);
    REQUIRE(fs::exists(dir + "/convergence.csv"));
    const Json summary = Json::parse(read_text_file(dir + "/summary.json"));
    REQUIRE(summary["pass"] == false);
  }
}

TEST_CASE("cli sweep handles both sweep kinds") {
  TempDir tmp;
  Json doc = Json::parse(kRunConfig);
  doc["experiment"] = Json::parse(
      R"({"kind": "sweep-alpha", "T_final": 0.1, "alpha_list": [2e-3, 1e-3]})");
  const std::string cfg = write_config(tmp, "sweep.json", doc.dump());
  const std::string dir = tmp.file("sweep");
  std::string out;
  REQUIRE(run_cli({"sweep", "--config", cfg, "--output", dir, "--jobs", "2"}, &out) ==
          cli::kExitOk);
  REQUIRE(out.find("deviations decrease") != std::string::npos);
  REQUIRE(fs::exists(dir + "/sweep.csv"));

  Json doc2 = Json::parse(kRunConfig);
  doc2["experiment"] =
      Json::parse(R"({"kind": "sweep-stability", "T_final": 0.2, "dt_list": [0.02, 0.01]})");
  const std::string cfg2 = write_config(tmp, "stab.json", doc2.dump());
  REQUIRE(run_cli({"sweep", "--config", cfg2, "--no-artifacts", "--jobs", "2"}, &out) ==
          cli::kExitOk);
  REQUIRE(out.find("monotone for every dt") != std::string::npos);
}

TEST_CASE("cli compare runs schemes against the accurate trajectory") {
  TempDir tmp;
  Json doc = Json::parse(kRunConfig);
  doc["grid"] = Json::parse(R"({"Lx": 1.0, "Ly": 1.0, "Nx": 32, "Ny": 32})");
  doc["model"] = Json::parse(R"({"name": "allen-cahn", "eps": 0.06, "lambda": 1.0, "s": 4.0})");
  doc["initial"] = Json::parse(R"({"kind": "two_bubbles", "eps": 0.06,
    "bubbles": [[0.3, 0.5, 0.19], [0.7, 0.5, 0.19]]})");
  doc["scheme"] = Json::parse(
      R"({"name": "csav-cn", "dt": 1e-3, "alpha": 1e-6, "C0": 50.0})");
  doc["experiment"] = Json::parse(
      R"({"kind": "compare", "T_final": 0.02, "schemes": ["csav-cn", "sav-cn"],
          "accurate_dt": 1e-4})");
  const std::string cfg = write_config(tmp, "cmp.json", doc.dump());
  const std::string dir = tmp.file("cmp");
  std::string out;
  REQUIRE(run_cli({"compare", "--config", cfg, "--output", dir, "--jobs", "2"}, &out) ==
          cli::kExitOk);
  REQUIRE(out.find("orderings hold") != std::string::npos);
  REQUIRE(fs::exists(dir + "/compare.csv"));
  REQUIRE(fs::exists(dir + "/accurate_trace.csv"));
  REQUIRE(line_count(dir + "/compare.csv") == 3);
}

TEST_CASE("cli --no-artifacts writes nothing") {
  TempDir tmp;
  const std::string cfg = write_config(tmp, "cfg.json", kRunConfig);
  std::string out;
  REQUIRE(run_cli({"run", "--config", cfg, "--no-artifacts"}, &out) == cli::kExitOk);
  REQUIRE(out.find("artifacts:") == std::string::npos);
}
