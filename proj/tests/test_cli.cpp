#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "chronolab/cli.hpp"

using namespace chronolab;
namespace fs = std::filesystem;

namespace {

// fresh scratch directory per test run
fs::path scratch(const std::string& tag) {
  fs::path d = fs::temp_directory_path() / ("chronolab_cli_" + tag);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string error_text(const std::function<void()>& f) {
  try {
    f();
  } catch (const config_error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("validate_config: empty file names the missing experiment") {
  std::string msg = error_text([] { cli::validate_config(""); });
  REQUIRE(msg.find("missing experiment name") != std::string::npos);
  msg = error_text([] { cli::validate_config("   \n\t"); });
  REQUIRE(msg.find("missing experiment name") != std::string::npos);
}

TEST_CASE("validate_config: accepts a well-formed else_dtc config") {
  auto cfg = cli::validate_config(R"({
    "experiment": "else_dtc", "seed": 7, "output": "out",
    "params": {"L": 8, "epsilon": 0.02, "h": 0.3, "realizations": 50}
  })");
  REQUIRE(cfg.experiment == "else_dtc");
  REQUIRE(cfg.seed == 7);
  REQUIRE(cfg.output == "out");
  // defaults filled in
  REQUIRE(cfg.params.at("J").get<double>() == 1.0);
  REQUIRE(cfg.params.at("hz").get<double>() == 1.0);
  REQUIRE(cfg.params.at("periods").get<long>() == 200);
  REQUIRE(cfg.params.at("epsilon").get<double>() == 0.02);
}

TEST_CASE("validate_config: collects every violation with parameter paths") {
  std::string msg = error_text([] {
    cli::validate_config(R"({
      "experiment": "else_dtc", "seed": 1, "output": "out",
      "params": {"L": 8, "epsilon": -0.5, "realizations": "many", "bogus": 1}
    })");
  });
  // range violation, type mismatch, missing required, unknown parameter
  REQUIRE(msg.find("params.epsilon") != std::string::npos);
  REQUIRE(msg.find("outside range") != std::string::npos);
  REQUIRE(msg.find("params.realizations") != std::string::npos);
  REQUIRE(msg.find("params.h") != std::string::npos);
  REQUIRE(msg.find("params.bogus") != std::string::npos);
  REQUIRE(std::count(msg.begin(), msg.end(), '\n') == 3);  // four messages
}

TEST_CASE("validate_config: unknown experiment and missing top-level keys") {
  std::string msg = error_text(
      [] { cli::validate_config(R"({"experiment": "warp_drive"})"); });
  REQUIRE(msg.find("unknown experiment name") != std::string::npos);
  REQUIRE(msg.find("seed") != std::string::npos);
  REQUIRE(msg.find("output") != std::string::npos);
  REQUIRE(msg.find("params") != std::string::npos);

  msg = error_text([] { cli::validate_config("{\"experiment\": 3}"); });
  REQUIRE(msg.find("experiment: must be a string") != std::string::npos);

  msg = error_text([] { cli::validate_config("not json at all"); });
  REQUIRE(msg.find("not valid JSON") != std::string::npos);
}

TEST_CASE("run_experiment: identical artifacts for identical config and seed") {
  fs::path d = scratch("det");
  auto make = [&](const std::string& sub) {
    auto cfg = cli::validate_config(R"({
      "experiment": "two_mode_cat", "seed": 3, "output": "unused",
      "params": {"ratio": 4, "n_min": 10, "n_max": 30, "n_step": 10}
    })");
    cfg.output = (d / sub).string();
    return cli::run_experiment(cfg);
  };
  auto m1 = make("a");
  auto m2 = make("b");
  REQUIRE(m1.artifacts.size() == m2.artifacts.size());
  for (std::size_t k = 0; k < m1.artifacts.size(); ++k) {
    REQUIRE(m1.artifacts[k].first == m2.artifacts[k].first);
    REQUIRE(m1.artifacts[k].second == m2.artifacts[k].second);  // sha256
  }
  // a different seed must not change this seed-free experiment's data,
  // but a different ratio must
  auto cfg = cli::validate_config(R"({
    "experiment": "two_mode_cat", "seed": 3, "output": "unused",
    "params": {"ratio": 8, "n_min": 10, "n_max": 30, "n_step": 10}
  })");
  cfg.output = (d / "c").string();
  auto m3 = cli::run_experiment(cfg);
  REQUIRE(m3.artifacts[0].second != m1.artifacts[0].second);
  fs::remove_all(d);
}

TEST_CASE("run_experiment: 5x5 scan emits 25 cell records plus the matrix") {
  fs::path d = scratch("scan");
  auto cfg = cli::validate_config(R"({
    "experiment": "yao_phase_diagram", "seed": 2, "output": "unused",
    "params": {"jz_min": 0.0, "jz_max": 0.2, "jz_steps": 5,
               "eps_min": 0.0, "eps_max": 0.1, "eps_steps": 5,
               "realizations": 1, "L": 4, "periods": 16}
  })");
  cfg.output = d.string();
  auto man = cli::run_experiment(cfg);
  int cells = 0, matrices = 0;
  for (const auto& [path, hash] : man.artifacts) {
    if (path.rfind("cell_", 0) == 0) ++cells;
    if (path == "matrix.csv") ++matrices;
    REQUIRE(fs::exists(d / path));
    REQUIRE(hash.size() == 64);
  }
  REQUIRE(cells == 25);
  REQUIRE(matrices == 1);
  // matrix.csv carries the 5-entry eps header and 5 Jz rows
  std::string matrix = lab::read_text_file((d / "matrix.csv").string());
  REQUIRE(std::count(matrix.begin(), matrix.end(), '\n') == 6);
  fs::remove_all(d);
}

TEST_CASE("run_experiment: bouncer pair report carries a small splitting") {
  fs::path d = scratch("bouncer");
  auto cfg = cli::validate_config(R"({
    "experiment": "bouncer", "seed": 1, "output": "unused",
    "params": {"lambda": 0.06, "omega": 1.1}
  })");
  cfg.output = d.string();
  cli::run_experiment(cfg);
  auto j = nlohmann::json::parse(
      lab::read_text_file((d / "floquet_pair.json").string()));
  double split = j.at("splitting").get<double>();
  REQUIRE(split > 0.0);
  REQUIRE(split < 0.01 * 1.1);  // J << omega
  REQUIRE(j.at("exchange_overlap").get<double>() >= 0.9);
  fs::remove_all(d);
}

TEST_CASE("check_manifest: intact, tampered and missing artifacts") {
  fs::path d = scratch("check");
  auto cfg = cli::validate_config(R"({
    "experiment": "secular_bands", "seed": 1, "output": "unused",
    "params": {"V0": 0.5, "s": 10}
  })");
  cfg.output = d.string();
  cli::run_experiment(cfg);
  REQUIRE(cli::check_manifest(d.string()).empty());

  {
    std::ofstream f(d / "bands.csv", std::ios::app);
    f << "tampered\n";
  }
  auto problems = cli::check_manifest(d.string());
  REQUIRE(problems.size() == 1);
  REQUIRE(problems[0].find("bands.csv") != std::string::npos);
  REQUIRE(problems[0].find("hash mismatch") != std::string::npos);

  fs::remove(d / "summary.json");
  problems = cli::check_manifest(d.string());
  REQUIRE(problems.size() == 2);
  fs::remove_all(d);
  REQUIRE_THROWS_AS(cli::check_manifest(d.string()), io_error);
}

TEST_CASE("run_experiment: module failures surface as typed errors") {
  fs::path d = scratch("errors");
  // interaction matrix violating on-site dominance is unreachable from the
  // scalar-U config surface, but a capacity breach is: dim(12, 12) ~ 1.3e6
  auto cfg = cli::validate_config(R"({
    "experiment": "mott_time", "seed": 1, "output": "unused",
    "params": {"s": 12, "N": 12, "U": 20}
  })");
  cfg.output = (d / "x").string();
  REQUIRE_THROWS_AS(cli::run_experiment(cfg), capacity_error);
  fs::remove_all(d);
}
