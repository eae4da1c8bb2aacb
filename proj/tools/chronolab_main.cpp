// Command-line front end: validate a config, run the experiment, or verify
// an existing run directory against its manifest (--check).
//
// Exit codes: 0 success, 1 config error, 2 runtime/capacity error, 3 IO error.

#include <cstdio>
#include <exception>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "chronolab/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"chronolab: config-driven time-crystal experiment runner"};
  std::string config_path, out_override;
  std::uint64_t seed_override = 0;
  bool have_seed = false, check = false;
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;

  app.add_option("--config", config_path, "experiment config file (JSON)");
  app.add_option("--seed", seed_override, "override the config's master seed")
      ->each([&](const std::string&) { have_seed = true; });
  app.add_option("--out", out_override, "override the output directory");
  app.add_option("--workers", workers, "worker threads for ensembles")
      ->check(CLI::PositiveNumber);
  app.add_flag("--check", check,
               "verify artifact hashes against the manifest in --out (or the "
               "config's output directory) instead of running");
  CLI11_PARSE(app, argc, argv);

  using namespace chronolab;
  try {
    if (check && config_path.empty()) {
      if (out_override.empty()) {
        std::fprintf(stderr, "config error: --check needs --out or --config\n");
        return 1;
      }
      auto problems = cli::check_manifest(out_override);
      for (const auto& p : problems)
        std::fprintf(stderr, "check: %s\n", p.c_str());
      if (!problems.empty()) return 2;
      std::printf("check: all artifacts match the manifest\n");
      return 0;
    }
    if (config_path.empty()) {
      std::fprintf(stderr, "config error: --config is required\n");
      return 1;
    }
    auto cfg = cli::validate_config(lab::read_text_file(config_path));
    if (have_seed) cfg.seed = seed_override;
    if (!out_override.empty()) cfg.output = out_override;
    if (check) {
      auto problems = cli::check_manifest(cfg.output);
      for (const auto& p : problems)
        std::fprintf(stderr, "check: %s\n", p.c_str());
      if (!problems.empty()) return 2;
      std::printf("check: all artifacts match the manifest\n");
      return 0;
    }
    auto man = cli::run_experiment(cfg, workers);
    std::printf("%s: wrote %zu artifact(s) to %s in %.2f s\n",
                cfg.experiment.c_str(), man.artifacts.size(),
                cfg.output.c_str(), man.wall_seconds);
    return 0;
  } catch (const config_error& e) {
    std::fprintf(stderr, "config error:\n%s\n", e.what());
    return 1;
  } catch (const io_error& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return 2;
  }
}
