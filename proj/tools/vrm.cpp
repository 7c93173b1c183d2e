#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "vrm/errors.hpp"
#include "vrm/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Vicinal risk minimization experiments"};
  app.set_version_flag("--version", std::string("vrm ") + vrm::kVersion);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
  std::optional<std::string> experiment;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--out", out, "Output directory");
  app.add_option("--trials", trials, "Monte Carlo trials");
  app.add_option("--workers", workers, "Worker threads (0 = hardware concurrency)");
  app.add_option("--experiment", experiment, "Experiment id");

  std::string run_id;
  auto* run_cmd = app.add_subcommand("run", "Run one experiment or 'all'");
  run_cmd->add_option("id", run_id, "Experiment id")->required();
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : vrm::kExitConfig;
  }

  vrm::RunOutcome outcome;
  try {
    vrm::RunConfig config = config_path.empty() ? vrm::RunConfig{} : vrm::load_config(config_path);
    if (experiment) config.experiment = *experiment;
    if (*run_cmd) config.experiment = run_id;
    if (seed) config.seed = *seed;
    if (trials) config.trials = *trials;
    if (workers) config.workers = *workers;
    if (out) config.out = *out;
    outcome = vrm::run(config);
  } catch (const vrm::ConfigError& e) {
    outcome.exit_code = vrm::kExitConfig;
    outcome.error = vrm::Json{{"error", "config"}, {"message", e.what()}}.dump();
  }

  for (const auto& a : outcome.assertions)
    std::cout << (a.passed ? "ok     " : "FAILED ") << a.name << (a.detail.empty() ? "" : " (" + a.detail + ")")
              << "\n";
  for (const auto& f : outcome.files) std::cout << "wrote " << f.string() << "\n";
  if (outcome.exit_code != 0) std::cerr << outcome.error << "\n";
  return outcome.exit_code;
}
