#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vrm/io.hpp"

namespace vrm {

/// Everything an experiment run depends on. Outputs are a pure function of
/// this struct apart from `out` and `workers`.
struct RunConfig {
  std::string experiment = "all";
  std::uint64_t seed = 1;
  std::size_t trials = 200;
  unsigned workers = 0;
  std::string out;  // empty: $VRM_OUT_ROOT/<experiment>, else vrm_out/<experiment>

  SyntheticDistribution distribution = LinearRegressionTask{{1.0}, 0.0, 0.1, -1.0, 1.0};
  VicinitySpec vicinity = VicinitySpec::gaussian(0.1);
  FiniteClass cls = random_linear_class(5, 1, 1.0, LossSpec::squared(), 7);

  std::size_t n = 200;
  std::vector<std::size_t> n_grid{25, 50, 100, 200, 400};
  double xi = 0.2;
  double dkw_xi = 0.3;
  double r = 0.1;
  double t = 0.1;
  double c = 2.0;
  int range_exponent = 1;
  std::size_t phi_draws = 64;
  std::size_t risk_draws = 20000;
  std::size_t uen_budget = 50;
  std::size_t uen_n = 20;
  std::size_t covering_instances = 20;
};

const std::vector<std::string>& experiment_ids();

/// Throws ConfigError on unknown fields or invalid values. The metadata keys
/// "vrm_version" and "config_hash" written into config.json are ignored.
RunConfig config_from_json(const Json& j);
RunConfig load_config(const std::filesystem::path& path);

/// The resolved config with every field explicit.
Json to_json(const RunConfig& config);

/// Hash of the resolved config without `out` and `workers`.
std::string config_hash(const RunConfig& config);

std::filesystem::path resolve_out_dir(const RunConfig& config);

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunOutcome {
  int exit_code = 0;  // 0 ok, 2 config, 3 precondition, 4 assertion
  std::vector<std::filesystem::path> files;
  std::vector<Assertion> assertions;
  std::string error;  // machine-readable JSON when exit_code != 0
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitPrecondition = 3;
inline constexpr int kExitAssertion = 4;

/// Runs `config.experiment` (or every experiment for "all", each in its own
/// subdirectory) and writes config.json, summary.json and CSV tables.
RunOutcome run(const RunConfig& config);

}  // namespace vrm
