#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "vrm/errors.hpp"
#include "vrm/run.hpp"

using namespace vrm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("vrm_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(const std::string& args) {
  const int status = std::system((std::string(VRM_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("distribution and vicinity json round trip") {
  const std::vector<SyntheticDistribution> dists = {
      UniformCube{3, 2, -1.0, 2.0}, DiagonalGaussian{{0.0, 1.0}, {1.0, 0.5}, 1},
      GaussianMixture{{0.3, 0.7}, {{0.0, 0.0}, {2.0, 2.0}}, {{1.0, 1.0}, {0.5, 0.5}}, 1},
      LinearRegressionTask{{1.0, -2.0}, 0.5, 0.1, -1.0, 1.0}};
  for (const auto& d : dists) CHECK(to_json(distribution_from_json(to_json(d))) == to_json(d));
  const std::vector<VicinitySpec> specs = {VicinitySpec::dirac(), VicinitySpec::uniform_ball(0.3, Scope::joint),
                                           VicinitySpec::gaussian({0.1, 0.2}),
                                           VicinitySpec::gaussian_covariance({1.0, 0.2, 0.2, 1.0}),
                                           VicinitySpec::mixup(0.4, nullptr, 0.7)};
  for (const auto& s : specs) CHECK(to_json(vicinity_from_json(to_json(s))) == to_json(s));
}

TEST_CASE("class and sample json round trip") {
  const FiniteClass cls = random_linear_class(3, 2, 1.0, LossSpec::hinge(3.0), 5);
  const FiniteClass back = class_from_json(to_json(cls), 2);
  CHECK(back.members == cls.members);
  CHECK(back.loss == cls.loss);
  const Json random = {{"loss", {{"kind", "squared"}}}, {"random", {{"count", 3}, {"scale", 1.0}, {"seed", 5}}}};
  CHECK(class_from_json(random, 2).members == random_linear_class(3, 2, 1.0, LossSpec::squared(), 5).members);
  const SampleSet z = sample(LinearRegressionTask{{1.0}}, 5, 1);
  CHECK(sample_set_from_json(to_json(z)).data().size() == z.data().size());
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(config_from_json(Json{{"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json{{"experiment", "nope"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json{{"trials", "many"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json{{"t", 1.5}}), ConfigError);
  CHECK_THROWS_AS(config_from_json(Json{{"vicinity", {{"kind", "gaussian"}, {"sigmaa", 0.1}}}}), ConfigError);
  const RunConfig c = config_from_json(Json{{"seed", 9}, {"n", 50}});
  CHECK(c.seed == 9);
  CHECK(c.n == 50);
  CHECK(config_from_json(to_json(c)).seed == 9);
  CHECK(config_hash(c) == config_hash(config_from_json(to_json(c))));
  RunConfig moved = c;
  moved.out = "/elsewhere";
  moved.workers = 3;
  CHECK(config_hash(moved) == config_hash(c));
  moved.seed = 10;
  CHECK(config_hash(moved) != config_hash(c));
}

TEST_CASE("dkw run writes one row per grid size") {
  RunConfig c;
  c.experiment = "dkw";
  c.trials = 100;
  c.n_grid = {10, 20, 40};
  c.out = scratch("dkw").string();
  const RunOutcome r = run(c);
  REQUIRE(r.exit_code == kExitOk);
  const std::string csv = slurp(fs::path(c.out) / "dkw.csv");
  CHECK(csv.rfind("# vrm " + std::string(kVersion) + " config=" + config_hash(c), 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2 + c.n_grid.size());
  CHECK(fs::exists(fs::path(c.out) / "summary.json"));
  const RunConfig reloaded = load_config(fs::path(c.out) / "config.json");
  CHECK(config_hash(reloaded) == config_hash(c));
}

TEST_CASE("bound run is reproducible") {
  RunConfig c;
  c.experiment = "bound";
  c.uen_budget = 3;
  c.risk_draws = 2000;
  c.phi_draws = 16;
  c.out = scratch("bound_a").string();
  REQUIRE(run(c).exit_code == kExitOk);
  const std::string first = slurp(fs::path(c.out) / "bound.csv");
  c.out = scratch("bound_b").string();
  REQUIRE(run(c).exit_code == kExitOk);
  CHECK(slurp(fs::path(c.out) / "bound.csv") == first);
}

TEST_CASE("precondition failures name the condition") {
  RunConfig c;
  c.experiment = "gap";
  c.n = 50;
  c.out = scratch("gap").string();
  const RunOutcome r = run(c);
  CHECK(r.exit_code == kExitPrecondition);
  const Json err = Json::parse(r.error);
  CHECK(err["error"] == "precondition");
  CHECK(err["condition"] == "N >= 8(b-a)^2/xi^2");
}

TEST_CASE("cli exit codes") {
  const fs::path dir = scratch("cli");
  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << R"({"unknown": 1})";
  CHECK(cli("--version") == 0);
  CHECK(cli("--config " + bad.string()) == kExitConfig);
  CHECK(cli("--config " + (dir / "missing.json").string()) == kExitConfig);
  CHECK(cli("--bogus-flag") == kExitConfig);
  const fs::path grid = dir / "grid.json";
  std::ofstream(grid) << R"({"n_grid": [10, 20]})";
  CHECK(cli("--config " + grid.string() + " --out " + (dir / "g").string() + " --trials 100 --seed 3 run dkw") ==
        kExitOk);
  CHECK(load_config(dir / "g" / "config.json").seed == 3);
  const fs::path small = dir / "small.json";
  std::ofstream(small) << R"({"n": 50})";
  CHECK(cli("--config " + small.string() + " --out " + (dir / "p").string() + " --experiment gap") ==
        kExitPrecondition);
  CHECK(cli("--out " + (dir / "p").string() + " --trials 10 run eta") == kExitPrecondition);
}
