#include "vrm/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "vrm/cdfdist.hpp"
#include "vrm/covering.hpp"
#include "vrm/diagnostics.hpp"
#include "vrm/errors.hpp"
#include "vrm/learn.hpp"
#include "vrm/matching.hpp"

namespace vrm {

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = {"gen",   "match", "dkw", "train", "gap",      "covering",
                                               "uen",   "omega", "eta", "bound", "coverage", "all"};
  return ids;
}

// ---------------------------------------------------------------------------
// Config

namespace {

template <class T>
T field(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config.") + key + ": " + e.what());
  }
}

void check_config(const RunConfig& c) {
  const auto& ids = experiment_ids();
  if (std::find(ids.begin(), ids.end(), c.experiment) == ids.end())
    throw ConfigError("config.experiment: unknown experiment \"" + c.experiment + "\"");
  auto expect = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("config: " + what);
  };
  expect(c.trials >= 1, "trials >= 1");
  expect(c.n >= 1 && c.n <= kMaxSamples, "1 <= n <= 5000");
  expect(!c.n_grid.empty(), "n_grid non-empty");
  for (std::size_t n : c.n_grid) expect(n >= 1 && n <= kMaxSamples, "n_grid entries in [1, 5000]");
  expect(c.xi > 0.0 && c.dkw_xi > 0.0, "xi > 0 and dkw_xi > 0");
  expect(c.r > 0.0, "r > 0");
  expect(c.t > 0.0 && c.t < 1.0, "0 < t < 1");
  expect(c.c > 0.0, "c > 0");
  expect(c.range_exponent == 1 || c.range_exponent == 2, "range_exponent is 1 or 2");
  expect(c.phi_draws >= 1, "phi_draws >= 1");
  expect(c.risk_draws >= 1000, "risk_draws >= 1000");
  expect(c.uen_budget >= 1 && c.uen_n >= 1, "uen_budget >= 1 and uen_n >= 1");
  expect(c.covering_instances >= 1, "covering_instances >= 1");
  expect(c.cls.size() <= kMaxExactRows, "class has at most 20 hypotheses");
  const std::size_t inputs = input_dim_of(c.distribution);
  const std::size_t outputs = dim_of(c.distribution) - inputs;
  expect(outputs >= 1, "distribution has an output block");
  for (const auto& h : c.cls.members)
    if (h.kind() == Hypothesis::Kind::linear)
      expect(h.input_dim() == inputs && h.output_dim() == outputs,
             "hypotheses match the distribution's input and output dimensions");
}

}  // namespace

RunConfig config_from_json(const Json& j) {
  check_keys(j, {"experiment", "seed", "trials", "workers", "out", "distribution", "vicinity", "class", "n",
                 "n_grid", "xi", "dkw_xi", "r", "t", "c", "range_exponent", "phi_draws", "risk_draws",
                 "uen_budget", "uen_n", "covering_instances", "vrm_version", "config_hash"},
             "config");
  RunConfig c;
  c.experiment = field(j, "experiment", c.experiment);
  c.seed = field(j, "seed", c.seed);
  c.trials = field(j, "trials", c.trials);
  c.workers = field(j, "workers", c.workers);
  c.out = field(j, "out", c.out);
  if (j.contains("distribution")) c.distribution = distribution_from_json(j.at("distribution"));
  if (j.contains("vicinity")) c.vicinity = vicinity_from_json(j.at("vicinity"));
  if (j.contains("class"))
    c.cls = class_from_json(j.at("class"), input_dim_of(c.distribution));
  else
    c.cls = random_linear_class(5, input_dim_of(c.distribution), 1.0, LossSpec::squared(), 7);
  c.n = field(j, "n", c.n);
  c.n_grid = field(j, "n_grid", c.n_grid);
  c.xi = field(j, "xi", c.xi);
  c.dkw_xi = field(j, "dkw_xi", c.dkw_xi);
  c.r = field(j, "r", c.r);
  c.t = field(j, "t", c.t);
  c.c = field(j, "c", c.c);
  c.range_exponent = field(j, "range_exponent", c.range_exponent);
  c.phi_draws = field(j, "phi_draws", c.phi_draws);
  c.risk_draws = field(j, "risk_draws", c.risk_draws);
  c.uen_budget = field(j, "uen_budget", c.uen_budget);
  c.uen_n = field(j, "uen_n", c.uen_n);
  c.covering_instances = field(j, "covering_instances", c.covering_instances);
  check_config(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

Json to_json(const RunConfig& c) {
  return {{"experiment", c.experiment},
          {"seed", c.seed},
          {"trials", c.trials},
          {"workers", c.workers},
          {"out", c.out},
          {"distribution", to_json(c.distribution)},
          {"vicinity", to_json(c.vicinity)},
          {"class", to_json(c.cls)},
          {"n", c.n},
          {"n_grid", c.n_grid},
          {"xi", c.xi},
          {"dkw_xi", c.dkw_xi},
          {"r", c.r},
          {"t", c.t},
          {"c", c.c},
          {"range_exponent", c.range_exponent},
          {"phi_draws", c.phi_draws},
          {"risk_draws", c.risk_draws},
          {"uen_budget", c.uen_budget},
          {"uen_n", c.uen_n},
          {"covering_instances", c.covering_instances}};
}

std::string config_hash(const RunConfig& config) {
  Json j = to_json(config);
  j.erase("out");
  j.erase("workers");
  j.erase("experiment");
  return fnv1a_hex(j.dump());
}

std::filesystem::path resolve_out_dir(const RunConfig& config) {
  if (!config.out.empty()) return config.out;
  const char* root = std::getenv("VRM_OUT_ROOT");
  return std::filesystem::path(root && *root ? root : "vrm_out") / config.experiment;
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

std::string num(double v) { return format_number(v); }
std::string num(std::size_t v) { return format_number(v); }
std::string flag(bool b) { return b ? "true" : "false"; }

std::string joined(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + num(v[i]);
  return s;
}

class Context {
 public:
  Context(const RunConfig& cfg, std::string id, std::filesystem::path dir, RunOutcome& outcome)
      : cfg(cfg), id_(std::move(id)), dir_(std::move(dir)), hash_(config_hash(cfg)), outcome_(outcome) {}

  const RunConfig& cfg;

  CsvWriter csv(const std::string& name, std::vector<std::string> columns) const {
    return CsvWriter(dir_ / name, hash_, std::move(columns));
  }
  void save(const CsvWriter& w) { outcome_.files.push_back(w.write()); }

  void summary(const Json& body) {
    Json j = {{"experiment", id_}, {"vrm_version", kVersion}, {"config_hash", hash_}};
    for (const auto& [k, v] : body.items()) j[k] = v;
    const auto path = dir_ / "summary.json";
    write_json(path, j);
    outcome_.files.push_back(path);
  }

  void check(const std::string& name, bool passed, const std::string& detail = {}) {
    outcome_.assertions.push_back({id_ + ": " + name, passed, detail});
  }

  std::uint64_t seed(std::uint64_t stream) const { return derive_seed(cfg.seed, stream); }

 private:
  std::string id_;
  std::filesystem::path dir_;
  std::string hash_;
  RunOutcome& outcome_;
};

void run_gen(Context& ctx) {
  const auto& c = ctx.cfg;
  const SamplePair pair = sample_with_ghost(c.distribution, c.n, c.seed);
  auto out = ctx.csv("samples.csv", {"set", "index", "coord", "value"});
  for (auto [name, set] : {std::pair{"z", &pair.z}, std::pair{"ghost", &pair.ghost}})
    for (std::size_t n = 0; n < set->size(); ++n)
      for (std::size_t k = 0; k < set->dim(); ++k) out.add({name, num(n), num(k), num(set->row(n)[k])});
  ctx.save(out);
  ctx.summary({{"n", c.n}, {"dim", dim_of(c.distribution)}, {"input_dim", input_dim_of(c.distribution)},
               {"distribution", kind_name(c.distribution)}});
}

void run_match(Context& ctx) {
  const auto& c = ctx.cfg;
  const SamplePair pair = sample_with_ghost(c.distribution, c.n, c.seed);
  const MatchResult m = vicinity_ghost_match(pair.z, pair.ghost);
  const EmpiricalCdf ecdf(pair.z);
  auto out = ctx.csv("match.csv", {"index", "ghost_index", "distance", "cdf_distance"});
  for (std::size_t n = 0; n < m.size(); ++n)
    out.add({num(n), num(m.permutation[n]), num(m.pair_distances[n]),
             num(empirical_cdf_distance(ecdf, m.anchors.row(n), m.ghosts.row(n)))});
  ctx.save(out);
  const PairContainment within = pair_containment(m, ecdf, c.r);
  ctx.summary({{"total_cost", m.total_cost},
               {"max_cdf_distance", max_pair_cdf_distance(m, ecdf)},
               {"r", c.r},
               {"fraction_within_r", within.fraction_within},
               {"all_within_r", within.all_within}});
}

void run_dkw(Context& ctx) {
  const auto& c = ctx.cfg;
  const DkwDecayResult r = dkw_decay_experiment(c.distribution, c.n_grid, c.dkw_xi, c.trials, c.seed, c.workers);
  auto out = ctx.csv("dkw.csv", {"n", "trials", "tail", "std_error", "median_statistic"});
  for (const auto& row : r.rows)
    out.add({num(row.n), num(row.trials), num(row.tail_estimate), num(row.std_error), num(row.median_statistic)});
  ctx.save(out);
  const Estimate e1 = event_e1_probability(c.distribution, c.n, c.r, c.trials, ctx.seed(1), c.workers);
  Json s = to_json(r);
  s["xi"] = c.dkw_xi;
  s["event_e1"] = {{"n", c.n}, {"r", c.r}, {"probability", e1.value}, {"std_error", e1.std_error}};
  ctx.summary(s);
  ctx.check("tail estimates nonincreasing in N", r.tails_nonincreasing);
}

void run_train(Context& ctx) {
  const auto& c = ctx.cfg;
  const SampleSet z = sample(c.distribution, c.n, c.seed);
  auto out = ctx.csv("train.csv", {"method", "model", "member", "objective", "test_risk", "test_risk_se",
                                   "converged", "weights", "bias"});
  auto record = [&](const char* method, const char* model, const TrainResult& r, const LossSpec& loss) {
    const Estimate test = expected_risk(LossFunction(r.hypothesis, loss), c.distribution, c.risk_draws, ctx.seed(3));
    out.add({method, model, r.index ? num(*r.index) : "", num(r.objective), num(test.value), num(test.std_error),
             flag(r.converged), joined(r.hypothesis.weights()), joined(r.hypothesis.bias())});
  };
  record("erm", "finite", erm_train(c.cls, z), c.cls.loss);
  record("vrm", "finite", vrm_train(c.cls, z, c.vicinity, c.phi_draws, ctx.seed(2)), c.cls.loss);
  Json s = {{"n", c.n}};
  if (c.cls.loss.kind == LossKind::squared && dim_of(c.distribution) - input_dim_of(c.distribution) == 1) {
    const LinearFamily family{input_dim_of(c.distribution), -10.0, 10.0, true, c.cls.loss};
    const TrainResult erm = erm_train(family, z);
    const TrainResult vrm = vrm_train(family, z, c.vicinity, c.phi_draws, ctx.seed(2));
    record("erm", "linear", erm, family.loss);
    record("vrm", "linear", vrm, family.loss);
    auto trace = ctx.csv("trace.csv", {"iteration", "risk", "gradient_norm"});
    for (const auto& row : vrm.trace) trace.add({num(row.iteration), num(row.risk), num(row.gradient_norm)});
    ctx.save(trace);
    s["linear_singular"] = erm.singular;
    s["vrm_converged"] = vrm.converged;
    s["vrm_iterations"] = vrm.trace.size();
  }
  ctx.save(out);
  ctx.summary(s);
}

void run_gap(Context& ctx) {
  const auto& c = ctx.cfg;
  const SampleSet z = sample(c.distribution, c.n, c.seed);
  const RiskDraws draws{c.phi_draws, c.risk_draws};
  auto out = ctx.csv("gap.csv", {"vicinity", "member", "expected", "expected_se", "vicinal", "vicinal_se", "gap"});
  Json s;
  for (const VicinitySpec& spec : {c.vicinity, VicinitySpec::dirac()}) {
    const GapResult g = generalization_gap(c.cls, z, spec, c.distribution, draws, ctx.seed(1));
    for (std::size_t i = 0; i < g.expected.size(); ++i)
      out.add({spec.kind_name(), num(i), num(g.expected[i].value), num(g.expected[i].std_error),
               num(g.vicinal[i].value), num(g.vicinal[i].std_error),
               num(g.expected[i].value - g.vicinal[i].value)});
    s["gap_" + spec.kind_name()] = {{"value", g.value}, {"argmax", g.argmax}};
  }
  ctx.save(out);
  const SymmetrizationReport sym =
      symmetrization_check(c.cls, c.distribution, c.n, c.vicinity, c.xi, c.trials, ctx.seed(2), draws, c.workers);
  s["symmetrization"] = to_json(sym);
  ctx.summary(s);
  ctx.check("symmetrization inequality", sym.holds);
}

void run_covering(Context& ctx) {
  const auto& c = ctx.cfg;
  auto out = ctx.csv("covering.csv", {"instance", "lambda", "difference_cover", "upper_cover", "lower_cover",
                                      "upper_holds", "lower_holds"});
  std::size_t upper = 0;
  for (std::size_t i = 0; i < c.covering_instances; ++i) {
    const SamplePair pair = sample_with_ghost(c.distribution, c.n, derive_seed(c.seed, i));
    const std::uint64_t phi_seed = ctx.seed(1000 + i);
    const double lambda =
        c.cls.size() >= 2 ? estimate_lipschitz_lambda(c.cls, c.vicinity, pair.z, c.phi_draws, phi_seed) : 1.0;
    const SandwichReport r =
        verify_covering_sandwich(c.cls, c.vicinity, pair.z, pair.ghost, c.xi, lambda, c.phi_draws, phi_seed);
    if (r.upper_holds) ++upper;
    out.add({num(i), num(lambda), num(r.difference_cover), num(r.upper_cover),
             r.lower_cover ? num(*r.lower_cover) : "", flag(r.upper_holds),
             r.lower_holds ? flag(*r.lower_holds) : ""});
  }
  ctx.save(out);

  const SampleSet z = sample(c.distribution, c.n, c.seed);
  const EvaluationMatrix f = build_function_matrix(c.cls, z);
  auto sweep = ctx.csv("cover_sizes.csv", {"radius", "exact", "greedy", "packing"});
  for (double scale : {0.125, 0.25, 0.5, 1.0, 2.0}) {
    const double radius = c.xi * scale;
    sweep.add({num(radius), num(covering_number(f, radius).size()),
               num(covering_number(f, radius, CoverMethod::greedy).size()), num(packing_lower_bound(f, radius))});
  }
  ctx.save(sweep);
  ctx.summary({{"instances", c.covering_instances}, {"upper_holds", upper}, {"xi", c.xi}});
  ctx.check("upper covering inequality on every instance", upper == c.covering_instances,
            std::to_string(upper) + "/" + std::to_string(c.covering_instances));
}

void run_uen(Context& ctx) {
  const auto& c = ctx.cfg;
  const UenOptions options{c.uen_budget, c.phi_draws, c.workers};
  const Domain domain = default_domain(c.distribution);
  const UenResult within = uen_estimate(c.cls, c.vicinity, c.xi, c.uen_n, UenMode::within(c.r), domain,
                                        ctx.seed(1), options);
  const UenResult free = uen_estimate(c.cls, c.vicinity, c.xi, c.uen_n, UenMode::unconstrained(c.r), domain,
                                      ctx.seed(1), options);
  auto out = ctx.csv("uen.csv", {"mode", "restart", "value", "best"});
  for (auto [mode, result] : {std::pair{"within_cover", &within}, std::pair{"unconstrained", &free}})
    for (const auto& row : result->trace) out.add({mode, num(row.restart), num(row.value), num(row.best)});
  ctx.save(out);
  const ExpectedCoverReport check =
      expected_cover_check(c.cls, c.vicinity, c.distribution, c.uen_n, c.xi, c.r, c.trials, c.c, ctx.seed(2), options);
  ctx.summary({{"n", c.uen_n}, {"budget", c.uen_budget}, {"uen_within", within.value},
               {"uen_unconstrained", free.value}, {"expected_cover_check", to_json(check)}});
  ctx.check("within-cover UEN <= unconstrained UEN", within.value <= free.value);
}

void run_omega(Context& ctx) {
  const auto& c = ctx.cfg;
  const OmegaEstimate cover = omega_nu_cover_form(c.cls, c.vicinity, c.distribution, c.n, c.xi, c.trials,
                                                  ctx.seed(1), {c.phi_draws, c.workers});
  const OmegaEstimate risk =
      omega_nu_risk_form(c.cls, cover.members, c.vicinity, c.distribution, c.n, c.risk_draws, ctx.seed(2));
  auto out = ctx.csv("omega.csv", {"method", "member", "value", "std_error"});
  for (const OmegaEstimate* o : {&cover, &risk})
    for (std::size_t i = 0; i < o->members.size(); ++i)
      out.add({omega_method_name(o->method), num(o->members[i]), num(o->per_member[i].value),
               num(o->per_member[i].std_error)});
  ctx.save(out);
  const double se = std::hypot(cover.std_error, risk.std_error);
  const double diff = std::abs(cover.value - risk.value);
  ctx.summary({{"cover_form", to_json(cover)}, {"risk_form", to_json(risk)}, {"combined_se", se}});
  ctx.check("cover and risk forms agree within 3 SE", diff <= 3.0 * se || diff == 0.0);
}

void run_eta(Context& ctx) {
  const auto& c = ctx.cfg;
  const EtaSignReport r = prob_eta_negative(c.cls, c.distribution, c.n, c.vicinity, c.trials, ctx.seed(1),
                                            {c.phi_draws, c.risk_draws, c.workers});
  auto out = ctx.csv("eta.csv", {"trial", "eta", "eta1", "eta2", "eta_se", "eta1_se", "eta2_se"});
  bool identity = true;
  for (std::size_t t = 0; t < r.rows.size(); ++t) {
    const EtaTriple& e = r.rows[t];
    identity = identity && e.eta == e.eta1 - e.eta2;
    out.add({num(t), num(e.eta), num(e.eta1), num(e.eta2), num(e.eta_se), num(e.eta1_se), num(e.eta2_se)});
  }
  ctx.save(out);
  ctx.summary(to_json(r));
  ctx.check("eta = eta1 - eta2 exactly", identity);
}

void run_bound(Context& ctx) {
  const auto& c = ctx.cfg;
  const double a = c.cls.loss.lower, b = c.cls.loss.upper;
  const SamplePair pair = sample_with_ghost(c.distribution, c.n, c.seed);
  const GapResult gap = generalization_gap(c.cls, pair.z, c.vicinity, c.distribution, {c.phi_draws, c.risk_draws},
                                           ctx.seed(1));
  const MatchResult match = vicinity_ghost_match(pair.z, pair.ghost);
  const CoverResult cover =
      covering_number(build_difference_matrix(c.cls, c.vicinity, match, c.phi_draws, ctx.seed(2)), c.xi / 4.0);
  const OmegaEstimate omega =
      omega_nu_risk_form(c.cls, cover.centers, c.vicinity, c.distribution, c.n, c.risk_draws, ctx.seed(3));
  const UenOptions options{c.uen_budget, c.phi_draws, c.workers};
  const Domain domain = default_domain(c.distribution);
  const std::size_t within =
      uen_estimate(c.cls, c.vicinity, c.xi, c.n, UenMode::within(c.r), domain, ctx.seed(4), options).value;
  const std::size_t free =
      uen_estimate(c.cls, c.vicinity, c.xi, c.n, UenMode::unconstrained(c.r), domain, ctx.seed(4), options).value;
  const double cover_size = static_cast<double>(cover.size());
  const double cover_rhs = cover_bound_rhs(omega.value, cover_size, c.n, c.t, a, b, 1, c.xi);
  const double cover_rhs_squared = cover_bound_rhs(omega.value, cover_size, c.n, c.t, a, b, 2, c.xi);
  const double uen_rhs = uen_bound_rhs(omega.value, static_cast<double>(within), static_cast<double>(free), c.n, c.t,
                                    a, b, c.r, dim_of(c.distribution), c.c, c.xi);
  auto out = ctx.csv("bound.csv", {"quantity", "value"});
  const std::vector<std::pair<const char*, double>> rows = {
      {"gap", gap.value},          {"omega", omega.value},         {"omega_se", omega.std_error},
      {"cover_size", cover_size},  {"uen_within", double(within)}, {"uen_unconstrained", double(free)},
      {"cover_bound_rhs", cover_rhs},        {"cover_bound_rhs_squared_range", cover_rhs_squared},
      {"uen_bound_rhs", uen_rhs}};
  for (const auto& [name, value] : rows) out.add({name, num(value)});
  ctx.save(out);
  ctx.summary({{"gap", gap.value},
               {"cover_bound_rhs", cover_rhs},
               {"cover_bound_range_exponent", 1},
               {"cover_bound_rhs_squared_range", cover_rhs_squared},
               {"uen_bound_rhs", uen_rhs},
               {"violated_cover_bound", gap.value > cover_rhs},
               {"violated_uen_bound", gap.value > uen_rhs},
               {"inputs", {{"n", c.n}, {"t", c.t}, {"a", a}, {"b", b}, {"xi", c.xi}, {"r", c.r}, {"c", c.c}}},
               {"omega", to_json(omega)},
               {"cover", to_json(cover)}});
}

void run_coverage(Context& ctx) {
  const auto& c = ctx.cfg;
  CoverageOptions options;
  options.phi_draws = c.phi_draws;
  options.risk_draws = c.risk_draws;
  options.range_exponent = c.range_exponent;
  options.workers = c.workers;
  const CoverageReport r =
      bound_coverage_experiment(c.cls, c.distribution, c.vicinity, c.n, c.t, c.xi, c.trials, ctx.seed(1), options);
  auto out = ctx.csv("coverage.csv", {"trial", "gap", "omega", "cover_size", "cover_bound_rhs", "violated"});
  for (const auto& row : r.rows)
    out.add({num(row.trial), num(row.gap), num(row.omega), num(row.cover_size), num(row.cover_bound),
             flag(row.violated)});
  ctx.save(out);
  Json s = to_json(r);
  s["range_exponent"] = c.range_exponent;
  ctx.summary(s);
  ctx.check("violation frequency <= t + 3 SE", r.passes);
}

Json stamped_config(const RunConfig& config) {
  Json j = {{"vrm_version", kVersion}, {"config_hash", config_hash(config)}};
  const Json body = to_json(config);
  for (const auto& [k, v] : body.items()) j[k] = v;
  return j;
}

void run_one(const RunConfig& config, const std::string& id, const std::filesystem::path& dir, RunOutcome& outcome) {
  std::filesystem::create_directories(dir);
  write_json(dir / "config.json", stamped_config(config));
  outcome.files.push_back(dir / "config.json");
  Context ctx(config, id, dir, outcome);
  if (id == "gen") run_gen(ctx);
  else if (id == "match") run_match(ctx);
  else if (id == "dkw") run_dkw(ctx);
  else if (id == "train") run_train(ctx);
  else if (id == "gap") run_gap(ctx);
  else if (id == "covering") run_covering(ctx);
  else if (id == "uen") run_uen(ctx);
  else if (id == "omega") run_omega(ctx);
  else if (id == "eta") run_eta(ctx);
  else if (id == "bound") run_bound(ctx);
  else if (id == "coverage") run_coverage(ctx);
}

std::string error_json(const char* kind, const std::string& message, const std::string& condition = {}) {
  Json j = {{"error", kind}, {"message", message}};
  if (!condition.empty()) j["condition"] = condition;
  return j.dump();
}

}  // namespace

RunOutcome run(const RunConfig& config) {
  RunOutcome outcome;
  try {
    check_config(config);
    const auto dir = resolve_out_dir(config);
    if (config.experiment == "all") {
      for (const auto& id : experiment_ids())
        if (id != "all") run_one(config, id, dir / id, outcome);
      write_json(dir / "config.json", stamped_config(config));
    } else {
      run_one(config, config.experiment, dir, outcome);
    }
  } catch (const ConfigError& e) {
    outcome.exit_code = kExitConfig;
    outcome.error = error_json("config", e.what());
    return outcome;
  } catch (const PreconditionError& e) {
    outcome.exit_code = kExitPrecondition;
    outcome.error = error_json("precondition", e.what(), e.condition());
    return outcome;
  } catch (const UnsupportedError& e) {
    outcome.exit_code = kExitPrecondition;
    outcome.error = error_json("unsupported", e.what());
    return outcome;
  } catch (const std::exception& e) {
    outcome.exit_code = kExitAssertion;
    outcome.error = error_json("internal", e.what());
    return outcome;
  }
  Json failed = Json::array();
  for (const auto& a : outcome.assertions)
    if (!a.passed) failed.push_back({{"assertion", a.name}, {"detail", a.detail}});
  if (!failed.empty()) {
    outcome.exit_code = kExitAssertion;
    outcome.error = Json{{"error", "assertion"}, {"failed", failed}}.dump();
  }
  return outcome;
}

}  // namespace vrm
