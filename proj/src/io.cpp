#include "vrm/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>

#include "vrm/errors.hpp"

namespace vrm {

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError(where + ": unknown field \"" + key + "\"");
  }
}

namespace {

template <class T>
T get(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing field \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback, const std::string& where) {
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

Scope scope_from(const std::string& s) {
  if (s == "inputs") return Scope::inputs;
  if (s == "joint") return Scope::joint;
  throw ConfigError("vicinity.scope: expected \"inputs\" or \"joint\", got \"" + s + "\"");
}

LossKind loss_kind_from(const std::string& s) {
  if (s == "squared") return LossKind::squared;
  if (s == "zero_one") return LossKind::zero_one;
  if (s == "hinge") return LossKind::hinge;
  throw ConfigError("loss.kind: unknown loss \"" + s + "\"");
}

}  // namespace

// ---------------------------------------------------------------------------
// Distributions

Json to_json(const SyntheticDistribution& dist) {
  return std::visit(
      [](const auto& d) -> Json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, UniformCube>) {
          return {{"kind", "uniform_cube"}, {"dim", d.dim}, {"input_dim", d.input_dim}, {"lo", d.lo}, {"hi", d.hi}};
        } else if constexpr (std::is_same_v<T, DiagonalGaussian>) {
          return {{"kind", "diagonal_gaussian"}, {"mean", d.mean}, {"sigma", d.sigma}, {"input_dim", d.input_dim}};
        } else if constexpr (std::is_same_v<T, GaussianMixture>) {
          return {{"kind", "gaussian_mixture"}, {"weights", d.weights}, {"means", d.means},
                  {"sigmas", d.sigmas}, {"input_dim", d.input_dim}};
        } else {
          return {{"kind", "linear_regression"}, {"w_star", d.w_star}, {"bias", d.bias},
                  {"noise_sigma", d.noise_sigma}, {"x_lo", d.x_lo}, {"x_hi", d.x_hi}};
        }
      },
      dist);
}

SyntheticDistribution distribution_from_json(const Json& j) {
  const std::string where = "distribution";
  const auto kind = get<std::string>(j, "kind", where);
  SyntheticDistribution out;
  if (kind == "uniform_cube") {
    check_keys(j, {"kind", "dim", "input_dim", "lo", "hi"}, where);
    out = UniformCube{get_or<std::size_t>(j, "dim", 2, where), get_or<std::size_t>(j, "input_dim", 1, where),
                      get_or(j, "lo", 0.0, where), get_or(j, "hi", 1.0, where)};
  } else if (kind == "diagonal_gaussian") {
    check_keys(j, {"kind", "mean", "sigma", "input_dim"}, where);
    out = DiagonalGaussian{get<std::vector<double>>(j, "mean", where), get<std::vector<double>>(j, "sigma", where),
                           get_or<std::size_t>(j, "input_dim", 1, where)};
  } else if (kind == "gaussian_mixture") {
    check_keys(j, {"kind", "weights", "means", "sigmas", "input_dim"}, where);
    out = GaussianMixture{get<std::vector<double>>(j, "weights", where),
                          get<std::vector<std::vector<double>>>(j, "means", where),
                          get<std::vector<std::vector<double>>>(j, "sigmas", where),
                          get_or<std::size_t>(j, "input_dim", 1, where)};
  } else if (kind == "linear_regression") {
    check_keys(j, {"kind", "w_star", "bias", "noise_sigma", "x_lo", "x_hi"}, where);
    out = LinearRegressionTask{get<std::vector<double>>(j, "w_star", where), get_or(j, "bias", 0.0, where),
                               get_or(j, "noise_sigma", 0.1, where), get_or(j, "x_lo", -1.0, where),
                               get_or(j, "x_hi", 1.0, where)};
  } else {
    throw ConfigError(where + ".kind: unknown distribution \"" + kind + "\"");
  }
  validate(out);
  return out;
}

// ---------------------------------------------------------------------------
// Sample sets, vicinities, losses, hypotheses

Json to_json(const SampleSet& s) {
  Json rows = Json::array();
  for (std::size_t n = 0; n < s.size(); ++n) rows.push_back(std::vector<double>(s.row(n).begin(), s.row(n).end()));
  return {{"input_dim", s.input_dim()}, {"rows", rows}};
}

SampleSet sample_set_from_json(const Json& j) {
  check_keys(j, {"input_dim", "rows"}, "sample set");
  return SampleSet::from_rows(get<std::vector<std::vector<double>>>(j, "rows", "sample set"),
                              get<std::size_t>(j, "input_dim", "sample set"));
}

Json to_json(const VicinitySpec& spec) {
  Json j = {{"kind", spec.kind_name()}, {"scope", scope_name(spec.scope)}};
  if (const auto* ball = std::get_if<UniformBall>(&spec.kind)) {
    j["radius"] = ball->radius;
  } else if (const auto* g = std::get_if<Gaussian>(&spec.kind)) {
    j["sigma"] = g->sigma;
    j["covariance"] = g->covariance;
  } else if (const auto* mix = std::get_if<Mixup>(&spec.kind)) {
    j["alpha"] = mix->alpha;
    if (mix->fixed_lambda) j["lambda"] = *mix->fixed_lambda;
    if (mix->pool) j["pool"] = to_json(*mix->pool);
  }
  return j;
}

VicinitySpec vicinity_from_json(const Json& j) {
  const std::string where = "vicinity";
  const auto kind = get<std::string>(j, "kind", where);
  VicinitySpec spec;
  if (kind == "dirac") {
    check_keys(j, {"kind", "scope"}, where);
    spec = VicinitySpec::dirac();
  } else if (kind == "uniform_ball") {
    check_keys(j, {"kind", "scope", "radius"}, where);
    spec = VicinitySpec::uniform_ball(get<double>(j, "radius", where));
  } else if (kind == "gaussian") {
    check_keys(j, {"kind", "scope", "sigma", "covariance"}, where);
    Gaussian g;
    if (j.contains("sigma")) {
      g.sigma = j.at("sigma").is_number() ? std::vector<double>{get<double>(j, "sigma", where)}
                                          : get<std::vector<double>>(j, "sigma", where);
    }
    g.covariance = get_or<std::vector<double>>(j, "covariance", {}, where);
    if (!g.covariance.empty() && !j.contains("sigma")) g.sigma.clear();
    spec = VicinitySpec{g, Scope::inputs};
  } else if (kind == "mixup") {
    check_keys(j, {"kind", "scope", "alpha", "lambda", "pool"}, where);
    std::shared_ptr<const SampleSet> pool;
    if (j.contains("pool")) pool = std::make_shared<const SampleSet>(sample_set_from_json(j.at("pool")));
    std::optional<double> lambda;
    if (j.contains("lambda")) lambda = get<double>(j, "lambda", where);
    spec = VicinitySpec::mixup(get_or(j, "alpha", 1.0, where), pool, lambda);
  } else {
    throw ConfigError(where + ".kind: unknown vicinity \"" + kind + "\"");
  }
  if (j.contains("scope")) {
    const Scope scope = scope_from(get<std::string>(j, "scope", where));
    if (!spec.is_mixup()) spec.scope = scope;
    else if (scope != Scope::joint) throw ConfigError("vicinity.scope: mixup is always joint");
  }
  spec.validate();
  return spec;
}

Json to_json(const LossSpec& loss) {
  return {{"kind", loss_name(loss.kind)}, {"threshold", loss.threshold}, {"lower", loss.lower}, {"upper", loss.upper}};
}

LossSpec loss_from_json(const Json& j) {
  const std::string where = "loss";
  check_keys(j, {"kind", "threshold", "lower", "upper"}, where);
  const LossKind kind = loss_kind_from(get_or<std::string>(j, "kind", "squared", where));
  LossSpec loss = kind == LossKind::squared  ? LossSpec::squared()
                  : kind == LossKind::hinge  ? LossSpec::hinge()
                                             : LossSpec::zero_one();
  loss.threshold = get_or(j, "threshold", loss.threshold, where);
  loss.lower = get_or(j, "lower", loss.lower, where);
  loss.upper = get_or(j, "upper", loss.upper, where);
  loss.validate();
  return loss;
}

Json to_json(const Hypothesis& h) {
  if (h.kind() == Hypothesis::Kind::constant)
    return {{"kind", "constant"}, {"value", h.value()}, {"offset", h.offset()}};
  return {{"kind", "linear"}, {"weights", h.weights()}, {"bias", h.bias()},
          {"input_dim", h.input_dim()}, {"offset", h.offset()}};
}

Hypothesis hypothesis_from_json(const Json& j) {
  const std::string where = "hypothesis";
  const auto kind = get_or<std::string>(j, "kind", "linear", where);
  if (kind == "constant") {
    check_keys(j, {"kind", "value", "offset"}, where);
    return Hypothesis::constant(get<double>(j, "value", where)).shifted(get_or(j, "offset", 0.0, where));
  }
  if (kind != "linear") throw ConfigError(where + ".kind: unknown hypothesis \"" + kind + "\"");
  check_keys(j, {"kind", "weights", "bias", "input_dim", "offset"}, where);
  auto weights = get<std::vector<double>>(j, "weights", where);
  Hypothesis h = Hypothesis::constant(0.0);
  if (j.contains("bias") && j.at("bias").is_array()) {
    const auto bias = get<std::vector<double>>(j, "bias", where);
    const auto input_dim = get_or<std::size_t>(j, "input_dim", weights.size(), where);
    h = Hypothesis::linear(std::move(weights), bias, input_dim);
  } else {
    h = Hypothesis::linear(std::move(weights), get_or(j, "bias", 0.0, where));
  }
  return h.shifted(get_or(j, "offset", 0.0, where));
}

Json to_json(const FiniteClass& cls) {
  Json members = Json::array();
  for (const auto& h : cls.members) members.push_back(to_json(h));
  return {{"loss", to_json(cls.loss)}, {"hypotheses", members}};
}

FiniteClass class_from_json(const Json& j, std::size_t input_dim) {
  const std::string where = "class";
  check_keys(j, {"loss", "hypotheses", "random"}, where);
  const LossSpec loss = j.contains("loss") ? loss_from_json(j.at("loss")) : LossSpec::squared();
  if (j.contains("hypotheses") == j.contains("random"))
    throw ConfigError(where + ": give exactly one of \"hypotheses\" or \"random\"");
  if (j.contains("random")) {
    const Json& r = j.at("random");
    check_keys(r, {"count", "scale", "seed"}, where + ".random");
    return random_linear_class(get<std::size_t>(r, "count", where), input_dim,
                               get_or(r, "scale", 1.0, where), loss,
                               get_or<std::uint64_t>(r, "seed", 0, where));
  }
  FiniteClass cls{{}, loss};
  const Json& list = j.at("hypotheses");
  if (!list.is_array()) throw ConfigError(where + ".hypotheses: expected an array");
  for (const auto& h : list) cls.members.push_back(hypothesis_from_json(h));
  cls.validate();
  return cls;
}

// ---------------------------------------------------------------------------
// Reports

Json to_json(const Estimate& e) { return {{"value", e.value}, {"std_error", e.std_error}}; }

Json to_json(const CoverResult& c) {
  return {{"radius", c.radius}, {"size", c.size()}, {"centers", c.centers},
          {"method", cover_method_name(c.method)}};
}

Json to_json(const SandwichReport& r) {
  Json j = {{"xi", r.xi}, {"lambda", r.lambda}, {"difference_cover", r.difference_cover},
            {"upper_cover", r.upper_cover}, {"upper_holds", r.upper_holds}};
  j["lower_cover"] = r.lower_cover ? Json(*r.lower_cover) : Json(nullptr);
  j["lower_holds"] = r.lower_holds ? Json(*r.lower_holds) : Json(nullptr);
  return j;
}

Json to_json(const UenResult& r) {
  Json trace = Json::array();
  for (const auto& t : r.trace) trace.push_back({{"restart", t.restart}, {"value", t.value}, {"best", t.best}});
  return {{"value", r.value}, {"trace", trace}};
}

Json to_json(const ExpectedCoverReport& r) {
  return {{"expected_cover", r.expected_cover}, {"expected_cover_se", r.expected_cover_se},
          {"uen_within", r.uen_within}, {"uen_unconstrained", r.uen_unconstrained},
          {"weight", r.weight}, {"rhs", r.rhs}, {"holds", r.holds},
          {"note", "UEN terms are random-search lower estimates"}};
}

Json to_json(const DkwDecayResult& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"n", row.n}, {"trials", row.trials}, {"tail", row.tail_estimate},
                    {"std_error", row.std_error}, {"median", row.median_statistic}});
  Json j = {{"rows", rows}, {"predicted_rate", r.predicted_rate}, {"tails_nonincreasing", r.tails_nonincreasing}};
  j["slope"] = r.slope ? Json(*r.slope) : Json(nullptr);
  j["intercept"] = r.intercept ? Json(*r.intercept) : Json(nullptr);
  j["fitted_constant"] = r.fitted_constant ? Json(*r.fitted_constant) : Json(nullptr);
  return j;
}

Json to_json(const GapResult& r) {
  Json expected = Json::array(), vicinal = Json::array();
  for (const auto& e : r.expected) expected.push_back(to_json(e));
  for (const auto& e : r.vicinal) vicinal.push_back(to_json(e));
  return {{"value", r.value}, {"argmax", r.argmax}, {"expected", expected}, {"vicinal", vicinal}};
}

Json to_json(const SymmetrizationReport& r) {
  return {{"lhs", r.lhs}, {"lhs_se", r.lhs_se}, {"rhs", r.rhs}, {"rhs_se", r.rhs_se},
          {"combined_se", r.combined_se}, {"holds", r.holds}, {"trials", r.trials}};
}

Json to_json(const OmegaEstimate& o) {
  Json members = Json::array();
  for (std::size_t i = 0; i < o.members.size(); ++i)
    members.push_back({{"member", o.members[i]}, {"value", o.per_member[i].value},
                       {"std_error", o.per_member[i].std_error}});
  return {{"method", omega_method_name(o.method)}, {"value", o.value}, {"std_error", o.std_error},
          {"radius", o.radius}, {"cover_size", o.cover_size()}, {"argmax", o.argmax}, {"members", members}};
}

Json to_json(const EtaTriple& e) {
  return {{"eta", e.eta}, {"eta1", e.eta1}, {"eta2", e.eta2}, {"eta_se", e.eta_se},
          {"eta1_se", e.eta1_se}, {"eta2_se", e.eta2_se}, {"tau", e.tau}};
}

Json to_json(const EtaSignReport& r) {
  return {{"probability", r.probability}, {"std_error", r.std_error}, {"mean_tau", r.mean_tau},
          {"max_tau", r.max_tau}, {"trials", r.trials}};
}

Json to_json(const BoundReport& r) {
  Json j = {{"trial", r.trial}, {"gap", r.gap}, {"omega", r.omega}, {"cover_size", r.cover_size},
            {"cover_bound", r.cover_bound}, {"violated", r.violated}};
  j["uen_bound"] = r.uen_bound ? Json(*r.uen_bound) : Json(nullptr);
  return j;
}

Json to_json(const CoverageReport& r) {
  return {{"trials", r.trials}, {"violations", r.violations}, {"frequency", r.frequency},
          {"std_error", r.std_error}, {"threshold", r.threshold}, {"passes", r.passes},
          {"t", r.t}, {"xi", r.xi}};
}

// ---------------------------------------------------------------------------
// Files

std::string format_number(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

std::string format_number(std::size_t v) { return std::to_string(v); }

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016" PRIx64, h);
  return buffer;
}

CsvWriter::CsvWriter(std::filesystem::path path, std::string config_hash, std::vector<std::string> columns)
    : path_(std::move(path)), hash_(std::move(config_hash)), columns_(std::move(columns)) {}

void CsvWriter::add(std::vector<std::string> row) {
  require(row.size() == columns_.size(), "CSV row matches header");
  rows_.push_back(std::move(row));
}

std::filesystem::path CsvWriter::write() const {
  std::filesystem::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path_.string());
  out << "# vrm " << kVersion << " config=" << hash_ << "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << columns_[i];
  out << "\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
  return path_;
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace vrm
