#include "vrm/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "vrm/errors.hpp"
#include "vrm/matching.hpp"
#include "vrm/parallel.hpp"

namespace vrm {

std::string omega_method_name(OmegaMethod method) {
  return method == OmegaMethod::cover_form ? "cover_form" : "risk_form";
}

namespace {

/// Streams (z, v) with z ~ dist and v ~ V(.|z), a pool-less Mixup drawing
/// its partner as z itself with probability 1/n and fresh otherwise.
class MeanVicinityDraws {
 public:
  MeanVicinityDraws(const SyntheticDistribution& dist, const VicinitySpec& spec, std::size_t n)
      : dist_(dist), spec_(spec), n_(n), dim_(dim_of(dist)) {
    validate(dist);
    require(n >= 1, "N >= 1");
    const auto* mix = std::get_if<Mixup>(&spec.kind);
    fresh_partner_ = mix != nullptr && !mix->pool;
    if (!fresh_partner_) sampler_.emplace(spec, dim_, input_dim_of(dist));
  }

  std::size_t dim() const noexcept { return dim_; }

  void next(Rng& rng, std::span<double> z, std::span<double> v) const {
    draw_point(dist_, rng, z);
    if (!fresh_partner_) {
      sampler_->draw(Row(z), rng, v);
      return;
    }
    const auto& mix = std::get<Mixup>(spec_.kind);
    const double lambda = mix.fixed_lambda ? *mix.fixed_lambda : beta_draw(rng, mix.alpha, mix.alpha);
    std::array<double, kMaxDim> partner{};
    if (uniform01(rng) * static_cast<double>(n_) < 1.0) {
      std::copy(z.begin(), z.end(), partner.begin());
    } else {
      draw_point(dist_, rng, std::span<double>(partner.data(), dim_));
    }
    for (std::size_t k = 0; k < dim_; ++k) v[k] = lambda * z[k] + (1.0 - lambda) * partner[k];
  }

 private:
  const SyntheticDistribution& dist_;
  VicinitySpec spec_;
  std::size_t n_;
  std::size_t dim_;
  bool fresh_partner_ = false;
  std::optional<VicinitySampler> sampler_;
};

Estimate argmax_estimate(const std::vector<Estimate>& values, std::size_t& argmax) {
  argmax = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i].value > values[argmax].value) argmax = i;
  return values[argmax];
}

}  // namespace

std::vector<Estimate> vicinity_shift_many(std::span<const PointFunction> fs,
                                          const SyntheticDistribution& dist,
                                          const VicinitySpec& spec, std::size_t n, std::size_t m,
                                          std::uint64_t seed) {
  require(m >= 1, "m >= 1");
  if (spec.is_dirac()) return std::vector<Estimate>(fs.size());
  const MeanVicinityDraws draws(dist, spec, n);
  std::array<double, kMaxDim> zb{}, vb{};
  const std::span<double> z(zb.data(), draws.dim()), v(vb.data(), draws.dim());
  std::vector<RunningStats> stats(fs.size());
  Rng rng(seed);
  for (std::size_t j = 0; j < m; ++j) {
    draws.next(rng, z, v);
    for (std::size_t i = 0; i < fs.size(); ++i) stats[i].add(fs[i](Row(z)) - fs[i](Row(v)));
  }
  std::vector<Estimate> out(fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i) out[i] = stats[i].estimate();
  return out;
}

Estimate mean_vicinity_risk(const PointFunction& f, const SyntheticDistribution& dist,
                            const VicinitySpec& spec, std::size_t n, std::size_t m,
                            std::uint64_t seed) {
  require(m >= 1, "m >= 1");
  const MeanVicinityDraws draws(dist, spec, n);
  std::array<double, kMaxDim> zb{}, vb{};
  const std::span<double> z(zb.data(), draws.dim()), v(vb.data(), draws.dim());
  RunningStats stats;
  Rng rng(seed);
  for (std::size_t j = 0; j < m; ++j) {
    draws.next(rng, z, v);
    stats.add(f(Row(v)));
  }
  return stats.estimate();
}

OmegaEstimate omega_nu_cover_form(const FiniteClass& cls, const VicinitySpec& spec,
                                  const SyntheticDistribution& dist, std::size_t n, double xi,
                                  std::size_t trials, std::uint64_t seed,
                                  const OmegaOptions& options) {
  cls.validate();
  require(cls.size() <= kMaxExactRows, "<= 20 hypotheses");
  require(xi > 0.0, "xi > 0");
  require(trials >= 1, "trials >= 1");

  std::vector<std::vector<double>> means(trials);
  std::vector<std::vector<std::size_t>> covers(trials);
  parallel_for(trials, options.workers, [&](std::size_t t) {
    const std::uint64_t s = trial_seed(seed, t);
    const SamplePair pair = sample_with_ghost(dist, n, s);
    const MatchResult match = vicinity_ghost_match(pair.z, pair.ghost);
    const EvaluationMatrix p =
        build_difference_matrix(cls, spec, match, options.phi_draws, derive_seed(s, 7));
    covers[t] = covering_number(p, xi / 4.0).centers;
    means[t].resize(p.rows());
    for (std::size_t i = 0; i < p.rows(); ++i) means[t][i] = p.row_mean(i);
  });

  std::map<std::vector<std::size_t>, std::pair<std::size_t, std::size_t>> tally;  // count, first
  for (std::size_t t = 0; t < trials; ++t) {
    auto [it, fresh] = tally.try_emplace(covers[t], 0, t);
    ++it->second.first;
  }
  const std::vector<std::size_t>* chosen = nullptr;
  std::pair<std::size_t, std::size_t> best{0, 0};
  for (const auto& [cover, stat] : tally)
    if (chosen == nullptr || stat.first > best.first ||
        (stat.first == best.first && stat.second < best.second)) {
      chosen = &cover;
      best = stat;
    }

  OmegaEstimate result;
  result.method = OmegaMethod::cover_form;
  result.radius = xi / 4.0;
  result.members = *chosen;
  for (std::size_t i : result.members) {
    RunningStats s;
    for (std::size_t t = 0; t < trials; ++t) s.add(means[t][i]);
    result.per_member.push_back(s.estimate());
  }
  std::size_t arg = 0;
  const Estimate top = argmax_estimate(result.per_member, arg);
  result.value = top.value;
  result.std_error = top.std_error;
  result.argmax = result.members[arg];
  return result;
}

OmegaEstimate omega_nu_risk_form(const FiniteClass& cls, std::span<const std::size_t> members,
                                 const VicinitySpec& spec, const SyntheticDistribution& dist,
                                 std::size_t n, std::size_t m, std::uint64_t seed) {
  cls.validate();
  require(!members.empty(), "non-empty cover");
  const FiniteClass sub = cls.subset(members);
  const auto fs = sub.functions();
  OmegaEstimate result;
  result.method = OmegaMethod::risk_form;
  result.members.assign(members.begin(), members.end());
  result.per_member = vicinity_shift_many(fs, dist, spec, n, m, seed);
  std::size_t arg = 0;
  const Estimate top = argmax_estimate(result.per_member, arg);
  result.value = top.value;
  result.std_error = top.std_error;
  result.argmax = result.members[arg];
  return result;
}

EtaTriple eta_decomposition(const PointFunction& f_nu, const SyntheticDistribution& dist,
                            const SampleSet& z, const VicinitySpec& spec, std::size_t m,
                            std::uint64_t seed, double tau) {
  const Estimate risk = expected_risk(f_nu, dist, m, derive_seed(seed, 1));
  const SampleSet vicinal = sample_vicinal(VicinalDistribution{z, spec}, m, derive_seed(seed, 2));
  RunningStats vs;
  for (std::size_t j = 0; j < vicinal.size(); ++j) vs.add(f_nu(vicinal.row(j)));
  const Estimate vic = vs.estimate();
  const Estimate mean_vic = mean_vicinity_risk(f_nu, dist, spec, z.size(), m, derive_seed(seed, 3));

  EtaTriple out;
  out.eta1 = risk.value - vic.value;
  out.eta2 = mean_vic.value - vic.value;
  out.eta = out.eta1 - out.eta2;
  out.eta1_se = std::hypot(risk.std_error, vic.std_error);
  out.eta2_se = std::hypot(mean_vic.std_error, vic.std_error);
  out.eta_se = std::hypot(risk.std_error, mean_vic.std_error);
  out.tau = tau;
  return out;
}

EtaSignReport prob_eta_negative(const FunctionClass& cls, const SyntheticDistribution& dist,
                                std::size_t n, const VicinitySpec& spec, std::size_t trials,
                                std::uint64_t seed, const EtaOptions& options) {
  require(trials >= 100, "trials >= 100");
  const LossSpec loss = std::visit([](const auto& c) { return c.loss; }, cls);
  EtaSignReport report;
  report.trials = trials;
  report.rows.resize(trials);
  parallel_for(trials, options.workers, [&](std::size_t t) {
    const std::uint64_t s = trial_seed(seed, t);
    const SampleSet z = sample(dist, n, s);
    const TrainResult trained = vrm_train(cls, z, spec, options.phi_draws, derive_seed(s, 5));
    const PointFunction f = LossFunction(trained.hypothesis, loss);
    report.rows[t] = eta_decomposition(f, dist, z, spec, options.risk_draws, derive_seed(s, 6));
  });
  std::size_t negative = 0;
  double total = 0.0;
  report.max_tau = report.rows.front().eta1;
  for (const auto& row : report.rows) {
    if (row.eta < 0.0) ++negative;
    total += row.eta1;
    report.max_tau = std::max(report.max_tau, row.eta1);
  }
  report.probability = static_cast<double>(negative) / static_cast<double>(trials);
  report.std_error = binomial_se(report.probability, trials);
  report.mean_tau = total / static_cast<double>(trials);
  for (auto& row : report.rows) row.tau = report.max_tau;
  return report;
}

// ---------------------------------------------------------------------------
// Bounds

double hoeffding_one_sided(double xi, std::span<const double> means,
                           std::span<const std::pair<double, double>> ranges) {
  require(means.size() == ranges.size(), "one range per mean");
  require(!ranges.empty(), "at least one variable");
  double mu = 0.0, spread = 0.0;
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    const auto [a, b] = ranges[i];
    require(b > a, "b_n > a_n");
    mu += means[i];
    spread += (b - a) * (b - a);
  }
  if (xi <= mu) return 1.0;
  return std::clamp(std::exp(-2.0 * (xi - mu) * (xi - mu) / spread), 0.0, 1.0);
}

namespace {

void require_bound_inputs(std::size_t n, double t, double a, double b, std::optional<double> xi) {
  require(t > 0.0 && t < 1.0, "0 < t < 1");
  require(n >= 1, "N >= 1");
  require(b > a, "b > a");
  if (xi) require_symmetrization_size(n, b - a, *xi);
}

}  // namespace

double cover_bound_rhs(double omega, double expected_covering, std::size_t n, double t, double a,
                       double b, int range_exponent, std::optional<double> xi) {
  require_bound_inputs(n, t, a, b, xi);
  require(range_exponent == 1 || range_exponent == 2, "range exponent is 1 or 2");
  require(expected_covering >= t / 2.0, "covering number >= t/2");
  const double range = range_exponent == 1 ? b - a : (b - a) * (b - a);
  const double log_term = std::log(expected_covering) - std::log(t / 2.0);
  return 4.0 * omega + std::sqrt(32.0 * range * log_term / static_cast<double>(n));
}

double uen_bound_rhs(double omega, double uen_within_r, double uen_unconstrained, std::size_t n,
                     double t, double a, double b, double r, std::size_t dim, double c,
                     std::optional<double> xi) {
  require_bound_inputs(n, t, a, b, xi);
  require(c > 0.0, "c > 0");
  require(r > 0.0, "r > 0");
  require(dim >= 1, "K >= 1");
  const double count = static_cast<double>(n);
  const double weight = c * std::exp(-count * r * r / (2.0 * static_cast<double>(dim)));
  const double inside = uen_within_r + weight * uen_unconstrained;
  require(inside >= t / 2.0, "UEN term >= t/2");
  const double log_term = std::log(inside) - std::log(t / 2.0);
  return 4.0 * omega + std::sqrt(32.0 * (b - a) * (b - a) / count) * std::sqrt(log_term);
}

CoverageReport bound_coverage_experiment(const FiniteClass& cls, const SyntheticDistribution& dist,
                                         const VicinitySpec& spec, std::size_t n, double t,
                                         double xi, std::size_t trials, std::uint64_t seed,
                                         const CoverageOptions& options) {
  cls.validate();
  require(trials >= 100, "trials >= 100");
  require(cls.size() <= kMaxExactRows, "<= 20 hypotheses");
  const double a = cls.loss.lower, b = cls.loss.upper;
  require_bound_inputs(n, t, a, b, xi);

  const auto fs = cls.functions();
  const auto expected = expected_risk_many(fs, dist, options.risk_draws, derive_seed(seed, 0xE));
  const auto shifts = vicinity_shift_many(fs, dist, spec, n, options.risk_draws, derive_seed(seed, 0x5));

  CoverageReport report;
  report.trials = trials;
  report.t = t;
  report.xi = xi;
  report.rows.resize(trials);
  parallel_for(trials, options.workers, [&](std::size_t trial) {
    const std::uint64_t s = trial_seed(seed, trial);
    const SamplePair pair = sample_with_ghost(dist, n, s);
    const std::uint64_t phi_seed = derive_seed(s, 7);
    const auto vicinal = vicinal_risk_many(fs, pair.z, spec, options.phi_draws, phi_seed);
    BoundReport row;
    row.trial = trial;
    row.gap = expected[0].value - vicinal[0].value;
    for (std::size_t i = 1; i < fs.size(); ++i)
      row.gap = std::max(row.gap, expected[i].value - vicinal[i].value);

    const MatchResult match = vicinity_ghost_match(pair.z, pair.ghost);
    const CoverResult cover =
        covering_number(build_difference_matrix(cls, spec, match, options.phi_draws, phi_seed), xi / 4.0);
    row.cover_size = cover.size();
    row.omega = shifts[cover.centers.front()].value;
    for (std::size_t c : cover.centers) row.omega = std::max(row.omega, shifts[c].value);
    row.cover_bound = cover_bound_rhs(row.omega, static_cast<double>(row.cover_size), n, t, a, b,
                                options.range_exponent);
    if (options.uen)
      row.uen_bound = uen_bound_rhs(row.omega, options.uen->within, options.uen->unconstrained, n, t,
                                      a, b, options.uen->radius, dim_of(dist), options.uen->c);
    row.violated = row.gap > row.cover_bound;
    report.rows[trial] = row;
  });

  for (const auto& row : report.rows)
    if (row.violated) ++report.violations;
  report.frequency = static_cast<double>(report.violations) / static_cast<double>(trials);
  report.std_error = binomial_se(t, trials);
  report.threshold = t + 3.0 * report.std_error;
  report.passes = report.frequency <= report.threshold;
  return report;
}

}  // namespace vrm
