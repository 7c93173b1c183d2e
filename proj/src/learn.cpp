#include "vrm/learn.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "vrm/errors.hpp"
#include "vrm/parallel.hpp"

namespace vrm {

std::vector<PointFunction> FiniteClass::functions() const {
  std::vector<PointFunction> out;
  out.reserve(members.size());
  for (const auto& h : members) out.emplace_back(LossFunction(h, loss));
  return out;
}

FiniteClass FiniteClass::subset(std::span<const std::size_t> indices) const {
  FiniteClass out{{}, loss};
  for (std::size_t i : indices) out.members.push_back(members.at(i));
  return out;
}

void FiniteClass::validate() const {
  require(!members.empty(), "non-empty hypothesis list");
  loss.validate();
}

FiniteClass random_linear_class(std::size_t count, std::size_t input_dim, double scale,
                                LossSpec loss, std::uint64_t seed) {
  require(count >= 1, "count >= 1");
  require(input_dim >= 1, "I >= 1");
  require(scale > 0.0, "scale > 0");
  Rng rng(seed);
  FiniteClass cls{{}, loss};
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> w(input_dim);
    for (double& v : w) v = scale * standard_normal(rng);
    cls.members.push_back(Hypothesis::linear(std::move(w), 0.0));
  }
  return cls;
}

void LinearFamily::validate() const {
  require(input_dim >= 1 && input_dim < kMaxDim, "1 <= I < 32");
  require(weight_lo <= 0.0 && weight_hi >= 0.0, "weight box contains the origin");
  require(loss.kind == LossKind::squared, "linear family uses squared loss");
  loss.validate();
}

double empirical_risk(const PointFunction& f, const SampleSet& z) {
  require(z.size() >= 1, "N >= 1");
  double total = 0.0;
  for (std::size_t n = 0; n < z.size(); ++n) total += f(z.row(n));
  return total / static_cast<double>(z.size());
}

std::vector<Estimate> expected_risk_many(std::span<const PointFunction> fs,
                                         const SyntheticDistribution& dist, std::size_t m,
                                         std::uint64_t seed) {
  require(m >= 1000, "m >= 1000");
  validate(dist);
  std::vector<RunningStats> stats(fs.size());
  std::array<double, kMaxDim> buffer{};
  const std::span<double> z(buffer.data(), dim_of(dist));
  Rng rng(seed);
  for (std::size_t j = 0; j < m; ++j) {
    draw_point(dist, rng, z);
    for (std::size_t i = 0; i < fs.size(); ++i) stats[i].add(fs[i](Row(z)));
  }
  std::vector<Estimate> out(fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i) out[i] = stats[i].estimate();
  return out;
}

Estimate expected_risk(const PointFunction& f, const SyntheticDistribution& dist, std::size_t m,
                       std::uint64_t seed) {
  return expected_risk_many(std::span<const PointFunction>(&f, 1), dist, m, seed).front();
}

// ---------------------------------------------------------------------------
// Linear family objective

VicinalObjective::VicinalObjective(const LinearFamily& family, const SampleSet& z,
                                   const VicinitySpec& spec, std::size_t m, std::uint64_t seed)
    : family_(family), params_(family.input_dim + (family.fit_bias ? 1 : 0)) {
  family_.validate();
  require(m >= 1, "m >= 1");
  require(z.size() >= 1, "N >= 1");
  require(z.input_dim() == family.input_dim && z.output_dim() == 1,
          "sample has I inputs and one output");
  const std::size_t per_anchor = spec.is_dirac() ? 1 : m;
  const VicinitySampler sampler(spec, z.dim(), z.input_dim(), &z);
  rows_ = z.size() * per_anchor;
  features_.reserve(rows_ * params_);
  targets_.reserve(rows_);
  std::array<double, kMaxDim> buffer{};
  const std::span<double> draw(buffer.data(), z.dim());
  for (std::size_t k = 0; k < z.size(); ++k) {
    Rng rng(derive_seed(seed, k));
    for (std::size_t j = 0; j < per_anchor; ++j) {
      sampler.draw(z.row(k), rng, draw);
      for (std::size_t i = 0; i < family.input_dim; ++i) features_.push_back(draw[i]);
      if (family.fit_bias) features_.push_back(1.0);
      targets_.push_back(draw[family.input_dim]);
    }
  }
}

double VicinalObjective::residual(std::span<const double> params, std::size_t r) const {
  const double* row = features_.data() + r * params_;
  double pred = 0.0;
  for (std::size_t p = 0; p < params_; ++p) pred += row[p] * params[p];
  return pred - targets_[r];
}

double VicinalObjective::value(std::span<const double> params) const {
  require(params.size() == params_, "parameter count matches");
  double total = 0.0;
  for (std::size_t r = 0; r < rows_; ++r) {
    const double e = residual(params, r);
    total += family_.loss.clip(e * e);
  }
  return total / static_cast<double>(rows_);
}

std::vector<double> VicinalObjective::gradient(std::span<const double> params) const {
  require(params.size() == params_, "parameter count matches");
  std::vector<double> grad(params_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    const double e = residual(params, r);
    const double loss = e * e;
    if (loss < family_.loss.lower || loss > family_.loss.upper) continue;
    const double* row = features_.data() + r * params_;
    for (std::size_t p = 0; p < params_; ++p) grad[p] += 2.0 * e * row[p];
  }
  for (double& g : grad) g /= static_cast<double>(rows_);
  return grad;
}

double VicinalObjective::smoothness() const {
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> f(
      features_.data(), static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(params_));
  const Eigen::MatrixXd gram = f.transpose() * f / static_cast<double>(rows_);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  return 2.0 * eig.eigenvalues().maxCoeff();
}

std::optional<std::vector<double>> VicinalObjective::least_squares() const {
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> f(
      features_.data(), static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(params_));
  const Eigen::Map<const Eigen::VectorXd> y(targets_.data(), static_cast<Eigen::Index>(rows_));
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(f);
  if (static_cast<std::size_t>(qr.rank()) < params_) return std::nullopt;
  const Eigen::VectorXd w = qr.solve(y);
  return std::vector<double>(w.data(), w.data() + w.size());
}

Hypothesis VicinalObjective::to_hypothesis(std::span<const double> params) const {
  require(params.size() == params_, "parameter count matches");
  std::vector<double> w(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(family_.input_dim));
  return Hypothesis::linear(std::move(w), family_.fit_bias ? params.back() : 0.0);
}

namespace {

void clamp_box(std::vector<double>& params, const LinearFamily& family) {
  for (double& p : params) p = std::clamp(p, family.weight_lo, family.weight_hi);
}

}  // namespace

TrainResult minimize(const VicinalObjective& objective, const LinearFamily& family,
                     const TrainOptions& options) {
  require(options.max_iterations >= 1, "max_iterations >= 1");
  require(options.step_scale > 0.0, "step_scale > 0");
  const double lipschitz = objective.smoothness();
  const double step = lipschitz > 0.0 ? options.step_scale / lipschitz : options.step_scale;

  std::vector<double> params(objective.parameter_count(), 0.0);
  clamp_box(params, family);
  std::vector<double> best = params;
  double best_value = objective.value(params);

  TrainResult result;
  result.converged = false;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    const double current = objective.value(params);
    const auto grad = objective.gradient(params);
    std::vector<double> next(params.size());
    double moved = 0.0;
    for (std::size_t p = 0; p < params.size(); ++p) {
      next[p] = std::clamp(params[p] - step * grad[p], family.weight_lo, family.weight_hi);
      moved += (next[p] - params[p]) * (next[p] - params[p]);
    }
    const double projected_norm = std::sqrt(moved) / step;
    result.trace.push_back({it, current, projected_norm});
    if (current < best_value) {
      best_value = current;
      best = params;
    }
    if (projected_norm < options.gradient_tolerance) {
      result.converged = true;
      break;
    }
    params = std::move(next);
  }
  if (!result.converged) {
    const double last = objective.value(params);
    if (last < best_value) {
      best_value = last;
      best = params;
    }
  }
  result.hypothesis = objective.to_hypothesis(best);
  result.objective = best_value;
  return result;
}

namespace {

TrainResult argmin_over(const FiniteClass& cls, const std::vector<double>& risks) {
  std::size_t pick = 0;
  for (std::size_t i = 1; i < risks.size(); ++i)
    if (risks[i] < risks[pick]) pick = i;
  TrainResult result;
  result.hypothesis = cls.members[pick];
  result.index = pick;
  result.objective = risks[pick];
  return result;
}

}  // namespace

TrainResult erm_train(const FunctionClass& cls, const SampleSet& z, const TrainOptions& options) {
  if (const auto* finite = std::get_if<FiniteClass>(&cls)) {
    finite->validate();
    std::vector<double> risks;
    for (const auto& f : finite->functions()) risks.push_back(empirical_risk(f, z));
    return argmin_over(*finite, risks);
  }
  const auto& family = std::get<LinearFamily>(cls);
  const VicinalObjective objective(family, z, VicinitySpec::dirac(), 1, 0);
  if (auto solution = objective.least_squares()) {
    clamp_box(*solution, family);
    TrainResult result;
    result.hypothesis = objective.to_hypothesis(*solution);
    result.objective = objective.value(*solution);
    return result;
  }
  TrainResult result = minimize(objective, family, options);
  result.singular = true;
  return result;
}

TrainResult vrm_train(const FunctionClass& cls, const SampleSet& z, const VicinitySpec& spec,
                      std::size_t m, std::uint64_t seed, const TrainOptions& options) {
  if (const auto* finite = std::get_if<FiniteClass>(&cls)) {
    finite->validate();
    const auto fs = finite->functions();
    std::vector<double> risks;
    for (const auto& e : vicinal_risk_many(fs, z, spec, m, seed)) risks.push_back(e.value);
    return argmin_over(*finite, risks);
  }
  if (spec.is_dirac()) return erm_train(cls, z, options);
  const auto& family = std::get<LinearFamily>(cls);
  return minimize(VicinalObjective(family, z, spec, m, seed), family, options);
}

// ---------------------------------------------------------------------------
// Gaps

GapResult generalization_gap(const FiniteClass& cls, const SampleSet& z, const VicinitySpec& spec,
                             const SyntheticDistribution& dist, const RiskDraws& draws,
                             std::uint64_t seed) {
  cls.validate();
  require(z.dim() == dim_of(dist) && z.input_dim() == input_dim_of(dist),
          "sample matches the distribution's (K, I)");
  const auto fs = cls.functions();
  GapResult result;
  result.expected = expected_risk_many(fs, dist, draws.risk_draws, derive_seed(seed, 1));
  result.vicinal = vicinal_risk_many(fs, z, spec, draws.phi_draws, derive_seed(seed, 2));
  result.value = result.expected[0].value - result.vicinal[0].value;
  for (std::size_t i = 1; i < fs.size(); ++i) {
    const double gap = result.expected[i].value - result.vicinal[i].value;
    if (gap > result.value) {
      result.value = gap;
      result.argmax = i;
    }
  }
  return result;
}

void require_symmetrization_size(std::size_t n, double range, double xi) {
  require(xi > 0.0, "xi > 0");
  const double needed = 8.0 * range * range / (xi * xi);
  require(static_cast<double>(n) >= needed * (1.0 - 1e-12), "N >= 8(b-a)^2/xi^2",
          "N = " + std::to_string(n) + ", need " + std::to_string(needed));
}

SymmetrizationReport symmetrization_check(const FiniteClass& cls, const SyntheticDistribution& dist,
                                          std::size_t n, const VicinitySpec& spec, double xi,
                                          std::size_t trials, std::uint64_t seed,
                                          const RiskDraws& draws, unsigned workers) {
  cls.validate();
  require(trials >= 1, "trials >= 1");
  require_symmetrization_size(n, cls.loss.range(), xi);
  const auto fs = cls.functions();
  const auto expected = expected_risk_many(fs, dist, draws.risk_draws, derive_seed(seed, 0xE));

  std::vector<char> left(trials), right(trials);
  parallel_for(trials, workers, [&](std::size_t t) {
    const std::uint64_t s = trial_seed(seed, t);
    const SamplePair pair = sample_with_ghost(dist, n, s);
    const auto vicinal = vicinal_risk_many(fs, pair.z, spec, draws.phi_draws, derive_seed(s, 7));
    double sup_true = -INFINITY, sup_ghost = -INFINITY;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      sup_true = std::max(sup_true, expected[i].value - vicinal[i].value);
      sup_ghost = std::max(sup_ghost, empirical_risk(fs[i], pair.ghost) - vicinal[i].value);
    }
    left[t] = sup_true > xi ? 1 : 0;
    right[t] = sup_ghost > xi / 2.0 ? 1 : 0;
  });

  const double count = static_cast<double>(trials);
  const double p = static_cast<double>(std::count(left.begin(), left.end(), 1)) / count;
  const double q = static_cast<double>(std::count(right.begin(), right.end(), 1)) / count;
  SymmetrizationReport report;
  report.trials = trials;
  report.lhs = p;
  report.lhs_se = binomial_se(p, trials);
  report.rhs = 2.0 * q;
  report.rhs_se = 2.0 * binomial_se(q, trials);
  report.combined_se = std::hypot(report.lhs_se, report.rhs_se);
  report.holds = report.lhs <= report.rhs + 3.0 * report.combined_se;
  return report;
}

}  // namespace vrm
