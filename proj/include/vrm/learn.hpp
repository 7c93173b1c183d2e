#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "vrm/core.hpp"
#include "vrm/stats.hpp"
#include "vrm/vicinity.hpp"

namespace vrm {

/// F = {z -> loss(g(x), y) : g in a finite list}.
struct FiniteClass {
  std::vector<Hypothesis> members;
  LossSpec loss;

  std::size_t size() const noexcept { return members.size(); }
  LossFunction member(std::size_t i) const { return LossFunction(members.at(i), loss); }
  std::vector<PointFunction> functions() const;
  /// Sub-class restricted to the given member indices, in order.
  FiniteClass subset(std::span<const std::size_t> indices) const;
  void validate() const;
};

/// `count` scalar-output linear hypotheses through the origin with weights
/// drawn i.i.d. N(0, scale^2).
FiniteClass random_linear_class(std::size_t count, std::size_t input_dim, double scale,
                                LossSpec loss, std::uint64_t seed);

/// Scalar-output linear models g(x) = <w, x> (+ b) with every parameter in
/// [weight_lo, weight_hi].
struct LinearFamily {
  std::size_t input_dim = 1;
  double weight_lo = -10.0;
  double weight_hi = 10.0;
  bool fit_bias = false;
  LossSpec loss;

  void validate() const;
};

using FunctionClass = std::variant<FiniteClass, LinearFamily>;

/// (1/N) sum_n f(z_n).
double empirical_risk(const PointFunction& f, const SampleSet& z);

/// Monte-Carlo R f from m >= 1000 draws of `dist` on stream `seed`.
Estimate expected_risk(const PointFunction& f, const SyntheticDistribution& dist, std::size_t m,
                       std::uint64_t seed);

/// expected_risk for several functions on the same draws; element i equals
/// expected_risk(fs[i], dist, m, seed) exactly.
std::vector<Estimate> expected_risk_many(std::span<const PointFunction> fs,
                                         const SyntheticDistribution& dist, std::size_t m,
                                         std::uint64_t seed);

struct TraceRow {
  std::size_t iteration = 0;
  double risk = 0.0;
  double gradient_norm = 0.0;
};

struct TrainOptions {
  std::size_t max_iterations = 2000;
  double gradient_tolerance = 1e-6;
  /// Step = step_scale / L, L the gradient Lipschitz constant.
  double step_scale = 1.0;
};

struct TrainResult {
  Hypothesis hypothesis = Hypothesis::constant(0.0);
  std::optional<std::size_t> index;  // FiniteClass pick
  double objective = 0.0;
  bool converged = true;
  bool singular = false;  // normal equations were rank deficient
  std::vector<TraceRow> trace;
};

/// Frozen Monte-Carlo vicinal risk of a LinearFamily with squared loss.
///
/// Each anchor contributes m vicinity draws (one for Dirac) taken once at
/// construction, so value() and gradient() are deterministic functions of
/// the parameters (w, then b when fit_bias).
class VicinalObjective {
 public:
  VicinalObjective(const LinearFamily& family, const SampleSet& z, const VicinitySpec& spec,
                   std::size_t m, std::uint64_t seed);

  std::size_t parameter_count() const noexcept { return params_; }
  std::size_t point_count() const noexcept { return rows_; }
  double value(std::span<const double> params) const;
  std::vector<double> gradient(std::span<const double> params) const;
  /// Lipschitz constant of the gradient of the unclipped objective.
  double smoothness() const;
  Hypothesis to_hypothesis(std::span<const double> params) const;
  /// Unconstrained least-squares minimiser; nullopt when rank deficient.
  std::optional<std::vector<double>> least_squares() const;

 private:
  double residual(std::span<const double> params, std::size_t r) const;

  LinearFamily family_;
  std::size_t params_;
  std::size_t rows_ = 0;
  std::vector<double> features_;  // rows_ x params_
  std::vector<double> targets_;
};

/// Projected gradient descent on a VicinalObjective from the origin.
TrainResult minimize(const VicinalObjective& objective, const LinearFamily& family,
                     const TrainOptions& options = {});

/// FiniteClass: exact argmin of the empirical risk, ties to the lowest
/// index. LinearFamily (squared loss): least squares clamped to the weight
/// box; rank-deficient systems fall back to gradient descent and set
/// `singular`.
TrainResult erm_train(const FunctionClass& cls, const SampleSet& z, const TrainOptions& options = {});

/// FiniteClass: argmin of vicinal_risk with one seed shared by all members.
/// LinearFamily: gradient descent on the frozen Monte-Carlo vicinal risk,
/// or erm_train for a Dirac spec.
TrainResult vrm_train(const FunctionClass& cls, const SampleSet& z, const VicinitySpec& spec,
                      std::size_t m, std::uint64_t seed, const TrainOptions& options = {});

struct RiskDraws {
  std::size_t phi_draws = 64;       // vicinity draws per anchor
  std::size_t risk_draws = 20000;   // draws for expected risks
};

struct GapResult {
  double value = 0.0;  // max_i (R f_i - R_nu f_i)
  std::size_t argmax = 0;
  std::vector<Estimate> expected;  // R f_i, stream derive_seed(seed, 1)
  std::vector<Estimate> vicinal;   // R_nu f_i, stream derive_seed(seed, 2)
};

/// sup over the list of R f - R_nu f.
GapResult generalization_gap(const FiniteClass& cls, const SampleSet& z, const VicinitySpec& spec,
                             const SyntheticDistribution& dist, const RiskDraws& draws,
                             std::uint64_t seed);

struct SymmetrizationReport {
  double lhs = 0.0;  // P{sup (R f - R_nu f) > xi}
  double lhs_se = 0.0;
  double rhs = 0.0;  // 2 P{sup (R'f - R_nu f) > xi/2}
  double rhs_se = 0.0;
  double combined_se = 0.0;
  bool holds = false;  // lhs <= rhs + 3 combined_se
  std::size_t trials = 0;
};

/// Requires N >= 8(b-a)^2/xi^2. Expected risks are computed once with
/// `draws.risk_draws`; trial t draws (Z, Z') from seed + t.
SymmetrizationReport symmetrization_check(const FiniteClass& cls, const SyntheticDistribution& dist,
                                          std::size_t n, const VicinitySpec& spec, double xi,
                                          std::size_t trials, std::uint64_t seed,
                                          const RiskDraws& draws = {}, unsigned workers = 0);

/// Throws PreconditionError unless N >= 8(b-a)^2/xi^2.
void require_symmetrization_size(std::size_t n, double range, double xi);

}  // namespace vrm
