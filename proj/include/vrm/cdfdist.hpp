#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vrm/core.hpp"
#include "vrm/matching.hpp"
#include "vrm/stats.hpp"

namespace vrm {

/// Marginal empirical CDFs of a reference sample.
///
/// F_k(t) = #{n : z_n[k] <= t} / N, with the inclusive indicator of
/// (-inf, t].
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(const SampleSet& reference);

  std::size_t dim() const noexcept { return sorted_.size(); }
  std::size_t size() const noexcept { return count_; }

  /// k is zero-based; t any real (NaN counts as below every value).
  double marginal(std::size_t k, double t) const;

 private:
  std::vector<std::vector<double>> sorted_;
  std::size_t count_;
};

double empirical_cdf_marginal(const EmpiricalCdf& ecdf, std::size_t k, double t);

/// sqrt(sum_k (F_k(t1) - F_k(t2))^2), bounded by sqrt(K).
double empirical_cdf_distance(const EmpiricalCdf& ecdf, Row t1, Row t2);

/// Same distance with the exact marginals of `dist`.
double cdf_distance(const SyntheticDistribution& dist, Row t1, Row t2);

/// max_n d(z_n, z'_{pi(n)}) under the empirical CDF of `ecdf`.
double max_pair_cdf_distance(const MatchResult& match, const EmpiricalCdf& ecdf);

/// Fraction of matched pairs within `radius`, and whether all are (event E1).
struct PairContainment {
  double fraction_within = 0.0;
  bool all_within = false;
};
PairContainment pair_containment(const MatchResult& match, const EmpiricalCdf& ecdf, double radius);

struct DkwRow {
  std::size_t n = 0;
  std::size_t trials = 0;
  double tail_estimate = 0.0;
  double std_error = 0.0;
  double median_statistic = 0.0;
};

struct DkwDecayResult {
  std::vector<DkwRow> rows;
  /// Least-squares fit of log(tail) = intercept + slope * N over rows with
  /// a positive tail; absent when fewer than three such rows exist.
  std::optional<double> slope;
  std::optional<double> intercept;
  std::optional<double> fitted_constant;  // exp(intercept)
  double predicted_rate = 0.0;            // -xi^2 / (2K)
  bool tails_nonincreasing = true;        // within 2 / sqrt(trials)
};

/// Monte-Carlo tail P{max_n d(z_n, z'_{pi*(n)}) > xi} for each N; trial i
/// uses seed + i for both Z and Z'.
DkwDecayResult dkw_decay_experiment(const SyntheticDistribution& dist,
                                    const std::vector<std::size_t>& n_grid, double xi,
                                    std::size_t trials, std::uint64_t seed, unsigned workers = 0);

/// Event-E1 frequency: fraction of trials in which every matched pair lies
/// within `radius` in empirical CDF distance.
Estimate event_e1_probability(const SyntheticDistribution& dist, std::size_t n, double radius,
                              std::size_t trials, std::uint64_t seed, unsigned workers = 0);

}  // namespace vrm
