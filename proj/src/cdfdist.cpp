#include "vrm/cdfdist.hpp"

#include <algorithm>
#include <cmath>

#include "vrm/errors.hpp"
#include "vrm/parallel.hpp"

namespace vrm {

EmpiricalCdf::EmpiricalCdf(const SampleSet& reference)
    : sorted_(reference.dim()), count_(reference.size()) {
  for (std::size_t k = 0; k < reference.dim(); ++k) {
    auto& column = sorted_[k];
    column.reserve(count_);
    for (std::size_t n = 0; n < count_; ++n) column.push_back(reference.row(n)[k]);
    std::sort(column.begin(), column.end());
  }
}

double EmpiricalCdf::marginal(std::size_t k, double t) const {
  require(k < sorted_.size(), "0 <= k < K");
  if (std::isnan(t)) return 0.0;
  const auto& column = sorted_[k];
  const auto at_or_below = std::upper_bound(column.begin(), column.end(), t) - column.begin();
  return static_cast<double>(at_or_below) / static_cast<double>(count_);
}

double empirical_cdf_marginal(const EmpiricalCdf& ecdf, std::size_t k, double t) {
  return ecdf.marginal(k, t);
}

double empirical_cdf_distance(const EmpiricalCdf& ecdf, Row t1, Row t2) {
  require(t1.size() == ecdf.dim() && t2.size() == ecdf.dim(), "points have dimension K");
  double s = 0.0;
  for (std::size_t k = 0; k < ecdf.dim(); ++k) {
    const double d = ecdf.marginal(k, t1[k]) - ecdf.marginal(k, t2[k]);
    s += d * d;
  }
  return std::sqrt(s);
}

double cdf_distance(const SyntheticDistribution& dist, Row t1, Row t2) {
  if (!has_analytic_cdf(dist)) throw UnsupportedError("no analytic CDF for " + kind_name(dist));
  const std::size_t dim = dim_of(dist);
  require(t1.size() == dim && t2.size() == dim, "points have dimension K");
  double s = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double d = true_marginal_cdf(dist, k, t1[k]) - true_marginal_cdf(dist, k, t2[k]);
    s += d * d;
  }
  return std::sqrt(s);
}

double max_pair_cdf_distance(const MatchResult& match, const EmpiricalCdf& ecdf) {
  double worst = 0.0;
  for (std::size_t n = 0; n < match.size(); ++n)
    worst = std::max(worst, empirical_cdf_distance(ecdf, match.anchors.row(n), match.ghosts.row(n)));
  return worst;
}

PairContainment pair_containment(const MatchResult& match, const EmpiricalCdf& ecdf,
                                 double radius) {
  std::size_t within = 0;
  for (std::size_t n = 0; n < match.size(); ++n)
    if (empirical_cdf_distance(ecdf, match.anchors.row(n), match.ghosts.row(n)) <= radius) ++within;
  return {static_cast<double>(within) / static_cast<double>(match.size()), within == match.size()};
}

namespace {

double matched_statistic(const SyntheticDistribution& dist, std::size_t n, std::uint64_t seed) {
  const SamplePair draws = sample_with_ghost(dist, n, seed);
  const MatchResult match = vicinity_ghost_match(draws.z, draws.ghost);
  return max_pair_cdf_distance(match, EmpiricalCdf(draws.z));
}

}  // namespace

DkwDecayResult dkw_decay_experiment(const SyntheticDistribution& dist,
                                    const std::vector<std::size_t>& n_grid, double xi,
                                    std::size_t trials, std::uint64_t seed, unsigned workers) {
  require(!n_grid.empty(), "non-empty N grid");
  require(xi > 0.0, "xi > 0");
  require(trials >= 100, "trials >= 100");
  validate(dist);

  DkwDecayResult result;
  const double dim = static_cast<double>(dim_of(dist));
  result.predicted_rate = -xi * xi / (2.0 * dim);

  for (std::size_t n : n_grid) {
    require(n >= 1 && n <= kMaxSamples, "1 <= N <= 5000");
    std::vector<double> stats(trials);
    parallel_for(trials, workers,
                 [&](std::size_t t) { stats[t] = matched_statistic(dist, n, trial_seed(seed, t)); });
    const auto exceed = std::count_if(stats.begin(), stats.end(), [xi](double s) { return s > xi; });
    const double p = static_cast<double>(exceed) / static_cast<double>(trials);
    std::vector<double> sorted = stats;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(trials / 2), sorted.end());
    result.rows.push_back({n, trials, p, binomial_se(p, trials), sorted[trials / 2]});
  }

  const double slack = 2.0 / std::sqrt(static_cast<double>(trials));
  for (std::size_t i = 1; i < result.rows.size(); ++i) {
    if (result.rows[i].n >= result.rows[i - 1].n &&
        result.rows[i].tail_estimate > result.rows[i - 1].tail_estimate + slack)
      result.tails_nonincreasing = false;
  }

  std::vector<std::pair<double, double>> points;
  for (const auto& row : result.rows)
    if (row.tail_estimate > 0.0)
      points.emplace_back(static_cast<double>(row.n), std::log(row.tail_estimate));
  if (points.size() >= 3) {
    double mx = 0.0, my = 0.0;
    for (auto [x, y] : points) {
      mx += x;
      my += y;
    }
    mx /= static_cast<double>(points.size());
    my /= static_cast<double>(points.size());
    double sxy = 0.0, sxx = 0.0;
    for (auto [x, y] : points) {
      sxy += (x - mx) * (y - my);
      sxx += (x - mx) * (x - mx);
    }
    if (sxx > 0.0) {
      result.slope = sxy / sxx;
      result.intercept = my - *result.slope * mx;
      result.fitted_constant = std::exp(*result.intercept);
    }
  }
  return result;
}

Estimate event_e1_probability(const SyntheticDistribution& dist, std::size_t n, double radius,
                              std::size_t trials, std::uint64_t seed, unsigned workers) {
  require(trials >= 1, "trials >= 1");
  require(radius > 0.0, "r > 0");
  std::vector<char> contained(trials);
  parallel_for(trials, workers, [&](std::size_t t) {
    const SamplePair draws = sample_with_ghost(dist, n, trial_seed(seed, t));
    const MatchResult match = vicinity_ghost_match(draws.z, draws.ghost);
    contained[t] = pair_containment(match, EmpiricalCdf(draws.z), radius).all_within ? 1 : 0;
  });
  const double p = static_cast<double>(std::count(contained.begin(), contained.end(), 1)) /
                   static_cast<double>(trials);
  return {p, binomial_se(p, trials)};
}

}  // namespace vrm
