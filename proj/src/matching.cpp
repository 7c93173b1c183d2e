#include "vrm/matching.hpp"

#include <cmath>
#include <limits>

#include "vrm/errors.hpp"

namespace vrm {

namespace {

void check_pair(const SampleSet& z, const SampleSet& z_prime) {
  require(z.size() == z_prime.size(), "|Z| = |Z'|",
          std::to_string(z.size()) + " vs " + std::to_string(z_prime.size()));
  require(z.dim() == z_prime.dim(), "equal dimensions",
          std::to_string(z.dim()) + " vs " + std::to_string(z_prime.dim()));
}

// Shortest augmenting path with row/column potentials (Kuhn-Munkres in the
// Jonker-Volgenant formulation). Returns column assigned to each row.
std::vector<std::size_t> solve_assignment(const std::vector<double>& cost, std::size_t n) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), min_slack(n + 1);
  std::vector<std::size_t> row_of(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    row_of[0] = i;
    std::size_t col = 0;
    std::fill(min_slack.begin(), min_slack.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[col] = 1;
      const std::size_t row = row_of[col];
      double delta = kInf;
      std::size_t next_col = 0;
      const double* cost_row = cost.data() + (row - 1) * n;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double slack = cost_row[j - 1] - u[row] - v[j];
        if (slack < min_slack[j]) {
          min_slack[j] = slack;
          way[j] = col;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          next_col = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[row_of[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      col = next_col;
    } while (row_of[col] != 0);
    do {
      const std::size_t prev = way[col];
      row_of[col] = row_of[prev];
      col = prev;
    } while (col != 0);
  }

  std::vector<std::size_t> assignment(n);
  for (std::size_t j = 1; j <= n; ++j) assignment[row_of[j] - 1] = j - 1;
  return assignment;
}

}  // namespace

double euclidean_distance(Row a, Row b) {
  require(a.size() == b.size(), "equal dimensions");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

bool is_permutation_of_n(const std::vector<std::size_t>& permutation, std::size_t n) {
  if (permutation.size() != n) return false;
  std::vector<char> seen(n, 0);
  for (std::size_t p : permutation) {
    if (p >= n || seen[p]) return false;
    seen[p] = 1;
  }
  return true;
}

double match_cost_of(const SampleSet& z, const SampleSet& z_prime,
                     const std::vector<std::size_t>& permutation) {
  check_pair(z, z_prime);
  require(is_permutation_of_n(permutation, z.size()), "permutation is a bijection on {0..N-1}");
  double total = 0.0;
  for (std::size_t n = 0; n < z.size(); ++n)
    total += euclidean_distance(z_prime.row(permutation[n]), z.row(n));
  return total;
}

MatchResult vicinity_ghost_match(const SampleSet& z, const SampleSet& z_prime) {
  check_pair(z, z_prime);
  const std::size_t n = z.size();
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = euclidean_distance(z_prime.row(j), z.row(i));

  std::vector<std::size_t> permutation = solve_assignment(cost, n);

  std::vector<double> distances(n);
  std::vector<double> ghost_data;
  ghost_data.reserve(n * z.dim());
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    distances[i] = cost[i * n + permutation[i]];
    total += distances[i];
    const Row g = z_prime.row(permutation[i]);
    ghost_data.insert(ghost_data.end(), g.begin(), g.end());
  }
  return MatchResult{std::move(permutation), total, std::move(distances), z,
                     SampleSet(z.dim(), z.input_dim(), std::move(ghost_data),
                               Provenance{"vicinity_ghosts", z_prime.provenance().seed})};
}

}  // namespace vrm
