#pragma once

#include <cstddef>
#include <vector>

#include "vrm/core.hpp"

namespace vrm {

/// The vicinity-ghost pairing of a sample Z with its ghost Z'.
///
/// `permutation[n]` is the ghost index paired with anchor n, so the n-th
/// pair is s_[n] = (Z'[permutation[n]], Z[n]). `ghosts` holds the reordered
/// ghost sequence Z'[permutation[0]], ..., Z'[permutation[N-1]].
struct MatchResult {
  std::vector<std::size_t> permutation;
  double total_cost = 0.0;
  std::vector<double> pair_distances;
  SampleSet anchors;
  SampleSet ghosts;

  std::size_t size() const noexcept { return permutation.size(); }
};

double euclidean_distance(Row a, Row b);

/// Exact minimiser of sum_n ||Z'[pi(n)] - Z[n]||_2 over all permutations,
/// computed with a shortest-augmenting-path assignment solver (O(N^3)).
MatchResult vicinity_ghost_match(const SampleSet& z, const SampleSet& z_prime);

/// sum_n ||Z'[pi(n)] - Z[n]||_2 for an arbitrary permutation.
double match_cost_of(const SampleSet& z, const SampleSet& z_prime,
                     const std::vector<std::size_t>& permutation);

bool is_permutation_of_n(const std::vector<std::size_t>& permutation, std::size_t n);

}  // namespace vrm
