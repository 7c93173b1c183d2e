#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vrm/core.hpp"
#include "vrm/learn.hpp"
#include "vrm/matching.hpp"
#include "vrm/vicinity.hpp"

namespace vrm {

/// Class members (rows) evaluated at points (columns), row-major.
class EvaluationMatrix {
 public:
  EvaluationMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  static EvaluationMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }
  double at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const double> data() const noexcept { return data_; }
  double row_mean(std::size_t i) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

/// (1/M) sum_m |A[i,m] - A[j,m]|.
double l1_distance(const EvaluationMatrix& matrix, std::size_t i, std::size_t j);

enum class CoverMethod { exact, greedy };
std::string cover_method_name(CoverMethod method);

struct CoverResult {
  double radius = 0.0;
  std::vector<std::size_t> centers;  // row indices, ascending for exact covers
  CoverMethod method = CoverMethod::exact;

  std::size_t size() const noexcept { return centers.size(); }
};

inline constexpr std::size_t kMaxExactRows = 20;

/// Proper cover: centers are rows and every row lies within `xi` of one.
/// Exact search is limited to 20 rows; it deepens the cover size from the
/// packing bound and returns the first minimal cover found (centers sorted).
CoverResult covering_number(const EvaluationMatrix& matrix, double xi,
                            CoverMethod method = CoverMethod::exact);

/// Size of a greedy set of rows pairwise more than 2 xi apart; no proper
/// xi-cover can be smaller.
std::size_t packing_lower_bound(const EvaluationMatrix& matrix, double xi);

/// Entry (i, n) = f_i(points_n).
EvaluationMatrix build_function_matrix(const FiniteClass& cls, const SampleSet& points);

/// Entry (i, n) = phi(f_i, anchors_n) on stream derive_seed(seed, n), shared
/// by all i. Mixup without a pool mixes within `anchors`.
EvaluationMatrix build_phi_matrix(const FiniteClass& cls, const SampleSet& anchors,
                                  const VicinitySpec& spec, std::size_t m, std::uint64_t seed);

/// Entry (i, n) = f_i(ghosts_n) - phi(f_i, anchors_n): the difference class
/// on the pairs s_n = (ghosts_n, anchors_n).
EvaluationMatrix build_difference_matrix(const FiniteClass& cls, const VicinitySpec& spec,
                                         const SampleSet& anchors, const SampleSet& ghosts,
                                         std::size_t m, std::uint64_t seed);

/// Difference class on the matched pairs (z'_{pi(n)}, z_n).
EvaluationMatrix build_difference_matrix(const FiniteClass& cls, const VicinitySpec& spec,
                                         const MatchResult& match, std::size_t m,
                                         std::uint64_t seed);

struct SandwichReport {
  double xi = 0.0;
  double lambda = 0.0;
  std::size_t difference_cover = 0;  // N(P, xi, l1(S))
  std::size_t upper_cover = 0;       // N(F, xi/(2+lambda), l1(Z))
  std::optional<std::size_t> lower_cover;  // N(F, xi/(1-lambda), l1(Z)), lambda < 1
  bool upper_holds = false;
  std::optional<bool> lower_holds;
};

/// Exact covers of P on the matched pairs of (Z, Z') and of F on Z, with
/// both sandwich inequalities evaluated.
SandwichReport verify_covering_sandwich(const FiniteClass& cls, const VicinitySpec& spec,
                                        const SampleSet& z, const SampleSet& z_prime, double xi,
                                        double lambda_hat, std::size_t m, std::uint64_t seed);

/// max over pairs (f, h) and z in Z of |phi(f,z) - phi(h,z)| / |f(z) - h(z)|,
/// skipping denominators below 1e-9. phi uses build_phi_matrix(seed).
double estimate_lipschitz_lambda(const FiniteClass& cls, const VicinitySpec& spec,
                                 const SampleSet& z, std::size_t m, std::uint64_t seed);

/// Axis-aligned box the UEN search draws points from.
struct Domain {
  std::vector<double> lo;
  std::vector<double> hi;
  std::size_t input_dim = 1;

  std::size_t dim() const noexcept { return lo.size(); }
};

/// Cube bounds, mean +- 4 sigma for Gaussians, and the label range implied
/// by the weight and noise scale for regression tasks.
Domain default_domain(const SyntheticDistribution& dist);

/// Unconstrained mode with radius > 0 also evaluates the within-cover
/// candidates of that radius, so its search space contains theirs.
struct UenMode {
  bool within_cover = false;
  double radius = 0.0;

  static UenMode unconstrained(double nested_radius = 0.0) { return {false, nested_radius}; }
  static UenMode within(double r) { return {true, r}; }
};

struct UenTraceRow {
  std::size_t restart = 0;
  std::size_t value = 0;
  std::size_t best = 0;
};

struct UenResult {
  std::size_t value = 0;
  std::vector<UenTraceRow> trace;
};

struct UenOptions {
  std::size_t budget = 200;  // random restarts
  std::size_t phi_draws = 64;
  unsigned workers = 0;
};

/// Random-restart lower estimate of the largest N(P, xi, l1(S)) over N pairs.
///
/// Restart j (stream derive_seed(seed, j)) draws ball centres c_n uniform in
/// the domain and places both points of pair n uniformly in the Euclidean
/// ball of radius r around c_n. Unconstrained mode adds a configuration with
/// every point free in the domain. Restarts are fixed by their index, so a
/// larger budget never lowers the value.
UenResult uen_estimate(const FiniteClass& cls, const VicinitySpec& spec, double xi, std::size_t n,
                       const UenMode& mode, const Domain& domain, std::uint64_t seed,
                       const UenOptions& options = {});

struct ExpectedCoverReport {
  double expected_cover = 0.0;  // Monte-Carlo E N(P, xi, l1(S))
  double expected_cover_se = 0.0;
  std::size_t uen_within = 0;
  std::size_t uen_unconstrained = 0;
  double weight = 0.0;  // c exp(-N r^2 / 2K)
  double rhs = 0.0;
  bool holds = false;  // expected_cover <= rhs; UEN terms are lower estimates
};

ExpectedCoverReport expected_cover_check(const FiniteClass& cls, const VicinitySpec& spec,
                                         const SyntheticDistribution& dist, std::size_t n, double xi,
                                         double r, std::size_t trials, double c, std::uint64_t seed,
                                         const UenOptions& options = {});

}  // namespace vrm
