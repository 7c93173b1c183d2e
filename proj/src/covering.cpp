#include "vrm/covering.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

#include "vrm/errors.hpp"
#include "vrm/parallel.hpp"

namespace vrm {

EvaluationMatrix::EvaluationMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require(rows >= 1, "row count >= 1");
  require(cols >= 1, "column count >= 1");
  require(data_.size() == rows * cols, "data holds rows x cols entries");
  for (double v : data_) require(std::isfinite(v), "finite entries");
}

EvaluationMatrix EvaluationMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  require(!rows.empty(), "row count >= 1");
  std::vector<double> data;
  for (const auto& r : rows) {
    require(r.size() == rows.front().size(), "rows have equal length");
    data.insert(data.end(), r.begin(), r.end());
  }
  return EvaluationMatrix(rows.size(), rows.front().size(), std::move(data));
}

double EvaluationMatrix::row_mean(std::size_t i) const {
  double total = 0.0;
  for (double v : row(i)) total += v;
  return total / static_cast<double>(cols_);
}

double l1_distance(const EvaluationMatrix& matrix, std::size_t i, std::size_t j) {
  require(i < matrix.rows() && j < matrix.rows(), "valid row indices");
  const auto a = matrix.row(i);
  const auto b = matrix.row(j);
  double total = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) total += std::abs(a[m] - b[m]);
  return total / static_cast<double>(a.size());
}

std::string cover_method_name(CoverMethod method) {
  return method == CoverMethod::exact ? "exact" : "greedy";
}

namespace {

std::vector<double> distance_table(const EvaluationMatrix& matrix) {
  const std::size_t r = matrix.rows();
  std::vector<double> d(r * r, 0.0);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i + 1; j < r; ++j) d[i * r + j] = d[j * r + i] = l1_distance(matrix, i, j);
  return d;
}

CoverResult greedy_cover(const std::vector<double>& d, std::size_t r, double xi) {
  CoverResult result{xi, {0}, CoverMethod::greedy};
  std::vector<double> nearest(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(r));
  while (true) {
    std::size_t far = 0;
    for (std::size_t i = 1; i < r; ++i)
      if (nearest[i] > nearest[far]) far = i;
    if (nearest[far] <= xi) break;
    result.centers.push_back(far);
    for (std::size_t i = 0; i < r; ++i) nearest[i] = std::min(nearest[i], d[far * r + i]);
  }
  return result;
}

std::size_t packing_from_table(const std::vector<double>& d, std::size_t r, double xi) {
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < r; ++i) {
    bool separated = true;
    for (std::size_t c : chosen)
      if (d[i * r + c] <= 2.0 * xi) {
        separated = false;
        break;
      }
    if (separated) chosen.push_back(i);
  }
  return chosen.size();
}

class ExactCoverSearch {
 public:
  ExactCoverSearch(const std::vector<double>& d, std::size_t r, double xi)
      : rows_(r), full_(r == 32 ? ~0u : (1u << r) - 1u), masks_(r, 0u) {
    for (std::size_t c = 0; c < r; ++c)
      for (std::size_t i = 0; i < r; ++i)
        if (d[c * r + i] <= xi) masks_[c] |= 1u << i;
    for (auto m : masks_) max_gain_ = std::max(max_gain_, std::popcount(m));
  }

  bool find(std::size_t size, std::vector<std::size_t>& centers) {
    chosen_.clear();
    if (!search(0u, size)) return false;
    centers = chosen_;
    std::sort(centers.begin(), centers.end());
    return true;
  }

 private:
  bool search(std::uint32_t covered, std::size_t remaining) {
    if (covered == full_) return true;
    if (remaining == 0) return false;
    const int uncovered = std::popcount(full_ & ~covered);
    if (static_cast<std::size_t>((uncovered + max_gain_ - 1) / max_gain_) > remaining) return false;
    const auto first = static_cast<std::size_t>(std::countr_one(covered));
    for (std::size_t c = 0; c < rows_; ++c) {
      if (!(masks_[c] >> first & 1u)) continue;
      chosen_.push_back(c);
      if (search(covered | masks_[c], remaining - 1)) return true;
      chosen_.pop_back();
    }
    return false;
  }

  std::size_t rows_;
  std::uint32_t full_;
  std::vector<std::uint32_t> masks_;
  int max_gain_ = 1;
  std::vector<std::size_t> chosen_;
};

}  // namespace

std::size_t packing_lower_bound(const EvaluationMatrix& matrix, double xi) {
  require(xi > 0.0, "xi > 0");
  return packing_from_table(distance_table(matrix), matrix.rows(), xi);
}

CoverResult covering_number(const EvaluationMatrix& matrix, double xi, CoverMethod method) {
  require(xi > 0.0, "xi > 0");
  const std::size_t r = matrix.rows();
  if (method == CoverMethod::exact)
    require(r <= kMaxExactRows, "exact cover on <= 20 rows", std::to_string(r) + " rows");
  const auto d = distance_table(matrix);
  CoverResult greedy = greedy_cover(d, r, xi);
  if (method == CoverMethod::greedy) return greedy;

  ExactCoverSearch search(d, r, xi);
  CoverResult result{xi, {}, CoverMethod::exact};
  for (std::size_t k = std::max<std::size_t>(1, packing_from_table(d, r, xi)); k <= greedy.size(); ++k)
    if (search.find(k, result.centers)) return result;
  result.centers = greedy.centers;
  std::sort(result.centers.begin(), result.centers.end());
  return result;
}

// ---------------------------------------------------------------------------
// Function and difference classes

EvaluationMatrix build_function_matrix(const FiniteClass& cls, const SampleSet& points) {
  cls.validate();
  require(points.size() >= 1, "N >= 1");
  const auto fs = cls.functions();
  std::vector<double> data;
  data.reserve(fs.size() * points.size());
  for (const auto& f : fs)
    for (std::size_t n = 0; n < points.size(); ++n) data.push_back(f(points.row(n)));
  return EvaluationMatrix(fs.size(), points.size(), std::move(data));
}

EvaluationMatrix build_phi_matrix(const FiniteClass& cls, const SampleSet& anchors,
                                  const VicinitySpec& spec, std::size_t m, std::uint64_t seed) {
  cls.validate();
  require(anchors.size() >= 1, "N >= 1");
  if (spec.is_dirac()) return build_function_matrix(cls, anchors);
  const auto fs = cls.functions();
  const VicinitySampler sampler(spec, anchors.dim(), anchors.input_dim(), &anchors);
  const std::size_t n = anchors.size();
  std::vector<double> data(fs.size() * n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto column = phi_many(fs, anchors.row(k), sampler, m, derive_seed(seed, k));
    for (std::size_t i = 0; i < fs.size(); ++i) data[i * n + k] = column[i].value;
  }
  return EvaluationMatrix(fs.size(), n, std::move(data));
}

EvaluationMatrix build_difference_matrix(const FiniteClass& cls, const VicinitySpec& spec,
                                         const SampleSet& anchors, const SampleSet& ghosts,
                                         std::size_t m, std::uint64_t seed) {
  require(anchors.size() == ghosts.size(), "|Z| = |Z'|");
  require(anchors.dim() == ghosts.dim() && anchors.input_dim() == ghosts.input_dim(),
          "pairs share (K, I)");
  const EvaluationMatrix f = build_function_matrix(cls, ghosts);
  const EvaluationMatrix phi = build_phi_matrix(cls, anchors, spec, m, seed);
  std::vector<double> data(f.data().begin(), f.data().end());
  for (std::size_t e = 0; e < data.size(); ++e) data[e] -= phi.data()[e];
  return EvaluationMatrix(f.rows(), f.cols(), std::move(data));
}

EvaluationMatrix build_difference_matrix(const FiniteClass& cls, const VicinitySpec& spec,
                                         const MatchResult& match, std::size_t m,
                                         std::uint64_t seed) {
  require(match.anchors.size() == match.size() && match.ghosts.size() == match.size(),
          "match covers both sample sets");
  return build_difference_matrix(cls, spec, match.anchors, match.ghosts, m, seed);
}

SandwichReport verify_covering_sandwich(const FiniteClass& cls, const VicinitySpec& spec,
                                        const SampleSet& z, const SampleSet& z_prime, double xi,
                                        double lambda_hat, std::size_t m, std::uint64_t seed) {
  require(xi > 0.0, "xi > 0");
  require(lambda_hat > 0.0, "lambda > 0");
  require(cls.size() <= kMaxExactRows, "<= 20 hypotheses");
  const MatchResult match = vicinity_ghost_match(z, z_prime);
  const EvaluationMatrix p = build_difference_matrix(cls, spec, match, m, seed);
  const EvaluationMatrix f = build_function_matrix(cls, z);

  SandwichReport report;
  report.xi = xi;
  report.lambda = lambda_hat;
  report.difference_cover = covering_number(p, xi).size();
  report.upper_cover = covering_number(f, xi / (2.0 + lambda_hat)).size();
  report.upper_holds = report.difference_cover <= report.upper_cover;
  if (lambda_hat < 1.0) {
    report.lower_cover = covering_number(f, xi / (1.0 - lambda_hat)).size();
    report.lower_holds = *report.lower_cover <= report.difference_cover;
  }
  return report;
}

double estimate_lipschitz_lambda(const FiniteClass& cls, const VicinitySpec& spec,
                                 const SampleSet& z, std::size_t m, std::uint64_t seed) {
  require(cls.size() >= 2, ">= 2 hypotheses");
  const EvaluationMatrix f = build_function_matrix(cls, z);
  const EvaluationMatrix phi = build_phi_matrix(cls, z, spec, m, seed);
  double best = -1.0;
  for (std::size_t i = 0; i < f.rows(); ++i)
    for (std::size_t j = i + 1; j < f.rows(); ++j)
      for (std::size_t n = 0; n < f.cols(); ++n) {
        const double den = std::abs(f.at(i, n) - f.at(j, n));
        if (den < 1e-9) continue;
        best = std::max(best, std::abs(phi.at(i, n) - phi.at(j, n)) / den);
      }
  require(best >= 0.0, "non-degenerate hypothesis pair", "every |f(z) - h(z)| < 1e-9");
  return best;
}

// ---------------------------------------------------------------------------
// Uniform entropy numbers

Domain default_domain(const SyntheticDistribution& dist) {
  validate(dist);
  Domain d;
  d.input_dim = input_dim_of(dist);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, UniformCube>) {
          d.lo.assign(s.dim, s.lo);
          d.hi.assign(s.dim, s.hi);
        } else if constexpr (std::is_same_v<T, DiagonalGaussian>) {
          for (std::size_t k = 0; k < s.mean.size(); ++k) {
            d.lo.push_back(s.mean[k] - 4.0 * s.sigma[k]);
            d.hi.push_back(s.mean[k] + 4.0 * s.sigma[k]);
          }
        } else if constexpr (std::is_same_v<T, GaussianMixture>) {
          const std::size_t dim = s.means.front().size();
          d.lo.assign(dim, std::numeric_limits<double>::infinity());
          d.hi.assign(dim, -std::numeric_limits<double>::infinity());
          for (std::size_t c = 0; c < s.means.size(); ++c)
            for (std::size_t k = 0; k < dim; ++k) {
              d.lo[k] = std::min(d.lo[k], s.means[c][k] - 4.0 * s.sigmas[c][k]);
              d.hi[k] = std::max(d.hi[k], s.means[c][k] + 4.0 * s.sigmas[c][k]);
            }
        } else {
          d.lo.assign(s.w_star.size(), s.x_lo);
          d.hi.assign(s.w_star.size(), s.x_hi);
          double reach = std::abs(s.bias) + 4.0 * s.noise_sigma;
          for (double w : s.w_star) reach += std::abs(w) * std::max(std::abs(s.x_lo), std::abs(s.x_hi));
          d.lo.push_back(-reach);
          d.hi.push_back(reach);
        }
      },
      dist);
  return d;
}

namespace {

SampleSet box_points(const Domain& domain, std::size_t n, Rng& rng) {
  std::vector<double> data;
  data.reserve(n * domain.dim());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < domain.dim(); ++k)
      data.push_back(domain.lo[k] + (domain.hi[k] - domain.lo[k]) * uniform01(rng));
  return SampleSet(domain.dim(), domain.input_dim, std::move(data));
}

SampleSet ball_points(const SampleSet& centres, double radius, Rng& rng) {
  const VicinitySampler ball(VicinitySpec::uniform_ball(radius, Scope::joint), centres.dim(),
                             centres.input_dim());
  std::vector<double> data(centres.size() * centres.dim());
  for (std::size_t n = 0; n < centres.size(); ++n)
    ball.draw(centres.row(n), rng,
              std::span<double>(data).subspan(n * centres.dim(), centres.dim()));
  return SampleSet(centres.dim(), centres.input_dim(), std::move(data));
}

std::size_t pair_cover(const FiniteClass& cls, const VicinitySpec& spec, const SampleSet& anchors,
                       const SampleSet& ghosts, double xi, std::size_t m, std::uint64_t seed) {
  return covering_number(build_difference_matrix(cls, spec, anchors, ghosts, m, seed), xi).size();
}

std::size_t within_candidate(const FiniteClass& cls, const VicinitySpec& spec, double xi,
                             std::size_t n, double r, const Domain& domain, std::uint64_t seed,
                             std::size_t m) {
  Rng rng(seed);
  const SampleSet centres = box_points(domain, n, rng);
  const SampleSet ghosts = ball_points(centres, r, rng);
  const SampleSet anchors = ball_points(centres, r, rng);
  return pair_cover(cls, spec, anchors, ghosts, xi, m, derive_seed(seed, 2));
}

std::size_t free_candidate(const FiniteClass& cls, const VicinitySpec& spec, double xi,
                           std::size_t n, const Domain& domain, std::uint64_t seed, std::size_t m) {
  Rng rng(derive_seed(seed, 1));
  const SampleSet ghosts = box_points(domain, n, rng);
  const SampleSet anchors = box_points(domain, n, rng);
  return pair_cover(cls, spec, anchors, ghosts, xi, m, derive_seed(seed, 2));
}

}  // namespace

UenResult uen_estimate(const FiniteClass& cls, const VicinitySpec& spec, double xi, std::size_t n,
                       const UenMode& mode, const Domain& domain, std::uint64_t seed,
                       const UenOptions& options) {
  cls.validate();
  require(options.budget >= 1, "search budget >= 1");
  require(cls.size() <= kMaxExactRows, "<= 20 hypotheses");
  require(xi > 0.0, "xi > 0");
  require(n >= 1, "N >= 1");
  require(domain.dim() >= 1 && domain.hi.size() == domain.dim(), "domain bounds per coordinate");
  if (mode.within_cover) require(mode.radius > 0.0, "r > 0");

  std::vector<std::size_t> values(options.budget);
  parallel_for(options.budget, options.workers, [&](std::size_t j) {
    const std::uint64_t s = derive_seed(seed, j);
    std::size_t value = 0;
    if (mode.radius > 0.0)
      value = within_candidate(cls, spec, xi, n, mode.radius, domain, s, options.phi_draws);
    if (!mode.within_cover)
      value = std::max(value, free_candidate(cls, spec, xi, n, domain, s, options.phi_draws));
    values[j] = value;
  });

  UenResult result;
  for (std::size_t j = 0; j < values.size(); ++j) {
    result.value = std::max(result.value, values[j]);
    result.trace.push_back({j, values[j], result.value});
  }
  return result;
}

ExpectedCoverReport expected_cover_check(const FiniteClass& cls, const VicinitySpec& spec,
                                         const SyntheticDistribution& dist, std::size_t n, double xi,
                                         double r, std::size_t trials, double c, std::uint64_t seed,
                                         const UenOptions& options) {
  require(trials >= 50, "trials >= 50");
  require(r > 0.0, "r > 0");
  require(c > 0.0, "c > 0");
  cls.validate();

  std::vector<double> covers(trials);
  parallel_for(trials, options.workers, [&](std::size_t t) {
    const std::uint64_t s = trial_seed(seed, t);
    const SamplePair pair = sample_with_ghost(dist, n, s);
    const MatchResult match = vicinity_ghost_match(pair.z, pair.ghost);
    covers[t] = static_cast<double>(
        covering_number(build_difference_matrix(cls, spec, match, options.phi_draws, derive_seed(s, 7)), xi)
            .size());
  });

  ExpectedCoverReport report;
  const Estimate lhs = mean_estimate(covers);
  report.expected_cover = lhs.value;
  report.expected_cover_se = lhs.std_error;
  const Domain domain = default_domain(dist);
  const std::uint64_t search_seed = derive_seed(seed, 0x75656E);
  report.uen_within = uen_estimate(cls, spec, xi, n, UenMode::within(r), domain, search_seed, options).value;
  report.uen_unconstrained =
      uen_estimate(cls, spec, xi, n, UenMode::unconstrained(r), domain, search_seed, options).value;
  report.weight = c * std::exp(-static_cast<double>(n) * r * r / (2.0 * static_cast<double>(dim_of(dist))));
  report.rhs = static_cast<double>(report.uen_within) +
               report.weight * static_cast<double>(report.uen_unconstrained);
  report.holds = report.expected_cover <= report.rhs;
  return report;
}

}  // namespace vrm
