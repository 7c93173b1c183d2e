#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vrm/core.hpp"
#include "vrm/covering.hpp"
#include "vrm/learn.hpp"
#include "vrm/stats.hpp"
#include "vrm/vicinity.hpp"

namespace vrm {

enum class OmegaMethod { cover_form, risk_form };
std::string omega_method_name(OmegaMethod method);

struct OmegaEstimate {
  double value = 0.0;
  double std_error = 0.0;
  OmegaMethod method = OmegaMethod::cover_form;
  double radius = 0.0;                // xi / 4
  std::vector<std::size_t> members;   // the cover the max runs over
  std::size_t argmax = 0;             // class index attaining the max
  std::vector<Estimate> per_member;   // aligned with `members`

  std::size_t cover_size() const noexcept { return members.size(); }
};

struct OmegaOptions {
  std::size_t phi_draws = 64;
  unsigned workers = 0;
};

/// Per trial: fresh (Z, Z'), matched pairs, exact xi/4 cover of P. The cover
/// reported is the one found most often (ties to the earliest trial); each
/// member's value is its (1/N) sum_n p(s_n) averaged over all trials.
OmegaEstimate omega_nu_cover_form(const FiniteClass& cls, const VicinitySpec& spec,
                                  const SyntheticDistribution& dist, std::size_t n, double xi,
                                  std::size_t trials, std::uint64_t seed,
                                  const OmegaOptions& options = {});

/// Per-function Monte-Carlo estimate of R f - R phi(f) from m draws with
/// common random numbers: z ~ dist, v ~ V(.|z), statistic f(z) - f(v). A
/// Mixup partner is z itself with probability 1/n and a fresh draw otherwise,
/// matching a vicinity attached to a sample of size n.
std::vector<Estimate> vicinity_shift_many(std::span<const PointFunction> fs,
                                          const SyntheticDistribution& dist,
                                          const VicinitySpec& spec, std::size_t n, std::size_t m,
                                          std::uint64_t seed);

/// max over `members` of R f - R phi(f).
OmegaEstimate omega_nu_risk_form(const FiniteClass& cls, std::span<const std::size_t> members,
                                 const VicinitySpec& spec, const SyntheticDistribution& dist,
                                 std::size_t n, std::size_t m, std::uint64_t seed);

/// integral of f against the mean vicinity E_a V(.|a), a ~ dist.
Estimate mean_vicinity_risk(const PointFunction& f, const SyntheticDistribution& dist,
                            const VicinitySpec& spec, std::size_t n, std::size_t m,
                            std::uint64_t seed);

struct EtaTriple {
  double eta = 0.0;
  double eta1 = 0.0;  // R f - R_nu f
  double eta2 = 0.0;  // integral f d(E_a V) - R_nu f
  double eta_se = 0.0;
  double eta1_se = 0.0;
  double eta2_se = 0.0;
  double tau = 0.0;
};

/// The three terms share the estimates R f (stream derive_seed(seed, 1)),
/// R_nu f from sample_vicinal (stream 2) and the mean-vicinity risk on fresh
/// anchors (stream 3), so eta == eta1 - eta2 holds exactly.
EtaTriple eta_decomposition(const PointFunction& f_nu, const SyntheticDistribution& dist,
                            const SampleSet& z, const VicinitySpec& spec, std::size_t m,
                            std::uint64_t seed, double tau = 0.0);

struct EtaOptions {
  std::size_t phi_draws = 64;      // vicinity draws per anchor during training
  std::size_t risk_draws = 20000;  // draws per eta term
  unsigned workers = 0;
};

struct EtaSignReport {
  double probability = 0.0;  // P{eta < 0}
  double std_error = 0.0;
  double mean_tau = 0.0;  // mean observed eta1
  double max_tau = 0.0;
  std::size_t trials = 0;
  std::vector<EtaTriple> rows;
};

/// Per trial: fresh Z, f_nu = vrm_train, fresh Monte-Carlo eta terms.
EtaSignReport prob_eta_negative(const FunctionClass& cls, const SyntheticDistribution& dist,
                                std::size_t n, const VicinitySpec& spec, std::size_t trials,
                                std::uint64_t seed, const EtaOptions& options = {});

/// exp(-2 [xi - sum mu]^2 / sum (b - a)^2), and 1 when xi <= sum mu.
double hoeffding_one_sided(double xi, std::span<const double> means,
                           std::span<const std::pair<double, double>> ranges);

/// 4 omega + sqrt(32 (b-a)^e (log cover - log(t/2)) / N) with e = 1 as in the
/// cover bound or e = 2 as in the UEN bound. When `xi` is given, N must satisfy
/// N >= 8(b-a)^2/xi^2.
double cover_bound_rhs(double omega, double expected_covering, std::size_t n, double t, double a,
                       double b, int range_exponent = 1, std::optional<double> xi = std::nullopt);

/// 4 omega + sqrt(32 (b-a)^2 / N) [log(uen_r + c e^{-N r^2 / 2K} uen) - log(t/2)]^{1/2}.
double uen_bound_rhs(double omega, double uen_within_r, double uen_unconstrained, std::size_t n,
                     double t, double a, double b, double r, std::size_t dim, double c = 2.0,
                     std::optional<double> xi = std::nullopt);

struct BoundReport {
  std::size_t trial = 0;
  double gap = 0.0;  // sup_f (R f - R_nu f)
  double omega = 0.0;
  std::size_t cover_size = 0;  // N(P, xi/4, l1(S))
  double cover_bound = 0.0;
  std::optional<double> uen_bound;
  bool violated = false;  // gap > cover_bound
};

struct CoverageOptions {
  std::size_t phi_draws = 64;
  std::size_t risk_draws = 20000;
  int range_exponent = 1;
  /// When set, each trial also reports the UEN bound.
  struct Uen {
    double within = 1.0;
    double unconstrained = 1.0;
    double radius = 0.1;
    double c = 2.0;
  };
  std::optional<Uen> uen;
  unsigned workers = 0;
};

struct CoverageReport {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double frequency = 0.0;
  double std_error = 0.0;  // binomial SE at the nominal t
  double threshold = 0.0;  // t + 3 SE
  bool passes = false;
  double t = 0.0;
  double xi = 0.0;
  std::vector<BoundReport> rows;
};

/// Per trial: fresh (Z, Z'), gap against expected risks computed once, the
/// exact xi/4 cover of P on the matched pairs, Omega as the max of the
/// risk-form shift over that cover, and the cover bound.
CoverageReport bound_coverage_experiment(const FiniteClass& cls, const SyntheticDistribution& dist,
                                         const VicinitySpec& spec, std::size_t n, double t,
                                         double xi, std::size_t trials, std::uint64_t seed,
                                         const CoverageOptions& options = {});

}  // namespace vrm
