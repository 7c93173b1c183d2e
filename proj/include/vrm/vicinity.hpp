#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vrm/core.hpp"
#include "vrm/stats.hpp"

namespace vrm {

/// Any real-valued function of a joint point; LossFunction converts to it.
using PointFunction = std::function<double(Row)>;

/// Which coordinates a vicinity perturbs.
enum class Scope { inputs, joint };

struct Dirac {};

/// Uniform on the Euclidean ball of `radius` around the anchor.
struct UniformBall {
  double radius = 0.1;
};

/// N(anchor, diag(sigma^2)) or N(anchor, covariance). `sigma` holds one
/// shared value or one per perturbed coordinate; `covariance` (row-major,
/// d x d) takes precedence when non-empty.
struct Gaussian {
  std::vector<double> sigma{0.1};
  std::vector<double> covariance;
};

/// lambda * anchor + (1 - lambda) * partner with lambda ~ Beta(alpha, alpha)
/// and the partner uniform over `pool`. A null pool means "the anchor set
/// the vicinity is attached to". Always perturbs the joint point.
struct Mixup {
  double alpha = 1.0;
  std::shared_ptr<const SampleSet> pool;
  std::optional<double> fixed_lambda;
};

struct VicinitySpec {
  std::variant<Dirac, UniformBall, Gaussian, Mixup> kind;
  Scope scope = Scope::inputs;

  static VicinitySpec dirac() { return {Dirac{}, Scope::inputs}; }
  static VicinitySpec uniform_ball(double radius, Scope scope = Scope::inputs) {
    return {UniformBall{radius}, scope};
  }
  static VicinitySpec gaussian(double sigma, Scope scope = Scope::inputs) {
    return {Gaussian{{sigma}, {}}, scope};
  }
  static VicinitySpec gaussian(std::vector<double> sigma, Scope scope = Scope::inputs) {
    return {Gaussian{std::move(sigma), {}}, scope};
  }
  static VicinitySpec gaussian_covariance(std::vector<double> covariance, Scope scope = Scope::inputs) {
    return {Gaussian{{}, std::move(covariance)}, scope};
  }
  static VicinitySpec mixup(double alpha, std::shared_ptr<const SampleSet> pool = nullptr,
                            std::optional<double> fixed_lambda = std::nullopt) {
    return {Mixup{alpha, std::move(pool), fixed_lambda}, Scope::joint};
  }

  bool is_dirac() const noexcept { return std::holds_alternative<Dirac>(kind); }
  bool is_mixup() const noexcept { return std::holds_alternative<Mixup>(kind); }
  std::string kind_name() const;

  /// Parameter checks that do not depend on the data dimension.
  void validate() const;
};

std::string scope_name(Scope scope);

/// Draws from V(.|theta(anchor)) for one fixed (spec, K, I, pool).
class VicinitySampler {
 public:
  /// `default_pool` backs a Mixup spec whose own pool is null.
  VicinitySampler(const VicinitySpec& spec, std::size_t dim, std::size_t input_dim,
                  const SampleSet* default_pool = nullptr);

  const VicinitySpec& spec() const noexcept { return spec_; }
  std::size_t dim() const noexcept { return dim_; }
  /// Number of leading coordinates that are perturbed.
  std::size_t perturbed_dim() const noexcept { return perturbed_; }

  void draw(Row anchor, Rng& rng, std::span<double> out) const;

 private:
  VicinitySpec spec_;
  std::size_t dim_;
  std::size_t perturbed_;
  std::vector<double> sigma_;
  std::vector<double> cholesky_;  // lower-triangular, row-major
  const SampleSet* pool_ = nullptr;
};

/// Monte-Carlo phi(f, a) = E_{z ~ V(.|a)} f(z) from m draws of stream `seed`.
/// Dirac returns f(a) with zero error and no sampling.
Estimate phi(const PointFunction& f, const Point& anchor, const VicinitySpec& spec, std::size_t m,
             std::uint64_t seed, const SampleSet* default_pool = nullptr);

/// phi for several functions on the same draws (common random numbers);
/// element i equals phi(fs[i], ...) exactly.
std::vector<Estimate> phi_many(std::span<const PointFunction> fs, Row anchor,
                               const VicinitySampler& sampler, std::size_t m, std::uint64_t seed);

/// R_nu f = (1/N) sum_n phi(f, z_n) with anchor n on stream derive_seed(seed, n).
/// Mixup without a pool uses Z itself.
Estimate vicinal_risk(const PointFunction& f, const SampleSet& z, const VicinitySpec& spec,
                      std::size_t m, std::uint64_t seed);

/// vicinal_risk for several functions with shared draws.
std::vector<Estimate> vicinal_risk_many(std::span<const PointFunction> fs, const SampleSet& z,
                                        const VicinitySpec& spec, std::size_t m,
                                        std::uint64_t seed);

/// P_nu = (1/N) sum_n V(.|theta(z_n)).
struct VicinalDistribution {
  SampleSet anchors;
  VicinitySpec spec;
};

/// m draws: anchor uniform over the N anchors, then one vicinity draw.
SampleSet sample_vicinal(const VicinalDistribution& vd, std::size_t m, std::uint64_t seed);

inline constexpr std::size_t kDefaultPhiDraws = 256;

}  // namespace vrm
