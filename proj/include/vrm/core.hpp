#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vrm/random.hpp"

namespace vrm {

inline constexpr const char* kVersion = "0.1.0";

/// Supported desk-scale envelope.
inline constexpr std::size_t kMaxDim = 32;
inline constexpr std::size_t kMaxSamples = 5000;

/// Read-only view of one joint point z = (x, y).
using Row = std::span<const double>;

/// A single joint point z = (x, y) in R^K; the first `input_dim` coordinates
/// are the input x, the remaining ones the output y.
class Point {
 public:
  Point(std::vector<double> coords, std::size_t input_dim);

  std::size_t dim() const noexcept { return coords_.size(); }
  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t output_dim() const noexcept { return coords_.size() - input_dim_; }

  Row coords() const noexcept { return coords_; }
  Row x() const noexcept { return Row(coords_).first(input_dim_); }
  Row y() const noexcept { return Row(coords_).subspan(input_dim_); }
  double operator[](std::size_t k) const { return coords_[k]; }

  friend bool operator==(const Point&, const Point&) = default;

 private:
  std::vector<double> coords_;
  std::size_t input_dim_;
};

struct Provenance {
  std::string generator;
  std::uint64_t seed = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// N points sharing one (K, I) split, stored row-major.
///
/// `output_dim() == 0` is allowed for purely geometric sets (matching and CDF
/// distances); anything that evaluates a loss requires an output block.
class SampleSet {
 public:
  SampleSet(std::size_t dim, std::size_t input_dim, std::vector<double> data,
            Provenance provenance = {});

  static SampleSet from_points(const std::vector<Point>& points, Provenance provenance = {});
  static SampleSet from_rows(const std::vector<std::vector<double>>& rows, std::size_t input_dim,
                             Provenance provenance = {});

  std::size_t size() const noexcept { return data_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t output_dim() const noexcept { return dim_ - input_dim_; }

  Row row(std::size_t n) const { return Row(data_).subspan(n * dim_, dim_); }
  Point point(std::size_t n) const;
  std::span<const double> data() const noexcept { return data_; }
  const Provenance& provenance() const noexcept { return provenance_; }

  /// Copy with every point shifted by `offset` (length K).
  SampleSet translated(std::span<const double> offset) const;

  friend bool operator==(const SampleSet&, const SampleSet&) = default;

 private:
  std::size_t dim_;
  std::size_t input_dim_;
  std::vector<double> data_;
  Provenance provenance_;
};

// ---------------------------------------------------------------------------
// Synthetic distributions

/// Uniform on [lo, hi]^K.
struct UniformCube {
  std::size_t dim = 2;
  std::size_t input_dim = 1;
  double lo = 0.0;
  double hi = 1.0;
};

/// Independent N(mean_k, sigma_k^2) coordinates.
struct DiagonalGaussian {
  std::vector<double> mean;
  std::vector<double> sigma;
  std::size_t input_dim = 1;
};

/// Finite mixture of diagonal Gaussians.
struct GaussianMixture {
  std::vector<double> weights;
  std::vector<std::vector<double>> means;
  std::vector<std::vector<double>> sigmas;
  std::size_t input_dim = 1;
};

/// x ~ U[x_lo, x_hi]^I, y = <w_star, x> + bias + noise_sigma * e, e ~ N(0,1).
struct LinearRegressionTask {
  std::vector<double> w_star;
  double bias = 0.0;
  double noise_sigma = 0.1;
  double x_lo = -1.0;
  double x_hi = 1.0;
};

using SyntheticDistribution =
    std::variant<UniformCube, DiagonalGaussian, GaussianMixture, LinearRegressionTask>;

std::size_t dim_of(const SyntheticDistribution& dist);
std::size_t input_dim_of(const SyntheticDistribution& dist);
std::string kind_name(const SyntheticDistribution& dist);

/// Throws PreconditionError on invalid parameters.
void validate(const SyntheticDistribution& dist);

/// n i.i.d. draws. Equal (dist, n, seed) gives bit-identical output.
SampleSet sample(const SyntheticDistribution& dist, std::size_t n, std::uint64_t seed);

/// A sample Z and an independent ghost Z' of the same size. Z equals
/// sample(dist, n, seed); Z' comes from a derived stream.
struct SamplePair {
  SampleSet z;
  SampleSet ghost;
};
SamplePair sample_with_ghost(const SyntheticDistribution& dist, std::size_t n, std::uint64_t seed);

/// Writes one draw into `out` (length K).
void draw_point(const SyntheticDistribution& dist, Rng& rng, std::span<double> out);

bool has_analytic_cdf(const SyntheticDistribution& dist);

/// Exact marginal CDF F_k(t), k zero-based. Throws UnsupportedError for
/// kinds without a closed form.
double true_marginal_cdf(const SyntheticDistribution& dist, std::size_t k, double t);

// ---------------------------------------------------------------------------
// Losses and hypotheses

enum class LossKind { squared, zero_one, hinge };

/// Per-output loss summed over the output block, then clipped to
/// [lower, upper].
struct LossSpec {
  LossKind kind = LossKind::squared;
  double threshold = 0.0;  // decision threshold for zero_one / hinge
  double lower = 0.0;
  double upper = 1.0;

  static LossSpec squared(double lower = 0.0, double upper = 1.0) {
    return {LossKind::squared, 0.0, lower, upper};
  }
  static LossSpec zero_one(double threshold = 0.0) { return {LossKind::zero_one, threshold, 0.0, 1.0}; }
  static LossSpec hinge(double upper = 2.0) { return {LossKind::hinge, 0.0, 0.0, upper}; }

  void validate() const;
  double range() const noexcept { return upper - lower; }
  double raw(Row prediction, Row target) const;
  double clip(double value) const noexcept;
  double evaluate(Row prediction, Row target) const { return clip(raw(prediction, target)); }

  friend bool operator==(const LossSpec&, const LossSpec&) = default;
};

std::string loss_name(LossKind kind);

/// g(x) = W x + b with W of shape J x I (row-major), or a constant function
/// of z. `offset` is added to the loss before clipping, giving f + c.
class Hypothesis {
 public:
  enum class Kind { linear, constant };

  static Hypothesis linear(std::vector<double> weights, std::vector<double> bias,
                           std::size_t input_dim);
  /// Scalar-output linear model.
  static Hypothesis linear(std::vector<double> weights, double bias = 0.0);
  static Hypothesis constant(double value);

  Hypothesis shifted(double offset) const;

  Kind kind() const noexcept { return kind_; }
  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t output_dim() const noexcept { return bias_.size(); }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<double>& bias() const noexcept { return bias_; }
  double value() const noexcept { return value_; }
  double offset() const noexcept { return offset_; }
  double weight_norm_squared() const noexcept;

  void predict(Row x, std::span<double> out) const;

  friend bool operator==(const Hypothesis&, const Hypothesis&) = default;

 private:
  Kind kind_ = Kind::constant;
  std::size_t input_dim_ = 0;
  std::vector<double> weights_;
  std::vector<double> bias_;
  double value_ = 0.0;
  double offset_ = 0.0;
};

/// A member f(z) = clip(loss(g(x), y) + offset) of the loss class F.
class LossFunction {
 public:
  LossFunction(Hypothesis hypothesis, LossSpec loss);

  double operator()(Row z) const;

  const Hypothesis& hypothesis() const noexcept { return hypothesis_; }
  const LossSpec& loss() const noexcept { return loss_; }

 private:
  Hypothesis hypothesis_;
  LossSpec loss_;
};

}  // namespace vrm
