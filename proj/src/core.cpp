#include "vrm/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vrm/errors.hpp"

namespace vrm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

double normal_cdf(double t, double mean, double sigma) {
  return 0.5 * std::erfc(-(t - mean) / (sigma * std::sqrt(2.0)));
}

}  // namespace

// ---------------------------------------------------------------------------
// Point / SampleSet

Point::Point(std::vector<double> coords, std::size_t input_dim)
    : coords_(std::move(coords)), input_dim_(input_dim) {
  require(!coords_.empty() && coords_.size() <= kMaxDim, "1 <= K <= 32");
  require(input_dim_ >= 1 && input_dim_ <= coords_.size(), "1 <= I <= K");
  require(all_finite(coords_), "finite coordinates");
}

SampleSet::SampleSet(std::size_t dim, std::size_t input_dim, std::vector<double> data,
                     Provenance provenance)
    : dim_(dim), input_dim_(input_dim), data_(std::move(data)), provenance_(std::move(provenance)) {
  require(dim_ >= 1 && dim_ <= kMaxDim, "1 <= K <= 32");
  require(input_dim_ >= 1 && input_dim_ <= dim_, "1 <= I <= K");
  require(!data_.empty() && data_.size() % dim_ == 0, "N >= 1 and dimension-consistent rows");
  require(all_finite(data_), "finite coordinates");
}

SampleSet SampleSet::from_points(const std::vector<Point>& points, Provenance provenance) {
  require(!points.empty(), "N >= 1");
  const std::size_t dim = points.front().dim();
  const std::size_t input_dim = points.front().input_dim();
  std::vector<double> data;
  data.reserve(points.size() * dim);
  for (const auto& p : points) {
    require(p.dim() == dim && p.input_dim() == input_dim, "dimension-consistent points");
    data.insert(data.end(), p.coords().begin(), p.coords().end());
  }
  return SampleSet(dim, input_dim, std::move(data), std::move(provenance));
}

SampleSet SampleSet::from_rows(const std::vector<std::vector<double>>& rows, std::size_t input_dim,
                               Provenance provenance) {
  require(!rows.empty(), "N >= 1");
  const std::size_t dim = rows.front().size();
  std::vector<double> data;
  data.reserve(rows.size() * dim);
  for (const auto& r : rows) {
    require(r.size() == dim, "dimension-consistent rows");
    data.insert(data.end(), r.begin(), r.end());
  }
  return SampleSet(dim, input_dim, std::move(data), std::move(provenance));
}

Point SampleSet::point(std::size_t n) const {
  const Row r = row(n);
  return Point(std::vector<double>(r.begin(), r.end()), input_dim_);
}

SampleSet SampleSet::translated(std::span<const double> offset) const {
  require(offset.size() == dim_, "offset has length K");
  std::vector<double> shifted = data_;
  for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] += offset[i % dim_];
  return SampleSet(dim_, input_dim_, std::move(shifted), provenance_);
}

// ---------------------------------------------------------------------------
// Distributions

std::size_t dim_of(const SyntheticDistribution& dist) {
  return std::visit(overloaded{
                        [](const UniformCube& d) { return d.dim; },
                        [](const DiagonalGaussian& d) { return d.mean.size(); },
                        [](const GaussianMixture& d) {
                          return d.means.empty() ? std::size_t{0} : d.means.front().size();
                        },
                        [](const LinearRegressionTask& d) { return d.w_star.size() + 1; },
                    },
                    dist);
}

std::size_t input_dim_of(const SyntheticDistribution& dist) {
  return std::visit(overloaded{
                        [](const UniformCube& d) { return d.input_dim; },
                        [](const DiagonalGaussian& d) { return d.input_dim; },
                        [](const GaussianMixture& d) { return d.input_dim; },
                        [](const LinearRegressionTask& d) { return d.w_star.size(); },
                    },
                    dist);
}

std::string kind_name(const SyntheticDistribution& dist) {
  return std::visit(overloaded{
                        [](const UniformCube&) { return std::string("uniform_cube"); },
                        [](const DiagonalGaussian&) { return std::string("diagonal_gaussian"); },
                        [](const GaussianMixture&) { return std::string("gaussian_mixture"); },
                        [](const LinearRegressionTask&) { return std::string("linear_regression"); },
                    },
                    dist);
}

void validate(const SyntheticDistribution& dist) {
  const std::size_t dim = dim_of(dist);
  require(dim >= 1 && dim <= kMaxDim, "1 <= K <= 32");
  require(input_dim_of(dist) >= 1 && input_dim_of(dist) <= dim, "1 <= I <= K");
  std::visit(overloaded{
                 [](const UniformCube& d) {
                   require(std::isfinite(d.lo) && std::isfinite(d.hi) && d.lo < d.hi,
                           "uniform cube lo < hi");
                 },
                 [](const DiagonalGaussian& d) {
                   require(d.sigma.size() == d.mean.size(), "sigma has length K");
                   require(all_finite(d.mean), "finite mean");
                   for (double s : d.sigma) require(std::isfinite(s) && s > 0.0, "sigma > 0");
                 },
                 [dim](const GaussianMixture& d) {
                   require(!d.weights.empty(), "mixture has components");
                   require(d.means.size() == d.weights.size() && d.sigmas.size() == d.weights.size(),
                           "one mean and sigma per component");
                   double total = 0.0;
                   for (std::size_t c = 0; c < d.weights.size(); ++c) {
                     require(d.weights[c] > 0.0 && std::isfinite(d.weights[c]), "weights > 0");
                     total += d.weights[c];
                     require(d.means[c].size() == dim && d.sigmas[c].size() == dim,
                             "component dimension K");
                     require(all_finite(d.means[c]), "finite mean");
                     for (double s : d.sigmas[c]) require(std::isfinite(s) && s > 0.0, "sigma > 0");
                   }
                   require(total > 0.0, "positive total weight");
                 },
                 [](const LinearRegressionTask& d) {
                   require(!d.w_star.empty(), "I >= 1");
                   require(all_finite(d.w_star) && std::isfinite(d.bias), "finite weights");
                   require(std::isfinite(d.noise_sigma) && d.noise_sigma >= 0.0, "noise_sigma >= 0");
                   require(d.x_lo < d.x_hi, "x_lo < x_hi");
                 },
             },
             dist);
}

void draw_point(const SyntheticDistribution& dist, Rng& rng, std::span<double> out) {
  std::visit(overloaded{
                 [&](const UniformCube& d) {
                   std::uniform_real_distribution<double> u(d.lo, d.hi);
                   for (double& v : out) v = u(rng);
                 },
                 [&](const DiagonalGaussian& d) {
                   for (std::size_t k = 0; k < out.size(); ++k)
                     out[k] = d.mean[k] + d.sigma[k] * standard_normal(rng);
                 },
                 [&](const GaussianMixture& d) {
                   std::discrete_distribution<std::size_t> pick(d.weights.begin(), d.weights.end());
                   const std::size_t c = pick(rng);
                   for (std::size_t k = 0; k < out.size(); ++k)
                     out[k] = d.means[c][k] + d.sigmas[c][k] * standard_normal(rng);
                 },
                 [&](const LinearRegressionTask& d) {
                   std::uniform_real_distribution<double> u(d.x_lo, d.x_hi);
                   double y = d.bias;
                   for (std::size_t i = 0; i < d.w_star.size(); ++i) {
                     out[i] = u(rng);
                     y += d.w_star[i] * out[i];
                   }
                   out[d.w_star.size()] = y + d.noise_sigma * standard_normal(rng);
                 },
             },
             dist);
}

SampleSet sample(const SyntheticDistribution& dist, std::size_t n, std::uint64_t seed) {
  validate(dist);
  require(n >= 1, "n >= 1");
  const std::size_t dim = dim_of(dist);
  std::vector<double> data(n * dim);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) draw_point(dist, rng, std::span<double>(data).subspan(i * dim, dim));
  return SampleSet(dim, input_dim_of(dist), std::move(data), Provenance{kind_name(dist), seed});
}

SamplePair sample_with_ghost(const SyntheticDistribution& dist, std::size_t n,
                             std::uint64_t seed) {
  return SamplePair{sample(dist, n, seed), sample(dist, n, derive_seed(seed, 0x67686F7374ULL))};
}

bool has_analytic_cdf(const SyntheticDistribution& dist) {
  return !std::holds_alternative<LinearRegressionTask>(dist);
}

double true_marginal_cdf(const SyntheticDistribution& dist, std::size_t k, double t) {
  validate(dist);
  require(k < dim_of(dist), "0 <= k < K");
  if (std::isnan(t)) throw PreconditionError("t is a number", "NaN");
  return std::visit(
      overloaded{
          [&](const UniformCube& d) { return std::clamp((t - d.lo) / (d.hi - d.lo), 0.0, 1.0); },
          [&](const DiagonalGaussian& d) { return normal_cdf(t, d.mean[k], d.sigma[k]); },
          [&](const GaussianMixture& d) {
            const double total = std::accumulate(d.weights.begin(), d.weights.end(), 0.0);
            double acc = 0.0;
            for (std::size_t c = 0; c < d.weights.size(); ++c)
              acc += d.weights[c] * normal_cdf(t, d.means[c][k], d.sigmas[c][k]);
            return std::clamp(acc / total, 0.0, 1.0);
          },
          [&](const LinearRegressionTask&) -> double {
            throw UnsupportedError("no analytic CDF for linear_regression");
          },
      },
      dist);
}

// ---------------------------------------------------------------------------
// Losses

std::string loss_name(LossKind kind) {
  switch (kind) {
    case LossKind::squared: return "squared";
    case LossKind::zero_one: return "zero_one";
    case LossKind::hinge: return "hinge";
  }
  return "unknown";
}

void LossSpec::validate() const {
  require(std::isfinite(lower) && std::isfinite(upper) && lower < upper, "loss range a < b, finite");
  require(std::isfinite(threshold), "finite threshold");
}

double LossSpec::raw(Row prediction, Row target) const {
  require(prediction.size() == target.size(), "prediction and target sizes match");
  double total = 0.0;
  for (std::size_t j = 0; j < prediction.size(); ++j) {
    const double p = prediction[j];
    const double y = target[j];
    switch (kind) {
      case LossKind::squared: total += (p - y) * (p - y); break;
      case LossKind::zero_one: total += ((p > threshold) != (y > threshold)) ? 1.0 : 0.0; break;
      case LossKind::hinge: {
        const double label = y > threshold ? 1.0 : -1.0;
        total += std::max(0.0, 1.0 - label * (p - threshold));
        break;
      }
    }
  }
  return total;
}

double LossSpec::clip(double value) const noexcept {
  if (std::isnan(value)) return upper;
  return std::clamp(value, lower, upper);
}

// ---------------------------------------------------------------------------
// Hypotheses

Hypothesis Hypothesis::linear(std::vector<double> weights, std::vector<double> bias,
                              std::size_t input_dim) {
  require(input_dim >= 1, "I >= 1");
  require(!bias.empty(), "J >= 1");
  require(weights.size() == input_dim * bias.size(), "weights are J x I");
  require(all_finite(weights) && all_finite(bias), "finite weights");
  Hypothesis h;
  h.kind_ = Kind::linear;
  h.input_dim_ = input_dim;
  h.weights_ = std::move(weights);
  h.bias_ = std::move(bias);
  return h;
}

Hypothesis Hypothesis::linear(std::vector<double> weights, double bias) {
  const std::size_t input_dim = weights.size();
  return linear(std::move(weights), std::vector<double>{bias}, input_dim);
}

Hypothesis Hypothesis::constant(double value) {
  require(std::isfinite(value), "finite constant");
  Hypothesis h;
  h.value_ = value;
  return h;
}

Hypothesis Hypothesis::shifted(double offset) const {
  Hypothesis h = *this;
  h.offset_ += offset;
  return h;
}

double Hypothesis::weight_norm_squared() const noexcept {
  double s = 0.0;
  for (double w : weights_) s += w * w;
  return s;
}

void Hypothesis::predict(Row x, std::span<double> out) const {
  const std::size_t outputs = bias_.size();
  for (std::size_t j = 0; j < outputs; ++j) {
    double acc = bias_[j];
    const double* w = weights_.data() + j * input_dim_;
    for (std::size_t i = 0; i < input_dim_; ++i) acc += w[i] * x[i];
    out[j] = acc;
  }
}

LossFunction::LossFunction(Hypothesis hypothesis, LossSpec loss)
    : hypothesis_(std::move(hypothesis)), loss_(loss) {
  loss_.validate();
}

double LossFunction::operator()(Row z) const {
  if (hypothesis_.kind() == Hypothesis::Kind::constant)
    return loss_.clip(hypothesis_.value() + hypothesis_.offset());
  const std::size_t input_dim = hypothesis_.input_dim();
  const std::size_t outputs = hypothesis_.output_dim();
  require(z.size() == input_dim + outputs, "point dimension matches hypothesis I + J");
  std::array<double, kMaxDim> prediction{};
  hypothesis_.predict(z.first(input_dim), std::span<double>(prediction.data(), outputs));
  const double loss = loss_.raw(Row(prediction.data(), outputs), z.subspan(input_dim)) +
                      hypothesis_.offset();
  return loss_.clip(loss);
}

}  // namespace vrm
