#include "vrm/vicinity.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "vrm/errors.hpp"

namespace vrm {

std::string scope_name(Scope scope) { return scope == Scope::inputs ? "inputs" : "joint"; }

std::string VicinitySpec::kind_name() const {
  switch (kind.index()) {
    case 0: return "dirac";
    case 1: return "uniform_ball";
    case 2: return "gaussian";
    default: return "mixup";
  }
}

void VicinitySpec::validate() const {
  if (const auto* ball = std::get_if<UniformBall>(&kind)) {
    require(std::isfinite(ball->radius) && ball->radius > 0.0, "uniform ball radius > 0");
  } else if (const auto* g = std::get_if<Gaussian>(&kind)) {
    if (g->covariance.empty()) {
      require(!g->sigma.empty(), "gaussian sigma given");
      for (double s : g->sigma) require(std::isfinite(s) && s > 0.0, "gaussian sigma > 0");
    }
  } else if (const auto* mix = std::get_if<Mixup>(&kind)) {
    require(std::isfinite(mix->alpha) && mix->alpha > 0.0, "mixup alpha > 0");
    if (mix->fixed_lambda)
      require(*mix->fixed_lambda >= 0.0 && *mix->fixed_lambda <= 1.0, "mixup lambda in [0, 1]");
    require(scope == Scope::joint, "mixup scope is joint");
  }
}

VicinitySampler::VicinitySampler(const VicinitySpec& spec, std::size_t dim, std::size_t input_dim,
                                 const SampleSet* default_pool)
    : spec_(spec), dim_(dim), perturbed_(spec.scope == Scope::inputs ? input_dim : dim) {
  spec_.validate();
  require(input_dim >= 1 && input_dim <= dim, "1 <= I <= K");
  if (const auto* g = std::get_if<Gaussian>(&spec_.kind)) {
    if (!g->covariance.empty()) {
      require(g->covariance.size() == perturbed_ * perturbed_, "covariance is d x d",
              "expected " + std::to_string(perturbed_ * perturbed_) + " entries");
      Eigen::MatrixXd cov(perturbed_, perturbed_);
      for (std::size_t i = 0; i < perturbed_; ++i)
        for (std::size_t j = 0; j < perturbed_; ++j) cov(i, j) = g->covariance[i * perturbed_ + j];
      require(cov.isApprox(cov.transpose()), "covariance symmetric");
      Eigen::LLT<Eigen::MatrixXd> llt(cov);
      require(llt.info() == Eigen::Success, "covariance positive definite");
      const Eigen::MatrixXd lower = llt.matrixL();
      cholesky_.resize(perturbed_ * perturbed_);
      for (std::size_t i = 0; i < perturbed_; ++i)
        for (std::size_t j = 0; j < perturbed_; ++j) cholesky_[i * perturbed_ + j] = lower(i, j);
    } else if (g->sigma.size() == 1) {
      sigma_.assign(perturbed_, g->sigma.front());
    } else {
      require(g->sigma.size() == perturbed_, "one sigma per perturbed coordinate",
              "expected " + std::to_string(perturbed_));
      sigma_ = g->sigma;
    }
  } else if (const auto* mix = std::get_if<Mixup>(&spec_.kind)) {
    pool_ = mix->pool ? mix->pool.get() : default_pool;
    require(pool_ != nullptr, "mixup partner pool available");
    require(pool_->dim() == dim, "mixup pool has dimension K");
  }
}

void VicinitySampler::draw(Row anchor, Rng& rng, std::span<double> out) const {
  std::copy(anchor.begin(), anchor.end(), out.begin());
  switch (spec_.kind.index()) {
    case 0:  // Dirac
      return;
    case 1: {  // uniform in the ball: Gaussian direction, radius r * U^(1/d)
      const double radius = std::get<UniformBall>(spec_.kind).radius;
      std::array<double, kMaxDim> direction{};
      double norm2 = 0.0;
      do {
        norm2 = 0.0;
        for (std::size_t i = 0; i < perturbed_; ++i) {
          direction[i] = standard_normal(rng);
          norm2 += direction[i] * direction[i];
        }
      } while (norm2 == 0.0);
      const double scale =
          radius * std::pow(uniform01(rng), 1.0 / static_cast<double>(perturbed_)) / std::sqrt(norm2);
      for (std::size_t i = 0; i < perturbed_; ++i) out[i] += scale * direction[i];
      return;
    }
    case 2: {
      if (cholesky_.empty()) {
        for (std::size_t i = 0; i < perturbed_; ++i) out[i] += sigma_[i] * standard_normal(rng);
      } else {
        std::array<double, kMaxDim> e{};
        for (std::size_t i = 0; i < perturbed_; ++i) e[i] = standard_normal(rng);
        for (std::size_t i = 0; i < perturbed_; ++i) {
          double acc = 0.0;
          for (std::size_t j = 0; j <= i; ++j) acc += cholesky_[i * perturbed_ + j] * e[j];
          out[i] += acc;
        }
      }
      return;
    }
    default: {
      const auto& mix = std::get<Mixup>(spec_.kind);
      const double lambda = mix.fixed_lambda ? *mix.fixed_lambda : beta_draw(rng, mix.alpha, mix.alpha);
      std::uniform_int_distribution<std::size_t> pick(0, pool_->size() - 1);
      const Row partner = pool_->row(pick(rng));
      for (std::size_t k = 0; k < dim_; ++k) out[k] = lambda * anchor[k] + (1.0 - lambda) * partner[k];
      return;
    }
  }
}

std::vector<Estimate> phi_many(std::span<const PointFunction> fs, Row anchor,
                               const VicinitySampler& sampler, std::size_t m, std::uint64_t seed) {
  require(m >= 1, "m >= 1");
  require(anchor.size() == sampler.dim(), "anchor has dimension K");
  std::vector<Estimate> out(fs.size());
  if (sampler.spec().is_dirac()) {
    for (std::size_t i = 0; i < fs.size(); ++i) out[i] = {fs[i](anchor), 0.0};
    return out;
  }
  std::vector<RunningStats> stats(fs.size());
  std::array<double, kMaxDim> buffer{};
  const std::span<double> draw(buffer.data(), sampler.dim());
  Rng rng(seed);
  for (std::size_t j = 0; j < m; ++j) {
    sampler.draw(anchor, rng, draw);
    for (std::size_t i = 0; i < fs.size(); ++i) stats[i].add(fs[i](Row(draw)));
  }
  for (std::size_t i = 0; i < fs.size(); ++i) out[i] = stats[i].estimate();
  return out;
}

Estimate phi(const PointFunction& f, const Point& anchor, const VicinitySpec& spec, std::size_t m,
             std::uint64_t seed, const SampleSet* default_pool) {
  const VicinitySampler sampler(spec, anchor.dim(), anchor.input_dim(), default_pool);
  return phi_many(std::span<const PointFunction>(&f, 1), anchor.coords(), sampler, m, seed).front();
}

std::vector<Estimate> vicinal_risk_many(std::span<const PointFunction> fs, const SampleSet& z,
                                        const VicinitySpec& spec, std::size_t m,
                                        std::uint64_t seed) {
  require(m >= 1, "m >= 1");
  const std::size_t n = z.size();
  std::vector<Estimate> out(fs.size());
  if (spec.is_dirac()) {
    spec.validate();
    for (std::size_t i = 0; i < fs.size(); ++i) {
      double total = 0.0;
      for (std::size_t k = 0; k < n; ++k) total += fs[i](z.row(k));
      out[i] = {total / static_cast<double>(n), 0.0};
    }
    return out;
  }
  const VicinitySampler sampler(spec, z.dim(), z.input_dim(), &z);
  std::vector<double> totals(fs.size(), 0.0), variances(fs.size(), 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const auto per_anchor = phi_many(fs, z.row(k), sampler, m, derive_seed(seed, k));
    for (std::size_t i = 0; i < fs.size(); ++i) {
      totals[i] += per_anchor[i].value;
      variances[i] += per_anchor[i].std_error * per_anchor[i].std_error;
    }
  }
  const double count = static_cast<double>(n);
  for (std::size_t i = 0; i < fs.size(); ++i)
    out[i] = {totals[i] / count, std::sqrt(variances[i]) / count};
  return out;
}

Estimate vicinal_risk(const PointFunction& f, const SampleSet& z, const VicinitySpec& spec,
                      std::size_t m, std::uint64_t seed) {
  return vicinal_risk_many(std::span<const PointFunction>(&f, 1), z, spec, m, seed).front();
}

SampleSet sample_vicinal(const VicinalDistribution& vd, std::size_t m, std::uint64_t seed) {
  require(m >= 1, "m >= 1");
  const SampleSet& anchors = vd.anchors;
  const VicinitySampler sampler(vd.spec, anchors.dim(), anchors.input_dim(), &anchors);
  std::vector<double> data(m * anchors.dim());
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, anchors.size() - 1);
  for (std::size_t j = 0; j < m; ++j)
    sampler.draw(anchors.row(pick(rng)), rng, std::span<double>(data).subspan(j * anchors.dim(), anchors.dim()));
  return SampleSet(anchors.dim(), anchors.input_dim(), std::move(data),
                   Provenance{"vicinal:" + vd.spec.kind_name(), seed});
}

}  // namespace vrm
