#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vrm/core.hpp"
#include "vrm/errors.hpp"
#include "vrm/random.hpp"
#include "vrm/stats.hpp"

using namespace vrm;

TEST_CASE("uniform cube draws stay in the cube") {
  const SampleSet z = sample(UniformCube{2, 1, 0.0, 1.0}, 3, 7);
  REQUIRE(z.size() == 3);
  for (double v : z.data()) CHECK((v >= 0.0 && v <= 1.0));
}

TEST_CASE("equal seeds reproduce, different seeds differ") {
  const std::vector<SyntheticDistribution> dists = {
      UniformCube{3, 2, -1.0, 2.0},
      DiagonalGaussian{{0.0, 1.0}, {1.0, 0.5}, 1},
      GaussianMixture{{0.3, 0.7}, {{0.0, 0.0}, {2.0, 2.0}}, {{1.0, 1.0}, {0.5, 0.5}}, 1},
      LinearRegressionTask{{1.0, -2.0}, 0.5, 0.1, -1.0, 1.0}};
  for (const auto& d : dists) {
    CAPTURE(kind_name(d));
    CHECK(sample(d, 20, 5) == sample(d, 20, 5));
    const auto a = sample(d, 20, 5), b = sample(d, 20, 6);
    CHECK(!std::equal(a.data().begin(), a.data().end(), b.data().begin()));
  }
}

TEST_CASE("gaussian sample mean within 4 sigma / sqrt(n)") {
  const DiagonalGaussian g{{1.0, -2.0}, {0.5, 2.0}, 1};
  const std::size_t n = 10000;
  const SampleSet z = sample(g, n, 1);
  for (std::size_t k = 0; k < 2; ++k) {
    RunningStats s;
    for (std::size_t i = 0; i < n; ++i) s.add(z.row(i)[k]);
    CHECK(std::abs(s.mean() - g.mean[k]) <= 4.0 * g.sigma[k] / std::sqrt(double(n)));
  }
}

TEST_CASE("ghost sample is independent and z matches sample()") {
  const LinearRegressionTask task{{1.0}, 0.0, 0.1, -1.0, 1.0};
  const SamplePair p = sample_with_ghost(task, 10, 3);
  CHECK(p.z == sample(task, 10, 3));
  CHECK(!(p.z == p.ghost));
}

TEST_CASE("true marginal cdf") {
  CHECK(true_marginal_cdf(UniformCube{2, 1, 0.0, 1.0}, 0, 0.5) == doctest::Approx(0.5));
  CHECK(true_marginal_cdf(UniformCube{2, 1, 0.0, 1.0}, 1, -1e300) == 0.0);
  CHECK(true_marginal_cdf(UniformCube{2, 1, 0.0, 1.0}, 1, 1e300) == 1.0);
  CHECK(true_marginal_cdf(DiagonalGaussian{{0.0}, {1.0}, 1}, 0, 0.0) == doctest::Approx(0.5));
  CHECK(true_marginal_cdf(DiagonalGaussian{{0.0}, {1.0}, 1}, 0, 1.0) == doctest::Approx(0.8413447460685429));
  CHECK_THROWS_AS(true_marginal_cdf(LinearRegressionTask{{1.0}}, 1, 0.0), UnsupportedError);
}

TEST_CASE("invalid distributions are rejected") {
  CHECK_THROWS_AS(validate(UniformCube{2, 1, 1.0, 0.0}), PreconditionError);
  CHECK_THROWS_AS(validate(DiagonalGaussian{{0.0}, {-1.0}, 0}), PreconditionError);
  CHECK_THROWS_AS(validate(GaussianMixture{{0.5, 0.6}, {{0.0}, {1.0}}, {{1.0}, {1.0}}, 0}), PreconditionError);
  CHECK_THROWS_AS(sample(UniformCube{2, 1, 0.0, 1.0}, 0, 1), PreconditionError);
}

TEST_CASE("true marginal cdf is nondecreasing") {
  const std::vector<SyntheticDistribution> dists = {
      UniformCube{2, 1, -1.0, 2.0}, DiagonalGaussian{{0.0, 1.0}, {1.0, 0.5}, 1},
      GaussianMixture{{0.3, 0.7}, {{0.0, 0.0}, {2.0, 2.0}}, {{1.0, 1.0}, {0.5, 0.5}}, 1}};
  for (const auto& d : dists)
    for (std::size_t k = 0; k < 2; ++k) {
      double previous = 0.0;
      for (int i = 0; i < 100; ++i) {
        const double f = true_marginal_cdf(d, k, -4.0 + 0.08 * i);
        CHECK((f >= previous && f <= 1.0));
        previous = f;
      }
    }
}

TEST_CASE("losses stay within their range") {
  Rng rng(3);
  const std::vector<LossSpec> losses = {LossSpec::squared(0.0, 1.0), LossSpec::squared(0.2, 0.7), LossSpec::zero_one(0.1),
                                        LossSpec::hinge(2.0)};
  for (int i = 0; i < 100000; ++i) {
    const std::vector<double> pred{5.0 * standard_normal(rng)}, target{5.0 * standard_normal(rng)};
    for (const auto& loss : losses) {
      const double v = loss.evaluate(pred, target);
      CHECK((v >= loss.lower && v <= loss.upper));
    }
  }
}

TEST_CASE("squared loss and clipping") {
  const LossSpec loss = LossSpec::squared(0.0, 1.0);
  const LossFunction f(Hypothesis::linear({2.0}, 0.5), loss);
  const std::vector<double> z1{0.1, 0.8};  // prediction 0.7
  CHECK(f(z1) == doctest::Approx(0.01));
  const std::vector<double> z2{3.0, 0.0};  // raw 42.25, clipped
  CHECK(f(z2) == 1.0);
  const LossFunction shifted(Hypothesis::linear({2.0}, 0.5).shifted(0.5), loss);
  CHECK(shifted(z1) == doctest::Approx(0.51));
}

TEST_CASE("zero-one and hinge losses") {
  const Hypothesis h = Hypothesis::linear({1.0}, 0.0);
  const std::vector<double> right{0.5, 1.0}, wrong{-0.5, 1.0};
  const LossFunction zo(h, LossSpec::zero_one());
  CHECK(zo(right) == 0.0);
  CHECK(zo(wrong) == 1.0);
  const LossFunction hinge(h, LossSpec::hinge(2.0));
  CHECK(hinge(right) == doctest::Approx(0.5));
  CHECK(hinge(wrong) == doctest::Approx(1.5));
}

TEST_CASE("multi-output linear hypothesis") {
  const Hypothesis h = Hypothesis::linear({1.0, 0.0, 0.0, 2.0}, {0.5, -0.5}, 2);
  std::vector<double> out(2);
  const std::vector<double> x{1.0, 3.0};
  h.predict(x, out);
  CHECK(out[0] == 1.5);
  CHECK(out[1] == 5.5);
  CHECK(h.weight_norm_squared() == 5.0);
}

TEST_CASE("derived seeds are stable and distinct") {
  static_assert(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2) != derive_seed(2, 2));
  CHECK(trial_seed(10, 5) == 15);
}

TEST_CASE("binomial standard error") {
  CHECK(binomial_se(0.5, 100) == doctest::Approx(0.05));
  CHECK(binomial_se(0.0, 100) == 0.0);
}
