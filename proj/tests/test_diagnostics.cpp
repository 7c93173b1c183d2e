#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "vrm/diagnostics.hpp"
#include "vrm/errors.hpp"

using namespace vrm;

namespace {

const LinearRegressionTask kTask{{1.0}, 0.0, 0.1, -1.0, 1.0};

}  // namespace

TEST_CASE("omega of a constant class is exactly zero") {
  FiniteClass one{{Hypothesis::constant(0.4)}, LossSpec::squared()};
  const auto cover = omega_nu_cover_form(one, VicinitySpec::gaussian(0.2), kTask, 20, 0.2, 20, 1, {16, 1});
  CHECK(cover.value == 0.0);
  const std::vector<std::size_t> members{0};
  CHECK(omega_nu_risk_form(one, members, VicinitySpec::gaussian(0.2), kTask, 20, 2000, 1).value == 0.0);
}

TEST_CASE("omega under dirac is centred") {
  const FiniteClass cls = random_linear_class(4, 1, 1.0, LossSpec::squared(), 2);
  const auto cover = omega_nu_cover_form(cls, VicinitySpec::dirac(), kTask, 30, 0.2, 200, 3, {1, 1});
  for (const auto& e : cover.per_member) CHECK(std::abs(e.value) <= 3.0 * e.std_error + 1e-12);
  const auto risk = omega_nu_risk_form(cls, cover.members, VicinitySpec::dirac(), kTask, 30, 5000, 4);
  CHECK(risk.value == 0.0);
}

TEST_CASE("gaussian risk-form omega is minus sigma^2 times the smallest weight norm") {
  const double sigma = 0.2;
  const FiniteClass cls{{Hypothesis::linear({0.5}), Hypothesis::linear({-1.2}), Hypothesis::linear({2.0})},
                        LossSpec::squared(0.0, 1e6)};
  const std::vector<std::size_t> members{0, 1, 2};
  const auto risk = omega_nu_risk_form(cls, members, VicinitySpec::gaussian(sigma), kTask, 50, 200000, 5);
  for (std::size_t i = 0; i < 3; ++i) {
    const double w = cls.members[i].weights()[0];
    CHECK(std::abs(risk.per_member[i].value + sigma * sigma * w * w) <= 4.0 * risk.per_member[i].std_error);
  }
  CHECK(risk.argmax == 0);
  CHECK(risk.value < -3.0 * risk.std_error);
}

TEST_CASE("cover and risk forms agree") {
  const FiniteClass cls = random_linear_class(4, 1, 1.0, LossSpec::squared(), 9);
  const VicinitySpec spec = VicinitySpec::gaussian(0.2);
  const auto cover = omega_nu_cover_form(cls, spec, kTask, 30, 0.2, 200, 11, {32, 1});
  const auto risk = omega_nu_risk_form(cls, cover.members, spec, kTask, 30, 100000, 12);
  CHECK(std::abs(cover.value - risk.value) <= 3.0 * std::hypot(cover.std_error, risk.std_error));
  CHECK(cover.radius == doctest::Approx(0.05));
}

TEST_CASE("omega cover form is independent of worker count") {
  const FiniteClass cls = random_linear_class(4, 1, 1.0, LossSpec::squared(), 9);
  const auto a = omega_nu_cover_form(cls, VicinitySpec::mixup(0.4), kTask, 20, 0.2, 30, 1, {8, 1});
  const auto b = omega_nu_cover_form(cls, VicinitySpec::mixup(0.4), kTask, 20, 0.2, 30, 1, {8, 4});
  CHECK(a.value == b.value);
  CHECK(a.members == b.members);
}

TEST_CASE("eta decomposition") {
  const SampleSet z = sample(kTask, 40, 1);
  const LossFunction c(Hypothesis::constant(0.3), LossSpec::squared());
  const EtaTriple zero = eta_decomposition(c, kTask, z, VicinitySpec::gaussian(0.1), 2000, 2);
  CHECK(zero.eta == 0.0);
  CHECK(zero.eta1 == 0.0);
  CHECK(zero.eta2 == 0.0);
  const LossFunction f(Hypothesis::linear({0.7}), LossSpec::squared());
  for (std::uint64_t s = 0; s < 10; ++s) {
    const EtaTriple e = eta_decomposition(f, kTask, z, VicinitySpec::mixup(0.3), 2000, s);
    CHECK(e.eta == e.eta1 - e.eta2);
  }
}

TEST_CASE("eta2 is centred under dirac") {
  const LossFunction f(Hypothesis::linear({0.7}), LossSpec::squared());
  RunningStats s;
  for (std::uint64_t t = 0; t < 200; ++t)
    s.add(eta_decomposition(f, kTask, sample(kTask, 50, t), VicinitySpec::dirac(), 2000, 1000 + t).eta2);
  CHECK(std::abs(s.mean()) <= 3.0 * s.std_error());
}

TEST_CASE("prob eta negative") {
  const FiniteClass cls = random_linear_class(4, 1, 1.0, LossSpec::squared(), 1);
  CHECK_THROWS_AS(prob_eta_negative(cls, kTask, 30, VicinitySpec::dirac(), 99, 1), PreconditionError);
  const auto r = prob_eta_negative(cls, kTask, 30, VicinitySpec::gaussian(0.1), 100, 1, {8, 2000, 1});
  CHECK(r.rows.size() == 100);
  CHECK(r.max_tau == doctest::Approx(std::max_element(r.rows.begin(), r.rows.end(), [](auto& a, auto& b) {
                                       return a.eta1 < b.eta1;
                                     })->eta1));
  CHECK((r.probability >= 0.0 && r.probability <= 1.0));
}

TEST_CASE("one-sided hoeffding") {
  const std::vector<double> zero(4, 0.0), means{0.1, 0.2, 0.0, 0.1};
  const std::vector<std::pair<double, double>> ranges(4, {-1.0, 1.0});
  CHECK(hoeffding_one_sided(1.0, zero, ranges) == doctest::Approx(std::exp(-2.0 / 16.0)));
  CHECK(hoeffding_one_sided(0.4, means, ranges) == 1.0);
  CHECK(hoeffding_one_sided(1.4, means, ranges) == doctest::Approx(std::exp(-2.0 * 1.0 / 16.0)));
}

TEST_CASE("cover bound right-hand side") {
  CHECK(cover_bound_rhs(0.0, 0.05, 100, 0.1, 0.0, 1.0) == doctest::Approx(0.0));
  CHECK(cover_bound_rhs(-0.02, 8.0, 512, 0.1, 0.0, 1.0) == doctest::Approx(0.4832036607232894).epsilon(1e-12));
  CHECK(cover_bound_rhs(0.0, 9.0, 512, 0.1, 0.0, 1.0) > cover_bound_rhs(0.0, 8.0, 512, 0.1, 0.0, 1.0));
  CHECK(cover_bound_rhs(0.0, 8.0, 1024, 0.1, 0.0, 1.0) < cover_bound_rhs(0.0, 8.0, 512, 0.1, 0.0, 1.0));
  CHECK(cover_bound_rhs(0.0, 8.0, 512, 0.2, 0.0, 1.0) < cover_bound_rhs(0.0, 8.0, 512, 0.1, 0.0, 1.0));
  CHECK(cover_bound_rhs(0.01, 8.0, 512, 0.1, 0.0, 1.0) > cover_bound_rhs(0.0, 8.0, 512, 0.1, 0.0, 1.0));
  CHECK(cover_bound_rhs(0.0, 8.0, 512, 0.1, 0.0, 2.0, 2) == doctest::Approx(2.0 * cover_bound_rhs(0.0, 8.0, 512, 0.1, 0.0, 1.0)));
  CHECK_THROWS_AS(cover_bound_rhs(0.0, 8.0, 512, 1.0, 0.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(cover_bound_rhs(0.0, 8.0, 100, 0.1, 0.0, 1.0, 1, 0.2), PreconditionError);
}

TEST_CASE("UEN bound right-hand side") {
  CHECK(uen_bound_rhs(-0.02, 3.0, 40.0, 512, 0.1, 0.0, 1.0, 0.1, 2) ==
        doctest::Approx(0.5437127008244088).epsilon(1e-12));
  CHECK(std::abs(uen_bound_rhs(0.05, 3.0, 40.0, 100000000, 0.1, 0.0, 1.0, 0.1, 2) - 0.2) < 1e-2);
  CHECK(uen_bound_rhs(0.0, 3.0, 50.0, 512, 0.1, 0.0, 1.0, 0.1, 2) > uen_bound_rhs(0.0, 3.0, 40.0, 512, 0.1, 0.0, 1.0, 0.1, 2));
  CHECK_THROWS_AS(uen_bound_rhs(0.0, 3.0, 40.0, 512, 0.1, 0.0, 1.0, 0.1, 2, 0.0), PreconditionError);
}

TEST_CASE("coverage experiment") {
  FiniteClass one{{Hypothesis::constant(0.2)}, LossSpec::squared()};
  CoverageOptions options;
  options.phi_draws = 4;
  options.risk_draws = 1000;
  options.workers = 1;
  const auto r = bound_coverage_experiment(one, kTask, VicinitySpec::gaussian(0.1), 200, 0.1, 0.2, 100, 1, options);
  CHECK(r.violations == 0);
  CHECK(r.passes);
  for (const auto& row : r.rows) CHECK(row.gap == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(bound_coverage_experiment(one, kTask, VicinitySpec::gaussian(0.1), 200, 0.1, 0.2, 99, 1, options),
                  PreconditionError);
  CHECK_THROWS_AS(bound_coverage_experiment(one, kTask, VicinitySpec::gaussian(0.1), 100, 0.1, 0.2, 100, 1, options),
                  PreconditionError);
}
