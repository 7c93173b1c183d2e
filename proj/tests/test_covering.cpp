#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "vrm/covering.hpp"
#include "vrm/errors.hpp"
#include "vrm/matching.hpp"

using namespace vrm;

namespace {

oracle::Points random_rows(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  oracle::Points out(rows, std::vector<double>(cols));
  for (auto& r : out)
    for (auto& v : r) v = uniform01(rng);
  return out;
}

const LinearRegressionTask kTask{{1.0}, 0.0, 0.1, -1.0, 1.0};

}  // namespace

TEST_CASE("l1 distance") {
  const auto m = EvaluationMatrix::from_rows({{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}});
  CHECK(l1_distance(m, 0, 0) == 0.0);
  CHECK(l1_distance(m, 0, 1) == 1.0);
  const auto m2 = EvaluationMatrix::from_rows({{0.0, 2.0}, {1.0, 0.0}});
  CHECK(l1_distance(m2, 0, 1) == 1.5);
}

TEST_CASE("two rows at distance 0.5") {
  const auto m = EvaluationMatrix::from_rows({{0.0, 0.0}, {0.5, 0.5}});
  CHECK(covering_number(m, 0.3).size() == 2);
  CHECK(covering_number(m, 0.6).size() == 1);
}

TEST_CASE("extreme radii") {
  const auto rows = random_rows(8, 5, 3);
  const auto m = EvaluationMatrix::from_rows(rows);
  CHECK(covering_number(m, 10.0).size() == 1);
  CHECK(covering_number(m, 1e-9).size() == 8);
}

TEST_CASE("exact cover equals subset enumeration") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto rows = random_rows(3 + s % 10, 6, s);
    const auto m = EvaluationMatrix::from_rows(rows);
    for (double xi : {0.1, 0.2, 0.3}) {
      const CoverResult c = covering_number(m, xi);
      CHECK(c.size() == oracle::brute_force_cover(rows, xi));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        bool hit = false;
        for (std::size_t j : c.centers) hit = hit || oracle::mean_l1(rows[i], rows[j]) <= xi;
        CHECK(hit);
      }
    }
  }
}

TEST_CASE("cover sizes: nonincreasing in xi, packing <= exact <= greedy <= rows") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto m = EvaluationMatrix::from_rows(random_rows(12, 8, 100 + s));
    std::size_t previous = m.rows();
    for (double xi = 0.05; xi < 0.6; xi += 0.05) {
      const std::size_t exact = covering_number(m, xi).size();
      const std::size_t greedy = covering_number(m, xi, CoverMethod::greedy).size();
      CHECK(packing_lower_bound(m, xi) <= exact);
      CHECK(exact <= greedy);
      CHECK(greedy <= m.rows());
      CHECK(exact <= previous);
      previous = exact;
      if (greedy == packing_lower_bound(m, xi)) CHECK(exact == greedy);
    }
  }
}

TEST_CASE("exact cover rejects more than 20 rows") {
  const auto m = EvaluationMatrix::from_rows(random_rows(21, 3, 1));
  CHECK_THROWS_AS(covering_number(m, 0.1), PreconditionError);
  CHECK(covering_number(m, 0.1, CoverMethod::greedy).size() >= 1);
}

TEST_CASE("difference matrix under dirac") {
  const FiniteClass cls = random_linear_class(3, 1, 1.0, LossSpec::squared(), 4);
  const SampleSet z = sample(kTask, 6, 2);
  const EvaluationMatrix zero = build_difference_matrix(cls, VicinitySpec::dirac(), vicinity_ghost_match(z, z), 8, 1);
  for (double v : zero.data()) CHECK(v == 0.0);

  const SampleSet a = SampleSet::from_rows({{0.0, 0.0}, {1.0, 0.0}, {0.5, 1.0}}, 1);
  const SampleSet g = SampleSet::from_rows({{0.0, 1.0}, {1.0, 1.0}, {0.5, 0.5}}, 1);
  FiniteClass one{{Hypothesis::linear({1.0})}, LossSpec::squared(0.0, 10.0)};
  const EvaluationMatrix d = build_difference_matrix(one, VicinitySpec::dirac(), a, g, 8, 1);
  // f(z) = (x - y)^2 at ghosts minus anchors
  CHECK(d.at(0, 0) == doctest::Approx(1.0 - 0.0));
  CHECK(d.at(0, 1) == doctest::Approx(0.0 - 1.0));
  CHECK(d.at(0, 2) == doctest::Approx(0.0 - 0.25));
}

TEST_CASE("lipschitz estimate") {
  const FiniteClass cls = random_linear_class(4, 1, 1.0, LossSpec::squared(), 4);
  const SampleSet z = sample(kTask, 20, 1);
  CHECK(estimate_lipschitz_lambda(cls, VicinitySpec::dirac(), z, 8, 1) == 1.0);
  FiniteClass shift{{Hypothesis::linear({0.5}), Hypothesis::linear({0.5}).shifted(0.2)}, LossSpec::squared()};
  CHECK(estimate_lipschitz_lambda(shift, VicinitySpec::gaussian(0.1), z, 64, 1) == doctest::Approx(1.0));
  FiniteClass same{{Hypothesis::linear({0.5}), Hypothesis::linear({0.5})}, LossSpec::squared()};
  CHECK_THROWS_AS(estimate_lipschitz_lambda(same, VicinitySpec::dirac(), z, 8, 1), PreconditionError);
  MESSAGE("gaussian 0.1 lambda: " << estimate_lipschitz_lambda(cls, VicinitySpec::gaussian(0.1), z, 64, 1));
}

TEST_CASE("sandwich: singleton class") {
  FiniteClass one{{Hypothesis::linear({0.3})}, LossSpec::squared()};
  const auto pair = sample_with_ghost(kTask, 15, 2);
  const SandwichReport r = verify_covering_sandwich(one, VicinitySpec::gaussian(0.1), pair.z, pair.ghost, 0.2, 0.5, 16, 3);
  CHECK(r.difference_cover == 1);
  CHECK(r.upper_cover == 1);
  CHECK(*r.lower_cover == 1);
  CHECK(r.upper_holds);
  CHECK(*r.lower_holds);
}

TEST_CASE("sandwich: lower branch only for lambda < 1") {
  const FiniteClass cls = random_linear_class(6, 1, 1.0, LossSpec::squared(), 8);
  const auto pair = sample_with_ghost(kTask, 30, 5);
  const auto high = verify_covering_sandwich(cls, VicinitySpec::gaussian(0.05), pair.z, pair.ghost, 0.2, 1.2, 16, 3);
  CHECK(!high.lower_cover.has_value());
  const auto low = verify_covering_sandwich(cls, VicinitySpec::gaussian(0.05), pair.z, pair.ghost, 0.2, 0.5, 16, 3);
  REQUIRE(low.lower_cover.has_value());
  CHECK(*low.lower_holds == (*low.lower_cover <= low.difference_cover));
  CHECK(low.upper_holds == (low.difference_cover <= low.upper_cover));
}

TEST_CASE("sandwich upper inequality under dirac") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const FiniteClass cls = random_linear_class(8, 1, 1.0, LossSpec::squared(), s);
    const auto pair = sample_with_ghost(kTask, 25, 50 + s);
    CHECK(verify_covering_sandwich(cls, VicinitySpec::dirac(), pair.z, pair.ghost, 0.2, 1.0, 1, s).upper_holds);
  }
}

TEST_CASE("uen: singleton, nesting and budget monotonicity") {
  const Domain domain = default_domain(kTask);
  FiniteClass one{{Hypothesis::linear({0.3})}, LossSpec::squared()};
  CHECK(uen_estimate(one, VicinitySpec::gaussian(0.1), 0.2, 10, UenMode::within(0.1), domain, 1, {5, 8, 1}).value == 1);
  CHECK(uen_estimate(one, VicinitySpec::gaussian(0.1), 0.2, 10, UenMode::unconstrained(), domain, 1, {5, 8, 1}).value == 1);

  const FiniteClass cls = random_linear_class(5, 1, 1.0, LossSpec::squared(), 3);
  const UenOptions small{10, 16, 1}, large{20, 16, 1};
  const auto within = uen_estimate(cls, VicinitySpec::gaussian(0.1), 0.2, 20, UenMode::within(0.1), domain, 4, small);
  const auto free = uen_estimate(cls, VicinitySpec::gaussian(0.1), 0.2, 20, UenMode::unconstrained(0.1), domain, 4, small);
  CHECK(within.value <= free.value);
  const auto more = uen_estimate(cls, VicinitySpec::gaussian(0.1), 0.2, 20, UenMode::within(0.1), domain, 4, large);
  CHECK(more.value >= within.value);
  CHECK(within.trace.size() == 10);
  for (std::size_t j = 1; j < more.trace.size(); ++j) CHECK(more.trace[j].best >= more.trace[j - 1].best);
  CHECK_THROWS_AS(uen_estimate(cls, VicinitySpec::dirac(), 0.2, 20, UenMode::within(0.1), domain, 4, {0, 16, 1}),
                  PreconditionError);
}

TEST_CASE("uen is independent of worker count") {
  const FiniteClass cls = random_linear_class(5, 1, 1.0, LossSpec::squared(), 3);
  const Domain domain = default_domain(kTask);
  const auto a = uen_estimate(cls, VicinitySpec::gaussian(0.1), 0.2, 15, UenMode::unconstrained(0.1), domain, 2, {8, 16, 1});
  const auto b = uen_estimate(cls, VicinitySpec::gaussian(0.1), 0.2, 15, UenMode::unconstrained(0.1), domain, 2, {8, 16, 4});
  CHECK(a.value == b.value);
  for (std::size_t j = 0; j < a.trace.size(); ++j) CHECK(a.trace[j].value == b.trace[j].value);
}

TEST_CASE("expected cover check") {
  FiniteClass one{{Hypothesis::linear({0.3})}, LossSpec::squared()};
  const auto r = expected_cover_check(one, VicinitySpec::gaussian(0.1), kTask, 10, 0.2, 0.1, 50, 2.0, 1, {3, 8, 1});
  CHECK(r.expected_cover == 1.0);
  CHECK(r.rhs >= 1.0);
  CHECK(r.holds);
  const auto n10 = expected_cover_check(one, VicinitySpec::dirac(), kTask, 10, 0.2, 0.5, 50, 2.0, 1, {2, 8, 1});
  const auto n40 = expected_cover_check(one, VicinitySpec::dirac(), kTask, 40, 0.2, 0.5, 50, 2.0, 1, {2, 8, 1});
  CHECK(n40.weight < n10.weight);
  CHECK(n10.weight == doctest::Approx(2.0 * std::exp(-10 * 0.25 / 4.0)));
  CHECK_THROWS_AS(expected_cover_check(one, VicinitySpec::dirac(), kTask, 10, 0.2, 0.5, 49, 2.0, 1), PreconditionError);
}

TEST_CASE("seeded regression baselines") {
  const FiniteClass cls = random_linear_class(5, 1, 1.0, LossSpec::squared(), 3);
  const Domain domain = default_domain(kTask);
  const UenOptions options{200, 64, 1};
  CHECK(uen_estimate(cls, VicinitySpec::gaussian(0.1), 0.2, 20, UenMode::within(0.1), domain, 17, options).value == 1);
  CHECK(uen_estimate(cls, VicinitySpec::gaussian(0.1), 0.2, 20, UenMode::unconstrained(0.1), domain, 17, options).value ==
        4);
  const FiniteClass four = random_linear_class(4, 1, 1.0, LossSpec::squared(), 4);
  CHECK(estimate_lipschitz_lambda(four, VicinitySpec::gaussian(0.1), sample(kTask, 20, 1), 64, 1) ==
        doctest::Approx(8.860621481924932).epsilon(1e-12));
  const auto check = expected_cover_check(cls, VicinitySpec::gaussian(0.1), kTask, 20, 0.2, 0.1, 100, 2.0, 5, {50, 64, 1});
  CHECK(check.expected_cover == doctest::Approx(1.03));
  CHECK(check.rhs == doctest::Approx(6.7073765470042837).epsilon(1e-12));
}
