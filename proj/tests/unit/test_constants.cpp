#include <doctest.h>

#include <cmath>

#include "vgauss/constants.hpp"
#include "vgauss/error.hpp"
#include "vgauss/parallel.hpp"

using namespace vgauss;

namespace {
const double kInvSqrtPi = 1.0 / std::sqrt(M_PI);
}

TEST_CASE("closed forms for n = 1") {
  CHECK(closed_forms_n1(1.0, 1.0) == doctest::Approx(1.0));
  CHECK(closed_forms_n1(1.0, 2.0) == doctest::Approx(kInvSqrtPi));
  CHECK(closed_forms_n1(2.0, 2.0) == doctest::Approx(2.0 * kInvSqrtPi));
  CHECK(closed_forms_n1(2.0, 1.0) == doctest::Approx(4.0));
  CHECK(closed_forms_n1(1.0, 2.0, 2.0) == doctest::Approx(1.0 + 2.0 * kInvSqrtPi));
  CHECK(closed_forms_n1(1.0, 1.0, 0.0) == doctest::Approx(1.0));
  CHECK(closed_forms_n1(1.0, 1.0, 1.0) == doctest::Approx(2.7201).epsilon(1e-4));
  CHECK_THROWS_AS(closed_forms_n1(1.0, 1.5), UnsupportedError);
  CHECK_THROWS_AS(closed_forms_n1(0.0, 1.0), DomainError);
}

TEST_CASE("Pickands bounds") {
  const auto b = pickands_bounds(1, {1.0}, 2.0);
  CHECK(b.lower == doctest::Approx(1.0 / (8.0 * std::tgamma(1.5))));
  REQUIRE(b.upper.has_value());
  CHECK(b.lower <= kInvSqrtPi);
  CHECK(*b.upper >= kInvSqrtPi);
  const auto b1 = pickands_bounds(1, {1.0}, 1.0);
  CHECK(b1.lower <= 1.0);
  CHECK(*b1.upper >= 1.0);
  CHECK_FALSE(pickands_bounds(2, {1.0, 2.0}, 1.0).upper.has_value());
  CHECK_THROWS_AS(pickands_bounds(2, {1.0}, 1.0), DomainError);
}

TEST_CASE("Piterbarg lower bound") {
  const double H = 2.0;
  const auto right = DriftSpec::one_sided({1.0}, 1.0);
  CHECK(piterbarg_lower_bound({1.0}, 1.0, right, PiterbargVariant::right, H) ==
        doctest::Approx(H / std::exp(1.0)));
  const auto sym = DriftSpec::symmetric({1.0}, 1.0);
  CHECK(piterbarg_lower_bound({1.0}, 1.0, sym, PiterbargVariant::two_sided, H) ==
        doctest::Approx(2.0 * H / (2.0 * std::exp(1.0))));
  CHECK_THROWS_AS(piterbarg_lower_bound({1.0}, 1.0, DriftSpec::zero(1), PiterbargVariant::right, H), DomainError);
}

TEST_CASE("drift spec") {
  const DriftSpec d{2.0, {1.0}, {3.0}};
  CHECK(d.at(0, -2.0) == doctest::Approx(4.0));
  CHECK(d.at(0, 2.0) == doctest::Approx(12.0));
  CHECK(DriftSpec::zero(3).is_zero());
  CHECK(piterbarg_variant_from("two_sided") == PiterbargVariant::two_sided);
  CHECK_THROWS_AS(piterbarg_variant_from("up"), DomainError);
}

TEST_CASE("input validation") {
  const auto s = derive_stream(1, "val", 0);
  CHECK_THROWS_AS(estimate_window_constant({}, 1.0, DriftSpec::zero(0), 0, 1, 0.01, 1000, s), DomainError);
  CHECK_THROWS_AS(estimate_window_constant({1.0}, 2.5, DriftSpec::zero(1), 0, 1, 0.01, 1000, s), DomainError);
  CHECK_THROWS_AS(estimate_window_constant({1.0}, 1.0, DriftSpec::zero(1), 0, 1, 0.01, 999, s), DomainError);
  CHECK_THROWS_AS(estimate_pickands({1.0}, 1.0, {1.0, 2.0}, 0.01, 1000, s), DomainError);
  CHECK_THROWS_AS(estimate_piterbarg({1.0}, 1.0, DriftSpec::one_sided({1.0}, 2.0), PiterbargVariant::right, {1.0},
                                     0.01, 1000, s),
                  DomainError);
  CHECK_THROWS_AS(estimate_piterbarg({1.0}, 1.0, DriftSpec::one_sided({-1.0}, 1.0), PiterbargVariant::right, {1.0},
                                     0.01, 1000, s),
                  PreconditionError);
  CHECK_THROWS_AS(discrete_zero_rung({1.0}, 1.0, 0.1, 1.0, 1000, s), PreconditionError);
}

TEST_CASE("window constant kappa=2 matches closed form") {
  const auto e = estimate_window_constant({1.0}, 2.0, DriftSpec::zero(1, 2.0), 0.0, 2.0, 2.0 / 512, 4000,
                                          derive_stream(2, "w2", 0));
  CHECK(std::abs(e.value - (1.0 + 2.0 * kInvSqrtPi)) < 4.0 * e.se + 1e-3);
  CHECK(e.replications == 4000);
}

TEST_CASE("plain and shift estimators agree on a short window") {
  const auto s = derive_stream(2, "pl", 0);
  const auto a = estimate_window_constant({1.0}, 1.0, DriftSpec::zero(1), 0.5, 0.5, 1.0 / 256, 4000, s,
                                          WindowMethod::shift);
  const auto b = estimate_window_constant({1.0}, 1.0, DriftSpec::zero(1), 0.5, 0.5, 1.0 / 256, 4000, s,
                                          WindowMethod::plain);
  CHECK(std::abs(a.value - b.value) < 4.0 * std::hypot(a.se, b.se));
}

TEST_CASE("zero drift Piterbarg equals the window estimator") {
  const auto s = derive_stream(3, "zd", 0);
  const auto w = estimate_window_constant({1.0, 0.5}, 1.5, DriftSpec::zero(2, 1.5), 0.0, 2.0, 2.0 / 256, 1000, s);
  const auto p = estimate_piterbarg({1.0, 0.5}, 1.5, DriftSpec::zero(2, 1.5), PiterbargVariant::right, {2.0},
                                    2.0 / 256, 1000, s, false);
  CHECK(p.value == w.value);
  CHECK(p.se == w.se);
}

TEST_CASE("Piterbarg kappa=2 matches closed form") {
  // sup_t>=0 of sqrt2 N t - (1+d) t^2 gives 1/2 + sqrt((1+d)/d)/2
  const auto e = estimate_piterbarg({1.0}, 2.0, DriftSpec::one_sided({1.0}, 2.0), PiterbargVariant::right,
                                    {2.0, 4.0, 8.0}, 8.0 / 512, 4000, derive_stream(3, "pt", 0), false);
  CHECK(std::abs(e.value - (0.5 + 0.5 * std::sqrt(2.0))) < 4.0 * e.se + 2e-3);
}

TEST_CASE("Pickands slope kappa=2") {
  const auto e = estimate_pickands({1.0}, 2.0, {1.0, 2.0, 4.0}, 4.0 / 512, 4000, derive_stream(4, "pk", 0));
  CHECK(e.tag == EstimatorTag::slope);
  CHECK(e.rungs.size() == 3);
  CHECK(std::abs(e.value - kInvSqrtPi) < 4.0 * e.se + 5e-3);
}

TEST_CASE("discrete zero kappa=2") {
  const double h = default_discrete_horizon({1.0}, 2.0);
  CHECK(h * h >= 40.0);
  const auto e = estimate_discrete_zero({1.0}, 2.0, {0.2, 0.1}, h, 20000, derive_stream(5, "dz", 0));
  CHECK(e.tag == EstimatorTag::discrete_zero);
  CHECK(e.rungs.size() == 2);
  CHECK(std::abs(e.value - kInvSqrtPi) < 4.0 * e.se + 0.02);
}

TEST_CASE("window and pickands estimates do not depend on the worker count") {
  const auto s = derive_stream(11, "workers", 0);
  auto run = [&](unsigned w) {
    set_worker_count(w);
    const auto a = estimate_window_constant({1.0}, 1.0, DriftSpec::zero(1), 2.0, 2.0, 1.0 / 128, 6000, s);
    const auto b = estimate_window_constant({1.0, 0.7}, 1.5, DriftSpec::zero(2), 0.0, 2.0, 1.0 / 128, 5000, s);
    const auto c = estimate_pickands({1.0}, 1.0, {1.0, 2.0, 4.0}, 1.0 / 64, 5000, s);
    set_worker_count(1);
    return std::vector<double>{a.value, a.se, b.value, c.value, c.se};
  };
  CHECK(run(1) == run(4));
}
