#include <doctest.h>

#include <cmath>

#include "vgauss/conjunction.hpp"
#include "vgauss/error.hpp"

using namespace vgauss;

namespace {

const VectorProcessSpec kBrownian{{FractionalBrownian{1.0}}, 1.0};

}  // namespace

TEST_CASE("probability from hits") {
  const auto p = ProbEstimate::from_hits(25, 10000, 0.01);
  CHECK(p.value == doctest::Approx(0.0025));
  CHECK(p.se == doctest::Approx(std::sqrt(0.0025 * 0.9975 / 10000)));
  const auto z = ProbEstimate::from_hits(0, 1000, 0.01);
  CHECK(z.value == 0.0);
  CHECK(z.se == doctest::Approx(0.003));
  CHECK_FALSE(z.warnings.empty());
}

TEST_CASE("default step") {
  const VectorProcessSpec spec{{Stationary{1.0, 1.0}, Stationary{1.0, 2.0}}, 2.0};
  CHECK(min_local_exponent(spec) == 1.0);
  CHECK(default_conjunction_step(spec, 1.0) == doctest::Approx(2.0 / 1024));
  CHECK(default_conjunction_step(spec, 10.0) == doctest::Approx(0.1 / 100.0));
  const auto g = default_conjunction_grid(spec, 1.0);
  CHECK(g.end() == doctest::Approx(2.0));
}

TEST_CASE("reflection principle for Brownian motion") {
  const auto g = SampleGrid::covering(0.0, 1.0, 1.0 / 1024);
  const auto p = estimate_conjunction_prob(kBrownian, {1.0}, g, 20000, derive_stream(1, "bm", 0));
  const double exact = 2.0 * gaussian_tail(1.0);
  // the grid maximum undershoots by about 0.58 sqrt(step)
  const double lower = 2.0 * gaussian_tail(1.0 + 0.5826 * std::sqrt(1.0 / 1024) * 1.5);
  CHECK(p.value <= exact + 3.0 * p.se);
  CHECK(p.value >= lower - 3.0 * p.se);
}

TEST_CASE("curve and nested refinement are monotone") {
  const VectorProcessSpec spec{{Stationary{1.0, 1.0}, Stationary{1.0, 1.5}}, 1.0};
  const auto g = SampleGrid::covering(0.0, 1.0, 1.0 / 256);
  const auto curve =
      estimate_conjunction_curve(spec, {{0.5, 0.5}, {1.0, 1.0}, {1.5, 1.5}}, g, 4000, derive_stream(2, "c", 0));
  REQUIRE(curve.size() == 3);
  CHECK(curve[0].value >= curve[1].value);
  CHECK(curve[1].value >= curve[2].value);
  const auto single = estimate_conjunction_prob(spec, {1.0, 1.0}, g, 4000, derive_stream(2, "c", 0));
  CHECK(single.hits == curve[1].hits);

  const auto nested = estimate_nested_refinement(spec, {1.0, 1.0}, g, 4, 4000, derive_stream(2, "n", 0));
  REQUIRE(nested.size() == 4);
  for (std::size_t k = 1; k < nested.size(); ++k) CHECK(nested[k].hits <= nested[k - 1].hits);
  CHECK(nested[1].grid_step == doctest::Approx(2.0 / 256));
}

TEST_CASE("order statistic dominates min of r") {
  const VectorProcessSpec spec{{Stationary{1.0, 1.0}, Stationary{1.0, 1.0}, Stationary{1.0, 1.0}}, 1.0};
  const auto g = SampleGrid::covering(0.0, 1.0, 1.0 / 128);
  const auto e = estimate_order_stat_prob(spec, 2, 1.0, g, 4000, derive_stream(3, "os", 0));
  CHECK(e.order_stat.hits >= e.min_of_r.hits);
  CHECK(e.order_stat.value <= 3.0 * e.min_of_r.value + 4.0 * e.order_stat.se);
}

TEST_CASE("double event preconditions") {
  const VectorProcessSpec spec{{Stationary{1.0, 1.0}}, 10.0};
  CHECK_THROWS_AS(estimate_double_event(spec, 3.0, 2.0, {1.0}, 1000, derive_stream(4, "d", 0)), DomainError);
  const auto e = estimate_double_event(spec, 3.0, 2.0, {2.0, 4.0}, 2000, derive_stream(4, "d", 0));
  CHECK(e.joint.size() == 2);
  CHECK(e.joint[0].hits <= e.single.hits);
}

TEST_CASE("Slepian audit") {
  const VectorProcessSpec a{{Stationary{1.0, 1.0}}, 1.0};
  const VectorProcessSpec b{{Stationary{2.0, 1.0}}, 1.0};
  const auto g = SampleGrid::covering(0.0, 1.0, 1.0 / 256);
  const auto r = audit_slepian(a, b, {1.5}, g, 10000, derive_stream(5, "sl", 0));
  CHECK(r.verdict == Verdict::pass);
  CHECK(r.p_a.value <= r.p_b.value + 3.0 * r.pooled_se);
  CHECK_THROWS_AS(audit_slepian(b, a, {1.5}, g, 10000, derive_stream(5, "sl", 0)), PreconditionError);
}

TEST_CASE("Borell audit on Brownian motion") {
  const auto g = SampleGrid::covering(0.0, 1.0, 1.0 / 512);
  const auto rows = audit_borell(kBrownian, {3.0, 4.0}, g, 10000, derive_stream(6, "bo", 0));
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.tau_sq == doctest::Approx(1.0));
    // E sup B on [0,1] = sqrt(2/pi)
    CHECK(std::abs(r.mu_hat - std::sqrt(2.0 / M_PI)) < 0.05);
    CHECK(r.verdict == Verdict::pass);
  }
}

TEST_CASE("decay exponent") {
  const VectorProcessSpec s{{Stationary{1.0, 1.5}, FractionalBrownian{1.0}}, 1.0};
  CHECK(decay_exponent(s) == 1.0);
  NonStationary ns;
  ns.alpha = 1.5;
  ns.holder_gamma = 0.5;
  CHECK(decay_exponent({{ns}, 1.0}) == 0.5);
  CHECK_THROWS_AS(audit_piterbarg_decay(s, {2.0, 1.0, 3.0}, SampleGrid::covering(0.0, 1.0, 0.01), 1000,
                                        derive_stream(7, "de", 0)),
                  DomainError);
}

TEST_CASE("ratio report") {
  ProbEstimate p = ProbEstimate::from_hits(100, 10000, 0.01);
  AsymptoticApproximation a;
  a.value_at_u = 0.005;
  const auto r = compare_with_asymptotic(p, a);
  CHECK(r.ratio == doctest::Approx(2.0));
  CHECK(r.lower == doctest::Approx((0.01 - 1.96 * p.se) / 0.005));
  CHECK(r.upper == doctest::Approx((0.01 + 1.96 * p.se) / 0.005));
  CHECK_FALSE(r.upper_bound_only);
  const auto z = compare_with_asymptotic(ProbEstimate::from_hits(0, 1000, 0.01), a);
  CHECK(z.upper_bound_only);
}
