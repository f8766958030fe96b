#include <doctest.h>

#include <cmath>

#include "vgauss/asymptotics.hpp"
#include "vgauss/error.hpp"

using namespace vgauss;

TEST_CASE("closed-form provider") {
  const ClosedFormProvider p;
  CHECK(p.pickands({1.0}, 1.0).value == doctest::Approx(1.0));
  CHECK(p.pickands({2.0}, 2.0).value == doctest::Approx(2.0 / std::sqrt(M_PI)));
  CHECK(p.pickands({1.0, 0.0}, 1.0).value == doctest::Approx(1.0));
  CHECK(p.window({1.0}, 2.0, DriftSpec::zero(1, 2.0), 0.0, 3.0).value ==
        doctest::Approx(1.0 + 3.0 / std::sqrt(M_PI)));
  CHECK_THROWS_AS(p.pickands({1.0, 1.0}, 1.0), ProviderError);
  CHECK_THROWS_AS(p.pickands({1.0}, 1.5), ProviderError);
  CHECK_THROWS_AS(p.piterbarg({1.0}, 1.0, DriftSpec::one_sided({1.0}, 1.0), PiterbargVariant::right),
                  ProviderError);
}

TEST_CASE("table provider scales proportional C") {
  TableProvider t;
  ConstantEstimate h;
  h.value = 2.9;
  h.se = 0.01;
  t.add_pickands({1.0, 1.0}, 1.0, h);
  CHECK(t.pickands({1.0, 1.0}, 1.0).value == doctest::Approx(2.9));
  CHECK(t.pickands({2.0, 2.0}, 1.0).value == doctest::Approx(4.0 * 2.9));
  CHECK_THROWS_AS(t.pickands({1.0, 2.0}, 1.0), ProviderError);
  CHECK_THROWS_AS(t.pickands({1.0, 1.0}, 2.0), ProviderError);
}

TEST_CASE("estimating provider caches proportional requests") {
  ProviderBudget b;
  b.S_ladder = {0.5, 1.0, 2.0};
  b.replications = 1000;
  b.grid_step = 1.0 / 128;
  b.seed = 3;
  const EstimatingProvider p(b);
  const auto a = p.pickands({1.0, 1.0}, 2.0);
  const auto c = p.pickands({3.0, 3.0}, 2.0);
  CHECK(p.cache_size() == 1);
  CHECK(c.value == doctest::Approx(3.0 * a.value));
  CHECK(p.pickands({1.0}, 2.0).value == doctest::Approx(1.0 / std::sqrt(M_PI)));
}

TEST_CASE("locally stationary approximation with one stationary coordinate") {
  const VectorProcessSpec spec{{Stationary{2.0, 1.0}}, 3.0};
  const ClosedFormProvider p;
  const double u = 3.0;
  const auto a = approx_locally_stationary(spec, ThresholdFamily::uniform(1), u, p);
  CHECK(a.regime == Regime::locally_stationary);
  CHECK(a.leading_constant == doctest::Approx(3.0 * 2.0));
  CHECK(a.u_power == doctest::Approx(2.0));
  CHECK(a.value_at_u == doctest::Approx(6.0 * u * u * gaussian_tail(u)));
  CHECK(a.log_value_at_u == doctest::Approx(std::log(a.value_at_u)));
}

TEST_CASE("locally stationary approximation from a table") {
  const VectorProcessSpec spec{{Stationary{1.0, 1.0}, Stationary{1.0, 1.0}}, 1.0};
  TableProvider t;
  ConstantEstimate h;
  h.value = 2.943;
  t.add_pickands({1.0, 1.0}, 1.0, h);
  const auto a = approx_locally_stationary(spec, ThresholdFamily::uniform(2), 2.0, t);
  CHECK(a.value_at_u == doctest::Approx(2.943 * 4.0 * std::pow(gaussian_tail(2.0), 2)));
}

TEST_CASE("larger kappa coordinates drop out of H") {
  const VectorProcessSpec spec{{Stationary{1.0, 1.0}, Stationary{1.0, 2.0}}, 1.0};
  const ClosedFormProvider p;
  const auto a = approx_locally_stationary(spec, ThresholdFamily::uniform(2), 2.0, p);
  CHECK(a.leading_constant == doctest::Approx(1.0));
  CHECK(a.tail_args.size() == 2);
}

TEST_CASE("locally stationary profile integrates H") {
  LocallyStationary c;
  c.kappa = 1.0;
  c.a_profile = Profile::table({0.0, 1.0}, {1.0, 3.0});
  const VectorProcessSpec spec{{c}, 1.0};
  const auto a = approx_locally_stationary(spec, ThresholdFamily::uniform(1), 2.0, ClosedFormProvider{});
  // H_{sqrt(a) B_1} = a, int_0^1 (1 + 2t) dt = 2
  CHECK(a.leading_constant == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("theta factor") {
  VarianceProfileReport r;
  r.beta = 1.0;
  r.boundary = BoundaryTag::left;
  r.theta_upper = 2.0;
  CHECK(theta_factor(r) == doctest::Approx(0.5));
  r.boundary = BoundaryTag::interior;
  r.theta_lower = 4.0;
  r.beta = 2.0;
  CHECK(theta_factor(r) == doctest::Approx(0.5 + std::pow(2.0, -0.5)));
  r.boundary = BoundaryTag::right;
  r.theta_lower = 0.0;
  CHECK_THROWS_AS(theta_factor(r), HypothesisError);
}

TEST_CASE("case i assembly") {
  VarianceProfileReport r;
  r.beta = 2.0;
  r.boundary = BoundaryTag::interior;
  r.theta_lower = 1.0;
  r.theta_upper = 1.0;
  const auto a = ns_case_i(1.5, 0.0, r, 1.0, {1.0}, 3.0);
  CHECK(a.regime == Regime::ns_case_i);
  CHECK(a.u_power == doctest::Approx(1.0));
  CHECK(a.leading_constant == doctest::Approx(1.5 * 2.0 * std::tgamma(1.5)));
  CHECK_THROWS_AS(ns_case_i(1.5, 0.0, r, 2.0, {1.0}, 3.0), DomainError);
}

namespace {

NonStationary decaying(double alpha, double b) {
  NonStationary c;
  std::vector<double> nodes, values;
  for (int i = 0; i <= 32; ++i) {
    nodes.push_back(i / 32.0);
    values.push_back(1.0 / (1.0 + i / 32.0));
  }
  c.sigma = Profile::table(nodes, values);
  c.alpha = alpha;
  c.beta = 1.0;
  c.b_upper = b;
  return c;
}

}  // namespace

TEST_CASE("case iii is the product of tails") {
  const VectorProcessSpec spec{{decaying(1.5, 1.0)}, 1.0};
  const auto prof = variance_profile(spec, 1.0 / 64);
  const auto a = approx_nonstationary(spec, 3.0, prof, ClosedFormProvider{});
  CHECK(a.regime == Regime::ns_case_iii);
  CHECK(a.value_at_u == gaussian_tail(3.0));
}

TEST_CASE("case ii uses the right Piterbarg variant") {
  const VectorProcessSpec spec{{decaying(1.0, 1.0)}, 1.0};
  const auto prof = variance_profile(spec, 1.0 / 64);
  TableProvider t;
  ConstantEstimate h;
  h.value = 2.0;
  t.add_piterbarg({1.0}, 1.0, DriftSpec::one_sided({1.0}, 1.0), PiterbargVariant::right, h);
  const auto a = approx_nonstationary(spec, 3.0, prof, t);
  CHECK(a.regime == Regime::ns_case_ii);
  CHECK(a.value_at_u == doctest::Approx(2.0 * gaussian_tail(3.0)));
}

TEST_CASE("case ii hypothesis failure") {
  const VectorProcessSpec spec{{decaying(1.0, 1.0)}, 1.0};
  auto prof = variance_profile(spec, 1.0 / 64);
  prof.theta_upper = 0.0;
  CHECK_THROWS_AS(approx_nonstationary(spec, 3.0, prof, ClosedFormProvider{}), HypothesisError);
}

TEST_CASE("local window approximation") {
  const auto a = local_window_approx({1.0}, 2.0, DriftSpec::zero(1, 2.0), 0.0, 1.0, {3.0}, 3.0,
                                     ClosedFormProvider{});
  CHECK(a.value_at_u == doctest::Approx((1.0 + 1.0 / std::sqrt(M_PI)) * gaussian_tail(3.0)));
  CHECK_THROWS_AS(local_window_approx({1.0}, 2.0, DriftSpec::zero(1, 2.0), 0.0, 0.0, {3.0}, 3.0,
                                      ClosedFormProvider{}),
                  DomainError);
}

TEST_CASE("order statistics factor") {
  CHECK(order_stats_approx(3, 2, 0.01) == doctest::Approx(0.03));
  CHECK(order_stats_approx(4, 2, 1.0) == doctest::Approx(6.0));
  CHECK(order_stats_approx(3, 3, 0.5) == doctest::Approx(0.5));
  CHECK_THROWS_AS(order_stats_approx(3, 0, 0.5), DomainError);
  CHECK_THROWS_AS(order_stats_approx(3, 4, 0.5), DomainError);
}
