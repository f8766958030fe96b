#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vgauss/error.hpp"
#include "vgauss/process.hpp"

using namespace vgauss;

namespace {

VectorProcessSpec two_sigma_spec() {
  std::vector<double> nodes, values;
  for (int i = 0; i <= 32; ++i) {
    nodes.push_back(i / 32.0);
    values.push_back(1.0 / (1.0 + i / 32.0));
  }
  NonStationary c1;
  c1.sigma = Profile::constant(1.0);
  NonStationary c2;
  c2.sigma = Profile::table(nodes, values);
  c2.b_lower = 1.0;
  c2.b_upper = 1.0;
  return {{c1, c2}, 1.0};
}

}  // namespace

TEST_CASE("gaussian tail values") {
  CHECK(gaussian_tail(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(gaussian_tail(3.0) == doctest::Approx(1.349898031630095e-3).epsilon(1e-12));
  const double mills = normal_pdf(8.0) / 8.0;
  CHECK(std::abs(gaussian_tail(8.0) / mills - 1.0) < 0.02);
  CHECK_THROWS_AS(gaussian_tail(std::numeric_limits<double>::infinity()), DomainError);
  CHECK_THROWS_AS(gaussian_tail(std::nan("")), DomainError);
}

TEST_CASE("gaussian tail is decreasing and symmetric") {
  double prev = 1.0;
  for (double x = -10.0; x <= 10.0; x += 0.25) {
    const double p = gaussian_tail(x);
    CHECK(p <= prev);
    if (x >= -8.0) CHECK(p < prev);
    CHECK(p + gaussian_tail(-x) == doctest::Approx(1.0).epsilon(1e-15));
    prev = p;
  }
}

TEST_CASE("gaussian tail relative accuracy against a long-double reference") {
  for (double x = -5.0; x <= 37.0; x += 0.5) {
    const long double ref = 0.5L * std::erfc(static_cast<long double>(x) / std::sqrt(2.0L));
    CHECK(std::abs(static_cast<long double>(gaussian_tail(x)) / ref - 1.0L) < 1e-14L);
  }
  CHECK(log_gaussian_tail(50.0) == doctest::Approx(-1250.0 - std::log(50.0 * std::sqrt(2 * std::numbers::pi))).epsilon(1e-3));
}

TEST_CASE("validate_spec") {
  CHECK(validate_spec({{Stationary{1.0, 1.0}}, 1.0}).ok());
  const auto bad = validate_spec({{Stationary{1.0, 2.5}}, 1.0});
  CHECK_FALSE(bad.ok());
  CHECK(bad.summary().find("kappa") != std::string::npos);
  CHECK_FALSE(validate_spec({{Stationary{-1.0, 1.0}}, 1.0}).ok());
  CHECK_FALSE(validate_spec({{}, 1.0}).ok());
  CHECK_FALSE(validate_spec({{Stationary{}}, -1.0}).ok());

  NonStationary neg;
  neg.sigma = Profile::table({0.0, 1.0}, {1.0, -0.5});
  CHECK_FALSE(validate_spec({{neg}, 1.0}).ok());

  auto spec = two_sigma_spec();
  std::get<NonStationary>(spec.coords[1]).b_upper = 0.0;
  const auto rep = validate_spec(spec);
  CHECK(rep.ok());
  bool warned = false;
  for (const auto& w : rep.warnings) warned = warned || w.find("theta_upper = 0") != std::string::npos;
  CHECK(warned);
}

TEST_CASE("variance profile of the 1/(1+t) example") {
  const auto spec = two_sigma_spec();
  const auto rep = variance_profile(spec, 1.0 / 64);
  CHECK(rep.t0 == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(rep.g_min == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(rep.boundary == BoundaryTag::left);
  CHECK(rep.theta_upper == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(generalized_variance(spec, 0.5) == doctest::Approx(1.0 + 1.5 * 1.5).epsilon(1e-3));

  // g(t0+t) - g(t0) against 2 theta t^beta
  for (int k = 6; k <= 10; ++k) {
    const double t = std::ldexp(1.0, -k);
    const double slope = (generalized_variance(spec, t) - rep.g_min) / (2.0 * t);
    CHECK(std::abs(slope / rep.theta_upper - 1.0) < 0.05);
  }
}

TEST_CASE("variance profile ambiguity and scan step") {
  NonStationary flat;
  flat.sigma = Profile::constant(1.0);
  CHECK_THROWS_AS(variance_profile({{flat, flat}, 1.0}, 0.01), AmbiguityError);
  CHECK_THROWS_AS(variance_profile(two_sigma_spec(), 0.5), DomainError);
}

TEST_CASE("interior minimiser") {
  NonStationary c;
  c.sigma = Profile::table({0.0, 0.25, 0.5, 0.75, 1.0}, {0.8, 0.95, 1.0, 0.95, 0.8});
  c.b_lower = 1.0;
  c.b_upper = 1.0;
  c.beta = 2.0;
  const auto rep = variance_profile({{c}, 1.0}, 0.01);
  CHECK(rep.boundary == BoundaryTag::interior);
  CHECK(rep.t0 == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(rep.theta_lower == doctest::Approx(1.0));
  CHECK(rep.theta_upper == doctest::Approx(1.0));
}

TEST_CASE("correlation model") {
  const CoordinateSpec ou = Stationary{1.0, 1.0};
  CHECK(eval_correlation(ou, 0.0, 1.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(eval_correlation(ou, 0.3, 0.3, 1.0) == 1.0);
  CHECK(std::abs(eval_correlation(ou, 0.0, 0.01, 1.0) - 0.99) < 1e-4);
  CHECK_THROWS_AS(eval_correlation(ou, 0.0, 1.5, 1.0), DomainError);

  for (double kappa : {0.5, 1.0, 1.5, 2.0}) {
    const CoordinateSpec c = Stationary{2.0, kappa};
    CHECK(eval_correlation(c, 0.5, 0.5, 1.0) == 1.0);
    const double h = std::ldexp(1.0, -20);
    const double ratio = (1.0 - eval_correlation(c, 0.0, h, 1.0)) / (2.0 * std::pow(h, kappa));
    CHECK(ratio == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("locally stationary clock and expansion") {
  LocallyStationary ls;
  ls.kappa = 1.0;
  ls.a_profile = Profile::table({0.0, 1.0}, {1.0, 3.0});
  CHECK(local_clock(ls, 1.0) == doctest::Approx(2.0).epsilon(1e-6));
  const CoordinateSpec c = ls;
  const double t = 0.5, h = 1e-6;
  const double a_t = ls.a_profile(t);
  CHECK((1.0 - eval_correlation(c, t, t + h, 1.0)) / (a_t * h) == doctest::Approx(1.0).epsilon(1e-4));

  LocallyStationary constant;
  constant.kappa = 1.5;
  constant.a_profile = Profile::constant(2.0);
  const CoordinateSpec cc = constant;
  const CoordinateSpec st = Stationary{2.0, 1.5};
  CHECK(eval_correlation(cc, 0.1, 0.7, 1.0) == doctest::Approx(eval_correlation(st, 0.1, 0.7, 1.0)).epsilon(1e-12));
}

TEST_CASE("fbm covariance") {
  const CoordinateSpec b = FractionalBrownian{1.0};
  CHECK(eval_covariance(b, 0.3, 0.7, 1.0) == doctest::Approx(0.3));
  CHECK(coordinate_variance(b, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("profile interpolation") {
  const auto p = Profile::table({0.0, 1.0, 2.0, 3.0}, {1.0, 2.0, 2.0, 5.0});
  CHECK(p(1.0) == doctest::Approx(2.0));
  CHECK(p(1.5) == doctest::Approx(2.0));  // monotone cubic keeps the flat segment flat
  CHECK(Profile::constant(3.0)(10.0) == 3.0);
  CHECK_THROWS_AS(Profile::table({0.0, 0.0}, {1.0, 2.0}), DomainError);
}

TEST_CASE("threshold family") {
  ThresholdFamily f{{1.0, 2.0}, {0.0, -1.0}};
  const auto v = f.at(3.0);
  CHECK(v[0] == 3.0);
  CHECK(v[1] == 5.0);
  CHECK(ThresholdFamily::uniform(3).at(2.0) == std::vector<double>{2.0, 2.0, 2.0});
}
