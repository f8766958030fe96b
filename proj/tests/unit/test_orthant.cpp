#include <doctest.h>

#include <cmath>

#include "vgauss/error.hpp"
#include "vgauss/orthant.hpp"
#include "vgauss/rng.hpp"

using namespace vgauss;

namespace {

PointCloud random_cloud(std::size_t dim, std::size_t k, std::uint64_t tag) {
  Rng rng(derive_stream(11, "cloud", tag));
  PointCloud c(dim);
  std::vector<double> p(dim);
  for (std::size_t j = 0; j < k; ++j) {
    for (double& x : p) x = rng.normal();
    c.add(p);
  }
  return c;
}

}  // namespace

TEST_CASE("hand values") {
  CHECK(ewv_exact(PointCloud::from_rows({{0.7}, {-1.0}, {0.2}})) == doctest::Approx(std::exp(0.7)));
  CHECK(ewv_exact(PointCloud::from_rows({{0.0, 0.0}})) == doctest::Approx(1.0));
  CHECK(ewv_exact(PointCloud::from_rows({{0.0, 1.0}, {1.0, 0.0}})) == doctest::Approx(2.0 * std::exp(1.0) - 1.0));
  CHECK(ewv_exact(PointCloud::from_rows({{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}})) == doctest::Approx(std::exp(3.0)));
  // two points in 3-d: e^{0+0+1} + e^{1+0+0} - e^{0+0+0}
  CHECK(ewv_exact(PointCloud::from_rows({{0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}})) ==
        doctest::Approx(2.0 * std::exp(1.0) - 1.0));
}

TEST_CASE("empty cloud") { CHECK_THROWS_AS(ewv_exact(PointCloud(2)), DomainError); }

TEST_CASE("translation covariance and monotonicity") {
  auto c = random_cloud(3, 10, 77);
  PointCloud shifted(3);
  const double s[3] = {0.3, -1.1, 0.5};
  for (std::size_t j = 0; j < c.size(); ++j) {
    double p[3];
    for (int i = 0; i < 3; ++i) p[i] = c.point(j)[i] + s[i];
    shifted.add(p);
  }
  CHECK(ewv_exact(shifted) == doctest::Approx(std::exp(-0.3) * ewv_exact(c)).epsilon(1e-12));
  const double before = ewv_exact(c);
  const double extra[3] = {0.1, 0.1, 0.1};
  c.add(extra);
  CHECK(ewv_exact(c) >= before);
}

TEST_CASE("pruning keeps the Pareto set") {
  const auto p = pareto_prune(PointCloud::from_rows({{0.0, 1.0}, {1.0, 0.0}, {0.5, 0.5}, {-1.0, -1.0}, {0.0, 1.0}}));
  CHECK(p.size() == 3);
  const auto q = pareto_prune(PointCloud::from_rows({{1.0, 1.0}, {0.0, 1.0}, {1.0, 0.0}}));
  CHECK(q.size() == 1);
}

TEST_CASE("pruning does not change EWV") {
  for (std::size_t dim : {1u, 2u, 3u}) {
    const auto c = random_cloud(dim, 40, dim);
    CHECK(ewv_exact(pareto_prune(c)) == doctest::Approx(ewv_exact(c)).epsilon(1e-12));
  }
}

TEST_CASE("exact methods agree") {
  for (std::size_t dim : {2u, 3u, 4u}) {
    for (std::uint64_t t = 0; t < 5; ++t) {
      const auto c = random_cloud(dim, 12, 100 * dim + t);
      const double e = ewv_sliced(c);
      CHECK(ewv_auto(c) == doctest::Approx(e).epsilon(1e-10));
      if (pareto_prune(c).size() <= kInclusionExclusionCap) CHECK(ewv_exact(c) == doctest::Approx(e).epsilon(1e-10));
      CHECK(log_ewv_sliced(c) == doctest::Approx(std::log(e)).epsilon(1e-12));
    }
  }
}

TEST_CASE("inclusion-exclusion capacity") {
  PointCloud c(3);
  for (int j = 0; j < 30; ++j) {
    const double x = j / 30.0;
    const double p[3] = {x, 1.0 - x, std::sin(7.0 * x)};
    c.add(p);
  }
  if (pareto_prune(c).size() > kInclusionExclusionCap) {
    CHECK_THROWS_AS(ewv_exact(c), CapacityError);
  }
  CHECK(std::isfinite(ewv_auto(c)));
}

TEST_CASE("log EWV survives overflow") {
  const auto c = PointCloud::from_rows({{400.0, 400.0}, {410.0, 380.0}});
  CHECK(std::isfinite(log_ewv_sliced(c)));
  CHECK(log_ewv_sliced(c) == doctest::Approx(std::log(std::exp(20.0) + std::exp(10.0) - 1.0) + 780.0));
}

TEST_CASE("Monte Carlo agrees with exact on random clouds") {
  int outside = 0;
  for (std::uint64_t t = 0; t < 20; ++t) {
    const auto c = random_cloud(2 + t % 2, 8, 500 + t);
    const auto mc = ewv_mc(c, 20000, derive_stream(12, "mc", t));
    const double e = ewv_exact(c);
    if (std::abs(mc.estimate - e) > 3.0 * mc.se) ++outside;
  }
  CHECK(outside <= 1);
}
