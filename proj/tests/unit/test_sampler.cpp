#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "../common.hpp"
#include "vgauss/error.hpp"
#include "vgauss/parallel.hpp"
#include "vgauss/sampler.hpp"

using namespace vgauss;

namespace {

struct Moments {
  double mean = 0.0, var = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  for (double x : v) m.var += (x - m.mean) * (x - m.mean);
  m.var /= static_cast<double>(v.size() - 1);
  return m;
}

double var_se(double var, std::size_t R) { return var * std::sqrt(2.0 / static_cast<double>(R - 1)); }

}  // namespace

TEST_CASE("grid covering") {
  const auto g = SampleGrid::covering(0.0, 1.0, 1.0 / 1024);
  CHECK(g.count == 1025);
  CHECK(g.end() == doctest::Approx(1.0));
}

TEST_CASE("fbm kappa=2 is linear") {
  const auto b = sample_fbm(2.0, SampleGrid{0.0, 0.125, 9}, 2000, derive_stream(1, "fbm2", 0));
  for (std::size_t r = 0; r < b.replications(); ++r) {
    const double xi = b.at(r, 0, 8);
    CHECK(b.at(r, 0, 0) == 0.0);
    for (std::size_t j = 1; j < 9; ++j) CHECK(b.at(r, 0, j) == doctest::Approx(xi * j / 8.0).epsilon(1e-9));
  }
  const auto m = moments(testing::node_values(b, 0, 8));
  CHECK(std::abs(m.var - 1.0) < 3.0 * var_se(1.0, 2000));
}

TEST_CASE("fbm kappa=1 increments are uncorrelated") {
  const std::size_t R = 20000;
  const auto b = sample_fbm(1.0, SampleGrid{0.0, 1.0 / 16, 17}, R, derive_stream(1, "fbm1", 0));
  double s = 0.0;
  for (std::size_t r = 0; r < R; ++r) {
    const double d1 = b.at(r, 0, 5) - b.at(r, 0, 4);
    const double d2 = b.at(r, 0, 6) - b.at(r, 0, 5);
    s += d1 * d2 * 16.0;
  }
  CHECK(std::abs(s / R) < 3.0 / std::sqrt(static_cast<double>(R)));
}

TEST_CASE("fbm variance and self-similarity") {
  const std::size_t R = 20000;
  const auto b = sample_fbm(1.5, SampleGrid{0.0, 1.0 / 32, 33}, R, derive_stream(1, "fbm15", 0));
  const auto v1 = moments(testing::node_values(b, 0, 32)).var;
  CHECK(std::abs(v1 - 1.0) < 3.0 * var_se(1.0, R));
  const auto vh = moments(testing::node_values(b, 0, 16)).var;
  // Var B(1) / 2^{kappa} against Var B(1/2)
  const double scaled = v1 / std::pow(2.0, 1.5);
  CHECK(std::abs(scaled - vh) < 3.0 * std::hypot(var_se(scaled, R), var_se(vh, R)));
}

TEST_CASE("single-node grid gives independent standard normals") {
  const VectorProcessSpec spec{{Stationary{1.0, 1.0}, Stationary{1.0, 1.5}}, 1.0};
  const std::size_t R = 20000;
  const auto b = sample_vector(spec, SampleGrid{0.0, 1.0, 1}, R, derive_stream(2, "node", 0));
  double cross = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    const auto m = moments(testing::node_values(b, i, 0));
    CHECK(std::abs(m.mean) < 3.0 / std::sqrt(static_cast<double>(R)));
    CHECK(std::abs(m.var - 1.0) < 3.0 * var_se(1.0, R));
  }
  for (std::size_t r = 0; r < R; ++r) cross += b.at(r, 0, 0) * b.at(r, 1, 0);
  CHECK(std::abs(cross / R) < 3.0 / std::sqrt(static_cast<double>(R)));
}

TEST_CASE("exponential correlation at one step") {
  const VectorProcessSpec spec{{Stationary{1.0, 1.0}}, 1.0};
  const std::size_t R = 20000;
  const double d = 1.0 / 64;
  const auto b = sample_vector(spec, SampleGrid{0.0, d, 65}, R, derive_stream(2, "ou", 0));
  double s = 0.0;
  for (std::size_t r = 0; r < R; ++r) s += b.at(r, 0, 0) * b.at(r, 0, 1);
  const double rho = std::exp(-d);
  const double se = std::sqrt((1.0 + rho * rho) / R);
  CHECK(std::abs(s / R - rho) < 3.0 * se);
}

TEST_CASE("non-stationary variance follows sigma") {
  std::vector<double> nodes, values;
  for (int i = 0; i <= 16; ++i) {
    nodes.push_back(i / 16.0);
    values.push_back(1.0 / (1.0 + i / 16.0));
  }
  NonStationary c;
  c.sigma = Profile::table(nodes, values);
  const VectorProcessSpec spec{{c}, 1.0};
  const std::size_t R = 20000;
  const auto b = sample_vector(spec, SampleGrid{0.0, 1.0 / 64, 65}, R, derive_stream(2, "ns", 0));
  for (std::size_t j : {0, 16, 32, 48, 64}) {
    const double t = j / 64.0;
    const double target = std::pow(c.sigma(t), 2);
    const auto m = moments(testing::node_values(b, 0, j));
    CHECK(std::abs(m.var - target) < 3.0 * var_se(target, R));
  }
}

TEST_CASE("empirical covariance within 5 se on 16 nodes") {
  const SampleGrid g{0.0, 1.0 / 16, 16};
  for (double kappa : {0.5, 1.0, 1.5, 2.0}) {
    CAPTURE(kappa);
    const CoordinateSpec c = Stationary{1.0, kappa};
    const auto b = sample_vector({{c}, 1.0}, g, 100000, derive_stream(3, "cov", static_cast<std::uint64_t>(kappa * 4)));
    CHECK(testing::covariance_z(b, 0, coordinate_covariance(c, g, 1.0)).worst_z < 5.0);
  }
  const auto f = sample_fbm(1.0, SampleGrid{0.0, 1.0 / 16, 16}, 100000, derive_stream(3, "covfbm", 0));
  CHECK(testing::covariance_z(f, 0, fbm_covariance(1.0, SampleGrid{0.0, 1.0 / 16, 16})).worst_z < 5.0);
}

TEST_CASE("cholesky oracle") {
  const auto id = sample_cholesky_oracle(Eigen::MatrixXd::Identity(2, 2), 20000, derive_stream(4, "id", 0));
  double cross = 0.0, v0 = 0.0;
  for (std::size_t r = 0; r < 20000; ++r) {
    cross += id.at(r, 0, 0) * id.at(r, 0, 1);
    v0 += id.at(r, 0, 0) * id.at(r, 0, 0);
  }
  CHECK(std::abs(cross / 20000) < 3.0 / std::sqrt(20000.0));
  CHECK(std::abs(v0 / 20000 - 1.0) < 3.0 * var_se(1.0, 20000));

  const auto ones = sample_cholesky_oracle(Eigen::MatrixXd::Ones(2, 2), 100, derive_stream(4, "ones", 0));
  for (std::size_t r = 0; r < 100; ++r) CHECK(ones.at(r, 0, 0) == doctest::Approx(ones.at(r, 0, 1)).epsilon(1e-12));

  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(sample_cholesky_oracle(bad, 10, derive_stream(4, "bad", 0)), FactorizationError);
}

TEST_CASE("circulant and oracle marginals agree") {
  const SampleGrid g{0.0, 1.0 / 64, 64};
  const CoordinateSpec c = Stationary{1.0, 1.5};
  const std::size_t R = 20000;
  const auto circ = sample_vector({{c}, 1.0}, g, R, derive_stream(5, "circ", 0));
  const auto oracle = sample_cholesky_oracle(coordinate_covariance(c, g, 1.0), R, derive_stream(5, "oracle", 0));
  const double crit = testing::ks_critical(R, R, 0.01 / 64);
  for (std::size_t j = 0; j < 64; ++j)
    CHECK(testing::ks_statistic(testing::node_values(circ, 0, j), testing::node_values(oracle, 0, j)) < crit);
}

TEST_CASE("determinism across worker counts") {
  const VectorProcessSpec spec{{Stationary{1.0, 1.5}, FractionalBrownian{0.7}}, 1.0};
  const SampleGrid g{0.0, 1.0 / 128, 129};
  set_worker_count(1);
  const auto a = sample_vector(spec, g, 5000, derive_stream(6, "det", 0));
  set_worker_count(4);
  const auto b = sample_vector(spec, g, 5000, derive_stream(6, "det", 0));
  set_worker_count(1);
  CHECK(a.values() == b.values());
}

TEST_CASE("path dump round trip") {
  const auto b = sample_fbm(1.0, SampleGrid{0.0, 0.25, 5}, 3, derive_stream(7, "dump", 0));
  const auto file = std::filesystem::temp_directory_path() / "vgauss_dump_test.bin";
  write_path_dump(file, b);
  const auto c = read_path_dump(file);
  CHECK(c.values() == b.values());
  CHECK(c.grid().step == 0.25);
  CHECK(c.replications() == 3);
  std::filesystem::remove(file);
}

TEST_CASE("embedding too negative is reported") {
  // triangle-wave autocovariance is not positive definite
  CHECK_THROWS_AS(CirculantSampler(16, [](std::size_t k) { return k == 0 ? 1.0 : (k == 1 ? 0.9 : 0.0); }, 1),
                  EmbeddingError);
}
