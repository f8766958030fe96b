#include <doctest.h>

#include <set>

#include "vgauss/parallel.hpp"
#include "vgauss/rng.hpp"

using namespace vgauss;

TEST_CASE("derive_stream is deterministic and tag sensitive") {
  CHECK(derive_stream(1, "a", 0) == derive_stream(1, "a", 0));
  CHECK_FALSE(derive_stream(1, "a", 0) == derive_stream(1, "b", 0));
  CHECK_FALSE(derive_stream(1, "a", 0) == derive_stream(2, "a", 0));
  CHECK_FALSE(derive_stream(1, "a", 0) == derive_stream(1, "a", 1));
}

TEST_CASE("substreams give distinct draws") {
  const auto s = derive_stream(9, "sub", 0);
  std::set<std::uint64_t> seen;
  for (std::uint64_t r = 0; r < 100; ++r) {
    Rng rng(s.substream(r));
    seen.insert(rng.bits());
  }
  CHECK(seen.size() == 100);
  Rng a(s.substream(3)), b(s.substream(3));
  for (int i = 0; i < 10; ++i) CHECK(a.normal() == b.normal());
}

TEST_CASE("stable hash and digest") {
  CHECK(stable_hash("abc") == stable_hash("abc"));
  CHECK(stable_hash("abc") != stable_hash("abd"));
  CHECK(digest_hex("x").size() == 32);
  CHECK(digest_hex("x", 32).size() == 64);
  CHECK_THROWS(digest_hex("x", 8));
}

TEST_CASE("running stats merge equals sequential") {
  RunningStats all, left, right;
  for (int i = 0; i < 100; ++i) {
    const double x = std::sin(i * 0.37);
    all.add(x);
    (i < 40 ? left : right).add(x);
  }
  left.merge(right);
  CHECK(left.count == all.count);
  CHECK(left.mean == doctest::Approx(all.mean).epsilon(1e-13));
  CHECK(left.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
}

TEST_CASE("replicate is independent of worker count") {
  const auto stream = derive_stream(5, "rep", 0);
  auto run = [&] {
    return replicate<RunningStats>(
        10000, [] { return 0; },
        [&](int&, std::size_t r, RunningStats& acc) {
          Rng rng(stream.substream(r));
          acc.add(rng.normal());
        });
  };
  set_worker_count(1);
  const auto a = run();
  set_worker_count(3);
  const auto b = run();
  set_worker_count(1);
  CHECK(a.mean == b.mean);
  CHECK(a.m2 == b.m2);
}

TEST_CASE("replicate propagates exceptions") {
  set_worker_count(2);
  CHECK_THROWS_AS(replicate<RunningStats>(
                      5000, [] { return 0; },
                      [](int&, std::size_t r, RunningStats&) {
                        if (r == 4100) throw std::runtime_error("boom");
                      }),
                  std::runtime_error);
  set_worker_count(1);
}
