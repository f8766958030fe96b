#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace vgauss {

/// Identifies one reproducible random sequence. Replication r of an
/// estimator draws from `substream(r)`, so results do not depend on how
/// replications are distributed over workers.
struct RngStream {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  RngStream substream(std::uint64_t offset) const noexcept {
    return {master_seed, stream_id + offset};
  }
  friend bool operator==(const RngStream&, const RngStream&) = default;
};

/// Keyed BLAKE2b of (tag, index) under the master seed. Tags are limited to
/// 32 bytes and must be nonempty.
RngStream derive_stream(std::uint64_t master_seed, std::string_view purpose_tag,
                        std::uint64_t index);

/// Unkeyed BLAKE2b of `data`, first 8 bytes little-endian. Stable across
/// platforms; used to index cached results by a textual key.
std::uint64_t stable_hash(std::string_view data);

/// Lower-case hex BLAKE2b digest of `data` (`bytes` in 16..64).
std::string digest_hex(std::string_view data, std::size_t bytes = 16);

/// Engine plus the distributions every sampler needs. Normals and
/// exponentials come from Boost's ziggurat implementations, whose output is
/// fixed across platforms for a given engine state.
class Rng {
 public:
  explicit Rng(const RngStream& stream);

  double normal() { return normal_(engine_); }
  double exponential() { return exponential_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::uint64_t bits() { return engine_(); }

  void fill_normal(std::span<double> out) {
    for (double& x : out) x = normal_(engine_);
  }

 private:
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;
  boost::random::exponential_distribution<double> exponential_;
  boost::random::uniform_01<double> uniform_;
};

}  // namespace vgauss
