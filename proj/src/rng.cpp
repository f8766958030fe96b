#include "vgauss/rng.hpp"

#include <array>
#include <cstring>

#include <sodium.h>

#include "vgauss/error.hpp"

namespace vgauss {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void store_le(std::uint64_t v, unsigned char* out) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<unsigned char>(v >> (8 * i));
}

}  // namespace

RngStream derive_stream(std::uint64_t master_seed, std::string_view purpose_tag,
                        std::uint64_t index) {
  if (purpose_tag.empty() || purpose_tag.size() > 32)
    throw DomainError("derive_stream: purpose tag must be 1..32 bytes");
  if (sodium_init() < 0) throw Error("derive_stream: libsodium initialisation failed");

  std::array<unsigned char, crypto_generichash_KEYBYTES> key{};
  store_le(master_seed, key.data());
  std::memcpy(key.data() + 8, "vgauss-stream-v1", 16);

  std::array<unsigned char, 32 + 1 + 8> msg{};
  std::memcpy(msg.data(), purpose_tag.data(), purpose_tag.size());
  std::size_t len = purpose_tag.size();
  msg[len++] = 0;  // separates tag from index
  store_le(index, msg.data() + len);
  len += 8;

  std::array<unsigned char, 16> digest{};
  crypto_generichash(digest.data(), digest.size(), msg.data(), len, key.data(), key.size());
  std::uint64_t id = 0;
  for (int i = 0; i < 8; ++i) id |= std::uint64_t{digest[i]} << (8 * i);
  return {master_seed, id};
}

std::uint64_t stable_hash(std::string_view data) {
  if (sodium_init() < 0) throw Error("stable_hash: libsodium initialisation failed");
  std::array<unsigned char, 16> digest{};
  crypto_generichash(digest.data(), digest.size(), reinterpret_cast<const unsigned char*>(data.data()), data.size(),
                     nullptr, 0);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t{digest[i]} << (8 * i);
  return v;
}

std::string digest_hex(std::string_view data, std::size_t bytes) {
  if (bytes < 16 || bytes > 64) throw DomainError("digest_hex: digest length must be 16..64 bytes");
  if (sodium_init() < 0) throw Error("digest_hex: libsodium initialisation failed");
  std::array<unsigned char, 64> digest{};
  crypto_generichash(digest.data(), bytes, reinterpret_cast<const unsigned char*>(data.data()), data.size(), nullptr,
                     0);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * bytes);
  for (std::size_t i = 0; i < bytes; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

Rng::Rng(const RngStream& stream)
    : engine_(splitmix64(stream.master_seed ^ splitmix64(stream.stream_id))) {}

}  // namespace vgauss
