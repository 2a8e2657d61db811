#include "revoca/random.hpp"

#include <sodium.h>

#include "sodium_init.hpp"

namespace revoca {

void SystemRandom::fill(std::span<std::uint8_t> out) {
  detail::ensure_sodium();
  randombytes_buf(out.data(), out.size());
}

RandomSource& system_random() {
  static SystemRandom instance;
  return instance;
}

DeterministicRandom::DeterministicRandom(std::uint64_t seed) {
  detail::ensure_sodium();
  Bytes material;
  append(material, as_bytes("revoca/deterministic-random/v1"));
  append_be64(material, seed);
  crypto_hash_sha256(key_.data(), material.data(), material.size());
}

DeterministicRandom::DeterministicRandom(std::span<const std::uint8_t, 32> key) {
  detail::ensure_sodium();
  std::copy(key.begin(), key.end(), key_.begin());
}

void DeterministicRandom::fill(std::span<std::uint8_t> out) {
  std::array<std::uint8_t, crypto_stream_chacha20_NONCEBYTES> nonce{};
  for (std::size_t i = 0; i < nonce.size(); ++i) nonce[i] = static_cast<std::uint8_t>(counter_ >> (8 * i));
  ++counter_;
  crypto_stream_chacha20(out.data(), out.size(), nonce.data(), key_.data());
}

}  // namespace revoca

namespace revoca::detail {

void ensure_sodium() {
  static const bool ok = sodium_init() >= 0;
  if (!ok) throw std::runtime_error("libsodium initialisation failed");
}

}  // namespace revoca::detail
