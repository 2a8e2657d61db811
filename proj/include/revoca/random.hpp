#pragma once

#include <cstdint>
#include <span>

#include "revoca/bytes.hpp"

namespace revoca {

// Source of cryptographic randomness. Every operation that needs fresh
// randomness takes one of these so that simulations can be replayed.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;

  Bytes bytes(std::size_t n) {
    Bytes b(n);
    fill(b);
    return b;
  }

  template <class Fixed>
  Fixed fixed() {
    Fixed f;
    fill(f.bytes);
    return f;
  }
};

// Operating-system CSPRNG (libsodium randombytes).
class SystemRandom final : public RandomSource {
 public:
  void fill(std::span<std::uint8_t> out) override;
};

RandomSource& system_random();

// ChaCha20 keystream under a 32-byte seed. Reproducible; for simulations and
// tests only.
class DeterministicRandom final : public RandomSource {
 public:
  explicit DeterministicRandom(std::uint64_t seed);
  explicit DeterministicRandom(std::span<const std::uint8_t, 32> key);

  void fill(std::span<std::uint8_t> out) override;

 private:
  std::array<std::uint8_t, 32> key_{};
  std::uint64_t counter_ = 0;
};

}  // namespace revoca
