#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "revoca/bytes.hpp"
#include "revoca/random.hpp"

namespace revoca {

struct SeedTag {};
struct DayTokenTag {};
struct VcIdTag {};
struct CheckDigestTag {};
struct SymKeyTag {};
struct VerifyKeyTag {};
struct SigningKeyTag {};
struct SignatureTag {};

// Per-credential secret shared by the Issuer and the legitimate Holder.
using Seed = FixedBytes<32, SeedTag>;
using DayToken = FixedBytes<32, DayTokenTag>;
using VcId = FixedBytes<16, VcIdTag>;
// MAC(day token, vc id), full width.
using CheckDigest = FixedBytes<32, CheckDigestTag>;
using SymmetricKey = FixedBytes<32, SymKeyTag>;
using Sha256Digest = std::array<std::uint8_t, 32>;

// Count of granularity units since the protocol epoch.
struct DayIndex {
  std::uint64_t value = 0;
  friend auto operator<=>(const DayIndex&, const DayIndex&) = default;
};

// Units elapsed since a credential was issued.
struct LifeDay {
  std::uint64_t value = 0;
  friend auto operator<=>(const LifeDay&, const LifeDay&) = default;
};

// Throws Error(precondition) when day precedes issued.
LifeDay life_day(DayIndex issued, DayIndex day);

struct BucketIndex {
  std::uint64_t value = 0;
  friend auto operator<=>(const BucketIndex&, const BucketIndex&) = default;
};

namespace crypto {

Sha256Digest sha256(ByteView data);
Sha256Digest hmac_sha256(ByteView key, ByteView message);
Bytes hkdf_extract(ByteView salt, ByteView ikm);
Bytes hkdf_expand(ByteView prk, ByteView info, std::size_t length);
Bytes hkdf(ByteView salt, ByteView ikm, ByteView info, std::size_t length);

inline constexpr std::string_view kDayTokenContext = "revoca/day-token/v1";

// HKDF-SHA-256 with an empty salt, info = context || be64(k).
DayToken derive_day_token(const Seed& seed, LifeDay k);
CheckDigest compute_check_digest(const DayToken& token, const VcId& vc_id);

// First 8 digest bytes, big endian, mod c. Throws Error(parameter) if c == 0.
BucketIndex check_bucket(const CheckDigest& digest, std::uint64_t c);
// First 16 bytes of SHA-256(ct), big endian, mod d. Throws Error(parameter) if d == 0.
BucketIndex index_from_ciphertext(ByteView ct, std::uint64_t d);

// XChaCha20-Poly1305; output is nonce || ciphertext || tag.
Bytes seal(const SymmetricKey& key, ByteView plaintext, ByteView associated_data,
           RandomSource& rng = system_random());
// std::nullopt is the authentication failure: wrong key, wrong associated data
// or a modified envelope.
std::optional<Bytes> open(ByteView sealed, const SymmetricKey& key, ByteView associated_data);

inline constexpr std::size_t kSealOverhead = 24 + 16;

}  // namespace crypto

// Ed25519.
using VerifyKey = FixedBytes<32, VerifyKeyTag>;
using SigningKey = FixedBytes<64, SigningKeyTag>;
using Signature = FixedBytes<64, SignatureTag>;

struct SigningKeyPair {
  SigningKey secret;
  VerifyKey public_key;
};

namespace crypto {

SigningKeyPair generate_signing_key(RandomSource& rng = system_random());
Signature sign(const SigningKey& key, ByteView message);
bool verify(const VerifyKey& key, ByteView message, const Signature& sig);

}  // namespace crypto
}  // namespace revoca
