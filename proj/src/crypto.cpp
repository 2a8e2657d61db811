#include "revoca/crypto.hpp"

#include <sodium.h>

#include "revoca/errors.hpp"
#include "sodium_init.hpp"

namespace revoca {

LifeDay life_day(DayIndex issued, DayIndex day) {
  if (day < issued) throw Error(Errc::precondition, "day precedes credential issuance");
  return LifeDay{day.value - issued.value};
}

namespace crypto {
namespace {

std::uint64_t be64_prefix(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | p[i];
  return v;
}

}  // namespace

Sha256Digest sha256(ByteView data) {
  detail::ensure_sodium();
  Sha256Digest out;
  crypto_hash_sha256(out.data(), data.data(), data.size());
  return out;
}

Sha256Digest hmac_sha256(ByteView key, ByteView message) {
  detail::ensure_sodium();
  crypto_auth_hmacsha256_state st;
  crypto_auth_hmacsha256_init(&st, key.data(), key.size());
  crypto_auth_hmacsha256_update(&st, message.data(), message.size());
  Sha256Digest out;
  crypto_auth_hmacsha256_final(&st, out.data());
  return out;
}

Bytes hkdf_extract(ByteView salt, ByteView ikm) {
  static const std::array<std::uint8_t, 32> zero_salt{};
  auto prk = hmac_sha256(salt.empty() ? ByteView(zero_salt) : salt, ikm);
  return {prk.begin(), prk.end()};
}

Bytes hkdf_expand(ByteView prk, ByteView info, std::size_t length) {
  if (length > 255 * 32) throw Error(Errc::parameter, "hkdf output too long");
  Bytes okm;
  okm.reserve(length);
  Bytes block;
  for (std::uint8_t counter = 1; okm.size() < length; ++counter) {
    Bytes input = block;
    append(input, info);
    input.push_back(counter);
    auto t = hmac_sha256(prk, input);
    block.assign(t.begin(), t.end());
    std::size_t take = std::min<std::size_t>(32, length - okm.size());
    okm.insert(okm.end(), block.begin(), block.begin() + take);
  }
  return okm;
}

Bytes hkdf(ByteView salt, ByteView ikm, ByteView info, std::size_t length) {
  return hkdf_expand(hkdf_extract(salt, ikm), info, length);
}

DayToken derive_day_token(const Seed& seed, LifeDay k) {
  Bytes info = to_bytes(kDayTokenContext);
  append_be64(info, k.value);
  return DayToken::from(hkdf({}, seed.view(), info, DayToken::size));
}

CheckDigest compute_check_digest(const DayToken& token, const VcId& vc_id) {
  auto mac = hmac_sha256(token.view(), vc_id.view());
  return CheckDigest::from(mac);
}

BucketIndex check_bucket(const CheckDigest& digest, std::uint64_t c) {
  if (c == 0) throw Error(Errc::parameter, "check table size must be positive");
  return BucketIndex{be64_prefix(digest.bytes.data()) % c};
}

BucketIndex index_from_ciphertext(ByteView ct, std::uint64_t d) {
  if (d == 0) throw Error(Errc::parameter, "revocation table size must be positive");
  auto h = sha256(ct);
  // (hi * 2^64 + lo) mod d without 128-bit overflow
  unsigned __int128 value = (static_cast<unsigned __int128>(be64_prefix(h.data())) << 64) | be64_prefix(h.data() + 8);
  return BucketIndex{static_cast<std::uint64_t>(value % d)};
}

Bytes seal(const SymmetricKey& key, ByteView plaintext, ByteView associated_data, RandomSource& rng) {
  detail::ensure_sodium();
  Bytes out(crypto_aead_xchacha20poly1305_ietf_NPUBBYTES + plaintext.size() +
            crypto_aead_xchacha20poly1305_ietf_ABYTES);
  std::uint8_t* nonce = out.data();
  rng.fill({nonce, crypto_aead_xchacha20poly1305_ietf_NPUBBYTES});
  unsigned long long written = 0;
  crypto_aead_xchacha20poly1305_ietf_encrypt(out.data() + crypto_aead_xchacha20poly1305_ietf_NPUBBYTES, &written,
                                             plaintext.data(), plaintext.size(), associated_data.data(),
                                             associated_data.size(), nullptr, nonce, key.bytes.data());
  out.resize(crypto_aead_xchacha20poly1305_ietf_NPUBBYTES + written);
  return out;
}

std::optional<Bytes> open(ByteView sealed, const SymmetricKey& key, ByteView associated_data) {
  detail::ensure_sodium();
  if (sealed.size() < kSealOverhead) return std::nullopt;
  const std::uint8_t* nonce = sealed.data();
  ByteView body = sealed.subspan(crypto_aead_xchacha20poly1305_ietf_NPUBBYTES);
  Bytes out(body.size() - crypto_aead_xchacha20poly1305_ietf_ABYTES);
  unsigned long long written = 0;
  if (crypto_aead_xchacha20poly1305_ietf_decrypt(out.data(), &written, nullptr, body.data(), body.size(),
                                                 associated_data.data(), associated_data.size(), nonce,
                                                 key.bytes.data()) != 0) {
    return std::nullopt;
  }
  out.resize(written);
  return out;
}

SigningKeyPair generate_signing_key(RandomSource& rng) {
  detail::ensure_sodium();
  std::array<std::uint8_t, crypto_sign_SEEDBYTES> seed;
  rng.fill(seed);
  SigningKeyPair kp;
  crypto_sign_seed_keypair(kp.public_key.bytes.data(), kp.secret.bytes.data(), seed.data());
  sodium_memzero(seed.data(), seed.size());
  return kp;
}

Signature sign(const SigningKey& key, ByteView message) {
  detail::ensure_sodium();
  Signature sig;
  crypto_sign_detached(sig.bytes.data(), nullptr, message.data(), message.size(), key.bytes.data());
  return sig;
}

bool verify(const VerifyKey& key, ByteView message, const Signature& sig) {
  detail::ensure_sodium();
  return crypto_sign_verify_detached(sig.bytes.data(), message.data(), message.size(), key.bytes.data()) == 0;
}

}  // namespace crypto
}  // namespace revoca
