#include <gtest/gtest.h>

#include <set>

#include "oracle/oracle.hpp"
#include "revoca/crypto.hpp"
#include "revoca/errors.hpp"
#include "revoca/random.hpp"

using namespace revoca;

namespace {

oracle::Bytes ob(ByteView b) { return {b.begin(), b.end()}; }
oracle::Bytes ob(std::string_view s) { return {s.begin(), s.end()}; }

}  // namespace

// The oracle itself is first pinned to published vectors.
TEST(Oracle, Sha256Abc) {
  EXPECT_EQ(oracle::to_hex(oracle::sha256(ob("abc"))),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(oracle::to_hex(oracle::sha256({})), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Oracle, Rfc4231Case1And2) {
  EXPECT_EQ(oracle::to_hex(oracle::hmac_sha256(oracle::Bytes(20, 0x0b), ob("Hi There"))),
            "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7");
  EXPECT_EQ(oracle::to_hex(oracle::hmac_sha256(ob("Jefe"), ob("what do ya want for nothing?"))),
            "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
}

TEST(Oracle, Rfc5869Case1And3) {
  EXPECT_EQ(oracle::to_hex(oracle::hkdf_sha256(oracle::from_hex("000102030405060708090a0b0c"), oracle::Bytes(22, 0x0b),
                                               oracle::from_hex("f0f1f2f3f4f5f6f7f8f9"), 42)),
            "3cb25f25faacd57a90434f64d0362f2a2d2d0a90cf1a5a4c5db02d56ecc4c5bf34007208d5b887185865");
  EXPECT_EQ(oracle::to_hex(oracle::hkdf_sha256({}, oracle::Bytes(22, 0x0b), {}, 42)),
            "8da4e775a563c18f715f802a063c5a31b8a11f5c5ee1879ec3454e5f3c738d2d9d201395faa4b61a96c8");
}

TEST(Primitives, HmacMatchesOracleOnRfc4231) {
  const Bytes key(20, 0x0b);
  EXPECT_EQ(to_hex(crypto::hmac_sha256(key, as_bytes("Hi There"))),
            oracle::to_hex(oracle::hmac_sha256(ob(key), ob("Hi There"))));
  // Key longer than a block is hashed first (RFC 4231 case 6).
  const Bytes long_key(131, 0xaa);
  const auto msg = as_bytes("Test Using Larger Than Block-Size Key - Hash Key First");
  EXPECT_EQ(to_hex(crypto::hmac_sha256(long_key, msg)), oracle::to_hex(oracle::hmac_sha256(ob(long_key), ob(msg))));
  EXPECT_EQ(to_hex(crypto::hmac_sha256(long_key, msg)),
            "60e431591ee0b67f0d8a26aacbf5b77f8e0bc6213728c5140546040f0ee37f54");
}

TEST(Primitives, HkdfMatchesOracleOnRfc5869) {
  const auto salt = from_hex("000102030405060708090a0b0c");
  const Bytes ikm(22, 0x0b);
  const auto info = from_hex("f0f1f2f3f4f5f6f7f8f9");
  EXPECT_EQ(to_hex(crypto::hkdf(salt, ikm, info, 42)), oracle::to_hex(oracle::hkdf_sha256(ob(salt), ob(ikm), ob(info), 42)));
  EXPECT_EQ(to_hex(crypto::hkdf({}, ikm, {}, 42)), oracle::to_hex(oracle::hkdf_sha256({}, ob(ikm), {}, 42)));
}

TEST(Primitives, RandomInputsAgreeWithOracle) {
  DeterministicRandom rng(7);
  for (int i = 0; i < 200; ++i) {
    auto msg = rng.bytes(i * 3);
    auto key = rng.bytes(1 + i % 100);
    auto info = rng.bytes(i % 40);
    ASSERT_EQ(to_hex(crypto::sha256(msg)), oracle::to_hex(oracle::sha256(ob(msg))));
    ASSERT_EQ(to_hex(crypto::hmac_sha256(key, msg)), oracle::to_hex(oracle::hmac_sha256(ob(key), ob(msg))));
    const std::size_t len = 1 + i % 100;
    ASSERT_EQ(to_hex(crypto::hkdf(key, msg, info, len)),
              oracle::to_hex(oracle::hkdf_sha256(ob(key), ob(msg), ob(info), len)));
  }
}

TEST(DayToken, ZeroSeedDayZeroMatchesOracle) {
  const Seed seed{};
  oracle::Bytes info = ob(std::string_view("revoca/day-token/v1"));
  for (int i = 0; i < 8; ++i) info.push_back(0);
  const auto expected = oracle::hkdf_sha256({}, oracle::Bytes(32, 0), info, 32);
  EXPECT_EQ(crypto::derive_day_token(seed, LifeDay{0}).hex(), oracle::to_hex(expected));
}

TEST(DayToken, OracleAgreementOverRandomSeeds) {
  DeterministicRandom rng(11);
  for (int i = 0; i < 100; ++i) {
    const auto seed = rng.fixed<Seed>();
    const std::uint64_t k = rng.fixed<FixedBytes<8, struct K>>().bytes[0] * 977ull + i;
    oracle::Bytes info = ob(std::string_view("revoca/day-token/v1"));
    for (int b = 7; b >= 0; --b) info.push_back(static_cast<std::uint8_t>(k >> (8 * b)));
    ASSERT_EQ(crypto::derive_day_token(seed, LifeDay{k}).hex(),
              oracle::to_hex(oracle::hkdf_sha256({}, ob(seed.view()), info, 32)));
  }
}

TEST(DayToken, DeterministicAndDayDistinct) {
  DeterministicRandom rng(1);
  const auto s = rng.fixed<Seed>();
  EXPECT_EQ(crypto::derive_day_token(s, LifeDay{5}), crypto::derive_day_token(s, LifeDay{5}));
  EXPECT_NE(crypto::derive_day_token(s, LifeDay{5}), crypto::derive_day_token(s, LifeDay{6}));
}

TEST(DayToken, IndependenceOverManyDays) {
  DeterministicRandom rng(2);
  const auto s = rng.fixed<Seed>();
  std::set<DayToken> seen;
  for (std::uint64_t k = 0; k < 10000; ++k) seen.insert(crypto::derive_day_token(s, LifeDay{k}));
  EXPECT_EQ(seen.size(), 10000u);
}

TEST(LifeDay, RejectsDaysBeforeIssuance) {
  EXPECT_EQ(life_day(DayIndex{10}, DayIndex{13}).value, 3u);
  EXPECT_THROW(life_day(DayIndex{10}, DayIndex{9}), Error);
}

TEST(CheckDigest, IsHmacOfVcIdUnderToken) {
  DeterministicRandom rng(3);
  const auto token = rng.fixed<DayToken>();
  const auto id = rng.fixed<VcId>();
  EXPECT_EQ(crypto::compute_check_digest(token, id).hex(),
            oracle::to_hex(oracle::hmac_sha256(ob(token.view()), ob(id.view()))));
  EXPECT_EQ(crypto::compute_check_digest(token, id), crypto::compute_check_digest(token, id));
  EXPECT_NE(crypto::compute_check_digest(token, id), crypto::compute_check_digest(token, rng.fixed<VcId>()));
}

TEST(CheckDigest, EveryTokenBitFlipChangesDigest) {
  DeterministicRandom rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto token = rng.fixed<DayToken>();
    const auto id = rng.fixed<VcId>();
    std::set<CheckDigest> digests{crypto::compute_check_digest(token, id)};
    for (int bit = 0; bit < 256; ++bit) {
      auto flipped = token;
      flipped.bytes[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      digests.insert(crypto::compute_check_digest(flipped, id));
    }
    ASSERT_EQ(digests.size(), 257u);
  }
}

TEST(CheckBucket, Examples) {
  CheckDigest zero{};
  EXPECT_EQ(crypto::check_bucket(zero, 1024).value, 0u);
  CheckDigest d{};
  d.bytes[6] = 0x04;
  d.bytes[7] = 0x01;
  EXPECT_EQ(crypto::check_bucket(d, 1024).value, 1u);
  DeterministicRandom rng(5);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(crypto::check_bucket(rng.fixed<CheckDigest>(), 1).value, 0u);
}

TEST(CheckBucket, UsesOnlyTheFirstEightBytesBigEndian) {
  DeterministicRandom rng(6);
  for (int i = 0; i < 200; ++i) {
    auto d = rng.fixed<CheckDigest>();
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v = (v << 8) | d.bytes[b];
    ASSERT_EQ(crypto::check_bucket(d, 1000003).value, v % 1000003);
    d.bytes[20] ^= 0xff;
    ASSERT_EQ(crypto::check_bucket(d, 1000003).value, v % 1000003);
  }
}

TEST(IndexFromCiphertext, DegenerateAndDeterministic) {
  DeterministicRandom rng(8);
  const auto ct = rng.bytes(97);
  EXPECT_EQ(crypto::index_from_ciphertext(ct, 1).value, 0u);
  EXPECT_EQ(crypto::index_from_ciphertext(ct, 4096), crypto::index_from_ciphertext(ct, 4096));
}

TEST(IndexFromCiphertext, MatchesOracleReduction) {
  DeterministicRandom rng(9);
  for (int i = 0; i < 200; ++i) {
    const auto ct = rng.bytes(1 + i);
    const auto h = oracle::sha256(ob(ct));
    // 128-bit big-endian value mod d, by long division over bytes.
    const std::uint64_t d = 1 + (i * 7919) % 100000;
    std::uint64_t r = 0;
    for (int b = 0; b < 16; ++b) r = static_cast<std::uint64_t>((static_cast<unsigned __int128>(r) * 256 + h[b]) % d);
    ASSERT_EQ(crypto::index_from_ciphertext(ct, d).value, r);
  }
}

TEST(IndexFromCiphertext, ChiSquaredUniformityAt0001) {
  DeterministicRandom rng(10);
  constexpr int kBuckets = 64, kSamples = 10000;
  std::vector<int> counts(kBuckets);
  for (int i = 0; i < kSamples; ++i) ++counts[crypto::index_from_ciphertext(rng.bytes(48), kBuckets).value];
  const double expected = double(kSamples) / kBuckets;
  double chi2 = 0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // chi2 quantile 0.999 with 63 degrees of freedom
  EXPECT_LT(chi2, 103.442);
}

TEST(Aead, RoundTripAndSubstitutions) {
  DeterministicRandom rng(12);
  for (int i = 0; i < 1000; ++i) {
    const auto key = rng.fixed<SymmetricKey>();
    const auto pt = rng.bytes(i % 300);
    const auto ad = rng.bytes(1 + i % 50);
    const auto sealed = crypto::seal(key, pt, ad, rng);
    ASSERT_EQ(sealed.size(), pt.size() + crypto::kSealOverhead);
    auto opened = crypto::open(sealed, key, ad);
    ASSERT_TRUE(opened && *opened == pt);

    auto other_key = key;
    other_key.bytes[i % 32] ^= 1;
    ASSERT_FALSE(crypto::open(sealed, other_key, ad));
    auto other_ad = ad;
    other_ad[i % ad.size()] ^= 0x80;
    ASSERT_FALSE(crypto::open(sealed, key, other_ad));
    auto other_ct = sealed;
    other_ct[24 + (pt.empty() ? 0 : i % pt.size())] ^= 4;
    ASSERT_FALSE(crypto::open(other_ct, key, ad));
  }
}

TEST(Aead, FreshNoncePerCallAndShortInput) {
  DeterministicRandom rng(13);
  const auto key = rng.fixed<SymmetricKey>();
  EXPECT_NE(crypto::seal(key, as_bytes("x"), {}, rng), crypto::seal(key, as_bytes("x"), {}, rng));
  EXPECT_FALSE(crypto::open(Bytes(10, 0), key, {}));
}

TEST(Signatures, Contract) {
  DeterministicRandom rng(14);
  const auto kp = crypto::generate_signing_key(rng);
  const auto other = crypto::generate_signing_key(rng);
  const auto m = to_bytes("message");
  const auto sig = crypto::sign(kp.secret, m);
  EXPECT_TRUE(crypto::verify(kp.public_key, m, sig));
  auto m2 = m;
  m2.push_back(0);
  EXPECT_FALSE(crypto::verify(kp.public_key, m2, sig));
  EXPECT_FALSE(crypto::verify(other.public_key, m, sig));
}

TEST(Signatures, MalformedEncodingsAreDecodeErrors) {
  try {
    (void)Signature::from(Bytes(63));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::decode);
  }
  EXPECT_THROW((void)VerifyKey::from(Bytes(33)), Error);
}

TEST(Encoding, HexAndBase64url) {
  EXPECT_EQ(to_hex(Bytes{0x00, 0xab, 0xff}), "00abff");
  EXPECT_EQ(from_hex("00abff"), (Bytes{0x00, 0xab, 0xff}));
  EXPECT_THROW(from_hex("0g"), Error);
  EXPECT_EQ(to_base64url(as_bytes("\xfb\xff")), "-_8");
  EXPECT_EQ(from_base64url("-_8"), to_bytes("\xfb\xff"));
  EXPECT_THROW(from_base64url("-_8="), Error);  // padded
  EXPECT_THROW(from_base64url("-_9"), Error);   // non-canonical trailing bits
  EXPECT_THROW(from_base64url("+/8"), Error);   // standard alphabet
}
