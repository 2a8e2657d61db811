#include <gtest/gtest.h>

#include <set>

#include "oracle/oracle.hpp"
#include "revoca/ahibe.hpp"
#include "revoca/crypto.hpp"
#include "revoca/errors.hpp"

using namespace revoca;
using namespace revoca::ahibe;

namespace {

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::usage;
}

// Transparent-scheme key schedule recomputed with the oracle primitives.
oracle::Bytes transparent_kem_key(const Bytes& msk, std::string_view root, DayIndex day, const Bytes& r) {
  auto salt = [](std::string_view s) { return oracle::Bytes(s.begin(), s.end()); };
  auto holder = oracle::hkdf_sha256(salt("transparent-v1/holder"), {msk.begin(), msk.end()},
                                    {root.begin(), root.end()}, 32);
  oracle::Bytes be(8);
  for (int i = 0; i < 8; ++i) be[i] = static_cast<std::uint8_t>(day.value >> (56 - 8 * i));
  auto dk = oracle::hkdf_sha256(salt("transparent-v1/day"), holder, be, 32);
  auto msg = salt("transparent-v1/kem");
  msg.insert(msg.end(), r.begin(), r.end());
  auto k = oracle::hmac_sha256(dk, msg);
  return {k.begin(), k.end()};
}

// Delegation containment is a property of the type: there is no way to
// derive another key from a DayKey.
template <class K>
concept Delegatable = requires(const K& k, DayIndex d) { ahibe::delegate(k, d); };
static_assert(Delegatable<HolderKey>);
static_assert(!Delegatable<DayKey>);

}  // namespace

TEST(IdentityPath, TextAndValidation) {
  EXPECT_EQ(IdentityPath::holder("alice").text(), "alice");
  EXPECT_EQ(IdentityPath::for_day("alice", DayIndex{12}).text(), "alice/day:12");
  EXPECT_EQ(IdentityPath::for_day("a1", DayIndex{2}).to_value(), (canonical::Value{{"day", 2}, {"root", "a1"}}));
  EXPECT_NE(IdentityPath::for_day("a1", DayIndex{2}).to_value(), IdentityPath::for_day("a", DayIndex{12}).to_value());
  EXPECT_EQ(code_of([] { validate_root(""); }), Errc::identity);
  EXPECT_EQ(code_of([] { validate_root(std::string(257, 'x')); }), Errc::identity);
  EXPECT_EQ(code_of([] { validate_root("\xc3\x28"); }), Errc::identity);
  validate_root(std::string(256, 'x'));
  validate_root("Ωmega");
}

TEST(Transparent, SetupTagsAndFreshSecrets) {
  DeterministicRandom rng(1);
  auto [mpp, msk] = setup(SecurityLevel::test, rng);
  auto [mpp2, msk2] = setup(SecurityLevel::test, rng);
  EXPECT_EQ(mpp.scheme_id(), "transparent-v1");
  EXPECT_EQ(mpp.level_bound, 2);
  EXPECT_NE(msk.material, msk2.material);
}

TEST(Transparent, KemKeyMatchesOracleSchedule) {
  DeterministicRandom rng(2);
  auto [mpp, msk] = setup(SecurityLevel::test, rng);
  const Bytes master = msk.material.at("msk");
  for (int i = 0; i < 50; ++i) {
    const std::string root = "holder-" + std::to_string(i);
    const DayIndex day{1000u + i};
    auto enc = encap(mpp, IdentityPath::for_day(root, day), rng);
    EXPECT_EQ(to_hex(enc.key.view()), oracle::to_hex(transparent_kem_key(master, root, day, enc.header.material.at("r"))));
  }
}

TEST(Transparent, OtherRootKeyFailsPerOracle) {
  DeterministicRandom rng(3);
  auto [mpp, msk] = setup(SecurityLevel::test, rng);
  const DayIndex t{40};
  auto enc = encap(mpp, IdentityPath::for_day("bob", t), rng);
  auto alice_key = decap(delegate(extract(msk, "alice", rng), t, rng), enc.header);
  EXPECT_NE(alice_key, enc.key);
  EXPECT_EQ(to_hex(alice_key.view()), oracle::to_hex(transparent_kem_key(msk.material.at("msk"), "alice", t,
                                                                           enc.header.material.at("r"))));
}

class SchemeTest : public ::testing::TestWithParam<SecurityLevel> {
 protected:
  void SetUp() override {
    auto [p, s] = setup(GetParam(), rng_);
    mpp_ = p;
    msk_ = s;
  }
  bool standard() const { return GetParam() == SecurityLevel::standard; }

  DeterministicRandom rng_{77};
  MasterPublicParams mpp_;
  MasterSecret msk_;
};

TEST_P(SchemeTest, SchemeIdAndFreshSetup) {
  EXPECT_EQ(mpp_.scheme_id(), standard() ? "bw-ahibe-bls12-381" : "transparent-v1");
  auto [p2, s2] = setup(GetParam(), rng_);
  EXPECT_NE(s2.material, msk_.material);
}

TEST_P(SchemeTest, ExtractRejectsMalformedRoot) {
  EXPECT_EQ(code_of([&] { extract(msk_, "", rng_); }), Errc::identity);
}

TEST_P(SchemeTest, CorrectnessOverRandomIdentities) {
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    const std::string root = "r" + to_hex(rng_.bytes(4));
    const DayIndex day{rng_.fixed<FixedBytes<2, struct D>>().bytes[0] * 300ull + i};
    const auto id = IdentityPath::for_day(root, day);
    const auto hk = extract(msk_, root, rng_);
    const auto dk = delegate(hk, day, rng_);
    EXPECT_EQ(dk.identity, id);
    auto enc = encap(mpp_, id, rng_);
    ASSERT_EQ(decap(dk, enc.header), enc.key) << id.text();
    auto det = det_encap(mpp_, id, rng_.bytes(32));
    ASSERT_EQ(decap(dk, det.header), det.key) << id.text();
  }
}

TEST_P(SchemeTest, WrongDayKeyYieldsKeyThatFailsAead) {
  const auto hk = extract(msk_, "alice", rng_);
  const DayIndex t{500};
  auto enc = encap(mpp_, IdentityPath::for_day("alice", DayIndex{t.value + 1}), rng_);
  const auto wrong = decap(delegate(hk, t, rng_), enc.header);
  EXPECT_NE(wrong, enc.key);
  const auto sealed = crypto::seal(enc.key, as_bytes("payload"), {}, rng_);
  EXPECT_FALSE(crypto::open(sealed, wrong, {}));
  EXPECT_TRUE(crypto::open(sealed, enc.key, {}));
}

TEST_P(SchemeTest, DelegationsAreFunctionallyEquivalent) {
  const auto hk = extract(msk_, "carol", rng_);
  const auto hk2 = extract(msk_, "carol", rng_);
  const DayIndex t{9};
  const auto a = delegate(hk, t, rng_);
  const auto b = delegate(hk, t, rng_);
  const auto c = delegate(hk2, t, rng_);
  if (standard()) EXPECT_NE(a.material, b.material);  // re-randomised
  for (int i = 0; i < 5; ++i) {
    auto enc = encap(mpp_, IdentityPath::for_day("carol", t), rng_);
    EXPECT_EQ(decap(a, enc.header), enc.key);
    EXPECT_EQ(decap(b, enc.header), enc.key);
    EXPECT_EQ(decap(c, enc.header), enc.key);
  }
}

TEST_P(SchemeTest, EncapIsRandomisedAndLevelChecked) {
  const auto id = IdentityPath::for_day("dave", DayIndex{3});
  EXPECT_NE(encap(mpp_, id, rng_).header, encap(mpp_, id, rng_).header);
  EXPECT_EQ(code_of([&] { encap(mpp_, IdentityPath::holder("dave"), rng_); }), Errc::level);
  EXPECT_EQ(code_of([&] { det_encap(mpp_, IdentityPath::holder("dave"), as_bytes("b")); }), Errc::level);
  EXPECT_EQ(code_of([&] { det_encap(mpp_, id, {}); }), Errc::parameter);
}

TEST_P(SchemeTest, DetEncapIsDeterministicAndBindingSensitive) {
  const auto id = IdentityPath::for_day("erin", DayIndex{77});
  auto binding = rng_.bytes(32);
  const auto a = det_encap(mpp_, id, binding);
  const auto b = det_encap(mpp_, id, binding);
  EXPECT_EQ(a.header.serialize(), b.header.serialize());
  EXPECT_EQ(a.key, b.key);
  binding[31] ^= 1;
  EXPECT_NE(det_encap(mpp_, id, binding).header.serialize(), a.header.serialize());
  EXPECT_NE(det_encap(mpp_, IdentityPath::for_day("erin", DayIndex{78}), binding).header, a.header);
}

TEST_P(SchemeTest, DetEncapInjectiveOnBindings) {
  const int n = standard() ? 500 : 10000;
  const auto id = IdentityPath::for_day("frank", DayIndex{1});
  std::set<Bytes> headers;
  for (int i = 0; i < n; ++i) {
    Bytes binding;
    append_be32(binding, static_cast<std::uint32_t>(i));
    headers.insert(det_encap(mpp_, id, binding).header.serialize());
  }
  EXPECT_EQ(headers.size(), static_cast<std::size_t>(n));
}

TEST_P(SchemeTest, ProbeKey) {
  const DayIndex t{20};
  const auto id = IdentityPath::for_day("grace", t);
  const auto hk = extract(msk_, "grace", rng_);
  EXPECT_TRUE(probe_key(mpp_, id, delegate(hk, t, rng_), rng_));
  EXPECT_FALSE(probe_key(mpp_, id, delegate(hk, DayIndex{21}, rng_), rng_));
  EXPECT_FALSE(probe_key(mpp_, id, delegate(extract(msk_, "heidi", rng_), t, rng_), rng_));
}

TEST_P(SchemeTest, HeadersDoNotRevealIdentity) {
  const int n = standard() ? 300 : 1000;
  std::set<std::size_t> lengths;
  std::set<std::vector<std::string>> shapes;
  for (int i = 0; i < n; ++i) {
    const std::string root = "ident-" + std::to_string(i % 17);
    const auto id = IdentityPath::for_day(root, DayIndex{100u + i % 13});
    const auto bytes = encap(mpp_, id, rng_).header.serialize();
    const auto text = to_string(bytes);
    ASSERT_EQ(text.find(id.text()), std::string::npos);
    ASSERT_EQ(text.find(root), std::string::npos);
    lengths.insert(bytes.size());
    const auto v = canonical::decode(bytes);
    std::vector<std::string> shape;
    for (const auto& [k, f] : v[1].items()) shape.push_back(k + ":" + std::to_string(f.get<std::string>().size()));
    shapes.insert(shape);
  }
  EXPECT_EQ(lengths.size(), 1u);
  EXPECT_EQ(shapes.size(), 1u);
}

TEST_P(SchemeTest, SerializationRoundTrips) {
  const auto hk = extract(msk_, "ivan", rng_);
  const auto dk = delegate(hk, DayIndex{4}, rng_);
  const auto enc = encap(mpp_, dk.identity, rng_);
  EXPECT_EQ(params_from_value(to_value(mpp_)), mpp_);
  EXPECT_EQ(secret_from_value(to_value(msk_)).material, msk_.material);
  EXPECT_EQ(holder_key_from_value(to_value(hk)).material, hk.material);
  EXPECT_EQ(day_key_from_value(to_value(dk)), dk);
  EXPECT_EQ(EncapHeader::parse(enc.header.serialize()), enc.header);
  // scheme_id is the first element of every tagged form
  EXPECT_EQ(to_value(dk)[0], mpp_.scheme_id());
  EXPECT_EQ(to_value(enc.header)[0], mpp_.scheme_id());
}

TEST_P(SchemeTest, MalformedMaterialIsDecodeError) {
  const auto dk = delegate(extract(msk_, "judy", rng_), DayIndex{4}, rng_);
  auto enc = encap(mpp_, dk.identity, rng_);
  auto bad = enc.header;
  bad.material.fields.begin()->second.pop_back();
  EXPECT_EQ(code_of([&] { decap(dk, bad); }), Errc::decode);
  auto foreign = enc.header;
  foreign.material.scheme_id = standard() ? "transparent-v1" : "bw-ahibe-bls12-381";
  EXPECT_EQ(code_of([&] { decap(dk, foreign); }), Errc::decode);
  auto v = to_value(enc.header);
  v[0] = "no-such-scheme";
  EXPECT_EQ(code_of([&] { header_from_value(v); }), Errc::decode);
}

INSTANTIATE_TEST_SUITE_P(Schemes, SchemeTest, ::testing::Values(SecurityLevel::test, SecurityLevel::standard),
                         [](const auto& info) { return info.param == SecurityLevel::test ? "Transparent" : "BoyenWaters"; });

TEST(BoyenWaters, RejectsPointsOffTheCurveOrSubgroup) {
  DeterministicRandom rng(5);
  auto [mpp, msk] = setup(SecurityLevel::standard, rng);
  const auto dk = delegate(extract(msk, "kim", rng), DayIndex{1}, rng);
  auto enc = encap(mpp, dk.identity, rng);
  for (auto& [name, bytes] : enc.header.material.fields) {
    auto bad = enc.header;
    bad.material.fields[name][5] ^= 0x40;
    EXPECT_EQ(code_of([&] { decap(dk, bad); }), Errc::decode) << name;
  }
}
