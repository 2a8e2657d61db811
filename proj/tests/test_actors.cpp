#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "oracle/oracle.hpp"
#include "revoca/actors.hpp"
#include "support.hpp"

using namespace revoca;
using namespace revoca::actors;
using revoca::testing::code_of;

namespace {

// LifeDay token and check digest recomputed with the oracle primitives.
CheckDigest oracle_digest(const Seed& seed, const VcId& vc_id, std::uint64_t life_day) {
  oracle::Bytes info(crypto::kDayTokenContext.begin(), crypto::kDayTokenContext.end());
  for (int i = 7; i >= 0; --i) info.push_back(static_cast<std::uint8_t>(life_day >> (8 * i)));
  const auto token = oracle::hkdf_sha256({}, {seed.bytes.begin(), seed.bytes.end()}, info, 32);
  const auto mac = oracle::hmac_sha256(token, {vc_id.bytes.begin(), vc_id.bytes.end()});
  return CheckDigest::from(mac);
}

// Day-indexed store fed by the issuer's publish hook.
class MapSource : public TableSource {
 public:
  explicit MapSource(ahibe::MasterPublicParams mpp, tables::TableParams params)
      : mpp_(std::move(mpp)), params_(params) {}

  PublishHook hook() {
    return [this](const tables::CheckTableSnapshot& c, const tables::RevocationTableSnapshot& r) {
      days_[c.day.value] = {c, r};
      ++publications;
    };
  }
  const ahibe::MasterPublicParams& master_params() override { return mpp_; }
  const tables::TableParams& table_params() override { return params_; }
  std::optional<Fetched<tables::CheckSegment>> check_segment(DayIndex day, std::uint64_t j) override {
    auto it = days_.find(day.value);
    if (it == days_.end()) return std::nullopt;
    auto seg = tables::segment_of(it->second.first, j);
    const auto n = tables::encode(seg).size();
    return Fetched<tables::CheckSegment>{std::move(seg), n};
  }
  std::optional<Fetched<tables::RevocationTableSnapshot>> revocation_table(DayIndex day) override {
    auto it = days_.find(day.value);
    if (it == days_.end()) return std::nullopt;
    return Fetched<tables::RevocationTableSnapshot>{it->second.second, tables::encode(it->second.second).size()};
  }
  const auto& day(std::uint64_t d) const { return days_.at(d); }
  void drop(std::uint64_t d) { days_.erase(d); }
  int publications = 0;

 private:
  ahibe::MasterPublicParams mpp_;
  tables::TableParams params_;
  std::map<std::uint64_t, std::pair<tables::CheckTableSnapshot, tables::RevocationTableSnapshot>> days_;
};

tables::RevocationDocument doc_for(const VcId& id, std::string reason = "compromised") {
  return {id, tables::RevocationStatus::revoked, std::move(reason), canonical::Value::object(), DayIndex{0}, 0};
}

struct World {
  explicit World(std::uint64_t seed, tables::TableParams params = {64, 64, 4, 1}, DayIndex start = DayIndex{100})
      : rng(seed),
        keys(actors::pkg_setup(ahibe::SecurityLevel::test, rng)),
        issuer(Issuer::init("issuer-A", keys.first, params, start, rng)),
        source(keys.first, params) {
    issuer.set_publish_hook(source.hook());
    trust.add("issuer-A", issuer.public_key());
  }

  struct Held {
    VerifiableCredential credential;
    Seed seed;
  };

  Held issue(const std::string& root, DayIndex expiry) {
    const auto pop = crypto::generate_signing_key(rng);
    auto out = issuer.issue(root, canonical::Value{{"name", root}}, expiry, pop.public_key);
    if (!holder_keys.contains(root)) holder_keys.emplace(root, actors::pkg_extract(keys.second, root, rng));
    wallet.store(out.credential, out.seed, holder_keys.at(root), pop.secret, issuer.public_key());
    return {out.credential, out.seed};
  }

  Presentation present(const VcId& id, std::vector<DayIndex> days, const Nonce& nonce = {}) {
    return wallet.present(id, days, nonce, rng);
  }

  StatusResult check(const Presentation& p, std::optional<DayIndex> today = std::nullopt) {
    return verifier_check(p, trust, source, today.value_or(issuer.current_day()), {}, rng);
  }

  Errc check_error(const Presentation& p) {
    return code_of([&] { check(p); });
  }

  DeterministicRandom rng;
  std::pair<ahibe::MasterPublicParams, ahibe::MasterSecret> keys;
  Issuer issuer;
  MapSource source;
  TrustStore trust;
  Wallet wallet;
  std::map<std::string, ahibe::HolderKey> holder_keys;
};

}  // namespace

TEST(Pkg, ExtractExamples) {
  DeterministicRandom rng(1);
  auto [mpp, msk] = pkg_setup(ahibe::SecurityLevel::test, rng);
  const auto a = pkg_extract(msk, "h-001", rng);
  const auto b = pkg_extract(msk, "h-001", rng);
  for (std::uint64_t t : {0, 1, 999}) {
    const auto id = ahibe::IdentityPath::for_day("h-001", DayIndex{t});
    auto enc = ahibe::encap(mpp, id, rng);
    EXPECT_EQ(ahibe::decap(ahibe::delegate(a, DayIndex{t}, rng), enc.header), enc.key);
    EXPECT_EQ(ahibe::decap(ahibe::delegate(b, DayIndex{t}, rng), enc.header), enc.key);
  }
  EXPECT_EQ(code_of([&] { pkg_extract(msk, "", rng); }), Errc::identity);
}

TEST(IssuerInit, Examples) {
  DeterministicRandom rng(2);
  auto [mpp, msk] = pkg_setup(ahibe::SecurityLevel::test, rng);
  const auto a = Issuer::init("a", mpp, tables::TableParams{}, DayIndex{5}, rng);
  const auto [check, rev] = a.export_day();
  EXPECT_EQ(rev.buckets.size(), 1024u);
  EXPECT_EQ(rev.entry_count(), 0u);
  EXPECT_EQ(check.buckets.size(), 1024u);
  EXPECT_EQ(check.day, DayIndex{5});
  const auto b = Issuer::init("a", mpp, tables::TableParams{}, DayIndex{5}, rng);
  EXPECT_NE(a.public_key(), b.public_key());
  EXPECT_EQ(code_of([&] { Issuer::init("a", mpp, tables::TableParams{1024, 1024, 3, 1}, DayIndex{5}, rng); }),
            Errc::parameter);
}

TEST(IssuerIssue, SignatureFreshnessAndCheckTableEntry) {
  World w(3);
  const auto x = w.issue("alice", DayIndex{120});
  const auto y = w.issue("alice", DayIndex{120});
  EXPECT_TRUE(crypto::verify(w.issuer.public_key(), x.credential.signed_bytes(), x.credential.issuer_signature));
  EXPECT_NE(x.credential.vc_id, y.credential.vc_id);
  EXPECT_NE(x.seed, y.seed);
  EXPECT_EQ(x.credential.issued_day, DayIndex{100});
  // end-to-end: the oracle's digest for LifeDay 0 is in the published table
  const auto& check = w.source.day(100).first;
  const auto digest = oracle_digest(x.seed, x.credential.vc_id, 0);
  const auto& bucket = check.buckets[crypto::check_bucket(digest, 64).value];
  EXPECT_TRUE(std::binary_search(bucket.begin(), bucket.end(), digest));
  EXPECT_EQ(check.digest_count(), 2u);
  EXPECT_EQ(code_of([&] { w.issue("alice", DayIndex{99}); }), Errc::parameter);
  EXPECT_EQ(code_of([&] { w.issue("", DayIndex{120}); }), Errc::identity);
}

TEST(IssuerRevoke, SameDayCheckFindsDocument) {
  World w(4);
  const auto x = w.issue("alice", DayIndex{120});
  const auto index = w.issuer.revoke(x.credential.vc_id, doc_for(x.credential.vc_id), DayIndex{100});
  // independent verifier-side recomputation of x'
  const auto digest = oracle_digest(x.seed, x.credential.vc_id, 0);
  EXPECT_EQ(tables::revocation_index(w.keys.first, "alice", DayIndex{100}, digest, 64), index);
  EXPECT_EQ(w.source.day(100).second.buckets[index.value].size(), 1u);

  const auto r = w.check(w.present(x.credential.vc_id, {DayIndex{100}}));
  ASSERT_EQ(r.days.size(), 1u);
  EXPECT_EQ(r.days[0].verdict, Verdict::revoked);
  ASSERT_EQ(r.days[0].documents.size(), 1u);
  EXPECT_EQ(r.days[0].documents[0].reason, "compromised");
  EXPECT_EQ(r.days[0].documents[0].sequence, 1u);
  EXPECT_TRUE(r.any_revoked());
}

TEST(IssuerRevoke, Errors) {
  World w(5);
  const auto x = w.issue("alice", DayIndex{120});
  const auto id = x.credential.vc_id;
  VcId unknown{};
  EXPECT_EQ(code_of([&] { w.issuer.revoke(unknown, doc_for(unknown), DayIndex{100}); }), Errc::unknown_credential);
  EXPECT_EQ(code_of([&] { w.issuer.revoke(id, doc_for(id), DayIndex{101}); }), Errc::parameter);
  EXPECT_EQ(code_of([&] { w.issuer.revoke(id, doc_for(unknown), DayIndex{100}); }), Errc::parameter);
  auto d = doc_for(id);
  d.sequence = 5;
  w.issuer.revoke(id, d, DayIndex{100});
  EXPECT_EQ(code_of([&] { w.issuer.revoke(id, d, DayIndex{100}); }), Errc::parameter);
  EXPECT_EQ(w.issuer.state().registry.at(id).documents.size(), 1u);
}

TEST(IssuerRevoke, MultipleDocumentsAreSequenceOrdered) {
  World w(6);
  const auto x = w.issue("alice", DayIndex{120});
  const auto id = x.credential.vc_id;
  auto suspended = doc_for(id, "investigation");
  suspended.status = tables::RevocationStatus::suspended;
  w.issuer.revoke(id, suspended, DayIndex{100});
  w.issuer.revoke(id, doc_for(id, "confirmed"), DayIndex{100});
  const auto r = w.check(w.present(id, {DayIndex{100}}));
  ASSERT_EQ(r.days[0].documents.size(), 2u);
  EXPECT_EQ(r.days[0].documents[0].reason, "investigation");
  EXPECT_EQ(r.days[0].documents[1].reason, "confirmed");
  EXPECT_EQ(r.days[0].documents[1].sequence, 2u);
}

TEST(IssuerRollover, NextDayFindsRevocationOldKeyDoesNot) {
  World w(7);
  const auto x = w.issue("alice", DayIndex{120});
  const auto id = x.credential.vc_id;
  w.issuer.revoke(id, doc_for(id), DayIndex{100});
  const auto old_key = w.wallet.present(id, {DayIndex{100}}, {}, w.rng).authorizations[0].day_key;
  w.issuer.rollover(DayIndex{101});
  const auto r = w.check(w.present(id, {DayIndex{101}}));
  EXPECT_EQ(r.days[0].verdict, Verdict::revoked);
  const auto& table = w.source.day(101).second;
  ASSERT_EQ(table.entry_count(), 1u);
  const auto digest = oracle_digest(x.seed, id, 1);
  const auto index = tables::revocation_index(w.keys.first, "alice", DayIndex{101}, digest, 64);
  EXPECT_TRUE(tables::scan_bucket(table, index, old_key, "alice", DayIndex{101}, id).empty());
  EXPECT_TRUE(tables::scan_bucket(table, index, old_key, "alice", DayIndex{100}, id).empty());
  // the archived day still answers for day 100
  EXPECT_EQ(w.check(w.present(id, {DayIndex{100}})).days[0].verdict, Verdict::revoked);
}

TEST(IssuerRollover, EmptyRegistryGapAndExpiry) {
  World w(8);
  const int before = w.source.publications;
  w.issuer.rollover(DayIndex{103});
  EXPECT_EQ(w.source.publications, before + 3);
  EXPECT_EQ(w.source.day(102).first.digest_count(), 0u);
  EXPECT_EQ(w.source.day(103).second.entry_count(), 0u);
  EXPECT_EQ(code_of([&] { w.issuer.rollover(DayIndex{103}); }), Errc::parameter);
  EXPECT_EQ(code_of([&] { w.issuer.rollover(DayIndex{90}); }), Errc::parameter);

  const auto x = w.issue("alice", DayIndex{104});
  w.issuer.revoke(x.credential.vc_id, doc_for(x.credential.vc_id), DayIndex{103});
  w.issuer.rollover(DayIndex{105});
  EXPECT_EQ(w.source.day(104).first.digest_count(), 1u);
  EXPECT_EQ(w.source.day(104).second.entry_count(), 1u);
  EXPECT_EQ(w.source.day(105).first.digest_count(), 0u);
  EXPECT_EQ(w.source.day(105).second.entry_count(), 0u);
}

TEST(IssuerExport, DeterministicWithoutChanges) {
  World w(9);
  const auto x = w.issue("alice", DayIndex{120});
  w.issuer.revoke(x.credential.vc_id, doc_for(x.credential.vc_id), DayIndex{100});
  const auto [c1, r1] = w.issuer.export_day();
  const auto [c2, r2] = w.issuer.export_day();
  EXPECT_EQ(tables::encode(c1), tables::encode(c2));
  EXPECT_EQ(tables::encode(r1), tables::encode(r2));
}

TEST(IssuerRestore, ReusesConsistentTablesAndRebuildsStaleOnes) {
  World w(10);
  const auto x = w.issue("alice", DayIndex{120});
  w.issue("bob", DayIndex{120});
  w.issuer.revoke(x.credential.vc_id, doc_for(x.credential.vc_id), DayIndex{100});
  const auto [check, rev] = w.issuer.export_day();
  const auto state = IssuerState::from_value(canonical::decode(canonical::encode(w.issuer.state().to_value())));
  EXPECT_EQ(canonical::encode(state.to_value()), canonical::encode(w.issuer.state().to_value()));

  auto same = Issuer::restore(state, check, rev, w.rng);
  EXPECT_EQ(tables::encode(same.export_day().second), tables::encode(rev));

  // stale: revocation table from before the revoke
  auto empty = tables::RevocationTableSnapshot::empty(rev.params, rev.day);
  auto rebuilt = Issuer::restore(state, check, empty, w.rng);
  EXPECT_EQ(rebuilt.export_day().second.entry_count(), 1u);
  EXPECT_EQ(rebuilt.export_day().first, check);

  // nothing archived
  auto fresh = Issuer::restore(state, std::nullopt, std::nullopt, w.rng);
  EXPECT_EQ(fresh.export_day().first, check);
  EXPECT_EQ(fresh.export_day().second.entry_count(), 1u);

  // wrong day
  auto other = check;
  other.day = DayIndex{99};
  EXPECT_EQ(Issuer::restore(state, other, rev, w.rng).export_day().first.day, DayIndex{100});
}

TEST(HolderStore, RejectsBadCredentials) {
  World w(11);
  const auto pop = crypto::generate_signing_key(w.rng);
  auto out = w.issuer.issue("alice", canonical::Value::object(), DayIndex{120}, pop.public_key);
  const auto hk = pkg_extract(w.keys.second, "alice", w.rng);
  Wallet wallet;
  auto broken = out.credential;
  broken.claims["extra"] = 1;
  EXPECT_EQ(code_of([&] { wallet.store(broken, out.seed, hk, pop.secret, w.issuer.public_key()); }), Errc::rejection);
  const auto other_hk = pkg_extract(w.keys.second, "mallory", w.rng);
  EXPECT_EQ(code_of([&] { wallet.store(out.credential, out.seed, other_hk, pop.secret, w.issuer.public_key()); }),
            Errc::rejection);
  const auto other_pop = crypto::generate_signing_key(w.rng);
  EXPECT_EQ(code_of([&] { wallet.store(out.credential, out.seed, hk, other_pop.secret, w.issuer.public_key()); }),
            Errc::rejection);
  EXPECT_TRUE(wallet.credentials().empty());
  wallet.store(out.credential, out.seed, hk, pop.secret, w.issuer.public_key());
  EXPECT_EQ(wallet.credentials().size(), 1u);
  const auto p = wallet.present(out.credential.vc_id, {DayIndex{100}}, {}, w.rng);
  EXPECT_EQ(w.check(p).days[0].verdict, Verdict::no_revocation_found);
}

TEST(HolderPresent, Examples) {
  World w(12);
  w.issuer.rollover(DayIndex{103});
  const auto x = w.issue("alice", DayIndex{130});
  w.issuer.rollover(DayIndex{106});
  const auto id = x.credential.vc_id;
  EXPECT_EQ(w.present(id, {DayIndex{106}}).authorizations.size(), 1u);
  const auto p = w.present(id, {DayIndex{103}, DayIndex{106}, DayIndex{108}});
  ASSERT_EQ(p.authorizations.size(), 3u);
  for (const auto& a : p.authorizations) {
    EXPECT_EQ(a.day_key.identity, ahibe::IdentityPath::for_day("alice", a.day));
    const auto k = a.day.value - 103;
    EXPECT_EQ(crypto::compute_check_digest(a.day_token, id), oracle_digest(x.seed, id, k));
  }
  EXPECT_EQ(code_of([&] { w.present(id, {DayIndex{102}}); }), Errc::precondition);
  EXPECT_EQ(code_of([&] { w.present(id, {DayIndex{131}}); }), Errc::precondition);
  EXPECT_EQ(code_of([&] { w.present(id, {}); }), Errc::precondition);
  EXPECT_EQ(code_of([&] { w.present(VcId{}, {DayIndex{106}}); }), Errc::unknown_credential);
  EXPECT_EQ(Presentation::from_value(p.to_value()), p);
  EXPECT_EQ(VerifiableCredential::from_value(x.credential.to_value()), x.credential);
}

TEST(HolderAudit, Examples) {
  World w(13);
  const auto x = w.issue("alice", DayIndex{120});
  const auto y = w.issue("alice", DayIndex{120});
  w.issuer.revoke(x.credential.vc_id, doc_for(x.credential.vc_id), DayIndex{100});
  const auto& table = w.source.day(100).second;
  const auto mpp = w.keys.first;
  EXPECT_EQ(w.wallet.audit(x.credential.vc_id, DayIndex{100}, table, mpp, w.rng).size(), 1u);
  EXPECT_TRUE(w.wallet.audit(y.credential.vc_id, DayIndex{100}, table, mpp, w.rng).empty());
  EXPECT_EQ(code_of([&] { w.wallet.audit(x.credential.vc_id, DayIndex{101}, table, mpp, w.rng); }),
            Errc::precondition);
  const auto restored = Wallet::from_value(canonical::decode(canonical::encode(w.wallet.to_value())));
  EXPECT_EQ(restored.credentials(), w.wallet.credentials());
  EXPECT_EQ(restored.audit(x.credential.vc_id, DayIndex{100}, table, mpp, w.rng).size(), 1u);
}

TEST(VerifierCheck, Examples) {
  World w(14);
  const auto x = w.issue("alice", DayIndex{120});
  const auto y = w.issue("bob", DayIndex{120});
  const auto id = x.credential.vc_id;
  Nonce nonce;
  nonce.bytes[0] = 7;

  auto r = w.check(w.present(id, {DayIndex{100}}));
  EXPECT_EQ(r.days[0].verdict, Verdict::no_revocation_found);
  EXPECT_GT(r.segment_bytes, 0u);
  EXPECT_GT(r.table_bytes, r.segment_bytes);

  auto random_token = w.present(id, {DayIndex{100}});
  random_token.authorizations[0].day_token = w.rng.fixed<DayToken>();
  EXPECT_EQ(w.check_error(random_token), Errc::check_digest_not_found);

  w.issuer.rollover(DayIndex{101});
  auto other_day_key = w.present(id, {DayIndex{101}});
  other_day_key.authorizations[0].day_key = w.present(id, {DayIndex{100}}).authorizations[0].day_key;
  EXPECT_EQ(w.check_error(other_day_key), Errc::key_probe_failed);
  auto relabelled = w.present(id, {DayIndex{101}});
  relabelled.authorizations[0].day_key = w.present(y.credential.vc_id, {DayIndex{101}}).authorizations[0].day_key;
  relabelled.authorizations[0].day_key.identity = ahibe::IdentityPath::for_day("alice", DayIndex{101});
  EXPECT_EQ(w.check_error(relabelled), Errc::key_probe_failed);

  auto tampered = w.present(id, {DayIndex{101}});
  tampered.credential.expiry_day = DayIndex{999};
  EXPECT_EQ(w.check_error(tampered), Errc::bad_signature);
  TrustStore nobody;
  EXPECT_EQ(code_of([&] { verifier_check(w.present(id, {DayIndex{101}}), nobody, w.source, DayIndex{101}, {}, w.rng); }),
            Errc::bad_signature);

  auto p = w.present(id, {DayIndex{101}}, nonce);
  EXPECT_EQ(code_of([&] { verifier_check(p, w.trust, w.source, DayIndex{101}, {Nonce{}}, w.rng); }),
            Errc::bad_proof_of_possession);
  EXPECT_NO_THROW(verifier_check(p, w.trust, w.source, DayIndex{101}, {nonce}, w.rng));
  auto replay = p;
  replay.nonce.bytes[0] ^= 1;
  EXPECT_EQ(w.check_error(replay), Errc::bad_proof_of_possession);

  auto empty = p;
  empty.authorizations.clear();
  EXPECT_EQ(w.check_error(empty), Errc::rejection);

  const auto deferred = w.check(w.present(id, {DayIndex{101}, DayIndex{103}}));
  ASSERT_EQ(deferred.days.size(), 2u);
  EXPECT_EQ(deferred.days[1].verdict, Verdict::deferred);
  EXPECT_EQ(verdict_name(Verdict::deferred), "DeferredFutureDay");

  w.source.drop(100);
  EXPECT_EQ(w.check_error(w.present(id, {DayIndex{100}})), Errc::snapshot_unavailable);
}

TEST(VerifierCheck, AuthorizationOnlyMatchesItsOwnDay) {
  World w(15);
  std::vector<World::Held> held;
  for (int i = 0; i < 200; ++i) held.push_back(w.issue("h" + std::to_string(i % 50), DayIndex{130}));
  w.issuer.rollover(DayIndex{101});
  const auto& next = w.source.day(101).first;
  for (const auto& h : held) {
    const auto auth = w.present(h.credential.vc_id, {DayIndex{100}}).authorizations[0];
    const auto digest = crypto::compute_check_digest(auth.day_token, h.credential.vc_id);
    const auto& bucket = next.buckets[crypto::check_bucket(digest, 64).value];
    ASSERT_FALSE(std::binary_search(bucket.begin(), bucket.end(), digest));
    // presenting the day-100 token as a day-101 authorization
    auto p = w.present(h.credential.vc_id, {DayIndex{101}});
    p.authorizations[0].day_token = auth.day_token;
    ASSERT_EQ(w.check_error(p), Errc::check_digest_not_found);
  }
}

// Randomised scenarios: the verdict of every (credential, day) pair equals
// the model's published document list for that day.
TEST(VerifierProperty, CompletenessAndSoundness) {
  int cases = 0, revoked_cases = 0;
  for (std::uint64_t scenario = 0; scenario < 4; ++scenario) {
    World w(100 + scenario, tables::TableParams{32, 32, 2, 1}, DayIndex{10});
    std::mt19937_64 gen(scenario);
    std::vector<World::Held> held;
    std::map<VcId, std::vector<std::pair<std::uint64_t, std::uint64_t>>> model;  // vc -> (published day, sequence)
    for (std::uint64_t day = 10; day < 20; ++day) {
      if (day > 10) w.issuer.rollover(DayIndex{day});
      for (int i = 0; i < 4; ++i)
        held.push_back(w.issue("holder-" + std::to_string(gen() % 12), DayIndex{day + 2 + gen() % 12}));
      for (const auto& h : held) {
        if (!h.credential.valid_on(DayIndex{day}) || gen() % 8 != 0) continue;
        auto& docs = model[h.credential.vc_id];
        w.issuer.revoke(h.credential.vc_id, doc_for(h.credential.vc_id, "day " + std::to_string(day)), DayIndex{day});
        docs.emplace_back(day, docs.size() + 1);
      }
      for (const auto& h : held) {
        for (std::uint64_t t = h.credential.issued_day.value; t <= day && t <= h.credential.expiry_day.value; ++t) {
          const auto r = w.check(w.present(h.credential.vc_id, {DayIndex{t}}), DayIndex{day});
          std::vector<std::uint64_t> expected;
          for (const auto& [published, seq] : model[h.credential.vc_id])
            if (published <= t) expected.push_back(seq);
          std::vector<std::uint64_t> got;
          for (const auto& d : r.days[0].documents) got.push_back(d.sequence);
          ASSERT_EQ(got, expected) << "vc " << h.credential.vc_id.hex() << " day " << t;
          ASSERT_EQ(r.days[0].verdict, expected.empty() ? Verdict::no_revocation_found : Verdict::revoked);
          ++cases;
          revoked_cases += !expected.empty();
        }
      }
    }
  }
  EXPECT_GE(cases, 1000);
  EXPECT_GE(revoked_cases, 100);
}

// A verifier holding a day-T authorization learns nothing from day-T' entries
// for the same credential.
TEST(Attacks, VerifierCannotTrackAcrossDays) {
  World w(16, tables::TableParams{1024, 1024, 4, 1});
  std::vector<World::Held> held;
  for (int i = 0; i < 1000; ++i) held.push_back(w.issue("alice", DayIndex{150}));
  for (const auto& h : held) w.issuer.revoke(h.credential.vc_id, doc_for(h.credential.vc_id), DayIndex{100});
  const auto day_t = w.present(held[0].credential.vc_id, {DayIndex{100}}).authorizations[0];
  w.issuer.rollover(DayIndex{101});
  const auto& later = w.source.day(101).second;
  ASSERT_EQ(later.entry_count(), 1000u);

  int opened = 0;
  std::size_t tried = 0;
  for (const auto& bucket : later.buckets)
    for (const auto& entry : bucket) {
      const auto key = ahibe::decap(day_t.day_key, entry.header);
      for (const auto& h : held) {
        if (&h - held.data() >= 3) break;  // every entry against several plausible associated data
        for (auto d : {DayIndex{100}, DayIndex{101}}) {
          opened += crypto::open(entry.sealed_body, key,
                                 tables::revocation_associated_data("alice", d, h.credential.vc_id))
                        .has_value();
        }
      }
      ++tried;
    }
  EXPECT_EQ(tried, 1000u);
  EXPECT_EQ(opened, 0);

  // With only day-T tokens, the index the verifier could compute for day T'
  // coincides with the true one no more often than chance.
  int coincidences = 0;
  for (const auto& h : held) {
    const auto auth = w.present(h.credential.vc_id, {DayIndex{100}}).authorizations[0];
    const auto stale = crypto::compute_check_digest(auth.day_token, h.credential.vc_id);
    const auto guess = tables::revocation_index(w.keys.first, "alice", DayIndex{101}, stale, 1024);
    const auto truth = tables::revocation_index(w.keys.first, "alice", DayIndex{101},
                                                oracle_digest(h.seed, h.credential.vc_id, 1), 1024);
    coincidences += guess == truth;
  }
  EXPECT_LE(coincidences, revoca::testing::poisson_max_bound(1000.0 / 1024, 1, 0.999));

  // positive control: the right key opens every entry
  const auto day_t1 = w.present(held[0].credential.vc_id, {DayIndex{101}}).authorizations[0];
  const auto r = tables::scan_bucket(
      later,
      tables::revocation_index(w.keys.first, "alice", DayIndex{101},
                               crypto::compute_check_digest(day_t1.day_token, held[0].credential.vc_id), 1024),
      day_t1.day_key, "alice", DayIndex{101}, held[0].credential.vc_id);
  EXPECT_EQ(r.size(), 1u);
}

TEST(Attacks, DishonestHolderIsAlwaysRejected) {
  World w(17);
  std::vector<World::Held> held;
  for (int i = 0; i < 20; ++i) held.push_back(w.issue("h" + std::to_string(i), DayIndex{200}));
  w.issuer.rollover(DayIndex{102});
  int rejected = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const auto& victim = held[t % held.size()];
    const auto& other = held[(t + 1) % held.size()];
    auto p = w.present(victim.credential.vc_id, {DayIndex{102}});
    Errc expected;
    switch (t % 5) {
      case 0:
        p.authorizations[0].day_token = w.rng.fixed<DayToken>();
        expected = Errc::check_digest_not_found;
        break;
      case 1:
        p.authorizations[0].day_token = w.present(other.credential.vc_id, {DayIndex{102}}).authorizations[0].day_token;
        expected = Errc::check_digest_not_found;
        break;
      case 2:
        p.authorizations[0].day_token = w.present(victim.credential.vc_id, {DayIndex{101}}).authorizations[0].day_token;
        expected = Errc::check_digest_not_found;
        break;
      case 3:
        p.authorizations[0].day_key = w.present(victim.credential.vc_id, {DayIndex{101}}).authorizations[0].day_key;
        expected = Errc::key_probe_failed;
        break;
      default:
        p.authorizations[0].day_key = w.present(other.credential.vc_id, {DayIndex{102}}).authorizations[0].day_key;
        p.authorizations[0].day_key.identity = ahibe::IdentityPath::for_day(victim.credential.root, DayIndex{102});
        expected = Errc::key_probe_failed;
        break;
    }
    const auto got = w.check_error(p);
    EXPECT_EQ(got, expected) << t;
    rejected += got != Errc::usage;
  }
  EXPECT_EQ(rejected, trials);
}
