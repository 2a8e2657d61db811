// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <regex>
#include <string>

#include "oracle/oracle.hpp"
#include "revoca/service.hpp"
#include "revoca/sim.hpp"
#include "support.hpp"

using namespace revoca;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

// Issuer, publication store and one wallet, wired in-process.
struct Deployment {
  explicit Deployment(std::uint64_t seed, tables::TableParams params = {}, DayIndex start = DayIndex{10})
      : rng(seed),
        keys(actors::pkg_setup(ahibe::SecurityLevel::test, rng)),
        issuer(actors::Issuer::init("issuer", keys.first, params, start, rng)),
        publisher(store),
        transport(publisher) {
    store.put_params(service::encode(service::make_params_document(keys.first, params, 0, 86400, "issuer",
                                                                   issuer.state().signing_key.secret)));
    issuer.set_publish_hook([this](const auto& c, const auto& r) {
      store.put_day(c, r);
      days[c.day.value] = {c, r};
      ++publications;
    });
    trust.add("issuer", issuer.public_key());
  }

  VcId issue(const std::string& root, DayIndex expiry) {
    const auto pop = crypto::generate_signing_key(rng);
    auto out = issuer.issue(root, canonical::Value::object(), expiry, pop.public_key);
    if (!holder_keys.contains(root)) holder_keys.emplace(root, actors::pkg_extract(keys.second, root, rng));
    wallet.store(out.credential, out.seed, holder_keys.at(root), pop.secret, issuer.public_key());
    roots[out.credential.vc_id] = root;
    return out.credential.vc_id;
  }

  BucketIndex revoke(const VcId& id, std::string reason = "revoked") {
    return issuer.revoke(
        id, {id, tables::RevocationStatus::revoked, std::move(reason), canonical::Value::object(), issuer.current_day(), 0},
        issuer.current_day());
  }

  actors::Presentation present(const VcId& id, std::vector<DayIndex> days_) {
    return wallet.present(id, days_, {}, rng);
  }

  actors::StatusResult check(service::Transport& t, const actors::Presentation& p, DayIndex today) {
    service::Client client(t, &trust);
    return actors::verifier_check(p, trust, client, today, {}, rng);
  }

  actors::StatusResult check(const actors::Presentation& p) { return check(transport, p, issuer.current_day()); }

  Errc check_error(const actors::Presentation& p) {
    return testing::code_of([&] { check(p); });
  }

  DeterministicRandom rng;
  std::pair<ahibe::MasterPublicParams, ahibe::MasterSecret> keys;
  actors::Issuer issuer;
  service::MemoryStore store;
  service::Publisher publisher;
  service::InProcessTransport transport;
  actors::TrustStore trust;
  actors::Wallet wallet;
  std::map<std::string, ahibe::HolderKey> holder_keys;
  std::map<VcId, std::string> roots;
  std::map<std::uint64_t, std::pair<tables::CheckTableSnapshot, tables::RevocationTableSnapshot>> days;
  int publications = 0;
};

std::vector<std::uint64_t> verdict_vector(const sim::ScenarioReport& r) {
  std::vector<std::uint64_t> v;
  for (const auto& d : r.days)
    for (auto x : {d.counts.checks, d.counts.true_positives, d.counts.true_negatives, d.counts.false_positives,
                   d.counts.false_negatives, d.counts.deferred, d.counts.deferred_resolved})
      v.push_back(x);
  return v;
}

Outcome ac1() {
  sim::ScenarioConfig full;  // 200 holders x 2 VCs, 10 days, 5%, 100 presentations a day
  auto t0 = std::chrono::steady_clock::now();
  const auto r = sim::run(full);
  const double full_s = seconds_since(t0);

  sim::ScenarioConfig tenth = full;
  tenth.holders = 20;
  tenth.presentations_per_day = 10;
  const auto reference = sim::run(tenth);
  tenth.scheme = ahibe::SecurityLevel::standard;
  t0 = std::chrono::steady_clock::now();
  const auto pairing = sim::run(tenth);
  const double pairing_s = seconds_since(t0);

  const auto& t = r.total;
  const bool exact = t.false_positives == 0 && t.false_negatives == 0 && t.presentations >= 1000 &&
                     t.document_mismatches == 0 && t.rejections.empty();
  const bool same = verdict_vector(pairing) == verdict_vector(reference) && pairing.total.false_positives == 0 &&
                    pairing.total.false_negatives == 0;
  return {exact && full_s < 60 && same && pairing_s < 600,
          fmt("full: %llu presentations, %llu checks, TP %llu TN %llu FP %llu FN %llu in %.1fs (<60); "
              "1/10 scale pairing scheme: verdicts %s transparent, FP %llu FN %llu in %.1fs (<600)",
              (unsigned long long)t.presentations, (unsigned long long)t.checks,
              (unsigned long long)t.true_positives, (unsigned long long)t.true_negatives,
              (unsigned long long)t.false_positives, (unsigned long long)t.false_negatives, full_s,
              same ? "identical to" : "DIFFER from", (unsigned long long)pairing.total.false_positives,
              (unsigned long long)pairing.total.false_negatives, pairing_s)};
}

// Serves day-D snapshots, relabelled, in answer to requests for day T.
class ReplaySource : public actors::TableSource {
 public:
  ReplaySource(Deployment& d, std::uint64_t from) : d_(&d), from_(from) {}
  const ahibe::MasterPublicParams& master_params() override { return d_->keys.first; }
  const tables::TableParams& table_params() override { return d_->issuer.state().params; }
  std::optional<actors::Fetched<tables::CheckSegment>> check_segment(DayIndex day, std::uint64_t j) override {
    auto seg = tables::segment_of(d_->days.at(from_).first, j);
    seg.day = day;
    return actors::Fetched<tables::CheckSegment>{seg, 0};
  }
  std::optional<actors::Fetched<tables::RevocationTableSnapshot>> revocation_table(DayIndex day) override {
    auto t = d_->days.at(from_).second;
    t.day = day;
    return actors::Fetched<tables::RevocationTableSnapshot>{t, 0};
  }

 private:
  Deployment* d_;
  std::uint64_t from_;
};

Outcome ac2() {
  Deployment d(2);
  const auto x = d.issue("alice", DayIndex{100});
  for (int i = 0; i < 20; ++i) d.issue("other-" + std::to_string(i), DayIndex{100});
  const int docs = 600;
  for (int i = 0; i < docs; ++i) d.revoke(x, "doc " + std::to_string(i));  // day 10 = T-1
  d.issuer.rollover(DayIndex{12});                                         // T = 11, T+1 = 12
  const DayIndex T{11};
  const auto auth = d.present(x, {T}).authorizations.at(0);

  std::size_t tried = 0, opened = 0;
  for (std::uint64_t other : {10, 12}) {
    for (const auto& bucket : d.days.at(other).second.buckets)
      for (const auto& entry : bucket) {
        const auto key = ahibe::decap(auth.day_key, entry.header);
        ++tried;
        for (std::uint64_t ad_day : {10, 11, 12})
          opened += crypto::open(entry.sealed_body, key,
                                 tables::revocation_associated_data("alice", DayIndex{ad_day}, x))
                        .has_value();
      }
  }

  std::map<std::uint64_t, std::string> replay;
  for (std::uint64_t from : {10, 11, 12}) {
    ReplaySource source(d, from);
    try {
      const auto r = actors::verifier_check(d.present(x, {T}), d.trust, source, T, {}, d.rng);
      replay[from] = fmt("%s(%zu)", std::string(actors::verdict_name(r.days[0].verdict)).c_str(),
                         r.days[0].documents.size());
    } catch (const Error& e) {
      replay[from] = std::string(errc_name(e.code()));
    }
  }
  const bool only_t = replay[11] == fmt("Revoked(%d)", docs) && replay[10] == "CheckDigestNotFound" &&
                      replay[12] == "CheckDigestNotFound";
  return {tried >= 1000 && opened == 0 && only_t,
          fmt("%zu/%zu day-(T+-1) entries opened with the day-T key; day-T authorization against day T-1 / T / T+1 "
              "snapshots: %s / %s / %s",
              opened, tried, replay[10].c_str(), replay[11].c_str(), replay[12].c_str())};
}

Outcome ac3() {
  Deployment d(3, tables::TableParams{1024, 1024, 4, 1});
  std::vector<VcId> ids;
  for (int i = 0; i < 64; ++i) ids.push_back(d.issue("h" + std::to_string(i), DayIndex{100}));
  d.revoke(ids[0]);
  const DayIndex T = d.issuer.current_day();
  std::map<std::uint64_t, std::vector<VcId>> by_segment;
  for (const auto& id : ids) {
    const auto a = d.present(id, {T}).authorizations[0];
    by_segment[tables::segment_for_digest(crypto::compute_check_digest(a.day_token, id), d.issuer.state().params)]
        .push_back(id);
  }
  auto log_bytes = [&](const VcId& id) {
    service::RecordingTransport rec(d.transport, "verifier");
    d.check(rec, d.present(id, {T}), T);
    canonical::Value v = canonical::Value::array();
    for (const auto& r : rec.records())
      v.push_back({{"body", to_base64url(r.request_body)}, {"from", r.from}, {"method", r.method}, {"path", r.path},
                   {"response_bytes", r.response_bytes}, {"status", r.status}});
    return canonical::encode(v);
  };
  int pairs = 0, identical = 0;
  for (const auto& [seg, members] : by_segment)
    for (std::size_t k = 1; k < members.size(); ++k) {
      ++pairs;
      identical += log_bytes(members[0]) == log_bytes(members[k]);
    }

  // Endpoint enumeration: only day and segment parameters exist.
  bool endpoints_ok = service::Publisher::endpoints().size() == 3;
  const std::regex param(R"(\{([a-z_]+)\})");
  for (const auto& e : service::Publisher::endpoints())
    for (std::sregex_iterator it(e.begin(), e.end(), param), end; it != end; ++it)
      endpoints_ok &= (*it)[1] == "day" || (*it)[1] == "j";
  const auto hex = ids[0].hex();
  for (const std::string& probe : std::vector<std::string>{"/v1/credentials/" + hex, "/v1/days/10/revocation/17", "/v1/days/10/check/digest/" + hex,
                            "/v1/days/10/revocation?vc=" + hex, "/v1/days/10/status/" + hex})
    endpoints_ok &= d.publisher.handle("GET", probe).status == 404;
  return {pairs > 0 && identical == pairs && endpoints_ok,
          fmt("%d/%d same-segment VC pairs produced byte-identical request logs; endpoints take only {day},{j}: %s",
              identical, pairs, endpoints_ok ? "yes" : "NO")};
}

Outcome ac4() {
  Deployment d(4);
  std::vector<VcId> ids;
  for (int i = 0; i < 10; ++i) ids.push_back(d.issue("h" + std::to_string(i), DayIndex{100}));
  d.revoke(ids[3]);
  const auto state_before = canonical::encode(d.issuer.state().to_value());
  const int publications_before = d.publications;
  service::RecordingTransport verifier_wire(d.transport, "verifier");
  std::size_t holder_messages = 0, verifier_messages = 0, revoked = 0;
  for (const auto& id : ids) {
    const auto p = d.present(id, {DayIndex{10}});  // the wallet has no transport
    revoked += d.check(verifier_wire, p, DayIndex{10}).any_revoked();
  }
  for (const auto& r : verifier_wire.records()) {
    holder_messages += r.from == "holder";
    verifier_messages += r.from == "verifier" && r.method == "GET" && r.request_body.empty();
  }
  const bool untouched =
      canonical::encode(d.issuer.state().to_value()) == state_before && d.publications == publications_before;
  return {holder_messages == 0 && verifier_messages == verifier_wire.records().size() && untouched && revoked == 1,
          fmt("%zu holder->issuer messages; %zu verifier GETs to the publisher only; issuer state untouched: %s",
              holder_messages, verifier_messages, untouched ? "yes" : "NO")};
}

Outcome ac5() {
  Deployment d(5, tables::TableParams{256, 256, 4, 1});
  std::vector<VcId> ids;
  for (int i = 0; i < 40; ++i) ids.push_back(d.issue("h" + std::to_string(i), DayIndex{100}));
  d.issuer.rollover(DayIndex{12});
  const DayIndex T{12};
  std::map<std::string, int> total, correct;
  for (int t = 0; t < 1000; ++t) {
    const auto& victim = ids[t % ids.size()];
    const auto& other = ids[(t * 7 + 1) % ids.size()];
    auto p = d.present(victim, {T});
    std::string kind;
    Errc expected;
    switch (t % 4) {
      case 0:
        kind = "random-token";
        p.authorizations[0].day_token = d.rng.fixed<DayToken>();
        expected = Errc::check_digest_not_found;
        break;
      case 1:
        kind = "other-vc-token";
        p.authorizations[0].day_token = d.present(other, {T}).authorizations[0].day_token;
        expected = Errc::check_digest_not_found;
        break;
      case 2:
        kind = "other-day-key";
        p.authorizations[0].day_key = d.present(victim, {DayIndex{11}}).authorizations[0].day_key;
        expected = Errc::key_probe_failed;
        break;
      default:
        kind = "other-holder-key";
        p.authorizations[0].day_key = d.present(other, {T}).authorizations[0].day_key;
        p.authorizations[0].day_key.identity = ahibe::IdentityPath::for_day(d.roots.at(victim), T);
        expected = Errc::key_probe_failed;
        break;
    }
    ++total[kind];
    correct[kind] += d.check_error(p) == expected;
  }
  int all = 0;
  std::string detail;
  for (const auto& [kind, n] : total) {
    all += correct[kind];
    detail += fmt("%s %d/%d, ", kind.c_str(), correct[kind], n);
  }
  return {all == 1000, detail + fmt("%d/1000 rejected with the expected class", all)};
}

Outcome ac6() {
  Deployment d(6, tables::TableParams{1024, 1024, 4, 1});
  std::vector<VcId> ids;
  for (int i = 0; i < 1000; ++i) ids.push_back(d.issue("holder-" + std::to_string(i % 100), DayIndex{100}));
  int agree = 0;
  const DayIndex T = d.issuer.current_day();
  for (const auto& id : ids) {
    const auto inserted = d.revoke(id);
    const auto a = d.present(id, {T}).authorizations[0];
    const auto digest = crypto::compute_check_digest(a.day_token, id);
    agree += tables::revocation_index(d.keys.first, d.roots.at(id), T, digest, 1024) == inserted;
  }
  return {agree == 1000, fmt("%d/1000 issuer insertion indices equal the verifier-recomputed x'", agree)};
}

Outcome ac7() {
  Deployment d(7, tables::TableParams{1024, 1024, 4, 1});
  for (int i = 0; i < 1024; ++i) d.revoke(d.issue("holder-" + std::to_string(i), DayIndex{100}));
  const auto& t = d.days.at(10).second;
  std::size_t max = 0, nonempty = 0;
  for (const auto& b : t.buckets) {
    max = std::max(max, b.size());
    nonempty += !b.empty();
  }
  const double mean = double(t.entry_count()) / double(t.buckets.size());
  const auto bound = testing::poisson_max_bound(1.0, 1024, 0.999);
  return {t.entry_count() == 1024 && mean >= 0.9 && mean <= 1.1 && max <= bound,
          fmt("%zu entries in d=%zu lists: mean %.4f (in [0.9, 1.1]), max %zu (Poisson(1) 99.9%% bound over 1024 "
              "lists: %llu), mean over non-empty lists %.3f",
              t.entry_count(), t.buckets.size(), mean, max, (unsigned long long)bound,
              double(t.entry_count()) / double(nonempty))};
}

Outcome ac8() {
  Deployment d(8, tables::TableParams{256, 256, 4, 1});
  const auto x = d.issue("alice", DayIndex{100});
  const auto clean = d.issue("bob", DayIndex{100});
  d.issuer.rollover(DayIndex{12});
  d.revoke(x, "published on day 12");
  d.issuer.rollover(DayIndex{15});
  // presented on day 15: past days 11 and 12, today, future day 17
  const std::vector<DayIndex> days{DayIndex{11}, DayIndex{12}, DayIndex{15}, DayIndex{17}};
  const auto p = d.present(x, days);
  const auto now = d.check(p);
  const auto clean_now = d.check(d.present(clean, days));
  d.issuer.rollover(DayIndex{17});
  auto later = p;
  later.authorizations = {p.authorizations[3]};
  const auto resolved = d.check(later);

  std::string got;
  for (const auto& s : now.days) got += std::string(actors::verdict_name(s.verdict)) + " ";
  const bool ok = now.days[0].verdict == actors::Verdict::no_revocation_found &&
                  now.days[1].verdict == actors::Verdict::revoked &&
                  now.days[1].documents.at(0).reason == "published on day 12" &&
                  now.days[2].verdict == actors::Verdict::revoked && now.days[3].verdict == actors::Verdict::deferred &&
                  resolved.days[0].verdict == actors::Verdict::revoked && !clean_now.any_revoked() &&
                  clean_now.days[3].verdict == actors::Verdict::deferred;
  return {ok, "days 11/12/15/17 on day 15: " + got + "; day 17 re-checked on day 17: " +
                  std::string(actors::verdict_name(resolved.days[0].verdict)) +
                  "; unrevoked VC on all past days: " + (clean_now.any_revoked() ? "Revoked" : "NoRevocationFound")};
}

Outcome ac9() {
  Deployment d(9);
  const auto x = d.issue("alice", DayIndex{100});
  d.issuer.rollover(DayIndex{20});
  const auto before = d.check(d.present(x, {DayIndex{20}}));
  d.revoke(x, "last minute");
  const auto after = d.check(d.present(x, {DayIndex{20}}));
  const bool ok = !before.any_revoked() && after.any_revoked() && after.days[0].documents[0].reason == "last minute";
  return {ok, fmt("day-20 check before revoke: %s; revoke published on day 20 then checked on day 20: %s",
                  std::string(actors::verdict_name(before.days[0].verdict)).c_str(),
                  std::string(actors::verdict_name(after.days[0].verdict)).c_str())};
}

Outcome ac10() {
  auto ob = [](std::string_view s) { return oracle::Bytes(s.begin(), s.end()); };
  auto range = [](int a, int b) {
    oracle::Bytes v;
    for (int i = a; i < b; ++i) v.push_back(static_cast<std::uint8_t>(i));
    return v;
  };
  struct Mac {
    oracle::Bytes key, msg;
    const char* expected;
  };
  const std::vector<Mac> macs = {
      {oracle::Bytes(20, 0x0b), ob("Hi There"), "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7"},
      {ob("Jefe"), ob("what do ya want for nothing?"),
       "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843"},
      {oracle::Bytes(20, 0xaa), oracle::Bytes(50, 0xdd),
       "773ea91e36800e46854db8ebd09181a72959098b3ef8c122d9635514ced565fe"},
      {range(1, 26), oracle::Bytes(50, 0xcd), "82558a389a443c0ea4cc819899f2083a85f0faa3e578f8077a2e3ff46729665b"},
      {oracle::Bytes(131, 0xaa), ob("Test Using Larger Than Block-Size Key - Hash Key First"),
       "60e431591ee0b67f0d8a26aacbf5b77f8e0bc6213728c5140546040f0ee37f54"},
      {oracle::Bytes(131, 0xaa),
       ob("This is a test using a larger than block-size key and a larger than block-size data. The key needs to be "
          "hashed before being used by the HMAC algorithm."),
       "9b09ffa71b942fcb27635fbcd5b0e944bfdc63644f0713938a7f51535c3a35e2"},
  };
  struct Kdf {
    oracle::Bytes salt, ikm, info;
    std::size_t len;
    const char* expected;
  };
  const std::vector<Kdf> kdfs = {
      {range(0, 13), oracle::Bytes(22, 0x0b), range(0xf0, 0xfa), 42,
       "3cb25f25faacd57a90434f64d0362f2a2d2d0a90cf1a5a4c5db02d56ecc4c5bf34007208d5b887185865"},
      {range(0x60, 0xb0), range(0, 0x50), range(0xb0, 0x100), 82,
       "b11e398dc80327a1c8e7f78c596a49344f012eda2d4efad8a050cc4c19afa97c59045a99cac7827271cb41c65e590e09da3275600c2f0"
       "9b8367793a9aca3db71cc30c58179ec3e87c14c01d5c1f3434f1d87"},
      {{}, oracle::Bytes(22, 0x0b), {}, 42,
       "8da4e775a563c18f715f802a063c5a31b8a11f5c5ee1879ec3454e5f3c738d2d9d201395faa4b61a96c8"},
  };
  int mac_ok = 0, kdf_ok = 0;
  for (const auto& m : macs) {
    const auto lib = to_hex(crypto::hmac_sha256(m.key, m.msg));
    mac_ok += lib == m.expected && lib == oracle::to_hex(oracle::hmac_sha256(m.key, m.msg));
  }
  for (const auto& k : kdfs) {
    const auto lib = to_hex(crypto::hkdf(k.salt, k.ikm, k.info, k.len));
    kdf_ok += lib == k.expected && lib == oracle::to_hex(oracle::hkdf_sha256(k.salt, k.ikm, k.info, k.len));
  }
  return {mac_ok == int(macs.size()) && kdf_ok == int(kdfs.size()),
          fmt("HMAC-SHA-256 RFC 4231 cases 1,2,3,4,6,7: %d/%zu; HKDF-SHA-256 RFC 5869 cases 1,2,3: %d/%zu "
              "(library == oracle == published)",
              mac_ok, macs.size(), kdf_ok, kdfs.size())};
}

Outcome ac11() {
  // Holder side: one-authorization presentations at three population sizes.
  std::vector<std::uint64_t> holder;
  for (std::uint64_t holders : {20, 200, 2000}) {
    sim::ScenarioConfig c;
    c.holders = holders;
    c.days = 2;
    c.presentations_per_day = 50;
    c.past_auth_probability = 0;
    c.future_auth_probability = 0;
    const auto r = sim::run(c);
    if (r.total.holder_bytes != r.total.holder_bytes_max * r.total.presentations) return {false, "holder bytes vary"};
    holder.push_back(r.total.holder_bytes_max);
  }
  const bool holder_ok = holder[0] == holder[1] && holder[1] == holder[2];

  // Verifier side: exactly one segment and one table per checked day.
  bool verifier_ok = true;
  std::string detail;
  for (std::uint64_t sigma : {2, 4, 16}) {
    Deployment d(11, tables::TableParams{1024, 1024, sigma, 1});
    std::vector<VcId> ids;
    for (int i = 0; i < 2000; ++i) ids.push_back(d.issue("holder-" + std::to_string(i / 2), DayIndex{100}));
    for (int i = 0; i < 2000; i += 40) d.revoke(ids[i]);
    const auto full = tables::encode(d.days.at(10).first).size();
    service::Client client(d.transport, &d.trust);
    client.master_params();  // params are fetched once per verifier, not per check
    client.clear_log();
    const auto r = actors::verifier_check(d.present(ids[1], {DayIndex{10}}), d.trust, client, DayIndex{10}, {}, d.rng);
    const auto& log = client.log();
    const bool shape = log.size() == 2 && log[0].path.find("/check/segments/") != std::string::npos &&
                       log[1].path == service::revocation_path(DayIndex{10}) && log[0].bytes == r.segment_bytes &&
                       log[1].bytes == r.table_bytes;
    verifier_ok &= shape && r.segment_bytes < full && r.segment_bytes + r.table_bytes < full;
    detail += fmt("sigma=%llu: segment %llu + table %llu = %llu < full check table %zu; ",
                  (unsigned long long)sigma, (unsigned long long)r.segment_bytes, (unsigned long long)r.table_bytes,
                  (unsigned long long)(r.segment_bytes + r.table_bytes), full);
  }
  return {holder_ok && verifier_ok,
          fmt("holder bytes per presentation at 20/200/2000 holders: %llu/%llu/%llu; ", (unsigned long long)holder[0],
              (unsigned long long)holder[1], (unsigned long long)holder[2]) +
              detail};
}

}  // namespace

int main() {
  const std::vector<std::tuple<const char*, const char*, std::function<Outcome()>>> criteria = {
      {"AC1", "end-to-end correctness", ac1},
      {"AC2", "verifier cannot track across days", ac2},
      {"AC3", "issuer cannot tell which VC is checked", ac3},
      {"AC4", "no holder-issuer round trip", ac4},
      {"AC5", "forged presentations rejected", ac5},
      {"AC6", "index agreement", ac6},
      {"AC7", "overflow list load factor", ac7},
      {"AC8", "past and future authorizations", ac8},
      {"AC9", "same-day revocation visible", ac9},
      {"AC10", "primitive conformance", ac10},
      {"AC11", "bandwidth accounting", ac11},
  };
  int failed = 0;
  for (const auto& [id, name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%-5s %s  %s: %s\n", id, o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
