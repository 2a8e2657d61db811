#include <gtest/gtest.h>

#include <filesystem>
#include <regex>
#include <thread>

#include "oracle/oracle.hpp"
#include "revoca/service.hpp"
#include "support.hpp"

using namespace revoca;
using namespace revoca::service;
using revoca::testing::code_of;
namespace fs = std::filesystem;

namespace {

struct Deployment {
  explicit Deployment(std::uint64_t seed, tables::TableParams params = {64, 64, 4, 1})
      : rng(seed),
        keys(actors::pkg_setup(ahibe::SecurityLevel::test, rng)),
        issuer(actors::Issuer::init("issuer-A", keys.first, params, DayIndex{100}, rng)),
        publisher(store) {
    params_doc = make_params_document(keys.first, params, 1'700'000'000, 86400, "issuer-A",
                                      issuer.state().signing_key.secret);
    store.put_params(encode(params_doc));
    issuer.set_publish_hook([this](const auto& c, const auto& r) { store.put_day(c, r); });
    trust.add("issuer-A", issuer.public_key());
  }

  struct Held {
    actors::VerifiableCredential credential;
    Seed seed;
  };

  Held issue(const std::string& root) {
    const auto pop = crypto::generate_signing_key(rng);
    auto out = issuer.issue(root, canonical::Value::object(), DayIndex{200}, pop.public_key);
    if (!holder_keys.contains(root)) holder_keys.emplace(root, actors::pkg_extract(keys.second, root, rng));
    wallet.store(out.credential, out.seed, holder_keys.at(root), pop.secret, issuer.public_key());
    return {out.credential, out.seed};
  }

  actors::StatusResult check(Transport& transport, const VcId& id, std::vector<DayIndex> days) {
    Client client(transport, &trust);
    return actors::verifier_check(wallet.present(id, days, {}, rng), trust, client, issuer.current_day(), {}, rng);
  }

  DeterministicRandom rng;
  std::pair<ahibe::MasterPublicParams, ahibe::MasterSecret> keys;
  actors::Issuer issuer;
  MemoryStore store;
  Publisher publisher;
  PublicParamsDocument params_doc;
  actors::TrustStore trust;
  actors::Wallet wallet;
  std::map<std::string, ahibe::HolderKey> holder_keys;
};

std::string reason(const Response& r) {
  auto it = r.headers.find(kReasonHeader);
  return it == r.headers.end() ? "" : it->second;
}

CheckDigest digest_on(const Deployment::Held& h, DayIndex day) {
  const auto token = crypto::derive_day_token(h.seed, life_day(h.credential.issued_day, day));
  return crypto::compute_check_digest(token, h.credential.vc_id);
}

// Flips one byte of every successful body.
class CorruptingTransport : public Transport {
 public:
  explicit CorruptingTransport(Transport& inner) : inner_(&inner) {}
  Response get(const std::string& path) override {
    auto r = inner_->get(path);
    if (r.status == 200 && r.body.size() > 10) r.body[r.body.size() / 2] ^= 0x04;
    return r;
  }

 private:
  Transport* inner_;
};

}  // namespace

TEST(Paths, Grammar) {
  EXPECT_EQ(params_path(), "/v1/params");
  EXPECT_EQ(segment_path(DayIndex{12}, 3), "/v1/days/12/check/segments/3");
  EXPECT_EQ(revocation_path(DayIndex{0}), "/v1/days/0/revocation");
  EXPECT_EQ(Publisher::endpoints().size(), 3u);
  for (const auto& e : Publisher::endpoints()) {
    EXPECT_EQ(e.rfind("GET ", 0), 0u) << e;
    EXPECT_EQ(e.find("vc"), std::string::npos) << e;
  }
}

TEST(ParamsDocument, SignedAndRoundTrips) {
  Deployment d(1);
  EXPECT_TRUE(d.params_doc.verify(d.issuer.public_key()));
  EXPECT_FALSE(d.params_doc.verify(crypto::generate_signing_key(d.rng).public_key));
  const auto bytes = encode(d.params_doc);
  const auto back = decode_params_document(bytes);
  EXPECT_EQ(encode(back), bytes);
  EXPECT_EQ(back.table_params, (tables::TableParams{64, 64, 4, 1}));
  EXPECT_EQ(back.granularity_seconds, 86400u);
  auto bad = bytes;
  bad[bad.size() / 3] ^= 1;
  EXPECT_EQ(code_of([&] { decode_params_document(bad); }), Errc::corrupt_snapshot);
  auto tampered = back;
  tampered.table_params.d = 128;
  EXPECT_FALSE(tampered.verify(d.issuer.public_key()));
}

TEST(Publisher, ServesSnapshots) {
  Deployment d(2);
  d.issue("alice");
  const auto [check, rev] = d.issuer.export_day();

  auto params = d.publisher.handle("GET", "/v1/params");
  EXPECT_EQ(params.status, 200);
  EXPECT_EQ(params.body, encode(d.params_doc));

  auto seg = d.publisher.handle("GET", "/v1/days/100/check/segments/0");
  ASSERT_EQ(seg.status, 200);
  EXPECT_EQ(tables::decode_check_segment(seg.body), tables::segment_of(check, 0));
  EXPECT_EQ(seg.headers.at(kDayHeader), "100");

  auto table = d.publisher.handle("GET", "/v1/days/100/revocation");
  ASSERT_EQ(table.status, 200);
  EXPECT_EQ(table.body, tables::encode(rev));
}

TEST(Publisher, NotFoundAndMethodErrors) {
  Deployment d(3);
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"/v1/days/99/revocation", "day-not-archived"},
      {"/v1/days/99/check/segments/0", "day-not-archived"},
      {"/v1/days/100/check/segments/4", "segment-out-of-range"},
      {"/v1/days/0100/revocation", "unknown-endpoint"},
      {"/v1/days/100/check/segments/01", "unknown-endpoint"},
      {"/v1/days/-1/revocation", "unknown-endpoint"},
      {"/v1/days/100/revocation/3", "unknown-endpoint"},
      {"/v1/days/100/check", "unknown-endpoint"},
      {"/v2/params", "unknown-endpoint"},
      {"/", "unknown-endpoint"},
  };
  for (const auto& [path, why] : cases) {
    const auto r = d.publisher.handle("GET", path);
    EXPECT_EQ(r.status, 404) << path;
    EXPECT_TRUE(r.body.empty()) << path;
    EXPECT_EQ(reason(r), why) << path;
  }
  for (const char* m : {"POST", "PUT", "DELETE"}) {
    const auto r = d.publisher.handle(m, "/v1/params");
    EXPECT_EQ(r.status, 405);
    EXPECT_EQ(reason(r), "method-not-allowed");
  }
  MemoryStore empty;
  EXPECT_EQ(reason(Publisher(empty).handle("GET", "/v1/params")), "params-unavailable");
}

TEST(Publisher, ServingIsPure) {
  Deployment d(4);
  d.issue("alice");
  const auto a = d.publisher.handle("GET", "/v1/days/100/check/segments/2").body;
  const auto t = d.publisher.handle("GET", "/v1/days/100/revocation").body;
  EXPECT_EQ(d.publisher.handle("GET", "/v1/days/100/check/segments/2").body, a);
  d.issuer.rollover(DayIndex{101});
  EXPECT_EQ(d.publisher.handle("GET", "/v1/days/100/check/segments/2").body, a);
  EXPECT_EQ(d.publisher.handle("GET", "/v1/days/100/revocation").body, t);
  // a republished day gets fresh segments
  d.issue("bob");
  EXPECT_EQ(tables::decode_check_table(*d.store.check_table(DayIndex{101})).digest_count(), 2u);
  std::size_t total = 0;
  for (int j = 0; j < 4; ++j)
    total += tables::decode_check_segment(d.publisher.handle("GET", segment_path(DayIndex{101}, j)).body)
                 .buckets.size();
  EXPECT_EQ(total, 64u);
}

TEST(Publisher, ConcurrentReadersSeeIdenticalBytes) {
  Deployment d(5);
  for (int i = 0; i < 30; ++i) d.issue("h" + std::to_string(i));
  std::vector<Bytes> expected;
  for (int j = 0; j < 4; ++j) expected.push_back(d.publisher.handle("GET", segment_path(DayIndex{100}, j)).body);
  std::atomic<int> mismatches{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t)
    threads.emplace_back([&, t] {
      for (int i = 0; i < 200; ++i) {
        const int j = (i + t) % 4;
        if (d.publisher.handle("GET", segment_path(DayIndex{100}, j)).body != expected[j]) ++mismatches;
      }
    });
  for (auto& th : threads) th.join();
  EXPECT_EQ(mismatches, 0);
}

TEST(ClientFetch, SegmentsLogAndIntegrity) {
  Deployment d(6);
  std::vector<Deployment::Held> held;
  for (int i = 0; i < 40; ++i) held.push_back(d.issue("h" + std::to_string(i)));
  InProcessTransport transport(d.publisher);
  Client client(transport, &d.trust);

  EXPECT_EQ(client.fetch_params().issuer_id, "issuer-A");
  for (const auto& h : held) {
    const auto digest = digest_on(h, DayIndex{100});
    const auto j = tables::segment_for_digest(digest, client.table_params());
    EXPECT_TRUE(tables::segment_contains(client.fetch_segment(DayIndex{100}, j), digest));
  }
  const auto s0 = client.fetch_segment(DayIndex{100}, 0);
  const auto s1 = client.fetch_segment(DayIndex{100}, 1);
  EXPECT_EQ(s0.first_bucket() + s0.buckets.size(), s1.first_bucket());

  client.clear_log();
  const auto body = d.publisher.handle("GET", revocation_path(DayIndex{100})).body;
  client.fetch_revocation_table(DayIndex{100});
  client.fetch_revocation_table(DayIndex{100});
  ASSERT_EQ(client.log().size(), 2u);
  EXPECT_EQ(client.log()[0], (FetchRecord{"/v1/days/100/revocation", body.size(), DayIndex{100}}));
  EXPECT_EQ(client.log()[1], client.log()[0]);

  EXPECT_EQ(code_of([&] { client.fetch_segment(DayIndex{7}, 0); }), Errc::not_found);
  EXPECT_FALSE(client.check_segment(DayIndex{7}, 0));
  EXPECT_FALSE(client.revocation_table(DayIndex{7}));
  EXPECT_EQ(client.log().back().bytes, 0u);

  CorruptingTransport corrupt(transport);
  Client bad(corrupt);
  EXPECT_EQ(code_of([&] { bad.fetch_revocation_table(DayIndex{100}); }), Errc::corrupt_snapshot);
  EXPECT_EQ(code_of([&] { bad.fetch_segment(DayIndex{100}, 1); }), Errc::corrupt_snapshot);

  actors::TrustStore stranger;
  stranger.add("issuer-A", crypto::generate_signing_key(d.rng).public_key);
  Client distrustful(transport, &stranger);
  EXPECT_EQ(code_of([&] { distrustful.fetch_params(); }), Errc::bad_signature);
}

TEST(ClientFetch, WholeTableSmallerThanSigmaTimesAllSegments) {
  Deployment d(7, tables::TableParams{1024, 1024, 4, 1});
  std::vector<Deployment::Held> held;
  for (int i = 0; i < 400; ++i) held.push_back(d.issue("holder-" + std::to_string(i / 2)));
  for (int i = 0; i < 400; i += 20) d.issuer.revoke(held[i].credential.vc_id, {held[i].credential.vc_id}, DayIndex{100});
  InProcessTransport transport(d.publisher);
  Client client(transport);
  client.fetch_revocation_table(DayIndex{100});
  std::uint64_t segments = 0;
  for (int j = 0; j < 4; ++j) {
    client.fetch_segment(DayIndex{100}, j);
    segments += client.log().back().bytes;
  }
  EXPECT_LT(client.log()[0].bytes, 4 * segments);
}

// The request stream reveals the segment index and nothing else about the VC.
TEST(ClientUniformity, SameSegmentRequestsAreIdentical) {
  Deployment d(8);
  std::vector<Deployment::Held> held;
  for (int i = 0; i < 40; ++i) held.push_back(d.issue("h" + std::to_string(i)));
  d.issuer.revoke(held[0].credential.vc_id, {held[0].credential.vc_id}, DayIndex{100});
  d.issuer.rollover(DayIndex{101});
  InProcessTransport inner(d.publisher);

  std::map<std::uint64_t, std::vector<std::size_t>> by_segment;
  for (std::size_t i = 0; i < held.size(); ++i)
    by_segment[tables::segment_for_digest(digest_on(held[i], DayIndex{101}), d.params_doc.table_params)].push_back(i);

  auto stream = [&](std::size_t i) {
    RecordingTransport rec(inner, "verifier");
    d.check(rec, held[i].credential.vc_id, {DayIndex{100}, DayIndex{101}});
    return rec.records();
  };
  const std::regex allowed(R"(^/v1/(params|days/(0|[1-9][0-9]*)/(revocation|check/segments/(0|[1-9][0-9]*)))$)");
  int compared = 0;
  for (const auto& [segment, members] : by_segment) {
    if (members.size() < 2) continue;
    std::vector<std::vector<WireRecord>> streams;
    for (auto i : members) streams.push_back(stream(i));
    for (const auto& s : streams) {
      for (const auto& r : s) {
        EXPECT_EQ(r.method, "GET");
        EXPECT_TRUE(r.request_body.empty());
        EXPECT_TRUE(std::regex_match(r.path, allowed)) << r.path;
      }
    }
    // Day 101 requests are identical within one segment (day 100 segments may
    // differ because that day's digests were different).
    for (std::size_t k = 1; k < streams.size(); ++k) {
      ASSERT_EQ(streams[k].size(), streams[0].size());
      for (std::size_t n = 0; n < streams[0].size(); ++n) {
        if (streams[0][n].path.find("/days/101/") == std::string::npos) continue;
        EXPECT_EQ(streams[k][n].path, streams[0][n].path);
        EXPECT_EQ(streams[k][n].response_bytes, streams[0][n].response_bytes);
      }
      ++compared;
    }
  }
  EXPECT_GT(compared, 10);

  // Across segments: replacing the segment index makes the streams equal.
  const auto a = stream(by_segment.begin()->second.front());
  const auto b = stream(std::next(by_segment.begin())->second.front());
  ASSERT_EQ(a.size(), b.size());
  const std::regex seg_index(R"(/segments/[0-9]+$)");
  for (std::size_t n = 0; n < a.size(); ++n)
    EXPECT_EQ(std::regex_replace(a[n].path, seg_index, "/segments/j"),
              std::regex_replace(b[n].path, seg_index, "/segments/j"));
}

TEST(ClientUniformity, PresentationNeedsNoIssuerRoundTrip) {
  Deployment d(9);
  const auto x = d.issue("alice");
  InProcessTransport inner(d.publisher);
  RecordingTransport rec(inner, "any");
  // The wallet has no transport at all; the verifier only reaches the publisher.
  const auto p = d.wallet.present(x.credential.vc_id, {DayIndex{100}}, {}, d.rng);
  EXPECT_TRUE(rec.records().empty());
  Client client(rec, &d.trust);
  actors::verifier_check(p, d.trust, client, DayIndex{100}, {}, d.rng);
  ASSERT_EQ(rec.records().size(), 3u);
  EXPECT_EQ(rec.records()[0].path, "/v1/params");
  EXPECT_EQ(rec.records()[2].path, "/v1/days/100/revocation");
}

TEST(Http, TransportEquivalence) {
  Deployment d(10);
  std::vector<Deployment::Held> held;
  for (int i = 0; i < 12; ++i) held.push_back(d.issue("h" + std::to_string(i)));
  for (int i = 0; i < 12; i += 3) d.issuer.revoke(held[i].credential.vc_id, {held[i].credential.vc_id}, DayIndex{100});
  d.issuer.rollover(DayIndex{102});

  HttpServer server(d.publisher);
  const int port = server.start("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  InProcessTransport local(d.publisher);
  HttpTransport http("127.0.0.1", port);

  auto run = [&](Transport& t) {
    Client client(t, &d.trust);
    std::vector<std::string> verdicts;
    for (const auto& h : held) {
      const auto p = d.wallet.present(h.credential.vc_id, {DayIndex{100}, DayIndex{101}, DayIndex{102}}, {}, d.rng);
      for (const auto& s : actors::verifier_check(p, d.trust, client, DayIndex{102}, {}, d.rng).days)
        verdicts.emplace_back(actors::verdict_name(s.verdict));
    }
    try {
      client.fetch_segment(DayIndex{50}, 0);
    } catch (const Error&) {
    }
    return std::pair{client.log(), verdicts};
  };
  const auto [local_log, local_verdicts] = run(local);
  const auto [http_log, http_verdicts] = run(http);
  EXPECT_EQ(http_log, local_log);
  EXPECT_EQ(http_verdicts, local_verdicts);
  EXPECT_EQ(std::count(local_verdicts.begin(), local_verdicts.end(), "Revoked"), 12);

  const auto raw = http.get("/v1/days/7/revocation");
  EXPECT_EQ(raw.status, 404);
  EXPECT_EQ(reason(raw), "day-not-archived");
  server.stop();
  EXPECT_EQ(code_of([&] { http.get("/v1/params"); }), Errc::io);
}

TEST(DirectoryStore, ServesArchiveFilesVerbatim) {
  const auto dir = fs::temp_directory_path() / ("revoca-dirstore-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  EXPECT_EQ(code_of([&] { DirectoryStore{dir}; }), Errc::io);
  fs::create_directories(DirectoryStore::snapshot_dir(dir));
  EXPECT_EQ(code_of([&] { DirectoryStore{dir}; }), Errc::io);

  Deployment d(11);
  d.issue("alice");
  tables::SnapshotArchive archive(DirectoryStore::snapshot_dir(dir));
  const auto [check, rev] = d.issuer.export_day();
  archive.store(check, rev);
  tables::write_file_atomic(DirectoryStore::params_file(dir), encode(d.params_doc));

  DirectoryStore store(dir);
  Publisher publisher(store);
  EXPECT_EQ(publisher.handle("GET", "/v1/params").body, tables::read_file(DirectoryStore::params_file(dir)));
  EXPECT_EQ(publisher.handle("GET", "/v1/days/100/revocation").body,
            tables::read_file(DirectoryStore::snapshot_dir(dir) / "revocation-100.snap"));
  EXPECT_EQ(tables::decode_check_segment(publisher.handle("GET", "/v1/days/100/check/segments/3").body),
            tables::segment_of(check, 3));
  EXPECT_EQ(reason(publisher.handle("GET", "/v1/days/101/revocation")), "day-not-archived");
  fs::remove_all(dir);
}

TEST(BindAddress, Parsing) {
  EXPECT_EQ(parse_bind_address("127.0.0.1:8080"), (std::pair<std::string, int>{"127.0.0.1", 8080}));
  EXPECT_EQ(parse_bind_address("localhost:0").second, 0);
  for (const char* bad : {"8080", ":80", "host:", "host:x", "host:70000", "host:-1"})
    EXPECT_EQ(code_of([&] { parse_bind_address(bad); }), Errc::usage) << bad;
}
