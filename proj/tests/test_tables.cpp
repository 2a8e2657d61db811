#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "oracle/oracle.hpp"
#include "revoca/tables.hpp"
#include "support.hpp"

using namespace revoca;
using namespace revoca::tables;
using revoca::testing::code_of;
namespace fs = std::filesystem;

namespace {

CheckDigest digest_in_bucket(std::uint64_t bucket, RandomSource& rng) {
  auto d = rng.fixed<CheckDigest>();
  for (int i = 0; i < 8; ++i) d.bytes[i] = static_cast<std::uint8_t>(bucket >> (56 - 8 * i));
  return d;
}

std::vector<CheckDigest> random_digests(std::size_t n, RandomSource& rng) {
  std::vector<CheckDigest> out(n);
  for (auto& d : out) d = rng.fixed<CheckDigest>();
  return out;
}

std::size_t max_load(const auto& buckets) {
  std::size_t m = 0;
  for (const auto& b : buckets) m = std::max(m, b.size());
  return m;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("revoca-tables-" + std::to_string(::getpid()) + "-" +
                                        std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

RevocationDocument sample_doc(const VcId& id, std::uint64_t seq) {
  return {id, RevocationStatus::suspended, "lost device", canonical::Value{{"region", "EU"}}, DayIndex{3}, seq};
}

class TablesWithScheme : public ::testing::Test {
 protected:
  void SetUp() override {
    auto [p, s] = ahibe::setup(ahibe::SecurityLevel::test, rng_);
    mpp_ = p;
    msk_ = s;
  }
  ahibe::DayKey day_key(const std::string& root, DayIndex day) {
    return ahibe::delegate(ahibe::extract(msk_, root, rng_), day, rng_);
  }
  DeterministicRandom rng_{11};
  ahibe::MasterPublicParams mpp_;
  ahibe::MasterSecret msk_;
};

}  // namespace

TEST(TableParams, Validation) {
  TableParams{}.validate();
  TableParams{1, 1, 1, 1}.validate();
  EXPECT_EQ(code_of([] { TableParams{0, 1024, 4, 256}.validate(); }), Errc::parameter);
  EXPECT_EQ(code_of([] { TableParams{1024, 1024, 3, 256}.validate(); }), Errc::parameter);
  EXPECT_EQ(code_of([] { TableParams{1024, 4, 8, 256}.validate(); }), Errc::parameter);
  EXPECT_EQ(code_of([] { TableParams{1024, 0, 0, 256}.validate(); }), Errc::parameter);
  EXPECT_EQ(code_of([] { TableParams{1024, 1024, 4, 0}.validate(); }), Errc::parameter);
  EXPECT_EQ(TableParams::from_value(TableParams{7, 64, 8, 3}.to_value()), (TableParams{7, 64, 8, 3}));
}

TEST(TableParams, RecommendedSigma) {
  EXPECT_EQ(recommended_sigma(1024, 100, 256), 1u);
  EXPECT_EQ(recommended_sigma(1024, 1024, 256), 4u);
  EXPECT_EQ(recommended_sigma(1024, 1023, 256), 2u);
  EXPECT_EQ(recommended_sigma(1024, 10'000'000, 256), 1024u);
  EXPECT_EQ(recommended_sigma(1000, 2000, 256), 5u);
}

TEST(CheckTable, EmptyInputGivesEmptyBuckets) {
  const auto t = build_check_table({}, TableParams{}, DayIndex{5});
  EXPECT_EQ(t.buckets.size(), 1024u);
  EXPECT_EQ(t.digest_count(), 0u);
  EXPECT_EQ(t.day, DayIndex{5});
}

TEST(CheckTable, ZeroPrefixLandsInBucketZero) {
  DeterministicRandom rng(1);
  const auto d = digest_in_bucket(0, rng);
  const auto t = build_check_table(std::vector{d}, TableParams{16, 4, 1, 1}, DayIndex{1});
  ASSERT_EQ(t.buckets[0].size(), 1u);
  EXPECT_EQ(t.buckets[0][0], d);
}

TEST(CheckTable, SortedAndDeduplicated) {
  DeterministicRandom rng(2);
  auto digests = random_digests(3000, rng);
  digests.insert(digests.end(), digests.begin(), digests.begin() + 500);
  const auto t = build_check_table(digests, TableParams{16, 64, 4, 1}, DayIndex{1});
  EXPECT_EQ(t.digest_count(), 3000u);
  for (std::size_t i = 0; i < t.buckets.size(); ++i) {
    EXPECT_TRUE(std::is_sorted(t.buckets[i].begin(), t.buckets[i].end()));
    for (const auto& d : t.buckets[i]) EXPECT_EQ(crypto::check_bucket(d, 64).value, i);
  }
}

TEST(CheckTable, MaxLoadAgreesWithBallsIntoBinsSimulation) {
  // Independent simulation: 10,000 uniform balls into 1,024 bins.
  std::mt19937_64 gen(123);
  std::vector<std::size_t> maxima;
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<std::size_t> bins(1024);
    for (int i = 0; i < 10000; ++i) ++bins[gen() % 1024];
    maxima.push_back(*std::max_element(bins.begin(), bins.end()));
  }
  std::sort(maxima.begin(), maxima.end());
  const auto simulated_q999 = maxima[maxima.size() * 999 / 1000];
  ASSERT_LE(simulated_q999, 40u);

  DeterministicRandom rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = build_check_table(random_digests(10000, rng), TableParams{}, DayIndex{1});
    EXPECT_LE(max_load(t.buckets), 40u);
  }
}

TEST(Segments, IndexExamples) {
  DeterministicRandom rng(4);
  const TableParams p{1024, 1024, 16, 1};
  EXPECT_EQ(segment_for_digest(digest_in_bucket(0, rng), p), 0u);
  EXPECT_EQ(segment_for_digest(digest_in_bucket(1023, rng), p), 15u);
  EXPECT_EQ(segment_for_digest(digest_in_bucket(64, rng), p), 1u);
  EXPECT_EQ(segment_for_digest(digest_in_bucket(63, rng), p), 0u);
}

TEST(Segments, WrongSegmentIsRangeError) {
  DeterministicRandom rng(5);
  const TableParams p{1024, 1024, 16, 1};
  const auto t = build_check_table({}, p, DayIndex{1});
  const auto seg = segment_of(t, 3);
  EXPECT_EQ(seg.first_bucket(), 192u);
  EXPECT_EQ(code_of([&] { segment_contains(seg, digest_in_bucket(0, rng)); }), Errc::range);
  EXPECT_EQ(code_of([&] { segment_of(t, 16); }), Errc::range);
  EXPECT_FALSE(segment_contains(seg, digest_in_bucket(192, rng)));
}

TEST(SegmentsProperty, PartitionReconstructsMembership) {
  DeterministicRandom rng(6);
  for (std::uint64_t sigma : {1, 2, 16, 256}) {
    for (std::size_t n : {0, 1, 257, 10000}) {
      const TableParams p{1024, 1024, sigma, 1};
      const auto digests = random_digests(n, rng);
      const auto t = build_check_table(digests, p, DayIndex{9});
      std::vector<CheckSegment> segs;
      DigestBuckets concatenated;
      for (std::uint64_t j = 0; j < sigma; ++j) {
        segs.push_back(segment_of(t, j));
        ASSERT_EQ(segs.back().buckets.size(), 1024 / sigma);
        concatenated.insert(concatenated.end(), segs.back().buckets.begin(), segs.back().buckets.end());
      }
      ASSERT_EQ(concatenated, t.buckets);
      for (const auto& d : digests) ASSERT_TRUE(segment_contains(segs[segment_for_digest(d, p)], d));
      // Exhaustive over the segments: only inserted digests are members.
      std::set<CheckDigest> found;
      for (const auto& s : segs)
        for (const auto& b : s.buckets)
          for (const auto& d : b) {
            ASSERT_TRUE(segment_contains(s, d));
            found.insert(d);
          }
      ASSERT_EQ(found, std::set<CheckDigest>(digests.begin(), digests.end()));
      for (int i = 0; i < 100; ++i) {
        const auto other = rng.fixed<CheckDigest>();
        ASSERT_FALSE(segment_contains(segs[segment_for_digest(other, p)], other));
      }
    }
  }
}

TEST(RevocationTable, InsertExamples) {
  const TableParams p{8, 8, 1, 1};
  auto t = RevocationTableSnapshot::empty(p, DayIndex{1});
  const RevocationEntry a{{}, to_bytes("a")}, b{{}, to_bytes("b")};
  t = insert_revocation(std::move(t), BucketIndex{0}, a);
  EXPECT_EQ(t.buckets[0].size(), 1u);
  t = insert_revocation(std::move(t), BucketIndex{5}, a);
  t = insert_revocation(std::move(t), BucketIndex{5}, b);
  ASSERT_EQ(t.buckets[5].size(), 2u);
  EXPECT_EQ(t.buckets[5][0], a);
  EXPECT_EQ(t.buckets[5][1], b);
  EXPECT_EQ(t.entry_count(), 3u);
  EXPECT_EQ(code_of([&] { insert_revocation(t, BucketIndex{8}, a); }), Errc::range);
}

TEST_F(TablesWithScheme, SnapshotsAreImmutableValues) {
  const TableParams p{64, 64, 1, 1};
  auto t0 = RevocationTableSnapshot::empty(p, DayIndex{1});
  t0 = insert_revocation(std::move(t0), BucketIndex{1}, seal_revocation(mpp_, "a", DayIndex{1}, sample_doc({}, 1), rng_));
  const auto before = oracle::sha256(encode(t0));
  auto t = t0;
  for (int i = 0; i < 200; ++i)
    t = insert_revocation(t, BucketIndex{static_cast<std::uint64_t>(i % 64)},
                          seal_revocation(mpp_, "r", DayIndex{1}, sample_doc({}, i), rng_));
  EXPECT_EQ(oracle::sha256(encode(t0)), before);
  EXPECT_EQ(t0.entry_count(), 1u);
  EXPECT_EQ(t.entry_count(), 201u);
}

TEST_F(TablesWithScheme, ScanExamples) {
  const TableParams p{16, 16, 1, 1};
  const DayIndex day{30};
  const auto vc = rng_.fixed<VcId>();
  const auto dk = day_key("alice", day);
  auto t = RevocationTableSnapshot::empty(p, day);
  EXPECT_TRUE(scan_bucket(t, BucketIndex{3}, dk, "alice", day, vc).empty());
  EXPECT_EQ(code_of([&] { scan_bucket(t, BucketIndex{16}, dk, "alice", day, vc); }), Errc::range);

  // Entries for other identities only.
  t = insert_revocation(std::move(t), BucketIndex{3}, seal_revocation(mpp_, "bob", day, sample_doc(vc, 1), rng_));
  t = insert_revocation(std::move(t), BucketIndex{3},
                        seal_revocation(mpp_, "alice", DayIndex{31}, sample_doc(vc, 2), rng_));
  EXPECT_TRUE(scan_bucket(t, BucketIndex{3}, dk, "alice", day, vc).empty());

  const auto mine = sample_doc(vc, 7);
  const auto earlier = sample_doc(vc, 4);
  t = insert_revocation(std::move(t), BucketIndex{3}, seal_revocation(mpp_, "alice", day, mine, rng_));
  t = insert_revocation(std::move(t), BucketIndex{3}, seal_revocation(mpp_, "alice", day, earlier, rng_));
  const auto found = scan_bucket(t, BucketIndex{3}, dk, "alice", day, vc);
  ASSERT_EQ(found.size(), 2u);
  EXPECT_EQ(found[0], earlier);
  EXPECT_EQ(found[1], mine);
}

TEST_F(TablesWithScheme, ScanSoundnessAgainstCollidingEntriesForOtherCredentials) {
  // Same holder, same day, same bucket, different VC: associated data keeps
  // them apart, so scanning for one VC never yields the other's document.
  const TableParams p{4, 4, 1, 1};
  const DayIndex day{8};
  const auto dk = day_key("holder", day);
  for (int trial = 0; trial < 200; ++trial) {
    const auto target = rng_.fixed<VcId>();
    auto t = RevocationTableSnapshot::empty(p, day);
    std::vector<VcId> others;
    for (int i = 0; i < 5; ++i) {
      others.push_back(rng_.fixed<VcId>());
      t = insert_revocation(std::move(t), BucketIndex{0}, seal_revocation(mpp_, "holder", day, sample_doc(others.back(), i), rng_));
    }
    ASSERT_TRUE(scan_bucket(t, BucketIndex{0}, dk, "holder", day, target).empty());
    for (const auto& o : others) {
      auto docs = scan_bucket(t, BucketIndex{0}, dk, "holder", day, o);
      ASSERT_EQ(docs.size(), 1u);
      ASSERT_EQ(docs[0].vc_id, o);
    }
  }
}

TEST_F(TablesWithScheme, AuthenticatedGarbageIsIntegrityError) {
  const DayIndex day{2};
  const auto vc = rng_.fixed<VcId>();
  const auto dk = day_key("alice", day);
  const auto ad = revocation_associated_data("alice", day, vc);
  auto forge = [&](Bytes plaintext) {
    auto enc = ahibe::encap(mpp_, dk.identity, rng_);
    auto t = RevocationTableSnapshot::empty(TableParams{2, 2, 1, 1}, day);
    return insert_revocation(std::move(t), BucketIndex{1}, {enc.header, crypto::seal(enc.key, plaintext, ad, rng_)});
  };
  auto t = forge(to_bytes("not a document"));
  EXPECT_EQ(code_of([&] { scan_bucket(t, BucketIndex{1}, dk, "alice", day, vc); }), Errc::integrity);
  // well-formed, but names another credential
  t = forge(canonical::encode(sample_doc(rng_.fixed<VcId>(), 1).to_value()));
  EXPECT_EQ(code_of([&] { scan_bucket(t, BucketIndex{1}, dk, "alice", day, vc); }), Errc::integrity);
}

TEST_F(TablesWithScheme, SnapshotRoundTrips) {
  const TableParams p{64, 64, 4, 1};
  const auto empty = RevocationTableSnapshot::empty(p, DayIndex{4});
  EXPECT_EQ(decode_revocation_table(encode(empty)), empty);

  auto big = empty;
  for (int i = 0; i < 1000; ++i) {
    const auto root = "h" + std::to_string(i % 37);
    big = insert_revocation(std::move(big), BucketIndex{rng_.fixed<VcId>().bytes[0] % 64ull},
                            seal_revocation(mpp_, root, DayIndex{4}, sample_doc(rng_.fixed<VcId>(), i), rng_));
  }
  EXPECT_EQ(decode_revocation_table(encode(big)), big);

  const auto check = build_check_table(random_digests(1000, rng_), p, DayIndex{4});
  EXPECT_EQ(decode_check_table(encode(check)), check);
  for (std::uint64_t j = 0; j < 4; ++j) EXPECT_EQ(decode_check_segment(encode(segment_of(check, j))), segment_of(check, j));

  TempDir dir;
  write_snapshot(big, dir.path / "r.snap");
  write_snapshot(check, dir.path / "c.snap");
  EXPECT_EQ(read_revocation_snapshot(dir.path / "r.snap"), big);
  EXPECT_EQ(read_check_snapshot(dir.path / "c.snap"), check);
  EXPECT_EQ(code_of([&] { read_check_snapshot(dir.path / "absent.snap"); }), Errc::io);
}

TEST_F(TablesWithScheme, FileFormatAndContentDigest) {
  const auto check = build_check_table(random_digests(20, rng_), TableParams{8, 8, 2, 1}, DayIndex{12});
  const auto bytes = encode(check);
  auto v = canonical::decode(bytes);
  std::vector<std::string> keys;
  for (const auto& [k, _] : v.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"buckets", "day", "kind", "params", "sha256", "version"}));
  EXPECT_EQ(v["version"], "1");
  EXPECT_EQ(v["kind"], "check");
  const auto claimed = v["sha256"].get<std::string>();
  v.erase("sha256");
  EXPECT_EQ(claimed, oracle::to_hex(oracle::sha256(canonical::encode(v))));
  EXPECT_EQ(check_snapshot_name(DayIndex{12}), "check-12.snap");
  EXPECT_EQ(revocation_snapshot_name(DayIndex{12}), "revocation-12.snap");
  EXPECT_EQ(code_of([&] { decode_revocation_table(bytes); }), Errc::corrupt_snapshot);
}

TEST_F(TablesWithScheme, AnyFlippedByteIsCorruptSnapshot) {
  auto t = RevocationTableSnapshot::empty(TableParams{4, 4, 1, 1}, DayIndex{1});
  t = insert_revocation(std::move(t), BucketIndex{2}, seal_revocation(mpp_, "x", DayIndex{1}, sample_doc({}, 1), rng_));
  const auto good = encode(t);
  const auto check = encode(build_check_table(random_digests(10, rng_), TableParams{4, 4, 1, 1}, DayIndex{1}));
  for (std::size_t i = 0; i < good.size(); ++i) {
    auto bad = good;
    bad[i] ^= 0x01;
    ASSERT_EQ(code_of([&] { decode_revocation_table(bad); }), Errc::corrupt_snapshot) << i;
  }
  for (std::size_t i = 0; i < check.size(); ++i) {
    auto bad = check;
    bad[i] ^= 0x20;
    ASSERT_EQ(code_of([&] { decode_check_table(bad); }), Errc::corrupt_snapshot) << i;
  }
  TempDir dir;
  write_snapshot(t, dir.path / "r.snap");
  {
    std::fstream f(dir.path / "r.snap", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(40);
    f.put('~');
  }
  EXPECT_EQ(code_of([&] { read_revocation_snapshot(dir.path / "r.snap"); }), Errc::corrupt_snapshot);
}

TEST_F(TablesWithScheme, LoadFactorWithinPoissonTail) {
  // Both tables, 50 instances each, n = m entries.
  const std::uint64_t m = 1024, n = 1024;
  const auto bound = revoca::testing::poisson_max_bound(double(n) / m, m, 0.999);
  for (int instance = 0; instance < 50; ++instance) {
    const TableParams p{m, m, 1, 1};
    const DayIndex day{static_cast<std::uint64_t>(instance)};
    auto rev = RevocationTableSnapshot::empty(p, day);
    const auto digests = random_digests(n, rng_);
    for (std::uint64_t i = 0; i < n; ++i)
      rev = insert_revocation(std::move(rev), revocation_index(mpp_, "holder-" + std::to_string(i), day, digests[i], m), {});
    const auto check = build_check_table(digests, p, day);
    EXPECT_DOUBLE_EQ(double(rev.entry_count()) / m, double(n) / m);
    EXPECT_DOUBLE_EQ(double(check.digest_count()) / m, double(n) / m);
    EXPECT_LE(max_load(rev.buckets), bound) << instance;
    EXPECT_LE(max_load(check.buckets), bound) << instance;
  }
}

TEST(Archive, StorePruneAndDays) {
  TempDir dir;
  const TableParams p{4, 4, 1, 1};
  SnapshotArchive archive(dir.path, 30);
  for (std::uint64_t day = 1; day <= 40; ++day)
    archive.store(build_check_table({}, p, DayIndex{day}), RevocationTableSnapshot::empty(p, DayIndex{day}));
  EXPECT_EQ(archive.days().size(), 40u);
  archive.prune(DayIndex{40});
  const auto days = archive.days();
  ASSERT_EQ(days.size(), 31u);
  EXPECT_EQ(days.front(), DayIndex{10});
  EXPECT_EQ(days.back(), DayIndex{40});
  EXPECT_FALSE(archive.has(DayIndex{9}));
  EXPECT_FALSE(fs::exists(dir.path / "check-9.snap"));
  EXPECT_TRUE(fs::exists(dir.path / "revocation-10.snap"));
  // half a pair does not count as an archived day
  fs::remove(dir.path / "check-20.snap");
  EXPECT_FALSE(archive.has(DayIndex{20}));
  EXPECT_EQ(archive.days().size(), 30u);
}
