#include "revoca/tables.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <system_error>
#include <unistd.h>

#include "revoca/errors.hpp"

namespace revoca::tables {

namespace fs = std::filesystem;
using canonical::Value;

void TableParams::validate() const {
  if (d == 0) throw Error(Errc::parameter, "d must be at least 1");
  if (c == 0 || sigma == 0) throw Error(Errc::parameter, "c and sigma must be at least 1");
  if (c < sigma) throw Error(Errc::parameter, "c must be at least sigma");
  if (c % sigma != 0) throw Error(Errc::parameter, "sigma must divide c");
  if (min_anonymity == 0) throw Error(Errc::parameter, "min_anonymity must be at least 1");
}

Value TableParams::to_value() const {
  return {{"c", c}, {"d", d}, {"min_anonymity", min_anonymity}, {"sigma", sigma}};
}

TableParams TableParams::from_value(const Value& v) {
  TableParams p{canonical::uint_field(v, "d"), canonical::uint_field(v, "c"), canonical::uint_field(v, "sigma"),
                canonical::uint_field(v, "min_anonymity")};
  p.validate();
  return p;
}

std::uint64_t recommended_sigma(std::uint64_t c, std::uint64_t population, std::uint64_t min_anonymity) {
  std::uint64_t best = 1;
  for (std::uint64_t s = 1; s <= c; ++s) {
    if (c % s != 0) continue;
    if (min_anonymity * s > population) break;
    best = s;
  }
  return best;
}

std::size_t CheckTableSnapshot::digest_count() const {
  std::size_t n = 0;
  for (const auto& b : buckets) n += b.size();
  return n;
}

CheckTableSnapshot build_check_table(std::span<const CheckDigest> digests, const TableParams& params, DayIndex day) {
  params.validate();
  CheckTableSnapshot table{day, params, DigestBuckets(params.c)};
  for (const auto& digest : digests) table.buckets[crypto::check_bucket(digest, params.c).value].push_back(digest);
  for (auto& bucket : table.buckets) {
    std::sort(bucket.begin(), bucket.end());
    bucket.erase(std::unique(bucket.begin(), bucket.end()), bucket.end());
  }
  return table;
}

std::uint64_t segment_for_digest(const CheckDigest& digest, const TableParams& params) {
  return crypto::check_bucket(digest, params.c).value / params.buckets_per_segment();
}

CheckSegment segment_of(const CheckTableSnapshot& table, std::uint64_t j) {
  if (j >= table.params.sigma) throw Error(Errc::range, "segment index out of range");
  const auto width = table.params.buckets_per_segment();
  auto first = table.buckets.begin() + static_cast<std::ptrdiff_t>(j * width);
  return {table.day, table.params, j, DigestBuckets(first, first + static_cast<std::ptrdiff_t>(width))};
}

bool segment_contains(const CheckSegment& segment, const CheckDigest& digest) {
  const auto bucket = crypto::check_bucket(digest, segment.params.c).value;
  const auto first = segment.first_bucket();
  if (bucket < first || bucket >= first + segment.buckets.size())
    throw Error(Errc::range, "digest belongs to another segment");
  const auto& list = segment.buckets[bucket - first];
  return std::binary_search(list.begin(), list.end(), digest);
}

std::string_view status_name(RevocationStatus s) {
  switch (s) {
    case RevocationStatus::revoked: return "revoked";
    case RevocationStatus::suspended: return "suspended";
    case RevocationStatus::conditioned: return "conditioned";
  }
  return "revoked";
}

RevocationStatus status_from_name(std::string_view name) {
  if (name == "revoked") return RevocationStatus::revoked;
  if (name == "suspended") return RevocationStatus::suspended;
  if (name == "conditioned") return RevocationStatus::conditioned;
  throw Error(Errc::decode, "unknown revocation status '" + std::string(name) + "'");
}

Value RevocationDocument::to_value() const {
  Value v = {{"effective_from", effective_from.value},
             {"reason", reason},
             {"sequence", sequence},
             {"status", status_name(status)},
             {"vc_id", vc_id.hex()}};
  if (!constraints.empty()) v["constraints"] = constraints;
  return v;
}

RevocationDocument RevocationDocument::from_value(const Value& v) {
  RevocationDocument doc;
  doc.vc_id = VcId::from_hex(canonical::text_field(v, "vc_id"));
  doc.status = status_from_name(canonical::text_field(v, "status"));
  doc.reason = canonical::text_field(v, "reason");
  doc.effective_from = DayIndex{canonical::uint_field(v, "effective_from")};
  doc.sequence = canonical::uint_field(v, "sequence");
  if (v.contains("constraints")) {
    doc.constraints = v.at("constraints");
    if (!doc.constraints.is_object()) throw Error(Errc::decode, "constraints must be a map");
  }
  return doc;
}

RevocationTableSnapshot RevocationTableSnapshot::empty(const TableParams& params, DayIndex day) {
  params.validate();
  return {day, params, std::vector<std::vector<RevocationEntry>>(params.d)};
}

std::size_t RevocationTableSnapshot::entry_count() const {
  std::size_t n = 0;
  for (const auto& b : buckets) n += b.size();
  return n;
}

RevocationTableSnapshot insert_revocation(RevocationTableSnapshot table, BucketIndex index, RevocationEntry entry) {
  if (index.value >= table.buckets.size()) throw Error(Errc::range, "revocation index out of range");
  table.buckets[index.value].push_back(std::move(entry));
  return table;
}

Bytes revocation_associated_data(std::string_view root, DayIndex day, const VcId& vc_id) {
  return canonical::encode(Value{{"day", day.value}, {"root", root}, {"vc_id", vc_id.hex()}});
}

RevocationEntry seal_revocation(const ahibe::MasterPublicParams& mpp, std::string_view root, DayIndex day,
                                const RevocationDocument& doc, RandomSource& rng) {
  auto enc = ahibe::encap(mpp, ahibe::IdentityPath::for_day(std::string(root), day), rng);
  auto body = crypto::seal(enc.key, canonical::encode(doc.to_value()),
                           revocation_associated_data(root, day, doc.vc_id), rng);
  return {std::move(enc.header), std::move(body)};
}

BucketIndex revocation_index(const ahibe::MasterPublicParams& mpp, std::string_view root, DayIndex day,
                             const CheckDigest& digest, std::uint64_t d) {
  auto enc = ahibe::det_encap(mpp, ahibe::IdentityPath::for_day(std::string(root), day), digest.view());
  return crypto::index_from_ciphertext(enc.header.serialize(), d);
}

std::vector<RevocationDocument> scan_bucket(const RevocationTableSnapshot& table, BucketIndex index,
                                            const ahibe::DayKey& dk, std::string_view root, DayIndex day,
                                            const VcId& vc_id) {
  if (index.value >= table.buckets.size()) throw Error(Errc::range, "revocation index out of range");
  const auto ad = revocation_associated_data(root, day, vc_id);
  std::vector<RevocationDocument> found;
  for (const auto& entry : table.buckets[index.value]) {
    std::optional<Bytes> plain;
    try {
      plain = crypto::open(entry.sealed_body, ahibe::decap(dk, entry.header), ad);
    } catch (const Error& e) {
      if (e.code() != Errc::decode) throw;
      continue;  // header of another scheme or malformed: not ours
    }
    if (!plain) continue;
    RevocationDocument doc;
    try {
      doc = RevocationDocument::from_value(canonical::decode(*plain));
    } catch (const Error& e) {
      throw Error(Errc::integrity, std::string("authenticated revocation entry is malformed: ") + e.what());
    }
    if (doc.vc_id != vc_id) throw Error(Errc::integrity, "authenticated revocation entry names another credential");
    found.push_back(std::move(doc));
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const auto& a, const auto& b) { return a.sequence < b.sequence; });
  return found;
}

namespace {

constexpr std::string_view kVersion = "1";

Value digest_buckets_value(const DigestBuckets& buckets) {
  Value out = Value::array();
  for (const auto& bucket : buckets) {
    Value list = Value::array();
    for (const auto& d : bucket) list.push_back(to_base64url(d.view()));
    out.push_back(std::move(list));
  }
  return out;
}

DigestBuckets digest_buckets_from(const Value& v) {
  if (!v.is_array()) throw Error(Errc::decode, "buckets must be a list");
  DigestBuckets out;
  out.reserve(v.size());
  for (const auto& list : v) {
    if (!list.is_array()) throw Error(Errc::decode, "bucket must be a list");
    auto& bucket = out.emplace_back();
    for (const auto& d : list) bucket.push_back(CheckDigest::from(from_base64url(canonical::as_text(d, "digest"))));
  }
  return out;
}

Bytes seal_document(Value body) {
  body["version"] = kVersion;
  auto digest = crypto::sha256(canonical::encode(body));
  body["sha256"] = to_hex(digest);
  return canonical::encode(body);
}

// Parses, checks version/kind and the content digest.
Value open_document(ByteView b, std::string_view kind) {
  Value v;
  try {
    v = canonical::decode(b);
    auto claimed = canonical::text_field(v, "sha256");
    Value body = v;
    body.erase("sha256");
    if (to_hex(crypto::sha256(canonical::encode(body))) != claimed)
      throw Error(Errc::corrupt_snapshot, "content digest mismatch");
    if (canonical::text_field(v, "version") != kVersion) throw Error(Errc::corrupt_snapshot, "unsupported version");
    if (canonical::text_field(v, "kind") != kind) throw Error(Errc::corrupt_snapshot, "unexpected snapshot kind");
  } catch (const Error& e) {
    if (e.code() == Errc::corrupt_snapshot) throw;
    throw Error(Errc::corrupt_snapshot, e.what());
  }
  return v;
}

template <class F>
auto as_corrupt(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == Errc::corrupt_snapshot) throw;
    throw Error(Errc::corrupt_snapshot, e.what());
  }
}

}  // namespace

Bytes encode(const CheckTableSnapshot& s) {
  return seal_document({{"buckets", digest_buckets_value(s.buckets)},
                        {"day", s.day.value},
                        {"kind", "check"},
                        {"params", s.params.to_value()}});
}

Bytes encode(const CheckSegment& s) {
  return seal_document({{"buckets", digest_buckets_value(s.buckets)},
                        {"day", s.day.value},
                        {"kind", "check-segment"},
                        {"params", s.params.to_value()},
                        {"segment", s.segment_index}});
}

Bytes encode(const RevocationTableSnapshot& s) {
  Value buckets = Value::array();
  for (const auto& bucket : s.buckets) {
    Value list = Value::array();
    for (const auto& e : bucket)
      list.push_back({{"body", to_base64url(e.sealed_body)}, {"header", ahibe::to_value(e.header)}});
    buckets.push_back(std::move(list));
  }
  return seal_document(
      {{"buckets", std::move(buckets)}, {"day", s.day.value}, {"kind", "revocation"}, {"params", s.params.to_value()}});
}

CheckTableSnapshot decode_check_table(ByteView b) {
  auto v = open_document(b, "check");
  return as_corrupt([&] {
    CheckTableSnapshot s{DayIndex{canonical::uint_field(v, "day")}, TableParams::from_value(canonical::field(v, "params")),
                         digest_buckets_from(canonical::field(v, "buckets"))};
    if (s.buckets.size() != s.params.c) throw Error(Errc::corrupt_snapshot, "bucket count differs from c");
    for (std::size_t i = 0; i < s.buckets.size(); ++i)
      for (const auto& d : s.buckets[i])
        if (crypto::check_bucket(d, s.params.c).value != i)
          throw Error(Errc::corrupt_snapshot, "digest stored in the wrong bucket");
    return s;
  });
}

CheckSegment decode_check_segment(ByteView b) {
  auto v = open_document(b, "check-segment");
  return as_corrupt([&] {
    CheckSegment s{DayIndex{canonical::uint_field(v, "day")}, TableParams::from_value(canonical::field(v, "params")),
                   canonical::uint_field(v, "segment"), digest_buckets_from(canonical::field(v, "buckets"))};
    if (s.segment_index >= s.params.sigma || s.buckets.size() != s.params.buckets_per_segment())
      throw Error(Errc::corrupt_snapshot, "segment shape does not match params");
    return s;
  });
}

RevocationTableSnapshot decode_revocation_table(ByteView b) {
  auto v = open_document(b, "revocation");
  return as_corrupt([&] {
    RevocationTableSnapshot s{DayIndex{canonical::uint_field(v, "day")},
                              TableParams::from_value(canonical::field(v, "params")), {}};
    const auto& buckets = canonical::field(v, "buckets");
    if (!buckets.is_array() || buckets.size() != s.params.d)
      throw Error(Errc::corrupt_snapshot, "bucket count differs from d");
    s.buckets.reserve(buckets.size());
    for (const auto& list : buckets) {
      if (!list.is_array()) throw Error(Errc::decode, "bucket must be a list");
      auto& bucket = s.buckets.emplace_back();
      for (const auto& e : list)
        bucket.push_back({ahibe::header_from_value(canonical::field(e, "header")), canonical::bytes_field(e, "body")});
    }
    return s;
  });
}

std::string check_snapshot_name(DayIndex day) { return "check-" + std::to_string(day.value) + ".snap"; }
std::string revocation_snapshot_name(DayIndex day) { return "revocation-" + std::to_string(day.value) + ".snap"; }

void write_file_atomic(const fs::path& path, ByteView contents) {
  auto tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(contents.data()), static_cast<std::streamsize>(contents.size()));
    if (!out.flush()) throw Error(Errc::io, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(Errc::io, "cannot rename into " + path.string() + ": " + ec.message());
}

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot read " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_snapshot(const CheckTableSnapshot& s, const fs::path& path) { write_file_atomic(path, encode(s)); }
void write_snapshot(const RevocationTableSnapshot& s, const fs::path& path) { write_file_atomic(path, encode(s)); }
CheckTableSnapshot read_check_snapshot(const fs::path& path) { return decode_check_table(read_file(path)); }
RevocationTableSnapshot read_revocation_snapshot(const fs::path& path) {
  return decode_revocation_table(read_file(path));
}

SnapshotArchive::SnapshotArchive(fs::path dir, std::uint64_t retention_days)
    : dir_(std::move(dir)), retention_days_(retention_days) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error(Errc::io, "cannot create archive directory " + dir_.string());
}

void SnapshotArchive::store(const CheckTableSnapshot& check, const RevocationTableSnapshot& revocation) {
  if (check.day != revocation.day) throw Error(Errc::parameter, "snapshot days differ");
  // Revocation first: a day is "present" once its check table exists.
  write_snapshot(revocation, dir_ / revocation_snapshot_name(revocation.day));
  write_snapshot(check, dir_ / check_snapshot_name(check.day));
}

bool SnapshotArchive::has(DayIndex day) const {
  return fs::exists(dir_ / check_snapshot_name(day)) && fs::exists(dir_ / revocation_snapshot_name(day));
}

std::vector<DayIndex> SnapshotArchive::days() const {
  std::vector<DayIndex> out;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    auto name = entry.path().filename().string();
    if (name.rfind("check-", 0) != 0 || !name.ends_with(".snap")) continue;
    auto digits = name.substr(6, name.size() - 6 - 5);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) continue;
    DayIndex day{std::stoull(digits)};
    if (has(day)) out.push_back(day);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void SnapshotArchive::prune(DayIndex current) {
  for (auto day : days()) {
    if (day.value + retention_days_ >= current.value) continue;
    fs::remove(dir_ / check_snapshot_name(day));
    fs::remove(dir_ / revocation_snapshot_name(day));
  }
}

}  // namespace revoca::tables
