#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "revoca/ahibe.hpp"
#include "revoca/canonical.hpp"
#include "revoca/crypto.hpp"

namespace revoca::tables {

// d: revocation table size; c: check table buckets; sigma: check table
// segments (divides c); min_anonymity: target digests per segment.
struct TableParams {
  std::uint64_t d = 1024;
  std::uint64_t c = 1024;
  std::uint64_t sigma = 4;
  std::uint64_t min_anonymity = 256;

  // Throws Error(parameter).
  void validate() const;
  std::uint64_t buckets_per_segment() const { return c / sigma; }

  canonical::Value to_value() const;
  static TableParams from_value(const canonical::Value& v);
  friend bool operator==(const TableParams&, const TableParams&) = default;
};

// Largest divisor of c that still leaves at least min_anonymity expected
// digests per segment; 1 if the population is too small for any split.
std::uint64_t recommended_sigma(std::uint64_t c, std::uint64_t population, std::uint64_t min_anonymity);

using DigestBuckets = std::vector<std::vector<CheckDigest>>;

struct CheckTableSnapshot {
  DayIndex day;
  TableParams params;
  DigestBuckets buckets;  // c buckets, each sorted

  std::size_t digest_count() const;
  friend bool operator==(const CheckTableSnapshot&, const CheckTableSnapshot&) = default;
};

struct CheckSegment {
  DayIndex day;
  TableParams params;
  std::uint64_t segment_index = 0;
  DigestBuckets buckets;  // buckets [j*c/sigma, (j+1)*c/sigma)

  std::uint64_t first_bucket() const { return segment_index * params.buckets_per_segment(); }
  friend bool operator==(const CheckSegment&, const CheckSegment&) = default;
};

// Places each digest in check_bucket(digest, c); sorts and deduplicates.
CheckTableSnapshot build_check_table(std::span<const CheckDigest> digests, const TableParams& params, DayIndex day);

std::uint64_t segment_for_digest(const CheckDigest& digest, const TableParams& params);

// Throws Error(range) for j >= sigma.
CheckSegment segment_of(const CheckTableSnapshot& table, std::uint64_t j);

// Throws Error(range) if the digest's bucket lies outside the segment.
bool segment_contains(const CheckSegment& segment, const CheckDigest& digest);

enum class RevocationStatus { revoked, suspended, conditioned };

std::string_view status_name(RevocationStatus s);
RevocationStatus status_from_name(std::string_view name);  // throws Error(decode)

// Content-flexible status document. constraints is a free-form map (for
// example territorial or temporal conditions); an empty map means none.
struct RevocationDocument {
  VcId vc_id;
  RevocationStatus status = RevocationStatus::revoked;
  std::string reason;
  canonical::Value constraints = canonical::Value::object();
  DayIndex effective_from;
  std::uint64_t sequence = 0;

  canonical::Value to_value() const;
  static RevocationDocument from_value(const canonical::Value& v);
  friend bool operator==(const RevocationDocument&, const RevocationDocument&) = default;
};

// The associated data (root, day, vc_id) is not stored; the opener
// recomputes it.
struct RevocationEntry {
  ahibe::EncapHeader header;
  Bytes sealed_body;
  friend bool operator==(const RevocationEntry&, const RevocationEntry&) = default;
};

struct RevocationTableSnapshot {
  DayIndex day;
  TableParams params;
  std::vector<std::vector<RevocationEntry>> buckets;  // d overflow lists

  static RevocationTableSnapshot empty(const TableParams& params, DayIndex day);
  std::size_t entry_count() const;
  friend bool operator==(const RevocationTableSnapshot&, const RevocationTableSnapshot&) = default;
};

// Appends to the overflow list at index and returns the new version; pass an
// rvalue to avoid the copy. Throws Error(range) for index >= d.
RevocationTableSnapshot insert_revocation(RevocationTableSnapshot table, BucketIndex index, RevocationEntry entry);

Bytes revocation_associated_data(std::string_view root, DayIndex day, const VcId& vc_id);

// Randomised encapsulation to (root, day), document sealed under its key.
RevocationEntry seal_revocation(const ahibe::MasterPublicParams& mpp, std::string_view root, DayIndex day,
                                const RevocationDocument& doc, RandomSource& rng = system_random());

// Index x' of the bucket holding (root, day, digest) entries.
BucketIndex revocation_index(const ahibe::MasterPublicParams& mpp, std::string_view root, DayIndex day,
                             const CheckDigest& digest, std::uint64_t d);

// Opens every entry of the overflow list that dk and (root, day, vc_id)
// authenticate, sorted by sequence. Entries for other identities are skipped.
// Throws Error(range) for a bad index and Error(integrity) when an entry
// authenticates but its plaintext is malformed or names another credential.
std::vector<RevocationDocument> scan_bucket(const RevocationTableSnapshot& table, BucketIndex index,
                                            const ahibe::DayKey& dk, std::string_view root, DayIndex day,
                                            const VcId& vc_id);

// File and wire forms: canonical map {version, kind, day, params, buckets,
// sha256}. Decoders throw Error(corrupt_snapshot).
Bytes encode(const CheckTableSnapshot& s);
Bytes encode(const CheckSegment& s);
Bytes encode(const RevocationTableSnapshot& s);
CheckTableSnapshot decode_check_table(ByteView b);
CheckSegment decode_check_segment(ByteView b);
RevocationTableSnapshot decode_revocation_table(ByteView b);

std::string check_snapshot_name(DayIndex day);
std::string revocation_snapshot_name(DayIndex day);

// Atomic (write to temporary, rename). Throws Error(io).
void write_file_atomic(const std::filesystem::path& path, ByteView contents);
Bytes read_file(const std::filesystem::path& path);  // throws Error(io)

void write_snapshot(const CheckTableSnapshot& s, const std::filesystem::path& path);
void write_snapshot(const RevocationTableSnapshot& s, const std::filesystem::path& path);
CheckTableSnapshot read_check_snapshot(const std::filesystem::path& path);
RevocationTableSnapshot read_revocation_snapshot(const std::filesystem::path& path);

// Per-day snapshot files in one directory, pruned to a retention window.
class SnapshotArchive {
 public:
  explicit SnapshotArchive(std::filesystem::path dir, std::uint64_t retention_days = 30);

  void store(const CheckTableSnapshot& check, const RevocationTableSnapshot& revocation);
  bool has(DayIndex day) const;
  std::vector<DayIndex> days() const;
  // Drops days older than current - retention.
  void prune(DayIndex current);

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::uint64_t retention_days_;
};

}  // namespace revoca::tables
