#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "revoca/ahibe.hpp"
#include "revoca/canonical.hpp"
#include "revoca/crypto.hpp"
#include "revoca/tables.hpp"

// The four protocol roles: PKG, Issuer, Holder wallet and Verifier.
namespace revoca::actors {

struct VerifiableCredential {
  VcId vc_id;
  std::string root;  // pseudonymous AHIBE root identity of the holder
  DayIndex issued_day;
  DayIndex expiry_day;
  canonical::Value claims = canonical::Value::object();
  VerifyKey pop_public_key;
  std::string issuer_id;
  Signature issuer_signature;

  // Canonical bytes of every field except the signature.
  Bytes signed_bytes() const;
  bool valid_on(DayIndex day) const { return issued_day <= day && day <= expiry_day; }

  canonical::Value to_value() const;
  static VerifiableCredential from_value(const canonical::Value& v);
  friend bool operator==(const VerifiableCredential&, const VerifiableCredential&) = default;
};

// ---------------------------------------------------------------------------
// PKG

std::pair<ahibe::MasterPublicParams, ahibe::MasterSecret> pkg_setup(ahibe::SecurityLevel level,
                                                                    RandomSource& rng = system_random());
ahibe::HolderKey pkg_extract(const ahibe::MasterSecret& msk, std::string_view root,
                             RandomSource& rng = system_random());

// ---------------------------------------------------------------------------
// Issuer

struct PublishedDocument {
  tables::RevocationDocument document;
  DayIndex published_day;
};

struct RegistryRecord {
  std::string root;
  Seed seed;
  DayIndex issued_day;
  DayIndex expiry_day;
  std::vector<PublishedDocument> documents;

  bool active_on(DayIndex day) const { return issued_day <= day && day <= expiry_day; }
};

struct IssuerState {
  std::string issuer_id;
  SigningKeyPair signing_key;
  ahibe::MasterPublicParams mpp;
  tables::TableParams params;
  DayIndex current_day;
  std::map<VcId, RegistryRecord> registry;

  canonical::Value to_value() const;
  static IssuerState from_value(const canonical::Value& v);
};

struct IssuedCredential {
  VerifiableCredential credential;
  Seed seed;
};

// Receives every day's snapshots as they are (re)published.
using PublishHook = std::function<void(const tables::CheckTableSnapshot&, const tables::RevocationTableSnapshot&)>;

class Issuer {
 public:
  // Throws Error(parameter) for invalid table params.
  static Issuer init(std::string issuer_id, ahibe::MasterPublicParams mpp, tables::TableParams params, DayIndex day,
                     RandomSource& rng = system_random());

  // Resumes from persisted state. Published tables for the current day are
  // reused when they agree with the registry, otherwise rebuilt from it.
  static Issuer restore(IssuerState state, std::optional<tables::CheckTableSnapshot> check = std::nullopt,
                        std::optional<tables::RevocationTableSnapshot> revocation = std::nullopt,
                        RandomSource& rng = system_random());

  void set_publish_hook(PublishHook hook);

  // The returned pair is the only Issuer-to-Holder message the protocol needs.
  // The new credential's digest appears in the current day's check table.
  // Throws Error(parameter) if expiry_day < current day.
  IssuedCredential issue(std::string root, canonical::Value claims, DayIndex expiry_day, const VerifyKey& pop_public_key);

  // Publishes doc for the current day and returns the bucket it went into.
  // A zero sequence is replaced by the next free one. Throws
  // Error(unknown_credential), or Error(parameter) on day/vc_id mismatch,
  // inactive credential or non-increasing sequence.
  BucketIndex revoke(const VcId& vc_id, tables::RevocationDocument doc, DayIndex day);

  // Advances day by day up to new_day, rebuilding both tables each day.
  // Throws Error(parameter) unless new_day > current day.
  void rollover(DayIndex new_day);

  std::pair<tables::CheckTableSnapshot, tables::RevocationTableSnapshot> export_day() const { return {check_, revocation_}; }

  const IssuerState& state() const { return state_; }
  DayIndex current_day() const { return state_.current_day; }
  const VerifyKey& public_key() const { return state_.signing_key.public_key; }

 private:
  Issuer(IssuerState state, RandomSource& rng) : state_(std::move(state)), rng_(&rng) {}

  void rebuild();
  void publish() const;

  IssuerState state_;
  RandomSource* rng_;
  tables::CheckTableSnapshot check_;
  tables::RevocationTableSnapshot revocation_;
  PublishHook hook_;
};

// Issuer-side computation of the digest a credential contributes on day.
CheckDigest credential_digest(const RegistryRecord& record, const VcId& vc_id, DayIndex day);

// ---------------------------------------------------------------------------
// Trust store: issuer_id -> signature key, standing in for a PKI.

class TrustStore {
 public:
  void add(std::string issuer_id, const VerifyKey& key) { keys_[std::move(issuer_id)] = key; }
  std::optional<VerifyKey> find(const std::string& issuer_id) const;

  canonical::Value to_value() const;
  static TrustStore from_value(const canonical::Value& v);

 private:
  std::map<std::string, VerifyKey> keys_;
};

// ---------------------------------------------------------------------------
// Holder

struct TemporalAuthorization {
  DayIndex day;
  DayToken day_token;
  ahibe::DayKey day_key;
  friend bool operator==(const TemporalAuthorization&, const TemporalAuthorization&) = default;
};

using Nonce = FixedBytes<16, struct NonceTag>;

struct Presentation {
  VerifiableCredential credential;
  Nonce nonce;
  Signature pop_signature;
  std::vector<TemporalAuthorization> authorizations;

  canonical::Value to_value() const;
  static Presentation from_value(const canonical::Value& v);
  friend bool operator==(const Presentation&, const Presentation&) = default;
};

// Bytes signed by the proof of possession.
Bytes possession_message(const VcId& vc_id, const Nonce& nonce);

struct WalletRecord {
  VerifiableCredential credential;
  Seed seed;
  SigningKey pop_signing_key;
};

class Wallet {
 public:
  // Throws Error(rejection) if the issuer signature does not verify, the
  // root does not match the holder key or the PoP key does not match.
  void store(VerifiableCredential credential, const Seed& seed, ahibe::HolderKey holder_key,
             const SigningKey& pop_signing_key, const VerifyKey& issuer_key);

  // One authorization per requested day, past or future. Throws
  // Error(unknown_credential), or Error(precondition) for a day outside the
  // credential's validity or an empty day list.
  Presentation present(const VcId& vc_id, const std::vector<DayIndex>& days, const Nonce& nonce,
                       RandomSource& rng = system_random()) const;

  // Scans the holder's own bucket of a revocation table. Throws
  // Error(precondition) if snapshot.day != day.
  std::vector<tables::RevocationDocument> audit(const VcId& vc_id, DayIndex day,
                                                const tables::RevocationTableSnapshot& snapshot,
                                                const ahibe::MasterPublicParams& mpp,
                                                RandomSource& rng = system_random()) const;

  const WalletRecord& record(const VcId& vc_id) const;
  std::vector<VcId> credentials() const;

  canonical::Value to_value() const;
  static Wallet from_value(const canonical::Value& v);

 private:
  std::map<VcId, WalletRecord> records_;
  std::map<std::string, ahibe::HolderKey> holder_keys_;
};

// ---------------------------------------------------------------------------
// Verifier

template <class T>
struct Fetched {
  T value;
  std::uint64_t bytes = 0;
};

// Where the Verifier obtains public data. Past days come from the archive;
// std::nullopt means the day is not available.
class TableSource {
 public:
  virtual ~TableSource() = default;
  virtual const ahibe::MasterPublicParams& master_params() = 0;
  virtual const tables::TableParams& table_params() = 0;
  virtual std::optional<Fetched<tables::CheckSegment>> check_segment(DayIndex day, std::uint64_t j) = 0;
  virtual std::optional<Fetched<tables::RevocationTableSnapshot>> revocation_table(DayIndex day) = 0;
};

enum class Verdict { no_revocation_found, revoked, deferred };

std::string_view verdict_name(Verdict v);

struct DayStatus {
  DayIndex day;
  Verdict verdict = Verdict::no_revocation_found;
  std::vector<tables::RevocationDocument> documents;  // non-empty iff revoked
};

struct StatusResult {
  std::vector<DayStatus> days;
  std::uint64_t segment_bytes = 0;
  std::uint64_t table_bytes = 0;

  bool any_revoked() const;
  canonical::Value to_value() const;
};

struct CheckOptions {
  std::optional<Nonce> expected_nonce;
};

// Per authorization: key probe, check digest lookup in one segment, then the
// overflow list of the revocation table. Authorizations for days after
// current_day pass the key probe and are reported as deferred. Throws on the
// first failure: Error(bad_signature), Error(bad_proof_of_possession),
// Error(key_probe_failed), Error(check_digest_not_found),
// Error(snapshot_unavailable), Error(rejection) for an empty presentation.
StatusResult verifier_check(const Presentation& presentation, const TrustStore& trust, TableSource& source,
                            DayIndex current_day, const CheckOptions& options = {},
                            RandomSource& rng = system_random());

}  // namespace revoca::actors
