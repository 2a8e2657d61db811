#include "revoca/actors.hpp"

#include <algorithm>

#include "revoca/errors.hpp"

namespace revoca::actors {

using canonical::Value;

Bytes VerifiableCredential::signed_bytes() const {
  Value v = to_value();
  v.erase("issuer_signature");
  return canonical::encode(v);
}

Value VerifiableCredential::to_value() const {
  return {{"claims", claims},
          {"expiry_day", expiry_day.value},
          {"issued_day", issued_day.value},
          {"issuer_id", issuer_id},
          {"issuer_signature", to_base64url(issuer_signature.view())},
          {"pop_public_key", to_base64url(pop_public_key.view())},
          {"root", root},
          {"vc_id", vc_id.hex()}};
}

VerifiableCredential VerifiableCredential::from_value(const Value& v) {
  VerifiableCredential c;
  c.vc_id = VcId::from_hex(canonical::text_field(v, "vc_id"));
  c.root = canonical::text_field(v, "root");
  ahibe::validate_root(c.root);
  c.issued_day = DayIndex{canonical::uint_field(v, "issued_day")};
  c.expiry_day = DayIndex{canonical::uint_field(v, "expiry_day")};
  c.claims = canonical::field(v, "claims");
  if (!c.claims.is_object()) throw Error(Errc::decode, "claims must be a map");
  c.pop_public_key = canonical::fixed_field<VerifyKey>(v, "pop_public_key");
  c.issuer_id = canonical::text_field(v, "issuer_id");
  c.issuer_signature = canonical::fixed_field<Signature>(v, "issuer_signature");
  if (c.expiry_day < c.issued_day) throw Error(Errc::decode, "credential expires before issuance");
  return c;
}

std::pair<ahibe::MasterPublicParams, ahibe::MasterSecret> pkg_setup(ahibe::SecurityLevel level, RandomSource& rng) {
  return ahibe::setup(level, rng);
}

ahibe::HolderKey pkg_extract(const ahibe::MasterSecret& msk, std::string_view root, RandomSource& rng) {
  return ahibe::extract(msk, root, rng);
}

// ---------------------------------------------------------------------------
// Issuer

CheckDigest credential_digest(const RegistryRecord& record, const VcId& vc_id, DayIndex day) {
  auto token = crypto::derive_day_token(record.seed, life_day(record.issued_day, day));
  return crypto::compute_check_digest(token, vc_id);
}

Value IssuerState::to_value() const {
  Value reg = Value::array();
  for (const auto& [vc_id, rec] : registry) {
    Value docs = Value::array();
    for (const auto& p : rec.documents)
      docs.push_back({{"document", p.document.to_value()}, {"published_day", p.published_day.value}});
    reg.push_back({{"documents", std::move(docs)},
                   {"expiry_day", rec.expiry_day.value},
                   {"issued_day", rec.issued_day.value},
                   {"root", rec.root},
                   {"seed", to_base64url(rec.seed.view())},
                   {"vc_id", vc_id.hex()}});
  }
  return {{"current_day", current_day.value},
          {"issuer_id", issuer_id},
          {"mpp", ahibe::to_value(mpp)},
          {"params", params.to_value()},
          {"registry", std::move(reg)},
          {"signing_key", to_base64url(signing_key.secret.view())},
          {"verify_key", to_base64url(signing_key.public_key.view())}};
}

IssuerState IssuerState::from_value(const Value& v) {
  IssuerState s;
  s.issuer_id = canonical::text_field(v, "issuer_id");
  s.signing_key = {canonical::fixed_field<SigningKey>(v, "signing_key"),
                   canonical::fixed_field<VerifyKey>(v, "verify_key")};
  s.mpp = ahibe::params_from_value(canonical::field(v, "mpp"));
  s.params = tables::TableParams::from_value(canonical::field(v, "params"));
  s.current_day = DayIndex{canonical::uint_field(v, "current_day")};
  const auto& reg = canonical::field(v, "registry");
  if (!reg.is_array()) throw Error(Errc::decode, "registry must be a list");
  for (const auto& r : reg) {
    RegistryRecord rec{canonical::text_field(r, "root"), canonical::fixed_field<Seed>(r, "seed"),
                       DayIndex{canonical::uint_field(r, "issued_day")},
                       DayIndex{canonical::uint_field(r, "expiry_day")},
                       {}};
    for (const auto& p : canonical::field(r, "documents"))
      rec.documents.push_back({tables::RevocationDocument::from_value(canonical::field(p, "document")),
                               DayIndex{canonical::uint_field(p, "published_day")}});
    s.registry.emplace(VcId::from_hex(canonical::text_field(r, "vc_id")), std::move(rec));
  }
  return s;
}

Issuer Issuer::init(std::string issuer_id, ahibe::MasterPublicParams mpp, tables::TableParams params, DayIndex day,
                    RandomSource& rng) {
  params.validate();
  IssuerState state{std::move(issuer_id), crypto::generate_signing_key(rng), std::move(mpp), params, day, {}};
  Issuer issuer(std::move(state), rng);
  issuer.rebuild();
  return issuer;
}

Issuer Issuer::restore(IssuerState state, std::optional<tables::CheckTableSnapshot> check,
                       std::optional<tables::RevocationTableSnapshot> revocation, RandomSource& rng) {
  state.params.validate();
  Issuer issuer(std::move(state), rng);
  const auto day = issuer.state_.current_day;
  const auto& params = issuer.state_.params;
  auto consistent = [&] {
    if (check->day != day || revocation->day != day || check->params != params || revocation->params != params)
      return false;
    // Cheap staleness test: same digest set, same number of entries.
    std::vector<CheckDigest> digests;
    std::size_t entries = 0;
    for (const auto& [vc_id, rec] : issuer.state_.registry) {
      if (!rec.active_on(day)) continue;
      digests.push_back(credential_digest(rec, vc_id, day));
      for (const auto& p : rec.documents) entries += p.published_day <= day;
    }
    return tables::build_check_table(digests, params, day) == *check && revocation->entry_count() == entries;
  };
  if (check && revocation && consistent()) {
    issuer.check_ = std::move(*check);
    issuer.revocation_ = std::move(*revocation);
  } else {
    issuer.rebuild();
  }
  return issuer;
}

void Issuer::set_publish_hook(PublishHook hook) {
  hook_ = std::move(hook);
  publish();
}

void Issuer::publish() const {
  if (hook_) hook_(check_, revocation_);
}

IssuedCredential Issuer::issue(std::string root, Value claims, DayIndex expiry_day, const VerifyKey& pop_public_key) {
  ahibe::validate_root(root);
  if (expiry_day < state_.current_day) throw Error(Errc::parameter, "expiry day lies in the past");
  if (!claims.is_object()) throw Error(Errc::parameter, "claims must be a map");

  VcId vc_id;
  do {
    vc_id = rng_->fixed<VcId>();
  } while (state_.registry.contains(vc_id));
  auto seed = rng_->fixed<Seed>();

  VerifiableCredential cred;
  cred.vc_id = vc_id;
  cred.root = root;
  cred.issued_day = state_.current_day;
  cred.expiry_day = expiry_day;
  cred.claims = std::move(claims);
  cred.pop_public_key = pop_public_key;
  cred.issuer_id = state_.issuer_id;
  cred.issuer_signature = crypto::sign(state_.signing_key.secret, cred.signed_bytes());

  RegistryRecord rec{std::move(root), seed, state_.current_day, expiry_day, {}};
  state_.registry.emplace(vc_id, std::move(rec));
  std::vector<CheckDigest> digests;
  for (const auto& bucket : check_.buckets) digests.insert(digests.end(), bucket.begin(), bucket.end());
  digests.push_back(credential_digest(state_.registry.at(vc_id), vc_id, state_.current_day));
  check_ = tables::build_check_table(digests, state_.params, state_.current_day);
  publish();
  return {std::move(cred), seed};
}

BucketIndex Issuer::revoke(const VcId& vc_id, tables::RevocationDocument doc, DayIndex day) {
  auto it = state_.registry.find(vc_id);
  if (it == state_.registry.end()) throw Error(Errc::unknown_credential, "unknown credential " + vc_id.hex());
  if (day != state_.current_day) throw Error(Errc::parameter, "revocations are published for the current day only");
  if (doc.vc_id != vc_id) throw Error(Errc::parameter, "document names another credential");
  auto& rec = it->second;
  if (!rec.active_on(day)) throw Error(Errc::parameter, "credential is not active on this day");

  const std::uint64_t last = rec.documents.empty() ? 0 : rec.documents.back().document.sequence;
  if (doc.sequence == 0) doc.sequence = last + 1;
  if (doc.sequence <= last) throw Error(Errc::parameter, "document sequence must increase");

  const auto digest = credential_digest(rec, vc_id, day);
  const auto index = tables::revocation_index(state_.mpp, rec.root, day, digest, state_.params.d);
  revocation_ = tables::insert_revocation(std::move(revocation_), index,
                                          tables::seal_revocation(state_.mpp, rec.root, day, doc, *rng_));
  rec.documents.push_back({std::move(doc), day});
  publish();
  return index;
}

void Issuer::rollover(DayIndex new_day) {
  if (new_day <= state_.current_day) throw Error(Errc::parameter, "rollover day must be after the current day");
  while (state_.current_day < new_day) {
    ++state_.current_day.value;
    rebuild();
    publish();
  }
}

void Issuer::rebuild() {
  const DayIndex day = state_.current_day;
  std::vector<CheckDigest> digests;
  auto revocation = tables::RevocationTableSnapshot::empty(state_.params, day);
  for (const auto& [vc_id, rec] : state_.registry) {
    if (!rec.active_on(day)) continue;
    const auto digest = credential_digest(rec, vc_id, day);
    digests.push_back(digest);
    if (rec.documents.empty()) continue;
    const auto index = tables::revocation_index(state_.mpp, rec.root, day, digest, state_.params.d);
    for (const auto& p : rec.documents) {
      if (p.published_day > day) continue;
      revocation = tables::insert_revocation(std::move(revocation), index,
                                             tables::seal_revocation(state_.mpp, rec.root, day, p.document, *rng_));
    }
  }
  check_ = tables::build_check_table(digests, state_.params, day);
  revocation_ = std::move(revocation);
}

// ---------------------------------------------------------------------------
// Trust store

std::optional<VerifyKey> TrustStore::find(const std::string& issuer_id) const {
  auto it = keys_.find(issuer_id);
  if (it == keys_.end()) return std::nullopt;
  return it->second;
}

Value TrustStore::to_value() const {
  Value v = Value::object();
  for (const auto& [id, key] : keys_) v[id] = to_base64url(key.view());
  return v;
}

TrustStore TrustStore::from_value(const Value& v) {
  if (!v.is_object()) throw Error(Errc::decode, "trust store must be a map");
  TrustStore t;
  for (const auto& [id, key] : v.items()) t.add(id, VerifyKey::from(from_base64url(canonical::as_text(key, id))));
  return t;
}

// ---------------------------------------------------------------------------
// Holder

Bytes possession_message(const VcId& vc_id, const Nonce& nonce) {
  return canonical::encode(Value{{"nonce", to_base64url(nonce.view())}, {"vc_id", vc_id.hex()}});
}

Value Presentation::to_value() const {
  Value auths = Value::array();
  for (const auto& a : authorizations)
    auths.push_back({{"day", a.day.value},
                     {"day_key", ahibe::to_value(a.day_key)},
                     {"day_token", to_base64url(a.day_token.view())}});
  return {{"authorizations", std::move(auths)},
          {"credential", credential.to_value()},
          {"nonce", to_base64url(nonce.view())},
          {"pop_signature", to_base64url(pop_signature.view())}};
}

Presentation Presentation::from_value(const Value& v) {
  Presentation p;
  p.credential = VerifiableCredential::from_value(canonical::field(v, "credential"));
  p.nonce = canonical::fixed_field<Nonce>(v, "nonce");
  p.pop_signature = canonical::fixed_field<Signature>(v, "pop_signature");
  const auto& auths = canonical::field(v, "authorizations");
  if (!auths.is_array()) throw Error(Errc::decode, "authorizations must be a list");
  for (const auto& a : auths)
    p.authorizations.push_back({DayIndex{canonical::uint_field(a, "day")},
                                canonical::fixed_field<DayToken>(a, "day_token"),
                                ahibe::day_key_from_value(canonical::field(a, "day_key"))});
  return p;
}

void Wallet::store(VerifiableCredential credential, const Seed& seed, ahibe::HolderKey holder_key,
                   const SigningKey& pop_signing_key, const VerifyKey& issuer_key) {
  if (!crypto::verify(issuer_key, credential.signed_bytes(), credential.issuer_signature))
    throw Error(Errc::rejection, "credential signature does not verify");
  if (holder_key.identity.level() != 1 || holder_key.identity.root != credential.root)
    throw Error(Errc::rejection, "holder key is for another root identity");
  auto probe = to_bytes("revoca/pop-key-check");
  if (!crypto::verify(credential.pop_public_key, probe, crypto::sign(pop_signing_key, probe)))
    throw Error(Errc::rejection, "proof-of-possession key does not match the credential");
  holder_keys_.insert_or_assign(credential.root, std::move(holder_key));
  const auto vc_id = credential.vc_id;
  records_.insert_or_assign(vc_id, WalletRecord{std::move(credential), seed, pop_signing_key});
}

const WalletRecord& Wallet::record(const VcId& vc_id) const {
  auto it = records_.find(vc_id);
  if (it == records_.end()) throw Error(Errc::unknown_credential, "wallet holds no credential " + vc_id.hex());
  return it->second;
}

std::vector<VcId> Wallet::credentials() const {
  std::vector<VcId> out;
  for (const auto& [id, rec] : records_) out.push_back(id);
  return out;
}

Presentation Wallet::present(const VcId& vc_id, const std::vector<DayIndex>& days, const Nonce& nonce,
                             RandomSource& rng) const {
  const auto& rec = record(vc_id);
  if (days.empty()) throw Error(Errc::precondition, "a presentation needs at least one day");
  const auto& hk = holder_keys_.at(rec.credential.root);
  Presentation p{rec.credential, nonce, crypto::sign(rec.pop_signing_key, possession_message(vc_id, nonce)), {}};
  for (auto day : days) {
    if (!rec.credential.valid_on(day)) throw Error(Errc::precondition, "day outside the credential validity");
    p.authorizations.push_back({day, crypto::derive_day_token(rec.seed, life_day(rec.credential.issued_day, day)),
                                ahibe::delegate(hk, day, rng)});
  }
  return p;
}

std::vector<tables::RevocationDocument> Wallet::audit(const VcId& vc_id, DayIndex day,
                                                      const tables::RevocationTableSnapshot& snapshot,
                                                      const ahibe::MasterPublicParams& mpp, RandomSource& rng) const {
  if (snapshot.day != day) throw Error(Errc::precondition, "snapshot is for another day");
  const auto& rec = record(vc_id);
  if (!rec.credential.valid_on(day)) throw Error(Errc::precondition, "day outside the credential validity");
  const auto token = crypto::derive_day_token(rec.seed, life_day(rec.credential.issued_day, day));
  const auto digest = crypto::compute_check_digest(token, vc_id);
  const auto index = tables::revocation_index(mpp, rec.credential.root, day, digest, snapshot.params.d);
  const auto dk = ahibe::delegate(holder_keys_.at(rec.credential.root), day, rng);
  return tables::scan_bucket(snapshot, index, dk, rec.credential.root, day, vc_id);
}

Value Wallet::to_value() const {
  Value keys = Value::array();
  for (const auto& [root, hk] : holder_keys_) keys.push_back(ahibe::to_value(hk));
  Value recs = Value::array();
  for (const auto& [id, rec] : records_)
    recs.push_back({{"credential", rec.credential.to_value()},
                    {"pop_signing_key", to_base64url(rec.pop_signing_key.view())},
                    {"seed", to_base64url(rec.seed.view())}});
  return {{"holder_keys", std::move(keys)}, {"records", std::move(recs)}};
}

Wallet Wallet::from_value(const Value& v) {
  Wallet w;
  for (const auto& k : canonical::field(v, "holder_keys")) {
    auto hk = ahibe::holder_key_from_value(k);
    auto root = hk.identity.root;
    w.holder_keys_.emplace(std::move(root), std::move(hk));
  }
  for (const auto& r : canonical::field(v, "records")) {
    auto cred = VerifiableCredential::from_value(canonical::field(r, "credential"));
    if (!w.holder_keys_.contains(cred.root)) throw Error(Errc::decode, "wallet record without holder key");
    auto id = cred.vc_id;
    w.records_.emplace(id, WalletRecord{std::move(cred), canonical::fixed_field<Seed>(r, "seed"),
                                        canonical::fixed_field<SigningKey>(r, "pop_signing_key")});
  }
  return w;
}

// ---------------------------------------------------------------------------
// Verifier

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::no_revocation_found: return "NoRevocationFound";
    case Verdict::revoked: return "Revoked";
    case Verdict::deferred: return "DeferredFutureDay";
  }
  return "Unknown";
}

bool StatusResult::any_revoked() const {
  return std::any_of(days.begin(), days.end(), [](const auto& d) { return d.verdict == Verdict::revoked; });
}

Value StatusResult::to_value() const {
  Value out = Value::array();
  for (const auto& d : days) {
    Value docs = Value::array();
    for (const auto& doc : d.documents) docs.push_back(doc.to_value());
    out.push_back({{"day", d.day.value}, {"documents", std::move(docs)}, {"verdict", verdict_name(d.verdict)}});
  }
  return {{"days", std::move(out)}, {"segment_bytes", segment_bytes}, {"table_bytes", table_bytes}};
}

StatusResult verifier_check(const Presentation& presentation, const TrustStore& trust, TableSource& source,
                            DayIndex current_day, const CheckOptions& options, RandomSource& rng) {
  const auto& cred = presentation.credential;

  // (1) credential and proof of possession
  auto issuer_key = trust.find(cred.issuer_id);
  if (!issuer_key || !crypto::verify(*issuer_key, cred.signed_bytes(), cred.issuer_signature))
    throw Error(Errc::bad_signature, "issuer signature does not verify");
  if (options.expected_nonce && *options.expected_nonce != presentation.nonce)
    throw Error(Errc::bad_proof_of_possession, "presentation answers another challenge");
  if (!crypto::verify(cred.pop_public_key, possession_message(cred.vc_id, presentation.nonce),
                      presentation.pop_signature))
    throw Error(Errc::bad_proof_of_possession, "proof of possession does not verify");
  if (presentation.authorizations.empty()) throw Error(Errc::rejection, "presentation carries no authorization");

  const auto& mpp = source.master_params();
  const auto& params = source.table_params();
  StatusResult result;
  for (const auto& auth : presentation.authorizations) {
    const DayIndex day = auth.day;

    // (2) the day key must open a fresh encapsulation to (root, day)
    const auto id = ahibe::IdentityPath::for_day(cred.root, day);
    if (auth.day_key.identity != id || !ahibe::probe_key(mpp, id, auth.day_key, rng))
      throw Error(Errc::key_probe_failed, "day key does not decrypt for " + id.text());

    if (day > current_day) {
      result.days.push_back({day, Verdict::deferred, {}});
      continue;
    }

    // (3) the day token must yield a digest published in that day's check table
    if (!cred.valid_on(day))
      throw Error(Errc::check_digest_not_found, "day lies outside the credential validity");
    const auto digest = crypto::compute_check_digest(auth.day_token, cred.vc_id);
    const auto j = tables::segment_for_digest(digest, params);
    auto segment = source.check_segment(day, j);
    if (!segment) throw Error(Errc::snapshot_unavailable, "no check table for day " + std::to_string(day.value));
    result.segment_bytes += segment->bytes;
    if (segment->value.day != day || segment->value.segment_index != j || segment->value.params != params)
      throw Error(Errc::integrity, "check segment does not match the request");
    if (!tables::segment_contains(segment->value, digest))
      throw Error(Errc::check_digest_not_found, "day token is not valid for this credential and day");

    // (4) the overflow list at x'
    auto table = source.revocation_table(day);
    if (!table) throw Error(Errc::snapshot_unavailable, "no revocation table for day " + std::to_string(day.value));
    result.table_bytes += table->bytes;
    if (table->value.day != day || table->value.params != params)
      throw Error(Errc::integrity, "revocation table does not match the request");
    const auto index = tables::revocation_index(mpp, cred.root, day, digest, params.d);
    auto docs = tables::scan_bucket(table->value, index, auth.day_key, cred.root, day, cred.vc_id);

    // (5)
    Verdict verdict = docs.empty() ? Verdict::no_revocation_found : Verdict::revoked;
    result.days.push_back({day, verdict, std::move(docs)});
  }
  return result;
}

}  // namespace revoca::actors
