#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "revoca/bytes.hpp"
#include "revoca/canonical.hpp"
#include "revoca/crypto.hpp"
#include "revoca/random.hpp"

// Two-level anonymous hierarchical identity-based encryption, used as a KEM.
// Level 1 is a holder root H, level 2 is the day identity H||T. Two schemes
// sit behind the same surface:
//   "transparent-v1"     test only, insecure: the public parameters embed the
//                        master secret and keys are KDF-derived down the path.
//   "bw-ahibe-bls12-381" Boyen-Waters style anonymous HIBE over BLS12-381 with
//                        key re-randomisation on delegation.
namespace revoca::ahibe {

inline constexpr std::string_view kTransparentScheme = "transparent-v1";
inline constexpr std::string_view kBoyenWatersScheme = "bw-ahibe-bls12-381";
inline constexpr std::string_view kDetEncapContext = "revoca/det-encap/v1";
inline constexpr std::size_t kMaxRootBytes = 256;

enum class SecurityLevel { test, standard };

// Throws Error(identity) unless root is non-empty UTF-8 of at most 256 bytes.
void validate_root(std::string_view root);

struct IdentityPath {
  std::string root;
  std::optional<DayIndex> day;

  static IdentityPath holder(std::string root);
  static IdentityPath for_day(std::string root, DayIndex day);

  int level() const { return day ? 2 : 1; }
  // root, or root "/day:" decimal(day)
  std::string text() const;

  canonical::Value to_value() const;
  static IdentityPath from_value(const canonical::Value& v);

  friend bool operator==(const IdentityPath&, const IdentityPath&) = default;
};

// Scheme-tagged opaque key material; the scheme id determines the parse.
struct Material {
  std::string scheme_id;
  std::map<std::string, Bytes> fields;

  const Bytes& at(const std::string& name) const;
  friend bool operator==(const Material&, const Material&) = default;
};

struct MasterPublicParams {
  Material material;
  int level_bound = 2;
  const std::string& scheme_id() const { return material.scheme_id; }
  friend bool operator==(const MasterPublicParams&, const MasterPublicParams&) = default;
};

struct MasterSecret {
  Material material;
};

struct HolderKey {
  IdentityPath identity;
  Material material;
};

// Decapsulates only headers addressed to its own identity. Carries no
// delegation material, so there is deliberately no delegate() for it.
struct DayKey {
  IdentityPath identity;
  Material material;
  friend bool operator==(const DayKey&, const DayKey&) = default;
};

struct EncapHeader {
  Material material;

  // Canonical bytes; the revocation table index is derived from these.
  Bytes serialize() const;
  static EncapHeader parse(ByteView bytes);
  friend bool operator==(const EncapHeader&, const EncapHeader&) = default;
};

struct Encapsulation {
  EncapHeader header;
  SymmetricKey key;
};

std::pair<MasterPublicParams, MasterSecret> setup(SecurityLevel level, RandomSource& rng = system_random());

HolderKey extract(const MasterSecret& msk, std::string_view root, RandomSource& rng = system_random());

DayKey delegate(const HolderKey& hk, DayIndex day, RandomSource& rng = system_random());

// Randomised; throws Error(level) for level-1 identities.
Encapsulation encap(const MasterPublicParams& mpp, const IdentityPath& id, RandomSource& rng = system_random());

// Same as encap with the randomness derived from (id, binding). Issuer and
// Verifier obtain bit-identical headers. Throws Error(level) or
// Error(parameter) for an empty binding.
Encapsulation det_encap(const MasterPublicParams& mpp, const IdentityPath& id, ByteView binding);

// For a mismatched identity this returns an unrelated key; the caller's AEAD
// open is what detects the mismatch. Throws Error(decode) on scheme mismatch
// or malformed material.
SymmetricKey decap(const DayKey& dk, const EncapHeader& header);

// Seals a random probe under a fresh encapsulation to id and checks that dk
// opens it.
bool probe_key(const MasterPublicParams& mpp, const IdentityPath& id, const DayKey& dk,
               RandomSource& rng = system_random());

// Tagged canonical forms: [scheme_id, ...].
canonical::Value to_value(const MasterPublicParams& mpp);
canonical::Value to_value(const MasterSecret& msk);
canonical::Value to_value(const HolderKey& hk);
canonical::Value to_value(const DayKey& dk);
canonical::Value to_value(const EncapHeader& h);

MasterPublicParams params_from_value(const canonical::Value& v);
MasterSecret secret_from_value(const canonical::Value& v);
HolderKey holder_key_from_value(const canonical::Value& v);
DayKey day_key_from_value(const canonical::Value& v);
EncapHeader header_from_value(const canonical::Value& v);

}  // namespace revoca::ahibe
