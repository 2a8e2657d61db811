#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace revoca {

// Error classes surfaced by the library. The CLI maps each one to a distinct
// exit code, so the numeric values are part of the command-line contract.
enum class Errc : int {
  usage = 2,
  io = 3,
  decode = 10,
  encode = 11,
  identity = 12,
  level = 13,
  auth_failure = 14,
  range = 15,
  integrity = 16,
  corrupt_snapshot = 17,
  parameter = 18,
  unknown_credential = 19,
  rejection = 20,
  precondition = 21,
  not_found = 22,
  bad_signature = 30,
  bad_proof_of_possession = 31,
  key_probe_failed = 32,
  check_digest_not_found = 33,
  snapshot_unavailable = 34,
  deferred_future_day = 35,
};

constexpr std::string_view errc_name(Errc c) {
  switch (c) {
    case Errc::usage: return "Usage";
    case Errc::io: return "Io";
    case Errc::decode: return "Decode";
    case Errc::encode: return "Encode";
    case Errc::identity: return "Identity";
    case Errc::level: return "Level";
    case Errc::auth_failure: return "AuthFailure";
    case Errc::range: return "Range";
    case Errc::integrity: return "Integrity";
    case Errc::corrupt_snapshot: return "CorruptSnapshot";
    case Errc::parameter: return "Parameter";
    case Errc::unknown_credential: return "UnknownCredential";
    case Errc::rejection: return "Rejection";
    case Errc::precondition: return "Precondition";
    case Errc::not_found: return "NotFound";
    case Errc::bad_signature: return "BadSignature";
    case Errc::bad_proof_of_possession: return "BadProofOfPossession";
    case Errc::key_probe_failed: return "KeyProbeFailed";
    case Errc::check_digest_not_found: return "CheckDigestNotFound";
    case Errc::snapshot_unavailable: return "SnapshotUnavailable";
    case Errc::deferred_future_day: return "DeferredFutureDay";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace revoca
