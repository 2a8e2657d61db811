#pragma once

namespace revoca::detail {

// Idempotent; throws if libsodium cannot initialise.
void ensure_sodium();

}  // namespace revoca::detail
