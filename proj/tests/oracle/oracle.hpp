#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Second, from-scratch implementation of SHA-256 / HMAC / HKDF. Shares no code
// with the library and is used only to cross-check it.
namespace oracle {

using Bytes = std::vector<std::uint8_t>;

std::array<std::uint8_t, 32> sha256(const Bytes& msg);
std::array<std::uint8_t, 32> hmac_sha256(const Bytes& key, const Bytes& msg);
Bytes hkdf_sha256(const Bytes& salt, const Bytes& ikm, const Bytes& info, std::size_t length);

Bytes from_hex(std::string_view hex);
std::string to_hex(const std::uint8_t* p, std::size_t n);
template <class C>
std::string to_hex(const C& c) {
  return to_hex(c.data(), c.size());
}

}  // namespace oracle
