#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace revoca {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline Bytes to_bytes(std::string_view s) {
  auto v = as_bytes(s);
  return {v.begin(), v.end()};
}

inline std::string to_string(ByteView b) {
  return {reinterpret_cast<const char*>(b.data()), b.size()};
}

inline void append(Bytes& out, ByteView more) { out.insert(out.end(), more.begin(), more.end()); }

inline void append_be64(Bytes& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

inline void append_be32(Bytes& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::string to_hex(ByteView b);
Bytes from_hex(std::string_view hex);  // throws Error(decode)

std::string to_base64url(ByteView b);           // unpadded
Bytes from_base64url(std::string_view text);    // throws Error(decode)

// Fixed-width secret or public byte string with a distinct type per role.
template <std::size_t N, class Tag>
struct FixedBytes {
  static constexpr std::size_t size = N;
  std::array<std::uint8_t, N> bytes{};

  ByteView view() const { return {bytes.data(), N}; }
  std::string hex() const { return to_hex(view()); }

  // throws Error(decode) on a length mismatch
  static FixedBytes from(ByteView b);
  static FixedBytes from_hex(std::string_view h) { return from(revoca::from_hex(h)); }

  friend bool operator==(const FixedBytes&, const FixedBytes&) = default;
  friend auto operator<=>(const FixedBytes&, const FixedBytes&) = default;
};

[[noreturn]] void throw_length_error(std::size_t expected, std::size_t got);

template <std::size_t N, class Tag>
FixedBytes<N, Tag> FixedBytes<N, Tag>::from(ByteView b) {
  if (b.size() != N) throw_length_error(N, b.size());
  FixedBytes out;
  std::copy(b.begin(), b.end(), out.bytes.begin());
  return out;
}

}  // namespace revoca
