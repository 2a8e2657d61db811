#include "revoca/bytes.hpp"

#include <sodium.h>

#include "revoca/errors.hpp"
#include "sodium_init.hpp"

namespace revoca {

std::string to_hex(ByteView b) {
  std::string out(b.size() * 2 + 1, '\0');
  sodium_bin2hex(out.data(), out.size(), b.data(), b.size());
  out.pop_back();
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw Error(Errc::decode, "odd-length hex string");
  for (char ch : hex) {
    bool ok = (ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'f') || (ch >= 'A' && ch <= 'F');
    if (!ok) throw Error(Errc::decode, "invalid hex character");
  }
  Bytes out(hex.size() / 2);
  std::size_t len = 0;
  if (sodium_hex2bin(out.data(), out.size(), hex.data(), hex.size(), nullptr, &len, nullptr) != 0 ||
      len != out.size()) {
    throw Error(Errc::decode, "invalid hex string");
  }
  return out;
}

std::string to_base64url(ByteView b) {
  detail::ensure_sodium();
  constexpr int variant = sodium_base64_VARIANT_URLSAFE_NO_PADDING;
  std::string out(sodium_base64_encoded_len(b.size(), variant), '\0');
  sodium_bin2base64(out.data(), out.size(), b.data(), b.size(), variant);
  out.resize(std::char_traits<char>::length(out.c_str()));
  return out;
}

Bytes from_base64url(std::string_view text) {
  detail::ensure_sodium();
  Bytes out(text.size() * 3 / 4 + 3);
  std::size_t len = 0;
  const char* end = nullptr;
  if (sodium_base642bin(out.data(), out.size(), text.data(), text.size(), nullptr, &len, &end,
                        sodium_base64_VARIANT_URLSAFE_NO_PADDING) != 0 ||
      end != text.data() + text.size()) {
    throw Error(Errc::decode, "invalid base64url text");
  }
  out.resize(len);
  // Reject non-canonical encodings (stray low bits in the final symbol).
  if (to_base64url(out) != text) throw Error(Errc::decode, "non-canonical base64url text");
  return out;
}

void throw_length_error(std::size_t expected, std::size_t got) {
  throw Error(Errc::decode,
              "expected " + std::to_string(expected) + " bytes, got " + std::to_string(got));
}

}  // namespace revoca
