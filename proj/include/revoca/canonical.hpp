#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "revoca/bytes.hpp"

namespace revoca::canonical {

// Structured record: maps with text keys, arrays, text, integers, booleans.
// Byte fields are carried as unpadded base64url text.
using Value = nlohmann::json;

// Sorted keys, no insignificant whitespace, UTF-8. Throws Error(encode) on
// floats, nulls or invalid UTF-8.
Bytes encode(const Value& v);
std::string encode_text(const Value& v);

// Accepts only the exact canonical form: decode(b) re-encodes to b.
// Throws Error(decode) otherwise.
Value decode(ByteView b);

inline Value bytes_field(ByteView b) { return to_base64url(b); }

// Typed field accessors; each throws Error(decode) naming the missing field.
const Value& field(const Value& obj, std::string_view key);
std::string text_field(const Value& obj, std::string_view key);
std::uint64_t uint_field(const Value& obj, std::string_view key);
bool bool_field(const Value& obj, std::string_view key);
Bytes bytes_field(const Value& obj, std::string_view key);

template <class Fixed>
Fixed fixed_field(const Value& obj, std::string_view key) {
  return Fixed::from(bytes_field(obj, key));
}

std::uint64_t as_uint(const Value& v, std::string_view what);
std::string as_text(const Value& v, std::string_view what);

}  // namespace revoca::canonical
