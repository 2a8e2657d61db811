#include "revoca/canonical.hpp"

#include <limits>

#include "revoca/errors.hpp"

namespace revoca::canonical {
namespace {

void check_shape(const Value& v) {
  switch (v.type()) {
    case Value::value_t::object:
      for (const auto& [key, child] : v.items()) check_shape(child);
      return;
    case Value::value_t::array:
      for (const auto& child : v) check_shape(child);
      return;
    case Value::value_t::string:
    case Value::value_t::boolean:
    case Value::value_t::number_integer:
    case Value::value_t::number_unsigned:
      return;
    case Value::value_t::null:
      throw Error(Errc::encode, "null is not encodable");
    case Value::value_t::number_float:
      throw Error(Errc::encode, "floating point numbers are not encodable");
    default:
      throw Error(Errc::encode, "unsupported value shape");
  }
}

}  // namespace

std::string encode_text(const Value& v) {
  check_shape(v);
  try {
    return v.dump(-1, ' ', false, Value::error_handler_t::strict);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::encode, e.what());
  }
}

Bytes encode(const Value& v) { return to_bytes(encode_text(v)); }

Value decode(ByteView b) {
  Value v;
  try {
    v = Value::parse(b.begin(), b.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::decode, e.what());
  }
  try {
    if (encode(v) != Bytes(b.begin(), b.end())) throw Error(Errc::decode, "input is not in canonical form");
  } catch (const Error& e) {
    if (e.code() == Errc::encode) throw Error(Errc::decode, e.what());
    throw;
  }
  return v;
}

const Value& field(const Value& obj, std::string_view key) {
  if (!obj.is_object()) throw Error(Errc::decode, "expected a map holding '" + std::string(key) + "'");
  auto it = obj.find(std::string(key));
  if (it == obj.end()) throw Error(Errc::decode, "missing field '" + std::string(key) + "'");
  return *it;
}

std::uint64_t as_uint(const Value& v, std::string_view what) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw Error(Errc::decode, "'" + std::string(what) + "' must be a non-negative integer");
}

std::string as_text(const Value& v, std::string_view what) {
  if (!v.is_string()) throw Error(Errc::decode, "'" + std::string(what) + "' must be text");
  return v.get<std::string>();
}

std::string text_field(const Value& obj, std::string_view key) { return as_text(field(obj, key), key); }

std::uint64_t uint_field(const Value& obj, std::string_view key) { return as_uint(field(obj, key), key); }

bool bool_field(const Value& obj, std::string_view key) {
  const Value& v = field(obj, key);
  if (!v.is_boolean()) throw Error(Errc::decode, "'" + std::string(key) + "' must be a boolean");
  return v.get<bool>();
}

Bytes bytes_field(const Value& obj, std::string_view key) { return from_base64url(text_field(obj, key)); }

}  // namespace revoca::canonical
