#include <gtest/gtest.h>

#include <set>

#include "revoca/canonical.hpp"
#include "revoca/errors.hpp"
#include "revoca/random.hpp"

using namespace revoca;
using canonical::Value;

namespace {

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::usage;
}

// Random record generator: maps of text keys over text, ints, bools, bytes
// and nested maps/lists, bounded depth.
class RecordGen {
 public:
  explicit RecordGen(std::uint64_t seed) : rng_(seed) {}

  Value record(int depth = 0) {
    Value v = Value::object();
    const int n = static_cast<int>(next() % 5);
    for (int i = 0; i < n; ++i) v[key()] = leaf(depth);
    return v;
  }

 private:
  std::uint64_t next() {
    std::uint64_t x;
    rng_.fill({reinterpret_cast<std::uint8_t*>(&x), sizeof x});
    return x;
  }
  std::string key() {
    static const char* alphabet = "abcxyz_09Ωé";
    std::string k;
    const int len = 1 + static_cast<int>(next() % 6);
    for (int i = 0; i < len; ++i) {
      auto c = next() % 11;
      if (c == 9) k += "Ω";
      else if (c == 10) k += "é";
      else k += alphabet[c];
    }
    return k;
  }
  Value leaf(int depth) {
    switch (next() % (depth < 2 ? 7 : 5)) {
      case 0: return next();
      case 1: return -static_cast<std::int64_t>(next() % 1000000);
      case 2: return key();
      case 3: return (next() & 1) == 1;
      case 4: return canonical::bytes_field(rng_.bytes(next() % 20));
      case 5: return record(depth + 1);
      default: {
        Value a = Value::array();
        for (int i = 0, n = static_cast<int>(next() % 3); i < n; ++i) a.push_back(leaf(depth + 1));
        return a;
      }
    }
  }
  DeterministicRandom rng_;
};

}  // namespace

TEST(Canonical, EmptyMapIsTwoBytes) { EXPECT_EQ(canonical::encode(Value::object()), to_bytes("{}")); }

TEST(Canonical, KeysAreSorted) {
  Value a = Value::object();
  a["b"] = 1;
  a["a"] = 2;
  Value b = Value::object();
  b["a"] = 2;
  b["b"] = 1;
  EXPECT_EQ(canonical::encode(a), canonical::encode(b));
  EXPECT_EQ(canonical::encode_text(a), R"({"a":2,"b":1})");
}

TEST(Canonical, ByteOrderedKeysAndUtf8Passthrough) {
  Value v = {{"é", 1}, {"z", 2}, {"Z", 3}};
  EXPECT_EQ(canonical::encode_text(v), "{\"Z\":3,\"z\":2,\"\xc3\xa9\":1}");
}

TEST(Canonical, RejectsUnsupportedShapes) {
  EXPECT_EQ(code_of([] { canonical::encode(Value{{"x", 1.5}}); }), Errc::encode);
  EXPECT_EQ(code_of([] { canonical::encode(Value{{"x", nullptr}}); }), Errc::encode);
  EXPECT_EQ(code_of([] { canonical::encode(Value{{"x", std::string("\xff\xfe")}}); }), Errc::encode);
}

TEST(Canonical, DecodeAcceptsOnlyCanonicalBytes) {
  EXPECT_EQ(canonical::decode(to_bytes(R"({"a":1})")), (Value{{"a", 1}}));
  for (const char* bad : {R"({"b":1,"a":2})", R"({ "a":1})", R"({"a":1.0})", R"({"a":null})", R"({"a":01})",
                          "{\"a\":\"\\u0041\"}", R"({"a":1,"a":2})", "[1,2", "", "{}\n"}) {
    EXPECT_EQ(code_of([&] { canonical::decode(to_bytes(bad)); }), Errc::decode) << bad;
  }
}

TEST(Canonical, FieldAccessorsNameTheField) {
  const Value v = {{"n", 5}, {"t", "x"}, {"b", canonical::bytes_field(as_bytes("hi"))}, {"neg", -1}};
  EXPECT_EQ(canonical::uint_field(v, "n"), 5u);
  EXPECT_EQ(canonical::text_field(v, "t"), "x");
  EXPECT_EQ(canonical::bytes_field(v, "b"), to_bytes("hi"));
  try {
    canonical::uint_field(v, "missing");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::decode);
    EXPECT_NE(std::string(e.what()).find("missing"), std::string::npos);
  }
  EXPECT_THROW(canonical::uint_field(v, "neg"), Error);
  EXPECT_THROW(canonical::uint_field(v, "t"), Error);
}

TEST(CanonicalProperty, RoundTripOverRandomRecords) {
  RecordGen gen(99);
  for (int i = 0; i < 2000; ++i) {
    const auto v = gen.record();
    const auto bytes = canonical::encode(v);
    ASSERT_EQ(canonical::decode(bytes), v);
    ASSERT_EQ(canonical::encode(canonical::decode(bytes)), bytes);
  }
}

TEST(CanonicalProperty, InjectiveOnTenThousandDistinctRecords) {
  RecordGen gen(100);
  std::set<Value> values;
  std::set<Bytes> encodings;
  while (values.size() < 10000) {
    auto v = gen.record();
    if (values.insert(v).second) encodings.insert(canonical::encode(v));
  }
  EXPECT_EQ(encodings.size(), 10000u);
}
