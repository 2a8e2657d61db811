#include "revoca/ahibe.hpp"

#include "ahibe_scheme.hpp"
#include "revoca/errors.hpp"

namespace revoca::ahibe {
namespace {

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xe ? 3 : (c >> 3) == 0x1e ? 4 : 0;
    if (len == 0 || i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k)
      if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) return false;
    i += len;
  }
  return true;
}

canonical::Value fields_value(const Material& m) {
  canonical::Value obj = canonical::Value::object();
  for (const auto& [name, bytes] : m.fields) obj[name] = to_base64url(bytes);
  return obj;
}

std::map<std::string, Bytes> fields_from(const canonical::Value& obj) {
  if (!obj.is_object()) throw Error(Errc::decode, "scheme fields must be a map");
  std::map<std::string, Bytes> out;
  for (const auto& [name, v] : obj.items()) out[name] = from_base64url(canonical::as_text(v, name));
  return out;
}

const canonical::Value& tuple_at(const canonical::Value& v, std::size_t arity, std::size_t i) {
  if (!v.is_array() || v.size() != arity) throw Error(Errc::decode, "malformed tagged key material");
  return v[i];
}

Material material_from(const canonical::Value& tag, const canonical::Value& fields) {
  Material m{canonical::as_text(tag, "scheme_id"), fields_from(fields)};
  detail::scheme_for(m.scheme_id);
  return m;
}

void require_level2(const IdentityPath& id) {
  if (id.level() != 2) throw Error(Errc::level, "encapsulation requires a day identity");
  validate_root(id.root);
}

}  // namespace

void validate_root(std::string_view root) {
  if (root.empty()) throw Error(Errc::identity, "root identity must not be empty");
  if (root.size() > kMaxRootBytes) throw Error(Errc::identity, "root identity longer than 256 bytes");
  if (!valid_utf8(root)) throw Error(Errc::identity, "root identity is not valid UTF-8");
}

IdentityPath IdentityPath::holder(std::string root) {
  validate_root(root);
  return {std::move(root), std::nullopt};
}

IdentityPath IdentityPath::for_day(std::string root, DayIndex day) {
  validate_root(root);
  return {std::move(root), day};
}

std::string IdentityPath::text() const {
  if (!day) return root;
  return root + "/day:" + std::to_string(day->value);
}

canonical::Value IdentityPath::to_value() const {
  canonical::Value v = {{"root", root}};
  if (day) v["day"] = day->value;
  return v;
}

IdentityPath IdentityPath::from_value(const canonical::Value& v) {
  auto root = canonical::text_field(v, "root");
  if (v.contains("day")) return for_day(std::move(root), DayIndex{canonical::uint_field(v, "day")});
  return holder(std::move(root));
}

const Bytes& Material::at(const std::string& name) const {
  auto it = fields.find(name);
  if (it == fields.end()) throw Error(Errc::decode, scheme_id + " material lacks field '" + name + "'");
  return it->second;
}

Bytes EncapHeader::serialize() const { return canonical::encode(to_value(*this)); }

EncapHeader EncapHeader::parse(ByteView bytes) { return header_from_value(canonical::decode(bytes)); }

std::pair<MasterPublicParams, MasterSecret> setup(SecurityLevel level, RandomSource& rng) {
  const auto& scheme =
      level == SecurityLevel::test ? detail::transparent_scheme() : detail::boyen_waters_scheme();
  auto [pub, sec] = scheme.setup(rng);
  return {MasterPublicParams{std::move(pub)}, MasterSecret{std::move(sec)}};
}

HolderKey extract(const MasterSecret& msk, std::string_view root, RandomSource& rng) {
  auto id = IdentityPath::holder(std::string(root));
  const auto& scheme = detail::scheme_for(msk.material.scheme_id);
  return {std::move(id), scheme.extract(msk.material, root, rng)};
}

DayKey delegate(const HolderKey& hk, DayIndex day, RandomSource& rng) {
  if (hk.identity.level() != 1) throw Error(Errc::level, "delegation requires a holder key");
  const auto& scheme = detail::scheme_for(hk.material.scheme_id);
  return {IdentityPath::for_day(hk.identity.root, day), scheme.delegate(hk.material, hk.identity.root, day, rng)};
}

Encapsulation encap(const MasterPublicParams& mpp, const IdentityPath& id, RandomSource& rng) {
  require_level2(id);
  const auto& scheme = detail::scheme_for(mpp.scheme_id());
  auto [header, key] = scheme.encap(mpp.material, id, rng);
  return {EncapHeader{std::move(header)}, key};
}

Encapsulation det_encap(const MasterPublicParams& mpp, const IdentityPath& id, ByteView binding) {
  require_level2(id);
  if (binding.empty()) throw Error(Errc::parameter, "deterministic encapsulation needs a binding");
  Bytes input;
  auto text = id.text();
  append_be32(input, static_cast<std::uint32_t>(text.size()));
  append(input, as_bytes(text));
  append(input, binding);
  auto key = crypto::hkdf(as_bytes(kDetEncapContext), input, as_bytes("randomness"), 32);
  DeterministicRandom rng(std::span<const std::uint8_t, 32>(key.data(), 32));
  return encap(mpp, id, rng);
}

SymmetricKey decap(const DayKey& dk, const EncapHeader& header) {
  if (dk.material.scheme_id != header.material.scheme_id)
    throw Error(Errc::decode, "header scheme does not match the key scheme");
  return detail::scheme_for(dk.material.scheme_id).decap(dk.material, header.material);
}

bool probe_key(const MasterPublicParams& mpp, const IdentityPath& id, const DayKey& dk, RandomSource& rng) {
  require_level2(id);
  if (dk.material.scheme_id != mpp.scheme_id()) return false;
  auto probe = rng.bytes(32);
  auto enc = encap(mpp, id, rng);
  static constexpr std::string_view kProbeAd = "revoca/key-probe/v1";
  auto sealed = crypto::seal(enc.key, probe, as_bytes(kProbeAd), rng);
  try {
    auto opened = crypto::open(sealed, decap(dk, enc.header), as_bytes(kProbeAd));
    return opened && *opened == probe;
  } catch (const Error&) {
    return false;
  }
}

canonical::Value to_value(const MasterPublicParams& mpp) {
  return canonical::Value::array({mpp.material.scheme_id, mpp.level_bound, fields_value(mpp.material)});
}

canonical::Value to_value(const MasterSecret& msk) {
  return canonical::Value::array({msk.material.scheme_id, fields_value(msk.material)});
}

canonical::Value to_value(const HolderKey& hk) {
  return canonical::Value::array({hk.material.scheme_id, hk.identity.to_value(), fields_value(hk.material)});
}

canonical::Value to_value(const DayKey& dk) {
  return canonical::Value::array({dk.material.scheme_id, dk.identity.to_value(), fields_value(dk.material)});
}

canonical::Value to_value(const EncapHeader& h) {
  return canonical::Value::array({h.material.scheme_id, fields_value(h.material)});
}

MasterPublicParams params_from_value(const canonical::Value& v) {
  MasterPublicParams mpp{material_from(tuple_at(v, 3, 0), tuple_at(v, 3, 2))};
  if (canonical::as_uint(v[1], "level_bound") != 2) throw Error(Errc::decode, "level bound must be 2");
  detail::scheme_for(mpp.scheme_id()).validate_params(mpp.material);
  return mpp;
}

MasterSecret secret_from_value(const canonical::Value& v) {
  return {material_from(tuple_at(v, 2, 0), tuple_at(v, 2, 1))};
}

HolderKey holder_key_from_value(const canonical::Value& v) {
  auto id = IdentityPath::from_value(tuple_at(v, 3, 1));
  if (id.level() != 1) throw Error(Errc::decode, "holder key must carry a level-1 identity");
  return {std::move(id), material_from(v[0], v[2])};
}

DayKey day_key_from_value(const canonical::Value& v) {
  auto id = IdentityPath::from_value(tuple_at(v, 3, 1));
  if (id.level() != 2) throw Error(Errc::decode, "day key must carry a level-2 identity");
  return {std::move(id), material_from(v[0], v[2])};
}

EncapHeader header_from_value(const canonical::Value& v) {
  return {material_from(tuple_at(v, 2, 0), tuple_at(v, 2, 1))};
}

namespace detail {

const Scheme& scheme_for(std::string_view id) {
  if (id == kTransparentScheme) return transparent_scheme();
  if (id == kBoyenWatersScheme) return boyen_waters_scheme();
  throw Error(Errc::decode, "unknown AHIBE scheme '" + std::string(id) + "'");
}

}  // namespace detail
}  // namespace revoca::ahibe
