#include <array>

#include "ahibe_scheme.hpp"
#include "bls12.hpp"
#include "revoca/errors.hpp"

namespace revoca::ahibe::detail {
namespace {

Bytes be64(std::uint64_t v) {
  Bytes b;
  append_be64(b, v);
  return b;
}

const Bytes& sized(const Material& m, const std::string& name, std::size_t n) {
  const Bytes& b = m.at(name);
  if (b.size() != n) throw Error(Errc::decode, m.scheme_id + " field '" + name + "' has the wrong length");
  return b;
}

// ---------------------------------------------------------------------------
// transparent-v1. Test only: anyone holding the public parameters holds the
// master secret.

class TransparentScheme final : public Scheme {
 public:
  std::string_view id() const override { return kTransparentScheme; }

  std::pair<Material, Material> setup(RandomSource& rng) const override {
    auto msk = rng.bytes(32);
    Material pub{std::string(id()), {{"msk", msk}}};
    Material sec{std::string(id()), {{"msk", msk}}};
    return {pub, sec};
  }

  Material extract(const Material& msk, std::string_view root, RandomSource&) const override {
    return {std::string(id()), {{"k", holder_secret(sized(msk, "msk", 32), root)}}};
  }

  Material delegate(const Material& hk, std::string_view, DayIndex day, RandomSource&) const override {
    return {std::string(id()), {{"k", day_secret(sized(hk, "k", 32), day)}}};
  }

  std::pair<Material, SymmetricKey> encap(const Material& mpp, const IdentityPath& id_path,
                                          RandomSource& rng) const override {
    auto dk = day_secret(holder_secret(sized(mpp, "msk", 32), id_path.root), *id_path.day);
    auto r = rng.bytes(32);
    auto key = kem_key(dk, r);
    return {Material{std::string(id()), {{"r", std::move(r)}}}, key};
  }

  SymmetricKey decap(const Material& dk, const Material& header) const override {
    return kem_key(sized(dk, "k", 32), sized(header, "r", 32));
  }

  void validate_params(const Material& mpp) const override { sized(mpp, "msk", 32); }

 private:
  static Bytes holder_secret(ByteView msk, std::string_view root) {
    return crypto::hkdf(as_bytes("transparent-v1/holder"), msk, as_bytes(root), 32);
  }

  static Bytes day_secret(ByteView holder, DayIndex day) {
    return crypto::hkdf(as_bytes("transparent-v1/day"), holder, be64(day.value), 32);
  }

  static SymmetricKey kem_key(ByteView day_secret, ByteView r) {
    Bytes msg = to_bytes("transparent-v1/kem");
    append(msg, r);
    return SymmetricKey::from(crypto::hmac_sha256(day_secret, msg));
  }
};

// ---------------------------------------------------------------------------
// Boyen-Waters anonymous 2-level HIBE over BLS12-381, used as a KEM.
//
// Ciphertexts live in G1, keys in G2. With F(H,T) = g^(y0 + y1 h + y2 t):
//   header  C0 = F^s, C1 = V1^(s-s1), C2 = V2^s1, C3 = V3^(s-s2), C4 = V4^s2
//   day key d0 = ĝ^(r1 t1 t2 + r2 t3 t4)
//           d1 = ĝ^(-w t2 - r1 t2 f), d2 = ĝ^(-w t1 - r1 t1 f)
//           d3 = ĝ^(-r2 t4 f),        d4 = ĝ^(-r2 t3 f)
//   prod e(Ci, di) = Omega^-s with Omega = e(g, ĝ)^(w t1 t2)
// The holder key adds delegation components for the day level and two
// re-randomisation vectors, so each delegated day key carries fresh (r1, r2).

using bls12::G1;
using bls12::G2;
using bls12::GT;
using bls12::Scalar;

Scalar root_scalar(std::string_view root) { return Scalar::hash("revoca/bw/root", as_bytes(root)); }
Scalar day_scalar(DayIndex day) { return Scalar::hash("revoca/bw/day", be64(day.value)); }

Scalar scalar_field(const Material& m, const std::string& name) { return Scalar::from_bytes(sized(m, name, 32)); }
G1 g1_field(const Material& m, const std::string& name) { return G1::from_bytes(m.at(name)); }
G2 g2_field(const Material& m, const std::string& name) { return G2::from_bytes(m.at(name)); }

Bytes scalar_bytes(const Scalar& s) {
  auto a = s.to_bytes();
  return {a.begin(), a.end()};
}

constexpr std::array<const char*, 5> kHeaderFields = {"c0", "c1", "c2", "c3", "c4"};
constexpr std::array<const char*, 5> kDayKeyFields = {"d0", "d1", "d2", "d3", "d4"};

SymmetricKey bw_kem_key(const GT& w, const Material& header) {
  Bytes info;
  for (const char* name : kHeaderFields) append(info, header.at(name));
  return SymmetricKey::from(crypto::hkdf(as_bytes("revoca/bw-kem/v1"), w.to_bytes(), info, 32));
}

class BoyenWatersScheme final : public Scheme {
 public:
  std::string_view id() const override { return kBoyenWatersScheme; }

  std::pair<Material, Material> setup(RandomSource& rng) const override {
    auto w = Scalar::random(rng);
    std::array<Scalar, 4> t = {Scalar::random(rng), Scalar::random(rng), Scalar::random(rng), Scalar::random(rng)};
    std::array<Scalar, 3> y = {Scalar::random(rng), Scalar::random(rng), Scalar::random(rng)};
    const G1 g = G1::generator();

    Material pub{std::string(id()), {}};
    for (int i = 0; i < 3; ++i) pub.fields["Y" + std::to_string(i)] = (g * y[i]).to_bytes();
    for (int i = 0; i < 4; ++i) pub.fields["V" + std::to_string(i + 1)] = (g * t[i]).to_bytes();
    const std::pair<G1, G2> base{g, G2::generator()};
    pub.fields["Omega"] = GT::pairing_product({&base, 1}).pow(w * t[0] * t[1]).to_bytes();

    Material sec{std::string(id()), {{"w", scalar_bytes(w)}}};
    for (int i = 0; i < 4; ++i) sec.fields["t" + std::to_string(i + 1)] = scalar_bytes(t[i]);
    for (int i = 0; i < 3; ++i) sec.fields["y" + std::to_string(i)] = scalar_bytes(y[i]);
    return {pub, sec};
  }

  Material extract(const Material& msk, std::string_view root, RandomSource& rng) const override {
    const Scalar w = scalar_field(msk, "w");
    const Scalar t1 = scalar_field(msk, "t1"), t2 = scalar_field(msk, "t2");
    const Scalar t3 = scalar_field(msk, "t3"), t4 = scalar_field(msk, "t4");
    const Scalar y0 = scalar_field(msk, "y0"), y1 = scalar_field(msk, "y1"), y2 = scalar_field(msk, "y2");
    const Scalar f = y0 + y1 * root_scalar(root);
    const Scalar r1 = Scalar::random(rng), r2 = Scalar::random(rng);
    const Scalar p1 = Scalar::random(rng), p2 = Scalar::random(rng);
    const G2 g = G2::generator();

    Material hk{std::string(id()), {}};
    auto put = [&](const char* name, const Scalar& e) { hk.fields[name] = (g * e).to_bytes(); };
    put("k0", r1 * t1 * t2 + r2 * t3 * t4);
    put("k1", -(w * t2) - r1 * t2 * f);
    put("k2", -(w * t1) - r1 * t1 * f);
    put("k3", -(r2 * t4 * f));
    put("k4", -(r2 * t3 * f));
    // delegation to the day level
    put("e1", -(r1 * t2 * y2));
    put("e2", -(r1 * t1 * y2));
    put("e3", -(r2 * t4 * y2));
    put("e4", -(r2 * t3 * y2));
    // re-randomisation of r1
    put("a0", p1 * t1 * t2);
    put("a1", -(p1 * t2 * f));
    put("a2", -(p1 * t1 * f));
    put("a1d", -(p1 * t2 * y2));
    put("a2d", -(p1 * t1 * y2));
    // re-randomisation of r2
    put("b0", p2 * t3 * t4);
    put("b3", -(p2 * t4 * f));
    put("b4", -(p2 * t3 * f));
    put("b3d", -(p2 * t4 * y2));
    put("b4d", -(p2 * t3 * y2));
    return hk;
  }

  Material delegate(const Material& hk, std::string_view, DayIndex day, RandomSource& rng) const override {
    const Scalar t = day_scalar(day);
    const Scalar da = Scalar::random(rng), db = Scalar::random(rng);
    auto g = [&](const char* name) { return g2_field(hk, name); };

    const G2 d0 = g("k0") + g("a0") * da + g("b0") * db;
    const G2 d1 = g("k1") + g("e1") * t + (g("a1") + g("a1d") * t) * da;
    const G2 d2 = g("k2") + g("e2") * t + (g("a2") + g("a2d") * t) * da;
    const G2 d3 = g("k3") + g("e3") * t + (g("b3") + g("b3d") * t) * db;
    const G2 d4 = g("k4") + g("e4") * t + (g("b4") + g("b4d") * t) * db;
    return {std::string(id()),
            {{"d0", d0.to_bytes()}, {"d1", d1.to_bytes()}, {"d2", d2.to_bytes()}, {"d3", d3.to_bytes()},
             {"d4", d4.to_bytes()}}};
  }

  std::pair<Material, SymmetricKey> encap(const Material& mpp, const IdentityPath& id_path,
                                          RandomSource& rng) const override {
    const Scalar s = Scalar::random(rng), s1 = Scalar::random(rng), s2 = Scalar::random(rng);
    const G1 f = g1_field(mpp, "Y0") + g1_field(mpp, "Y1") * root_scalar(id_path.root) +
                 g1_field(mpp, "Y2") * day_scalar(*id_path.day);
    Material header{std::string(id()),
                    {{"c0", (f * s).to_bytes()},
                     {"c1", (g1_field(mpp, "V1") * (s - s1)).to_bytes()},
                     {"c2", (g1_field(mpp, "V2") * s1).to_bytes()},
                     {"c3", (g1_field(mpp, "V3") * (s - s2)).to_bytes()},
                     {"c4", (g1_field(mpp, "V4") * s2).to_bytes()}}};
    const GT w = GT::from_bytes(mpp.at("Omega")).pow(s);
    return {header, bw_kem_key(w, header)};
  }

  SymmetricKey decap(const Material& dk, const Material& header) const override {
    std::array<std::pair<G1, G2>, 5> terms;
    for (std::size_t i = 0; i < 5; ++i)
      terms[i] = {g1_field(header, kHeaderFields[i]), g2_field(dk, kDayKeyFields[i])};
    return bw_kem_key(GT::pairing_product(terms).inverse(), header);
  }

  void validate_params(const Material& mpp) const override {
    for (const char* name : {"Y0", "Y1", "Y2", "V1", "V2", "V3", "V4"}) g1_field(mpp, name);
    GT::from_bytes(mpp.at("Omega"));
  }
};

}  // namespace

const Scheme& transparent_scheme() {
  static const TransparentScheme scheme;
  return scheme;
}

const Scheme& boyen_waters_scheme() {
  static const BoyenWatersScheme scheme;
  return scheme;
}

}  // namespace revoca::ahibe::detail
