#include "bls12.hpp"

#include <vector>

#include "revoca/crypto.hpp"
#include "revoca/errors.hpp"

namespace revoca::bls12 {
namespace {

blst_fr fr_from_wide(std::span<const std::uint8_t, 64> wide) {
  blst_scalar s;
  blst_scalar_from_le_bytes(&s, wide.data(), wide.size());
  blst_fr out;
  blst_fr_from_scalar(&out, &s);
  return out;
}

blst_scalar scalar_of(const std::array<std::uint8_t, 32>& le) {
  blst_scalar s;
  blst_scalar_from_lendian(&s, le.data());
  return s;
}

}  // namespace

Scalar Scalar::from_u64(std::uint64_t v) {
  const std::uint64_t limbs[4] = {v, 0, 0, 0};
  Scalar out;
  blst_fr_from_uint64(&out.v_, limbs);
  return out;
}

Scalar Scalar::random(RandomSource& rng) {
  std::array<std::uint8_t, 64> wide;
  rng.fill(wide);
  Scalar out;
  out.v_ = fr_from_wide(wide);
  return out;
}

Scalar Scalar::hash(std::string_view domain, ByteView data) {
  auto okm = crypto::hkdf(as_bytes(domain), data, as_bytes("revoca/hash-to-scalar/v1"), 64);
  Scalar out;
  out.v_ = fr_from_wide(std::span<const std::uint8_t, 64>(okm.data(), 64));
  return out;
}

Scalar Scalar::from_bytes(ByteView b) {
  if (b.size() != 32) throw Error(Errc::decode, "scalar must be 32 bytes");
  blst_scalar s;
  blst_scalar_from_lendian(&s, b.data());
  if (!blst_scalar_fr_check(&s)) throw Error(Errc::decode, "scalar out of range");
  Scalar out;
  blst_fr_from_scalar(&out.v_, &s);
  return out;
}

std::array<std::uint8_t, 32> Scalar::to_bytes() const {
  blst_scalar s;
  blst_scalar_from_fr(&s, &v_);
  std::array<std::uint8_t, 32> out;
  blst_lendian_from_scalar(out.data(), &s);
  return out;
}

bool Scalar::is_zero() const {
  auto b = to_bytes();
  for (auto x : b)
    if (x != 0) return false;
  return true;
}

Scalar operator+(const Scalar& a, const Scalar& b) {
  Scalar out;
  blst_fr_add(&out.v_, &a.v_, &b.v_);
  return out;
}

Scalar operator-(const Scalar& a, const Scalar& b) {
  Scalar out;
  blst_fr_sub(&out.v_, &a.v_, &b.v_);
  return out;
}

Scalar operator*(const Scalar& a, const Scalar& b) {
  Scalar out;
  blst_fr_mul(&out.v_, &a.v_, &b.v_);
  return out;
}

Scalar Scalar::operator-() const {
  Scalar out;
  blst_fr_cneg(&out.v_, &v_, true);
  return out;
}

G1 G1::generator() {
  G1 g;
  g.p_ = *blst_p1_generator();
  return g;
}

G1 G1::from_bytes(ByteView b) {
  if (b.size() != kCompressedSize) throw Error(Errc::decode, "G1 element must be 48 bytes");
  blst_p1_affine a;
  if (blst_p1_uncompress(&a, b.data()) != BLST_SUCCESS || !blst_p1_affine_in_g1(&a))
    throw Error(Errc::decode, "invalid G1 element");
  G1 out;
  blst_p1_from_affine(&out.p_, &a);
  return out;
}

G1 G1::operator*(const Scalar& s) const {
  auto sc = scalar_of(s.to_bytes());
  G1 out;
  blst_p1_mult(&out.p_, &p_, sc.b, 255);
  return out;
}

G1 G1::operator+(const G1& o) const {
  G1 out;
  blst_p1_add_or_double(&out.p_, &p_, &o.p_);
  return out;
}

Bytes G1::to_bytes() const {
  Bytes out(kCompressedSize);
  blst_p1_compress(out.data(), &p_);
  return out;
}

blst_p1_affine G1::affine() const {
  blst_p1_affine a;
  blst_p1_to_affine(&a, &p_);
  return a;
}

G2 G2::generator() {
  G2 g;
  g.p_ = *blst_p2_generator();
  return g;
}

G2 G2::from_bytes(ByteView b) {
  if (b.size() != kCompressedSize) throw Error(Errc::decode, "G2 element must be 96 bytes");
  blst_p2_affine a;
  if (blst_p2_uncompress(&a, b.data()) != BLST_SUCCESS || !blst_p2_affine_in_g2(&a))
    throw Error(Errc::decode, "invalid G2 element");
  G2 out;
  blst_p2_from_affine(&out.p_, &a);
  return out;
}

G2 G2::operator*(const Scalar& s) const {
  auto sc = scalar_of(s.to_bytes());
  G2 out;
  blst_p2_mult(&out.p_, &p_, sc.b, 255);
  return out;
}

G2 G2::operator+(const G2& o) const {
  G2 out;
  blst_p2_add_or_double(&out.p_, &p_, &o.p_);
  return out;
}

Bytes G2::to_bytes() const {
  Bytes out(kCompressedSize);
  blst_p2_compress(out.data(), &p_);
  return out;
}

blst_p2_affine G2::affine() const {
  blst_p2_affine a;
  blst_p2_to_affine(&a, &p_);
  return a;
}

GT::GT() : v_(*blst_fp12_one()) {}

GT GT::from_bytes(ByteView b) {
  if (b.size() != kSize) throw Error(Errc::decode, "GT element must be 576 bytes");
  GT out;
  const std::uint8_t* p = b.data();
  // Coefficient order of blst_bendian_from_fp12.
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 2; ++j) {
      blst_fp_from_bendian(&out.v_.fp6[j].fp2[i].fp[0], p);
      p += 48;
      blst_fp_from_bendian(&out.v_.fp6[j].fp2[i].fp[1], p);
      p += 48;
    }
  }
  if (!blst_fp12_in_group(&out.v_) || out.to_bytes() != Bytes(b.begin(), b.end()))
    throw Error(Errc::decode, "invalid GT element");
  return out;
}

GT GT::operator*(const GT& o) const {
  GT out;
  blst_fp12_mul(&out.v_, &v_, &o.v_);
  return out;
}

GT GT::pow(const Scalar& s) const {
  auto bits = s.to_bytes();
  GT acc;
  for (int i = 254; i >= 0; --i) {
    blst_fp12_cyclotomic_sqr(&acc.v_, &acc.v_);
    if ((bits[i / 8] >> (i % 8)) & 1) blst_fp12_mul(&acc.v_, &acc.v_, &v_);
  }
  return acc;
}

GT GT::inverse() const {
  GT out = *this;
  blst_fp12_conjugate(&out.v_);
  return out;
}

Bytes GT::to_bytes() const {
  Bytes out(kSize);
  blst_bendian_from_fp12(out.data(), &v_);
  return out;
}

bool GT::operator==(const GT& o) const { return blst_fp12_is_equal(&v_, &o.v_); }

GT GT::pairing_product(std::span<const std::pair<G1, G2>> terms) {
  std::vector<blst_p1_affine> ps;
  std::vector<blst_p2_affine> qs;
  ps.reserve(terms.size());
  qs.reserve(terms.size());
  for (const auto& [p, q] : terms) {
    ps.push_back(p.affine());
    qs.push_back(q.affine());
  }
  std::vector<const blst_p1_affine*> pp;
  std::vector<const blst_p2_affine*> qp;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    pp.push_back(&ps[i]);
    qp.push_back(&qs[i]);
  }
  blst_fp12 ml;
  blst_miller_loop_n(&ml, qp.data(), pp.data(), terms.size());
  GT out;
  blst_final_exp(&out.v_, &ml);
  return out;
}

}  // namespace revoca::bls12
