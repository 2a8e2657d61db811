#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

#include <blst.h>

#include "revoca/bytes.hpp"
#include "revoca/random.hpp"

// Thin value wrappers over blst for BLS12-381: scalars mod r, G1, G2 and the
// target group.
namespace revoca::bls12 {

class Scalar {
 public:
  Scalar() = default;

  static Scalar from_u64(std::uint64_t v);
  static Scalar random(RandomSource& rng);
  // Domain-separated hash of data onto Z_r.
  static Scalar hash(std::string_view domain, ByteView data);
  // 32 little-endian bytes; throws Error(decode) unless canonical and < r.
  static Scalar from_bytes(ByteView b);

  std::array<std::uint8_t, 32> to_bytes() const;
  bool is_zero() const;

  friend Scalar operator+(const Scalar& a, const Scalar& b);
  friend Scalar operator-(const Scalar& a, const Scalar& b);
  friend Scalar operator*(const Scalar& a, const Scalar& b);
  Scalar operator-() const;

 private:
  blst_fr v_{};
};

class G1 {
 public:
  static constexpr std::size_t kCompressedSize = 48;

  G1() = default;
  static G1 generator();
  static G1 from_bytes(ByteView b);  // subgroup-checked

  G1 operator*(const Scalar& s) const;
  G1 operator+(const G1& o) const;
  Bytes to_bytes() const;
  blst_p1_affine affine() const;

 private:
  blst_p1 p_{};
};

class G2 {
 public:
  static constexpr std::size_t kCompressedSize = 96;

  G2() = default;
  static G2 generator();
  static G2 from_bytes(ByteView b);  // subgroup-checked

  G2 operator*(const Scalar& s) const;
  G2 operator+(const G2& o) const;
  Bytes to_bytes() const;
  blst_p2_affine affine() const;

 private:
  blst_p2 p_{};
};

class GT {
 public:
  static constexpr std::size_t kSize = 48 * 12;

  GT();
  static GT from_bytes(ByteView b);  // group-membership checked

  GT operator*(const GT& o) const;
  GT pow(const Scalar& s) const;
  // Inverse in the cyclotomic subgroup.
  GT inverse() const;
  Bytes to_bytes() const;
  bool operator==(const GT& o) const;

  // Product of pairings e(P_i, Q_i) with a single final exponentiation.
  static GT pairing_product(std::span<const std::pair<G1, G2>> terms);

 private:
  blst_fp12 v_{};
};

}  // namespace revoca::bls12
