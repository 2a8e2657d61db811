#pragma once

#include <string_view>
#include <utility>

#include "revoca/ahibe.hpp"

namespace revoca::ahibe::detail {

class Scheme {
 public:
  virtual ~Scheme() = default;

  virtual std::string_view id() const = 0;
  virtual std::pair<Material, Material> setup(RandomSource& rng) const = 0;
  virtual Material extract(const Material& msk, std::string_view root, RandomSource& rng) const = 0;
  virtual Material delegate(const Material& hk, std::string_view root, DayIndex day, RandomSource& rng) const = 0;
  // All randomness must come from rng; det_encap relies on this.
  virtual std::pair<Material, SymmetricKey> encap(const Material& mpp, const IdentityPath& id,
                                                  RandomSource& rng) const = 0;
  virtual SymmetricKey decap(const Material& dk, const Material& header) const = 0;
  // Throws Error(decode) if the material does not parse under this scheme.
  virtual void validate_params(const Material& mpp) const = 0;
};

const Scheme& transparent_scheme();
const Scheme& boyen_waters_scheme();

// Throws Error(decode) for unknown ids.
const Scheme& scheme_for(std::string_view id);

}  // namespace revoca::ahibe::detail
