#pragma once

#include <cmath>
#include <cstdint>

#include "revoca/errors.hpp"

namespace revoca::testing {

inline Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::usage;  // sentinel: nothing thrown
}

inline double poisson_cdf(std::uint64_t k, double lambda) {
  double term = std::exp(-lambda), sum = term;
  for (std::uint64_t i = 1; i <= k; ++i) {
    term *= lambda / static_cast<double>(i);
    sum += term;
  }
  return sum;
}

// Smallest b with P(max of m iid Poisson(lambda) <= b) >= q.
inline std::uint64_t poisson_max_bound(double lambda, std::uint64_t m, double q) {
  std::uint64_t b = 0;
  while (std::pow(poisson_cdf(b, lambda), static_cast<double>(m)) < q) ++b;
  return b;
}

}  // namespace revoca::testing
