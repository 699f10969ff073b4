#pragma once

#include <cstdint>
#include <memory>
#include <random>

#include "ergolab/arith.hpp"

namespace testing_support {

inline const ergolab::FactorSieve& sieve(std::uint32_t limit) {
  // One table per limit used in a test binary; the largest requested so far is shared.
  static std::unique_ptr<ergolab::FactorSieve> s;
  if (!s || s->limit() < limit) s = std::make_unique<ergolab::FactorSieve>(limit);
  return *s;
}

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20240517);
  return g;
}

// Independent trial-division oracle.
inline unsigned trial_big_omega(std::uint64_t n) {
  unsigned k = 0;
  for (std::uint64_t p = 2; p * p <= n; ++p)
    while (n % p == 0) {
      n /= p;
      ++k;
    }
  return k + (n > 1 ? 1 : 0);
}

inline bool trial_is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p = 2; p * p <= n; ++p)
    if (n % p == 0) return false;
  return true;
}

}  // namespace testing_support
