#pragma once

// On-disk smallest-prime-factor tables: the 8-byte magic "ERGOSPF1" followed
// by little-endian uint32 entries for indices 0..limit.

#include <cstdint>
#include <filesystem>
#include <memory>

#include "ergolab/arith.hpp"

namespace ergolab {

void save_sieve(const FactorSieve& sieve, const std::filesystem::path& file);
FactorSieve load_sieve(const std::filesystem::path& file);

// Directory from $ERGOLAB_CACHE, else $XDG_CACHE_HOME/ergolab, else
// ~/.cache/ergolab, else ./.ergolab-cache.
std::filesystem::path default_cache_dir();

// Round a required limit up to 1, 2 or 5 times a power of ten.
std::uint32_t round_sieve_limit(std::uint64_t need);

// A sieve covering `need`: the smallest cached table with limit in
// [need, 4 need] if one exists, otherwise a freshly built one (saved when
// `dir` is nonempty). Throws ResourceExhausted past 2^32 - 1.
std::shared_ptr<const FactorSieve> obtain_sieve(std::uint64_t need, const std::filesystem::path& dir);

}  // namespace ergolab
