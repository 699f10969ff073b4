#pragma once

// Sieve-backed arithmetic functions: Omega, omega, Liouville, Moebius, digit
// sums, p-adic valuations, and completely additive / completely
// multiplicative functions described by finite prime-set assignments.

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ergolab {

// Smallest-prime-factor table for [0, limit]. spf[0] = 0 and spf[1] = 1 by
// convention; spf[n] for n >= 2 is the least prime dividing n.
//
// Memory: 4 bytes per entry for the table. Construction additionally keeps the
// list of primes up to the limit (about 0.23 bytes per entry at 1e8) and
// releases it afterwards.
class FactorSieve {
 public:
  explicit FactorSieve(std::uint32_t limit);

  // Adopts a previously computed table (e.g. loaded from the on-disk cache).
  // The table is checked for the basic invariants on n <= 1e4 and spot
  // checked elsewhere.
  static FactorSieve from_table(std::vector<std::uint32_t> spf);

  std::uint32_t limit() const { return limit_; }
  std::span<const std::uint32_t> table() const { return spf_; }

  std::uint32_t smallest_factor(std::uint64_t n) const;
  bool in_range(std::uint64_t n) const { return n >= 1 && n <= limit_; }

  // Primality from the table when in range, deterministic Miller-Rabin
  // otherwise.
  bool is_prime(std::uint64_t n) const;

  // Calls fn(p, e) for each prime power p^e exactly dividing n, ascending p.
  template <typename Fn>
  void for_each_prime_power(std::uint64_t n, Fn&& fn) const {
    check(n);
    auto m = static_cast<std::uint32_t>(n);
    while (m > 1) {
      std::uint32_t p = spf_[m];
      unsigned e = 0;
      do {
        m /= p;
        ++e;
      } while (m % p == 0);
      fn(p, e);
    }
  }

  std::vector<std::pair<std::uint32_t, unsigned>> factorize(std::uint64_t n) const;

 private:
  FactorSieve() = default;
  void check(std::uint64_t n) const;

  std::uint32_t limit_ = 0;
  std::vector<std::uint32_t> spf_;
};

// Deterministic for all 64-bit n (witnesses are the first twelve primes,
// 2..37, which suffice below 3.3e24).
bool is_prime_u64(std::uint64_t n);

// Full factorization of any 64-bit n >= 1 (trial division by small primes,
// then Pollard-Brent). Ascending primes.
std::vector<std::pair<std::uint64_t, unsigned>> factorize_u64(std::uint64_t n);

// True when |x - p/q| <= tol for some q <= max_den. Used as the practical
// rationality test for rotation parameters given as doubles.
bool is_near_rational(double x, std::uint64_t max_den = 10000, double tol = 1e-10);

class PrimeSet {
 public:
  struct Explicit {
    std::vector<std::uint64_t> primes;  // sorted, unique
  };
  struct Residue {
    std::uint64_t r;
    std::uint64_t m;
  };
  struct All {};
  struct Complement {
    std::shared_ptr<const PrimeSet> inner;
  };
  using Variant = std::variant<Explicit, Residue, All, Complement>;

  static PrimeSet all() { return PrimeSet(All{}); }
  static PrimeSet none() { return PrimeSet(Explicit{}); }
  static PrimeSet of(std::vector<std::uint64_t> primes);
  static PrimeSet residue(std::uint64_t r, std::uint64_t m);
  static PrimeSet complement(PrimeSet inner);

  // Membership for a prime p. Callers pass primes only.
  bool contains(std::uint64_t p) const;
  const Variant& variant() const { return v_; }
  std::string describe() const;

 private:
  explicit PrimeSet(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

// Completely additive a: N -> N u {0}; a(p) is the value of the first
// assignment whose set contains p, else `fallback`.
struct AdditiveFunctionSpec {
  std::vector<std::pair<PrimeSet, std::uint32_t>> assignments;
  std::uint32_t fallback = 0;

  static AdditiveFunctionSpec big_omega() { return {{}, 1}; }
  static AdditiveFunctionSpec restricted(PrimeSet q) { return {{{std::move(q), 1}}, 0}; }

  std::uint32_t at_prime(std::uint64_t p) const;
  std::vector<std::uint32_t> distinct_values() const;
  std::string describe() const;
};

// Completely multiplicative b: N -> S^1 with values fixed per prime set.
// Construction rejects values whose modulus differs from 1 by more than 1e-9.
class MultiplicativeFunctionSpec {
 public:
  MultiplicativeFunctionSpec(std::vector<std::pair<PrimeSet, std::complex<double>>> assignments,
                             std::complex<double> fallback);

  static MultiplicativeFunctionSpec liouville() { return {{}, -1.0}; }

  std::complex<double> at_prime(std::uint64_t p) const;
  const auto& assignments() const { return assignments_; }
  std::complex<double> fallback() const { return fallback_; }
  std::vector<std::complex<double>> distinct_values() const;
  std::string describe() const;

 private:
  std::vector<std::pair<PrimeSet, std::complex<double>>> assignments_;
  std::complex<double> fallback_;
};

unsigned big_omega(const FactorSieve& sieve, std::uint64_t n);
unsigned small_omega(const FactorSieve& sieve, std::uint64_t n);
int liouville(const FactorSieve& sieve, std::uint64_t n);
int moebius(const FactorSieve& sieve, std::uint64_t n);
bool is_k_free(const FactorSieve& sieve, std::uint64_t n, unsigned k);
std::uint64_t digit_sum(std::uint64_t n, std::uint64_t q);
unsigned padic_valuation(std::uint64_t n, std::uint64_t p);
unsigned omega_restricted(const FactorSieve& sieve, std::uint64_t n, const PrimeSet& q);
std::uint64_t completely_additive_eval(const FactorSieve& sieve, const AdditiveFunctionSpec& spec,
                                       std::uint64_t n);
std::complex<double> completely_multiplicative_eval(const FactorSieve& sieve,
                                                    const MultiplicativeFunctionSpec& spec,
                                                    std::uint64_t n);

// Bulk tables over [0, n_max] (index 0 unused, set to 0). Linear time via
// value[n] = value[n / spf(n)] + contribution(spf(n)).
std::vector<std::uint8_t> big_omega_table(const FactorSieve& sieve, std::uint32_t n_max);
std::vector<std::uint8_t> small_omega_table(const FactorSieve& sieve, std::uint32_t n_max);
// counts[k] = #{1 <= n <= n_max : Omega(n) = k}.
std::vector<std::uint64_t> big_omega_histogram(const FactorSieve& sieve, std::uint32_t n_max);
std::vector<std::uint32_t> additive_table(const FactorSieve& sieve, const AdditiveFunctionSpec& spec,
                                          std::uint32_t n_max);

}  // namespace ergolab
