#include <doctest.h>

#include <cmath>
#include <complex>
#include <numeric>

#include "common.hpp"
#include "ergolab/arith.hpp"
#include "ergolab/error.hpp"

using namespace ergolab;
using testing_support::rng;
using testing_support::sieve;

TEST_CASE("sieve small values") {
  FactorSieve s(100);
  CHECK(s.smallest_factor(2) == 2);
  CHECK(s.smallest_factor(91) == 7);
  CHECK(s.smallest_factor(97) == 97);
  CHECK_THROWS_AS(s.smallest_factor(101), OutOfRange);
  CHECK_THROWS_AS(big_omega(s, 0), OutOfRange);
}

TEST_CASE("sieve invariants against trial division") {
  const auto& s = sieve(1000000);
  for (std::uint64_t n = 2; n <= 100000; ++n) {
    const auto p = s.smallest_factor(n);
    REQUIRE(n % p == 0);
    REQUIRE((p == n) == testing_support::trial_is_prime(n));
    REQUIRE((static_cast<std::uint64_t>(p) * p <= n || p == n));
    REQUIRE(big_omega(s, n) == testing_support::trial_big_omega(n));
  }
}

TEST_CASE("table adoption validates") {
  FactorSieve s(20000);
  auto t = std::vector<std::uint32_t>(s.table().begin(), s.table().end());
  CHECK(FactorSieve::from_table(t).limit() == 20000);
  t[91] = 13;
  CHECK_THROWS(FactorSieve::from_table(t));
}

TEST_CASE("pointwise examples") {
  const auto& s = sieve(1000000);
  CHECK(big_omega(s, 1) == 0);
  CHECK(big_omega(s, 12) == 3);
  CHECK(big_omega(s, 1024) == 10);
  CHECK(small_omega(s, 1) == 0);
  CHECK(small_omega(s, 12) == 2);
  CHECK(small_omega(s, 97) == 1);
  CHECK(liouville(s, 1) == 1);
  CHECK(liouville(s, 2) == -1);
  CHECK(liouville(s, 12) == -1);
  CHECK(moebius(s, 4) == 0);
  CHECK(moebius(s, 6) == 1);
  CHECK(moebius(s, 30) == -1);
  CHECK(is_k_free(s, 1, 2));
  CHECK(is_k_free(s, 1, 7));
  CHECK_FALSE(is_k_free(s, 4, 2));
  CHECK(is_k_free(s, 12, 3));
  CHECK_THROWS_AS(is_k_free(s, 12, 1), InvalidArgument);
  CHECK(digit_sum(5, 2) == 2);
  CHECK(digit_sum(7, 7) == 1);
  CHECK(digit_sum(999, 10) == 27);
  CHECK(digit_sum(0, 2) == 0);
  CHECK_THROWS_AS(digit_sum(5, 1), InvalidArgument);
  CHECK(padic_valuation(15, 2) == 0);
  CHECK(padic_valuation(8, 2) == 3);
  CHECK(padic_valuation(18, 3) == 2);
  CHECK_THROWS_AS(padic_valuation(18, 4), InvalidArgument);
}

TEST_CASE("restricted and additive functions") {
  const auto& s = sieve(1000000);
  CHECK(omega_restricted(s, 12, PrimeSet::of({2})) == 2);
  for (std::uint64_t n = 1; n <= 10000; ++n) {
    REQUIRE(omega_restricted(s, n, PrimeSet::all()) == big_omega(s, n));
    REQUIRE(omega_restricted(s, n, PrimeSet::none()) == 0);
    REQUIRE(completely_additive_eval(s, AdditiveFunctionSpec::big_omega(), n) == big_omega(s, n));
    REQUIRE(completely_additive_eval(s, AdditiveFunctionSpec{{}, 0}, n) == 0);
    REQUIRE(completely_additive_eval(s, AdditiveFunctionSpec::restricted(PrimeSet::of({2})), n) ==
            padic_valuation(n, 2));
  }
}

TEST_CASE("multiplicative spec") {
  const auto& s = sieve(1000000);
  const std::complex<double> i(0, 1);
  MultiplicativeFunctionSpec b({{PrimeSet::of({2}), i}}, 1.0);
  CHECK(std::abs(completely_multiplicative_eval(s, b, 12) - std::complex<double>(-1.0)) < 1e-15);
  for (std::uint64_t n = 1; n <= 10000; ++n) {
    REQUIRE(completely_multiplicative_eval(s, MultiplicativeFunctionSpec::liouville(), n).real() == liouville(s, n));
    REQUIRE(completely_multiplicative_eval(s, MultiplicativeFunctionSpec({}, 1.0), n) == std::complex<double>(1.0));
  }
  CHECK_THROWS_AS(MultiplicativeFunctionSpec({}, 0.5), InvalidArgument);
}

TEST_CASE("complete additivity and multiplicativity on random pairs") {
  const auto& s = sieve(1000000);
  const auto q = PrimeSet::residue(1, 4);
  const AdditiveFunctionSpec a{{{PrimeSet::of({3, 5}), 2}, {PrimeSet::residue(1, 4), 1}}, 4};
  const MultiplicativeFunctionSpec b({{PrimeSet::residue(3, 4), std::complex<double>(0, 1)},
                                      {PrimeSet::of({2}), std::polar(1.0, 1.0)}},
                                     -1.0);
  std::uniform_int_distribution<std::uint64_t> d(1, 1000);
  for (int t = 0; t < 1000; ++t) {
    const auto m = d(rng()), n = d(rng());
    REQUIRE(big_omega(s, m * n) == big_omega(s, m) + big_omega(s, n));
    REQUIRE(omega_restricted(s, m * n, q) == omega_restricted(s, m, q) + omega_restricted(s, n, q));
    REQUIRE(completely_additive_eval(s, a, m * n) == completely_additive_eval(s, a, m) + completely_additive_eval(s, a, n));
    REQUIRE(liouville(s, m * n) == liouville(s, m) * liouville(s, n));
    const auto lhs = completely_multiplicative_eval(s, b, m * n);
    const auto rhs = completely_multiplicative_eval(s, b, m) * completely_multiplicative_eval(s, b, n);
    REQUIRE(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("moebius squarefree identity and omega relations") {
  const auto& s = sieve(1000000);
  for (std::uint64_t n = 1; n <= 100000; ++n) {
    int sum = 0;
    for (std::uint64_t d = 1; d * d <= n; ++d)
      if (n % (d * d) == 0) sum += moebius(s, d);
    REQUIRE(sum == (is_k_free(s, n, 2) ? 1 : 0));
    REQUIRE(small_omega(s, n) <= big_omega(s, n));
    REQUIRE((small_omega(s, n) == big_omega(s, n)) == is_k_free(s, n, 2));
    const auto q = PrimeSet::residue(1, 4);
    REQUIRE(omega_restricted(s, n, q) + omega_restricted(s, n, PrimeSet::complement(q)) == big_omega(s, n));
  }
  for (std::uint64_t q = 2; q <= 16; ++q)
    for (std::uint64_t n = 0; n <= 5000; ++n) REQUIRE(digit_sum(n, q) % (q - 1) == n % (q - 1));
}

TEST_CASE("tables agree with pointwise values") {
  const auto& s = sieve(1000000);
  const auto bo = big_omega_table(s, 200000);
  const auto so = small_omega_table(s, 200000);
  const auto hist = big_omega_histogram(s, 200000);
  std::vector<std::uint64_t> h(hist.size(), 0);
  for (std::uint64_t n = 1; n <= 200000; ++n) {
    REQUIRE(bo[n] == big_omega(s, n));
    REQUIRE(so[n] == small_omega(s, n));
    ++h.at(bo[n]);
  }
  CHECK(h == hist);
  CHECK(std::accumulate(hist.begin(), hist.end(), std::uint64_t{0}) == 200000);
}

TEST_CASE("64-bit primality and factorization") {
  const auto& s = sieve(1000000);
  for (std::uint64_t n = 0; n <= 100000; ++n) REQUIRE(is_prime_u64(n) == (n >= 2 && s.smallest_factor(n) == n));
  CHECK(is_prime_u64(18446744073709551557ull));
  CHECK_FALSE(is_prime_u64(3215031751ull));  // strong pseudoprime to bases 2, 3, 5, 7
  std::uniform_int_distribution<std::uint64_t> d(2, ~std::uint64_t{0});
  for (int t = 0; t < 1000; ++t) {
    const auto n = d(rng());
    std::uint64_t prod = 1;
    std::uint64_t last = 0;
    for (auto [p, e] : factorize_u64(n)) {
      REQUIRE(p > last);
      REQUIRE(is_prime_u64(p));
      for (unsigned i = 0; i < e; ++i) prod *= p;
      last = p;
    }
    REQUIRE(prod == n);
  }
}

TEST_CASE("rationality test") {
  CHECK(is_near_rational(1.0 / 3.0));
  CHECK(is_near_rational(0.25));
  CHECK_FALSE(is_near_rational(std::sqrt(2.0) - 1.0));
  CHECK_FALSE(is_near_rational((1.0 + std::sqrt(5.0)) / 2.0));
}

TEST_CASE("prime set descriptors") {
  CHECK(PrimeSet::residue(1, 4).contains(5));
  CHECK_FALSE(PrimeSet::residue(1, 4).contains(7));
  CHECK(PrimeSet::complement(PrimeSet::of({2})).contains(3));
  CHECK_FALSE(PrimeSet::complement(PrimeSet::of({2})).contains(2));
  CHECK_THROWS_AS(PrimeSet::of({4}), InvalidArgument);
  AdditiveFunctionSpec a{{{PrimeSet::of({2}), 5}, {PrimeSet::all(), 1}}, 0};
  CHECK(a.at_prime(2) == 5);  // first match wins
  CHECK(a.at_prime(3) == 1);
}
