#pragma once

// Independence and disjointness defects, the Katai table, aperiodicity,
// mean values of multiplicative functions, Dirichlet characters mod a prime
// and the idempotency defect of a multiplicative action.

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ergolab/arith.hpp"
#include "ergolab/averaging.hpp"
#include "ergolab/dynsys.hpp"

namespace ergolab {

struct ArithmeticSequence {
  Sequence eval;
  double bound = 1.0;  // |eval(n)| <= bound
  std::string description;

  std::complex<double> operator()(std::uint64_t n) const { return eval(n); }
};

ArithmeticSequence liouville_sequence(const FactorSieve& sieve);
ArithmeticSequence moebius_sequence(const FactorSieve& sieve);
// n -> e(n alpha)
ArithmeticSequence linear_phase_sequence(double alpha);
// n -> a(n) b(n)
ArithmeticSequence pointwise_product(ArithmeticSequence a, ArithmeticSequence b);

// E a conj(b) - E a E conj(b) over [N]. Throws InvalidArgument when a value
// exceeds the declared bound.
std::complex<double> independence_defect(const ArithmeticSequence& a, const ArithmeticSequence& b,
                                         std::uint64_t n_max);

struct KataiTable {
  std::vector<std::uint64_t> primes;
  // entries[i][j] = E_{n in [N]} a(p_i n) conj(a(p_j n)); the diagonal is E |a(p_i n)|^2.
  std::vector<std::vector<std::complex<double>>> entries;
  std::complex<double> mean;  // E_{n in [N]} a(n)

  double max_off_diagonal() const;
};
// a must be defined up to max(P) * N.
KataiTable katai_table(const ArithmeticSequence& a, std::span<const std::uint64_t> primes, std::uint64_t n_max);

// E e(n r/m) (b(n) - E b) over [N]; r/m must be in lowest terms, m >= 1.
std::complex<double> aperiodicity_defect(const ArithmeticSequence& b, std::int64_t r, std::int64_t m,
                                         std::uint64_t n_max);

// (1/N) sum_{n <= N} |(1/H) sum_{h=n}^{n+H} e(h alpha) b_N(h)| with b_N
// centered by its mean over [N]; b is evaluated up to N + H.
double local_aperiodicity_defect(const ArithmeticSequence& b, double alpha, std::uint64_t h_len,
                                 std::uint64_t n_max);

// E_{n in [N]} b(n)
std::complex<double> mean_value(const MultiplicativeFunctionSpec& b, std::uint32_t n_max, const FactorSieve& sieve);

// |E g(R S_n y) - E g(R^2 S_n y)| where R is the map of the generator group
// `generator` in generator_diagnostics(msys, sieve).
double idempotency_defect(const MultiplicativeSystem& msys, std::size_t generator, const State& y,
                          const Observable& g, std::uint32_t n_max, const FactorSieve& sieve);

struct DirichletCharacter {
  std::uint64_t modulus;
  std::vector<std::complex<double>> table;  // values on 0..d-1

  std::complex<double> operator()(std::uint64_t n) const { return table[n % modulus]; }
};

// The smallest primitive root of the prime d.
std::uint64_t primitive_root(std::uint64_t d);
// All d - 1 characters mod a prime d <= 1e4, principal first. Values that are
// 4th roots of unity are exact.
std::vector<DirichletCharacter> dirichlet_characters(std::uint64_t d);

// Membership of alpha in Z for phase targets: |alpha - round(alpha)| <= 1e-12.
bool is_integer_frequency(double alpha);

struct PhaseAverage {
  std::complex<double> estimate;
  std::complex<double> target;
};
// E e(n alpha) f(T^{Omega(n)} x); target is the invariant mean of f when
// alpha is an integer, else 0.
PhaseAverage linear_phase_omega_average(double alpha, const AdditiveSystem& sys, const State& x,
                                        const Observable& f, std::uint32_t n_max, const FactorSieve& sieve);
std::complex<double> linear_phase_omega_defect(double alpha, const AdditiveSystem& sys, const State& x,
                                               const Observable& f, std::uint32_t n_max, const FactorSieve& sieve);

// E_{n in [N]} f(T^{Omega(mn + r)} x); needs m N + r <= sieve limit.
std::complex<double> progression_omega_average(const AdditiveSystem& sys, const State& x, const Observable& f,
                                               std::uint64_t m, std::uint64_t r, std::uint32_t n_max,
                                               const FactorSieve& sieve);

struct TrigPolynomial {
  std::vector<std::pair<std::complex<double>, double>> terms;  // c e(n alpha)

  std::complex<double> operator()(std::uint64_t n) const;
};
std::complex<double> besicovitch_mean(const TrigPolynomial& p);

}  // namespace ergolab
