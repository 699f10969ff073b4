#pragma once

// Weyl sums, star discrepancy, residue / digit / Beatty densities and the
// joint torus test along (n, Omega(n)).

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ergolab/arith.hpp"

namespace ergolab {

using RealSequence = std::function<double(std::uint64_t)>;
using IntSequence = std::function<std::int64_t(std::uint64_t)>;

// E_{n in [N]} e(h x_n); h != 0.
std::complex<double> weyl_sum(std::span<const double> xs, std::int64_t h);
std::complex<double> weyl_sum(const RealSequence& x, std::uint64_t n_max, std::int64_t h);

// Exact one-dimensional star discrepancy of samples in [0, 1).
double star_discrepancy(std::span<const double> samples);
// Same for points[i] taken weights[i] times.
double star_discrepancy(std::span<const double> points, std::span<const std::uint64_t> weights);

struct DensityProfile {
  std::vector<std::uint64_t> counts;  // counts[r] for class r
  std::uint64_t total = 0;
  std::string note;  // set when the parameters fall outside a theorem's hypothesis

  std::vector<double> densities() const;
  // max_r |density_r - 1/m|
  double max_deviation() const;
};

DensityProfile residue_density(const IntSequence& seq, std::uint64_t n_max, std::uint64_t m);

// k belongs to {floor(alpha m + beta) : m >= 1} iff, with y = (k + 1 - beta) / alpha,
// 0 < frac(y) <= 1/alpha and floor(y) >= 1. (If frac(y) = 0 the candidate m
// would need alpha m + beta = k + 1 exactly, which the half-open floor
// interval excludes.)
bool in_beatty_set(std::int64_t k, double alpha, double beta);
double beatty_density(const IntSequence& seq, std::uint64_t n_max, double alpha, double beta);

// Densities of s_q(seq(n)) mod m. The note records gcd(m, q - 1) > 1.
DensityProfile digit_class_density(const IntSequence& seq, std::uint64_t n_max, std::uint64_t q, std::uint64_t m);

// sum_j c_j n^j mod 1 in units of 2^-64. Exact when every c_j mod 1 is a
// multiple of 2^-64 (true for doubles >= 2^-11); smaller coefficients are
// rounded to that grid.
std::uint64_t poly_phase_raw(std::span<const double> coeffs, std::uint64_t n);
double poly_phase(std::span<const double> coeffs, std::uint64_t n);

// True when some non-constant coefficient is irrational by is_near_rational.
bool has_irrational_nonconstant(std::span<const double> coeffs);

struct JointDefect {
  double max_modulus;
  std::int64_t h1, h2;  // where the maximum is attained
};
// max over (h1, h2) != (0, 0), |h_i| <= H of |E_{n in [N]} e(h1 p(n) + h2 q(Omega(n)))|.
JointDefect joint_torus_defect(std::span<const double> p, std::span<const double> q, std::uint32_t n_max,
                               const FactorSieve& sieve, int h_max);

}  // namespace ergolab
