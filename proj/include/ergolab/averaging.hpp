#pragma once

// Cesaro and logarithmic averages, the pairing Phi(m, n) = gcd(m, n) - 1,
// Turan-Kubilius discrepancies and the dilation defect.
//
// Throughout, [N/m] means {1, ..., floor(N/m)}.

#include <complex>
#include <cstdint>
#include <functional>
#include <span>

namespace ergolab {

using Sequence = std::function<std::complex<double>(std::uint64_t)>;

std::complex<double> cesaro_average(std::span<const std::complex<double>> values);
// (1/N) sum_{n=1}^{N} a(n)
std::complex<double> cesaro_average(std::uint64_t n_max, const Sequence& a);

// values[i] belongs to b[i].
std::complex<double> log_average(std::span<const std::uint64_t> b,
                                 std::span<const std::complex<double>> values);
std::complex<double> log_average(std::span<const std::uint64_t> b, const Sequence& a);

std::uint64_t phi_pairing(std::uint64_t m, std::uint64_t n);

// E^log_{m in B} E^log_{n in B} Phi(m, n), computed through
// Phi = sum_{d | gcd, d > 1} phi(d):
//   sum_{d > 1} phi(d) (sum_{m in B, d | m} 1/m)^2 / (sum_{m in B} 1/m)^2.
// Elements of any 64-bit size are accepted.
double coprimality_measure(std::span<const std::uint64_t> b);
// Direct double sum over pairs; O(|B|^2). Used as a cross-check.
double coprimality_measure_pairwise(std::span<const std::uint64_t> b);

// E_{n in [N]} |1 - cnt_B(n) / S_B|^2 and its L1 analogue, where cnt_B(n) is
// the number of m in B dividing n and S_B = sum 1/m.
double tk_l2_discrepancy(std::span<const std::uint64_t> b, std::uint64_t n_max);
double tk_l1_discrepancy(std::span<const std::uint64_t> b, std::uint64_t n_max);

// |E_{n in [N]} a(n) - E^log_{m in B} E_{n in [N/m]} a(mn)|.
// Throws InvalidArgument if some |a(n)| > 1 + 1e-9 for n <= N.
double dilation_defect(const Sequence& a, std::span<const std::uint64_t> b, std::uint64_t n_max);

// Riemann zeta at integers k >= 2, absolute error below 1e-12.
double zeta(unsigned k);

}  // namespace ergolab
