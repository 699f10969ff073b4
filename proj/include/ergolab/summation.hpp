#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>

namespace ergolab {

// Neumaier-compensated accumulator. Works for double and std::complex<double>.
template <typename T>
class CompensatedSum {
 public:
  void add(T x) {
    T t = sum_ + x;
    comp_ += correction(sum_, x, t);
    sum_ = t;
  }
  CompensatedSum& operator+=(T x) {
    add(x);
    return *this;
  }
  T value() const { return sum_ + comp_; }

 private:
  static double correction(double s, double x, double t) {
    return std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
  }
  static std::complex<double> correction(std::complex<double> s, std::complex<double> x,
                                         std::complex<double> t) {
    return {correction(s.real(), x.real(), t.real()), correction(s.imag(), x.imag(), t.imag())};
  }

  T sum_{};
  T comp_{};
};

inline constexpr std::uint64_t kSumBlock = 1u << 16;

// Sum of fn(n) for n in [first, last], blocked so that each block is reduced
// with compensation and the block totals are combined in index order. The
// result does not depend on how the caller might split the range.
template <typename T, typename Fn>
T blocked_sum(std::uint64_t first, std::uint64_t last, Fn&& fn) {
  CompensatedSum<T> total;
  for (std::uint64_t lo = first; lo <= last; lo += kSumBlock) {
    std::uint64_t hi = std::min(last, lo + kSumBlock - 1);
    CompensatedSum<T> block;
    for (std::uint64_t n = lo; n <= hi; ++n) block.add(fn(n));
    total.add(block.value());
    if (hi == last) break;
  }
  return total.value();
}

// e(x) = exp(2 pi i x). The argument is reduced mod 1 first so that large x
// keeps as many fractional digits as the double carries.
inline std::complex<double> e(double x) {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  double f = x - std::floor(x);
  return {std::cos(kTwoPi * f), std::sin(kTwoPi * f)};
}

}  // namespace ergolab
