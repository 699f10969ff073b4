#include "ergolab/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ergolab/arith.hpp"
#include "ergolab/error.hpp"
#include "ergolab/summation.hpp"

namespace ergolab {

namespace {

void check_set(std::span<const std::uint64_t> b) {
  if (b.empty()) throw InvalidArgument("set B must be nonempty");
  std::vector<std::uint64_t> sorted(b.begin(), b.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 1) throw InvalidArgument("elements of B must be >= 1");
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw InvalidArgument("elements of B must be distinct");
}

void check_horizon(std::span<const std::uint64_t> b, std::uint64_t n_max) {
  check_set(b);
  if (n_max < *std::max_element(b.begin(), b.end()))
    throw InvalidArgument("N must be at least max(B)");
}

double reciprocal_sum(std::span<const std::uint64_t> b) {
  CompensatedSum<double> s;
  for (auto m : b) s.add(1.0 / static_cast<double>(m));
  return s.value();
}

// Calls fn(lo, hi, counts) for consecutive segments [lo, hi] of [1, N] where
// counts[n - lo] is the number of m in B dividing n.
template <typename Fn>
void for_each_divisor_count_segment(std::span<const std::uint64_t> b, std::uint64_t n_max, Fn&& fn) {
  constexpr std::uint64_t kSegment = 1u << 22;
  std::vector<std::uint32_t> counts;
  for (std::uint64_t lo = 1; lo <= n_max; lo += kSegment) {
    std::uint64_t hi = std::min(n_max, lo + kSegment - 1);
    counts.assign(hi - lo + 1, 0);
    for (auto m : b) {
      for (std::uint64_t k = (lo + m - 1) / m * m; k <= hi; k += m) ++counts[k - lo];
    }
    fn(lo, hi, counts);
  }
}

template <typename Fn>
double tk_mean(std::span<const std::uint64_t> b, std::uint64_t n_max, Fn&& g) {
  check_horizon(b, n_max);
  const double s = reciprocal_sum(b);
  CompensatedSum<double> total;
  for_each_divisor_count_segment(b, n_max, [&](std::uint64_t lo, std::uint64_t hi, const auto& c) {
    total.add(blocked_sum<double>(lo, hi, [&](std::uint64_t n) { return g(1.0 - c[n - lo] / s); }));
  });
  return total.value() / static_cast<double>(n_max);
}

}  // namespace

std::complex<double> cesaro_average(std::span<const std::complex<double>> values) {
  if (values.empty()) throw InvalidArgument("cesaro average of an empty sequence");
  auto s = blocked_sum<std::complex<double>>(0, values.size() - 1, [&](std::uint64_t i) { return values[i]; });
  return s / static_cast<double>(values.size());
}

std::complex<double> cesaro_average(std::uint64_t n_max, const Sequence& a) {
  if (n_max == 0) throw InvalidArgument("cesaro average of an empty sequence");
  return blocked_sum<std::complex<double>>(1, n_max, a) / static_cast<double>(n_max);
}

std::complex<double> log_average(std::span<const std::uint64_t> b,
                                 std::span<const std::complex<double>> values) {
  if (b.size() != values.size()) throw InvalidArgument("B and values differ in length");
  check_set(b);
  CompensatedSum<std::complex<double>> num;
  CompensatedSum<double> den;
  for (std::size_t i = 0; i < b.size(); ++i) {
    double w = 1.0 / static_cast<double>(b[i]);
    num.add(values[i] * w);
    den.add(w);
  }
  return num.value() / den.value();
}

std::complex<double> log_average(std::span<const std::uint64_t> b, const Sequence& a) {
  std::vector<std::complex<double>> values(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) values[i] = a(b[i]);
  return log_average(b, values);
}

std::uint64_t phi_pairing(std::uint64_t m, std::uint64_t n) {
  if (m < 1 || n < 1) throw InvalidArgument("phi pairing needs positive integers");
  return std::gcd(m, n) - 1;
}

double coprimality_measure(std::span<const std::uint64_t> b) {
  check_set(b);
  struct Term {
    std::uint64_t d;
    double phi;
    double w;
  };
  std::vector<Term> terms;
  for (auto m : b) {
    const double w = 1.0 / static_cast<double>(m);
    std::vector<std::pair<std::uint64_t, double>> divs{{1, 1.0}};
    for (auto [p, e] : factorize_u64(m)) {
      const std::size_t base = divs.size();
      std::uint64_t pk = 1;
      for (unsigned k = 1; k <= e; ++k) {
        double phi_pk = static_cast<double>(pk) * static_cast<double>(p - 1);
        pk *= p;
        for (std::size_t i = 0; i < base; ++i) divs.emplace_back(divs[i].first * pk, divs[i].second * phi_pk);
      }
    }
    for (auto [d, phi] : divs)
      if (d > 1) terms.push_back({d, phi, w});
  }
  std::sort(terms.begin(), terms.end(), [](const Term& x, const Term& y) {
    return x.d != y.d ? x.d < y.d : x.w > y.w;
  });
  CompensatedSum<double> total;
  for (std::size_t i = 0; i < terms.size();) {
    CompensatedSum<double> s;
    std::size_t j = i;
    for (; j < terms.size() && terms[j].d == terms[i].d; ++j) s.add(terms[j].w);
    total.add(terms[i].phi * s.value() * s.value());
    i = j;
  }
  const double norm = reciprocal_sum(b);
  return total.value() / (norm * norm);
}

double coprimality_measure_pairwise(std::span<const std::uint64_t> b) {
  check_set(b);
  CompensatedSum<double> total;
  for (auto m : b)
    for (auto n : b)
      total.add(static_cast<double>(phi_pairing(m, n)) / (static_cast<double>(m) * static_cast<double>(n)));
  const double norm = reciprocal_sum(b);
  return total.value() / (norm * norm);
}

double tk_l2_discrepancy(std::span<const std::uint64_t> b, std::uint64_t n_max) {
  return tk_mean(b, n_max, [](double x) { return x * x; });
}

double tk_l1_discrepancy(std::span<const std::uint64_t> b, std::uint64_t n_max) {
  return tk_mean(b, n_max, [](double x) { return std::abs(x); });
}

double dilation_defect(const Sequence& a, std::span<const std::uint64_t> b, std::uint64_t n_max) {
  check_horizon(b, n_max);
  auto bounded = [&](std::uint64_t n) {
    auto v = a(n);
    if (std::abs(v) > 1.0 + 1e-9)
      throw InvalidArgument("|a(" + std::to_string(n) + ")| exceeds 1");
    return v;
  };
  const auto whole = blocked_sum<std::complex<double>>(1, n_max, bounded) / static_cast<double>(n_max);
  std::vector<std::complex<double>> dilated(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    const std::uint64_t m = b[i], len = n_max / m;
    dilated[i] = blocked_sum<std::complex<double>>(1, len, [&](std::uint64_t n) { return a(m * n); }) /
                 static_cast<double>(len);
  }
  return std::abs(whole - log_average(b, dilated));
}

double zeta(unsigned k) {
  if (k < 2) throw InvalidArgument("zeta needs k >= 2");
  // Direct sum below M, Euler-Maclaurin tail from M; the first omitted
  // correction is O(k^5 M^{-k-5}).
  constexpr int kM = 1000;
  const double kd = k;
  double head = 0.0;
  for (int n = kM - 1; n >= 1; --n) head += std::pow(static_cast<double>(n), -kd);
  const double m = kM;
  const double tail = std::pow(m, 1.0 - kd) / (kd - 1.0) + 0.5 * std::pow(m, -kd) +
                      kd / 12.0 * std::pow(m, -kd - 1.0) -
                      kd * (kd + 1.0) * (kd + 2.0) / 720.0 * std::pow(m, -kd - 3.0);
  return head + tail;
}

}  // namespace ergolab
