#include "ergolab/equidist.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ergolab/error.hpp"
#include "ergolab/summation.hpp"

namespace ergolab {

namespace {

void check_n(std::uint64_t n_max) {
  if (n_max < 1) throw InvalidArgument("N must be >= 1");
}

std::uint64_t residue(std::int64_t v, std::uint64_t m) {
  const auto mm = static_cast<std::int64_t>(m);
  std::int64_t r = v % mm;
  return static_cast<std::uint64_t>(r < 0 ? r + mm : r);
}

}  // namespace

std::complex<double> weyl_sum(std::span<const double> xs, std::int64_t h) {
  if (xs.empty()) throw InvalidArgument("weyl sum of an empty sequence");
  return weyl_sum([&](std::uint64_t n) { return xs[n - 1]; }, xs.size(), h);
}

std::complex<double> weyl_sum(const RealSequence& x, std::uint64_t n_max, std::int64_t h) {
  if (h == 0) throw InvalidArgument("weyl sum needs h != 0");
  check_n(n_max);
  const auto hd = static_cast<long double>(h);
  auto sum = blocked_sum<std::complex<double>>(1, n_max, [&](std::uint64_t n) {
    long double t = hd * static_cast<long double>(x(n));
    return e(static_cast<double>(t - std::floor(t)));
  });
  return sum / static_cast<double>(n_max);
}

double star_discrepancy(std::span<const double> samples) {
  if (samples.empty()) throw InvalidArgument("star discrepancy of no samples");
  std::vector<double> u(samples.begin(), samples.end());
  for (double v : u)
    if (!(v >= 0.0 && v < 1.0)) throw InvalidArgument("samples must lie in [0, 1)");
  std::sort(u.begin(), u.end());
  const double m = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    d = std::max({d, k / m - u[i], u[i] - (k - 1.0) / m});
  }
  return d;
}

double star_discrepancy(std::span<const double> points, std::span<const std::uint64_t> weights) {
  if (points.size() != weights.size()) throw InvalidArgument("points and weights differ in length");
  std::vector<std::pair<double, std::uint64_t>> pw;
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i] >= 0.0 && points[i] < 1.0)) throw InvalidArgument("samples must lie in [0, 1)");
    if (weights[i] == 0) continue;
    pw.emplace_back(points[i], weights[i]);
    total += weights[i];
  }
  if (total == 0) throw InvalidArgument("star discrepancy of no samples");
  std::sort(pw.begin(), pw.end());
  const double w = static_cast<double>(total);
  std::uint64_t below = 0;
  double d = 0.0;
  for (std::size_t i = 0; i < pw.size();) {
    const double u = pw[i].first;
    std::uint64_t here = 0;
    for (; i < pw.size() && pw[i].first == u; ++i) here += pw[i].second;
    d = std::max({d, static_cast<double>(below + here) / w - u, u - static_cast<double>(below) / w});
    below += here;
  }
  return d;
}

std::vector<double> DensityProfile::densities() const {
  std::vector<double> out;
  for (auto c : counts) out.push_back(static_cast<double>(c) / static_cast<double>(total));
  return out;
}

double DensityProfile::max_deviation() const {
  const double target = 1.0 / static_cast<double>(counts.size());
  double d = 0.0;
  for (double v : densities()) d = std::max(d, std::abs(v - target));
  return d;
}

DensityProfile residue_density(const IntSequence& seq, std::uint64_t n_max, std::uint64_t m) {
  if (m < 1) throw InvalidArgument("modulus must be >= 1");
  check_n(n_max);
  DensityProfile p{std::vector<std::uint64_t>(m, 0), n_max, {}};
  for (std::uint64_t n = 1; n <= n_max; ++n) ++p.counts[residue(seq(n), m)];
  return p;
}

bool in_beatty_set(std::int64_t k, double alpha, double beta) {
  const long double y = (static_cast<long double>(k) + 1.0L - beta) / alpha;
  const long double f = y - std::floor(y);
  return f > 0.0L && f <= 1.0L / alpha && std::floor(y) >= 1.0L;
}

double beatty_density(const IntSequence& seq, std::uint64_t n_max, double alpha, double beta) {
  if (!(alpha > 1.0) || !std::isfinite(alpha)) throw InvalidArgument("Beatty density needs alpha > 1");
  if (!std::isfinite(beta)) throw InvalidArgument("beta must be finite");
  check_n(n_max);
  std::uint64_t hits = 0;
  for (std::uint64_t n = 1; n <= n_max; ++n) hits += in_beatty_set(seq(n), alpha, beta) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(n_max);
}

DensityProfile digit_class_density(const IntSequence& seq, std::uint64_t n_max, std::uint64_t q, std::uint64_t m) {
  if (q < 2) throw InvalidArgument("digit base must be >= 2");
  if (m < 1) throw InvalidArgument("modulus must be >= 1");
  check_n(n_max);
  DensityProfile p{std::vector<std::uint64_t>(m, 0), n_max, {}};
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    const std::int64_t v = seq(n);
    if (v < 0) throw InvalidArgument("digit sums need nonnegative values");
    ++p.counts[digit_sum(static_cast<std::uint64_t>(v), q) % m];
  }
  const std::uint64_t g = std::gcd(m, q - 1);
  if (g > 1)
    p.note = "outside hypothesis: gcd(m, q-1) = " + std::to_string(g) + " (s_q(n) = n mod q-1 forces classes)";
  return p;
}

std::uint64_t poly_phase_raw(std::span<const double> coeffs, std::uint64_t n) {
  // All arithmetic wraps mod 2^64, i.e. mod 1 in these units.
  std::uint64_t acc = 0, power = 1;
  for (double c : coeffs) {
    if (!std::isfinite(c)) throw InvalidArgument("coefficients must be finite");
    const double f = c - std::floor(c);
    const long double scaled = std::ldexp(static_cast<long double>(f), 64);
    const std::uint64_t raw = scaled >= 18446744073709551616.0L ? 0 : static_cast<std::uint64_t>(std::nearbyint(scaled));
    acc += raw * power;
    power *= n;
  }
  return acc;
}

double poly_phase(std::span<const double> coeffs, std::uint64_t n) {
  double t = std::ldexp(static_cast<double>(poly_phase_raw(coeffs, n)), -64);
  return t >= 1.0 ? 0.0 : t;
}

bool has_irrational_nonconstant(std::span<const double> coeffs) {
  for (std::size_t j = 1; j < coeffs.size(); ++j)
    if (!is_near_rational(coeffs[j])) return true;
  return false;
}

JointDefect joint_torus_defect(std::span<const double> p, std::span<const double> q, std::uint32_t n_max,
                               const FactorSieve& sieve, int h_max) {
  if (h_max < 1) throw InvalidArgument("H must be >= 1");
  check_n(n_max);
  if (n_max > sieve.limit())
    throw OutOfRange("N = " + std::to_string(n_max) + " exceeds sieve limit " + std::to_string(sieve.limit()));
  if (!has_irrational_nonconstant(p) || !has_irrational_nonconstant(q))
    throw InvalidArgument("both polynomials need an irrational non-constant coefficient");
  const auto hs = static_cast<std::size_t>(h_max);
  const auto omega = big_omega_table(sieve, n_max);
  // s[k][h] = sum_{Omega(n) = k} e(h p(n)), h = 0..H; negative h by conjugation.
  std::vector<std::vector<CompensatedSum<std::complex<double>>>> s;
  std::vector<std::vector<std::complex<double>>> part;
  auto flush = [&] {
    for (std::size_t k = 0; k < part.size(); ++k)
      for (std::size_t h = 0; h <= hs; ++h) {
        s[k][h].add(part[k][h]);
        part[k][h] = 0.0;
      }
  };
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    const std::size_t k = omega[n];
    if (k >= s.size()) {
      s.resize(k + 1, std::vector<CompensatedSum<std::complex<double>>>(hs + 1));
      part.resize(k + 1, std::vector<std::complex<double>>(hs + 1, 0.0));
    }
    const std::uint64_t ph = poly_phase_raw(p, n);
    std::uint64_t acc = 0;
    for (std::size_t h = 0; h <= hs; ++h, acc += ph) part[k][h] += e(std::ldexp(static_cast<double>(acc), -64));
    if (n % kSumBlock == 0) flush();
  }
  flush();
  JointDefect best{-1.0, 0, 0};
  const int H = h_max;
  for (int h1 = -H; h1 <= H; ++h1) {
    for (int h2 = -H; h2 <= H; ++h2) {
      if (h1 == 0 && h2 == 0) continue;
      CompensatedSum<std::complex<double>> total;
      for (std::size_t k = 0; k < s.size(); ++k) {
        std::complex<double> a = s[k][static_cast<std::size_t>(std::abs(h1))].value();
        if (h1 < 0) a = std::conj(a);
        const std::uint64_t qk = poly_phase_raw(q, k) * static_cast<std::uint64_t>(static_cast<std::int64_t>(h2));
        total.add(a * e(std::ldexp(static_cast<double>(qk), -64)));
      }
      const double mod = std::abs(total.value()) / n_max;
      if (mod > best.max_modulus) best = {mod, h1, h2};
    }
  }
  return best;
}

}  // namespace ergolab
