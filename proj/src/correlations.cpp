#include "ergolab/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "ergolab/error.hpp"
#include "ergolab/summation.hpp"

namespace ergolab {

namespace {

void check_n(std::uint64_t n_max) {
  if (n_max < 1) throw InvalidArgument("N must be >= 1");
}

void check_sieve(std::uint64_t top, const FactorSieve& sieve) {
  if (top > sieve.limit())
    throw OutOfRange("needs sieve limit " + std::to_string(top) + ", have " + std::to_string(sieve.limit()));
}

std::complex<double> checked(const ArithmeticSequence& a, std::uint64_t n) {
  const auto v = a(n);
  if (std::abs(v) > a.bound + 1e-9)
    throw InvalidArgument(a.description + ": |a(" + std::to_string(n) + ")| exceeds bound " + std::to_string(a.bound));
  return v;
}

// e(n alpha) with the product reduced in long double.
std::complex<double> phase(std::uint64_t n, long double alpha) {
  const long double t = static_cast<long double>(n) * alpha;
  return e(static_cast<double>(t - std::floor(t)));
}

std::vector<std::complex<double>> orbit_values(const AdditiveSystem& sys, const State& x, const Observable& f,
                                               std::size_t k_max) {
  f.check(sys.shape());
  std::vector<std::complex<double>> out;
  auto raw = sys.shape().to_raw(x);
  for (std::size_t k = 0; k <= k_max; ++k) {
    out.push_back(f.eval_raw(sys.shape(), raw.data()));
    sys.step_raw(raw.data());
  }
  return out;
}

}  // namespace

ArithmeticSequence liouville_sequence(const FactorSieve& sieve) {
  return {[&sieve](std::uint64_t n) { return std::complex<double>(liouville(sieve, n)); }, 1.0, "liouville"};
}

ArithmeticSequence moebius_sequence(const FactorSieve& sieve) {
  return {[&sieve](std::uint64_t n) { return std::complex<double>(moebius(sieve, n)); }, 1.0, "moebius"};
}

ArithmeticSequence linear_phase_sequence(double alpha) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "e(n*%.17g)", alpha);
  return {[alpha](std::uint64_t n) { return phase(n, alpha); }, 1.0, buf};
}

ArithmeticSequence pointwise_product(ArithmeticSequence a, ArithmeticSequence b) {
  const double bound = a.bound * b.bound;
  std::string d = a.description + " * " + b.description;
  return {[a = std::move(a.eval), b = std::move(b.eval)](std::uint64_t n) { return a(n) * b(n); }, bound,
          std::move(d)};
}

std::complex<double> independence_defect(const ArithmeticSequence& a, const ArithmeticSequence& b,
                                         std::uint64_t n_max) {
  check_n(n_max);
  CompensatedSum<std::complex<double>> sab, sa, sb;
  for (std::uint64_t lo = 1; lo <= n_max; lo += kSumBlock) {
    const std::uint64_t hi = std::min(n_max, lo + kSumBlock - 1);
    CompensatedSum<std::complex<double>> bab, ba, bb;
    for (std::uint64_t n = lo; n <= hi; ++n) {
      const auto x = checked(a, n);
      const auto y = std::conj(checked(b, n));
      bab.add(x * y);
      ba.add(x);
      bb.add(y);
    }
    sab.add(bab.value());
    sa.add(ba.value());
    sb.add(bb.value());
  }
  const double nn = static_cast<double>(n_max);
  return sab.value() / nn - (sa.value() / nn) * (sb.value() / nn);
}

double KataiTable::max_off_diagonal() const {
  double m = 0.0;
  for (std::size_t i = 0; i < entries.size(); ++i)
    for (std::size_t j = 0; j < entries.size(); ++j)
      if (i != j) m = std::max(m, std::abs(entries[i][j]));
  return m;
}

KataiTable katai_table(const ArithmeticSequence& a, std::span<const std::uint64_t> primes, std::uint64_t n_max) {
  check_n(n_max);
  if (primes.empty()) throw InvalidArgument("Katai table needs at least one prime");
  for (auto p : primes)
    if (!is_prime_u64(p)) throw InvalidArgument(std::to_string(p) + " is not prime");
  KataiTable t;
  t.primes.assign(primes.begin(), primes.end());
  std::sort(t.primes.begin(), t.primes.end());
  t.primes.erase(std::unique(t.primes.begin(), t.primes.end()), t.primes.end());
  const std::size_t k = t.primes.size();
  std::vector<std::vector<std::complex<double>>> vals(k);
  for (std::size_t i = 0; i < k; ++i) {
    vals[i].resize(n_max);
    for (std::uint64_t n = 1; n <= n_max; ++n) vals[i][n - 1] = checked(a, t.primes[i] * n);
  }
  t.entries.assign(k, std::vector<std::complex<double>>(k));
  const double nn = static_cast<double>(n_max);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) {
      const auto s = blocked_sum<std::complex<double>>(
          1, n_max, [&](std::uint64_t n) { return vals[i][n - 1] * std::conj(vals[j][n - 1]); });
      t.entries[i][j] = s / nn;
      t.entries[j][i] = std::conj(s / nn);
    }
  t.mean = blocked_sum<std::complex<double>>(1, n_max, [&](std::uint64_t n) { return checked(a, n); }) / nn;
  return t;
}

std::complex<double> aperiodicity_defect(const ArithmeticSequence& b, std::int64_t r, std::int64_t m,
                                         std::uint64_t n_max) {
  check_n(n_max);
  if (m < 1) throw InvalidArgument("denominator must be >= 1");
  if (std::gcd(r, m) != 1) throw InvalidArgument("alpha must be given in lowest terms");
  const double nn = static_cast<double>(n_max);
  const auto mean = blocked_sum<std::complex<double>>(1, n_max, [&](std::uint64_t n) { return b(n); }) / nn;
  const auto mm = static_cast<std::uint64_t>(m);
  const std::uint64_t rr = static_cast<std::uint64_t>(((r % m) + m) % m);
  auto s = blocked_sum<std::complex<double>>(1, n_max, [&](std::uint64_t n) {
    const std::uint64_t k = static_cast<std::uint64_t>((static_cast<unsigned __int128>(n) * rr) % mm);
    return e(static_cast<double>(k) / static_cast<double>(mm)) * (b(n) - mean);
  });
  return s / nn;
}

double local_aperiodicity_defect(const ArithmeticSequence& b, double alpha, std::uint64_t h_len,
                                 std::uint64_t n_max) {
  check_n(n_max);
  if (h_len < 1) throw InvalidArgument("H must be >= 1");
  const double nn = static_cast<double>(n_max);
  const auto mean = blocked_sum<std::complex<double>>(1, n_max, [&](std::uint64_t n) { return b(n); }) / nn;
  auto term = [&](std::uint64_t h) { return phase(h, alpha) * (b(h) - mean); };
  // Window n holds terms h = n..n+H.
  std::deque<std::complex<double>> window;
  std::complex<double> acc = 0.0;
  for (std::uint64_t h = 1; h <= 1 + h_len; ++h) {
    window.push_back(term(h));
    acc += window.back();
  }
  const double inv_h = 1.0 / static_cast<double>(h_len);
  CompensatedSum<double> total;
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    if (n % kSumBlock == 0) {
      CompensatedSum<std::complex<double>> fresh;
      for (auto v : window) fresh.add(v);
      acc = fresh.value();
    }
    total.add(std::abs(acc) * inv_h);
    if (n == n_max) break;
    acc -= window.front();
    window.pop_front();
    window.push_back(term(n + h_len + 1));
    acc += window.back();
  }
  return total.value() / nn;
}

std::complex<double> mean_value(const MultiplicativeFunctionSpec& b, std::uint32_t n_max, const FactorSieve& sieve) {
  check_n(n_max);
  check_sieve(n_max, sieve);
  return blocked_sum<std::complex<double>>(
             1, n_max, [&](std::uint64_t n) { return completely_multiplicative_eval(sieve, b, n); }) /
         static_cast<double>(n_max);
}

double idempotency_defect(const MultiplicativeSystem& msys, std::size_t generator, const State& y,
                          const Observable& g, std::uint32_t n_max, const FactorSieve& sieve) {
  const auto gens = generator_diagnostics(msys, sieve);
  if (generator >= gens.size())
    throw InvalidArgument("generator index " + std::to_string(generator) + " out of range (have " +
                          std::to_string(gens.size()) + ")");
  const auto& c = gens[generator].counters;
  // The action is abelian, so R S_n y = S_n R y.
  const State ry = msys.act(y, c);
  const State rry = msys.act(ry, c);
  return std::abs(multiplicative_orbit_average(msys, ry, g, n_max, sieve) -
                  multiplicative_orbit_average(msys, rry, g, n_max, sieve));
}

std::uint64_t primitive_root(std::uint64_t d) {
  if (!is_prime_u64(d)) throw UnsupportedOperation("primitive roots only for prime moduli");
  if (d == 2) return 1;
  const auto fac = factorize_u64(d - 1);
  for (std::uint64_t g = 2; g < d; ++g) {
    bool ok = true;
    for (auto [q, k] : fac) {
      (void)k;
      std::uint64_t x = 1, base = g, ex = (d - 1) / q;
      while (ex) {
        if (ex & 1) x = x * base % d;
        base = base * base % d;
        ex >>= 1;
      }
      if (x == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  throw InvalidArgument("no primitive root found");  // unreachable for primes
}

std::vector<DirichletCharacter> dirichlet_characters(std::uint64_t d) {
  if (d < 2 || !is_prime_u64(d)) throw UnsupportedOperation("Dirichlet characters only for prime moduli");
  if (d > 10000) throw OutOfRange("modulus must be <= 1e4");
  const std::uint64_t g = primitive_root(d), order = d - 1;
  std::vector<std::uint64_t> ind(d, 0);
  for (std::uint64_t k = 0, x = 1; k < order; ++k, x = x * g % d) ind[x] = k;
  std::vector<DirichletCharacter> out;
  for (std::uint64_t j = 0; j < order; ++j) {
    DirichletCharacter chi{d, std::vector<std::complex<double>>(d, 0.0)};
    for (std::uint64_t n = 1; n < d; ++n) {
      const std::uint64_t t = j * ind[n] % order;
      std::complex<double> v;
      if (t == 0) v = 1.0;
      else if (2 * t == order) v = -1.0;
      else if (4 * t == order) v = {0.0, 1.0};
      else if (4 * t == 3 * order) v = {0.0, -1.0};
      else v = e(static_cast<double>(t) / static_cast<double>(order));
      chi.table[n] = v;
    }
    out.push_back(std::move(chi));
  }
  return out;
}

bool is_integer_frequency(double alpha) { return std::abs(alpha - std::round(alpha)) <= 1e-12; }

PhaseAverage linear_phase_omega_average(double alpha, const AdditiveSystem& sys, const State& x,
                                        const Observable& f, std::uint32_t n_max, const FactorSieve& sieve) {
  check_n(n_max);
  check_sieve(n_max, sieve);
  const auto omega = big_omega_table(sieve, n_max);
  const std::size_t k_max = *std::max_element(omega.begin() + 1, omega.end());
  const auto vals = orbit_values(sys, x, f, k_max);
  const auto s = blocked_sum<std::complex<double>>(1, n_max, [&](std::uint64_t n) {
    return phase(n, alpha) * vals[omega[n]];
  });
  PhaseAverage r{s / static_cast<double>(n_max), 0.0};
  if (is_integer_frequency(alpha)) r.target = invariant_mean(sys, f);
  return r;
}

std::complex<double> linear_phase_omega_defect(double alpha, const AdditiveSystem& sys, const State& x,
                                               const Observable& f, std::uint32_t n_max, const FactorSieve& sieve) {
  const auto r = linear_phase_omega_average(alpha, sys, x, f, n_max, sieve);
  return r.estimate - r.target;
}

std::complex<double> progression_omega_average(const AdditiveSystem& sys, const State& x, const Observable& f,
                                               std::uint64_t m, std::uint64_t r, std::uint32_t n_max,
                                               const FactorSieve& sieve) {
  check_n(n_max);
  if (m < 1 || r >= m) throw InvalidArgument("need m >= 1 and 0 <= r < m");
  check_sieve(m * n_max + r, sieve);
  const auto vals = orbit_values(sys, x, f, 64);
  const auto s = blocked_sum<std::complex<double>>(
      1, n_max, [&](std::uint64_t n) { return vals[big_omega(sieve, m * n + r)]; });
  return s / static_cast<double>(n_max);
}

std::complex<double> TrigPolynomial::operator()(std::uint64_t n) const {
  std::complex<double> s = 0.0;
  for (const auto& [c, alpha] : terms) s += c * phase(n, alpha);
  return s;
}

std::complex<double> besicovitch_mean(const TrigPolynomial& p) {
  std::complex<double> m = 0.0;
  for (const auto& [c, alpha] : p.terms)
    if (is_integer_frequency(alpha)) m += c;
  return m;
}

}  // namespace ergolab
