#include "ergolab/arith.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ergolab/error.hpp"

namespace ergolab {

FactorSieve::FactorSieve(std::uint32_t limit) : limit_(limit) {
  if (limit < 2) throw InvalidArgument("sieve limit must be >= 2");
  spf_.assign(static_cast<std::size_t>(limit) + 1, 0);
  spf_[1] = 1;
  std::vector<std::uint32_t> primes;
  primes.reserve(limit < 100 ? 32 : static_cast<std::size_t>(1.3 * limit / std::log(limit)));
  // Linear sieve: every composite i*p is written once, by its least prime p.
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (spf_[i] == 0) {
      spf_[i] = static_cast<std::uint32_t>(i);
      primes.push_back(static_cast<std::uint32_t>(i));
    }
    const std::uint32_t cap = spf_[i];
    for (std::uint32_t p : primes) {
      if (p > cap || i * p > limit) break;
      spf_[i * p] = p;
    }
  }
}

FactorSieve FactorSieve::from_table(std::vector<std::uint32_t> spf) {
  if (spf.size() < 3) throw InvalidArgument("sieve table must cover at least [0, 2]");
  FactorSieve s;
  s.limit_ = static_cast<std::uint32_t>(spf.size() - 1);
  s.spf_ = std::move(spf);
  auto bad = [&](std::uint64_t n) {
    std::uint32_t p = s.spf_[n];
    return p < 2 || n % p != 0 || (p != n && static_cast<std::uint64_t>(p) * p > n);
  };
  if (s.spf_[0] != 0 || s.spf_[1] != 1) throw InvalidArgument("sieve table has bad header entries");
  const std::uint64_t dense = std::min<std::uint64_t>(s.limit_, 10000);
  for (std::uint64_t n = 2; n <= dense; ++n)
    if (bad(n)) throw InvalidArgument("sieve table entry " + std::to_string(n) + " is inconsistent");
  for (std::uint64_t n = dense; n <= s.limit_; n += 7919)
    if (bad(n)) throw InvalidArgument("sieve table entry " + std::to_string(n) + " is inconsistent");
  return s;
}

void FactorSieve::check(std::uint64_t n) const {
  if (n < 1 || n > limit_)
    throw OutOfRange("n=" + std::to_string(n) + " outside sieve range [1, " + std::to_string(limit_) +
                     "]");
}

std::uint32_t FactorSieve::smallest_factor(std::uint64_t n) const {
  check(n);
  return spf_[n];
}

bool FactorSieve::is_prime(std::uint64_t n) const {
  if (n >= 2 && n <= limit_) return spf_[n] == n;
  return is_prime_u64(n);
}

std::vector<std::pair<std::uint32_t, unsigned>> FactorSieve::factorize(std::uint64_t n) const {
  std::vector<std::pair<std::uint32_t, unsigned>> out;
  for_each_prime_power(n, [&](std::uint32_t p, unsigned e) { out.emplace_back(p, e); });
  return out;
}

namespace {

using u128 = unsigned __int128;

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mul_mod(r, b, m);
    b = mul_mod(b, b, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
  static constexpr std::uint64_t kWitnesses[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  if (n < 2) return false;
  for (std::uint64_t p : kWitnesses) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : kWitnesses) {
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

namespace {

std::uint64_t pollard_brent(std::uint64_t n, std::uint64_t c) {
  auto f = [&](std::uint64_t x) { return (mul_mod(x, x, n) + c) % n; };
  std::uint64_t y = 2, x = 2, g = 1, q = 1, ys = 2;
  const std::uint64_t m = 128;
  for (std::uint64_t r = 1; g == 1; r <<= 1) {
    x = y;
    for (std::uint64_t i = 0; i < r; ++i) y = f(y);
    for (std::uint64_t k = 0; k < r && g == 1; k += m) {
      ys = y;
      for (std::uint64_t i = 0; i < std::min(m, r - k); ++i) {
        y = f(y);
        q = mul_mod(q, x > y ? x - y : y - x, n);
      }
      g = std::gcd(q, n);
    }
  }
  if (g == n) {
    do {
      ys = f(ys);
      g = std::gcd(x > ys ? x - ys : ys - x, n);
    } while (g == 1);
  }
  return g;
}

void split(std::uint64_t n, std::vector<std::uint64_t>& out) {
  if (n == 1) return;
  if (is_prime_u64(n)) {
    out.push_back(n);
    return;
  }
  for (std::uint64_t c = 1;; ++c) {
    std::uint64_t d = pollard_brent(n, c);
    if (d != n) {
      split(d, out);
      split(n / d, out);
      return;
    }
  }
}

}  // namespace

std::vector<std::pair<std::uint64_t, unsigned>> factorize_u64(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("cannot factor 0");
  std::vector<std::uint64_t> primes;
  for (std::uint64_t p = 2; p < 1000 && p * p <= n; p += (p == 2 ? 1 : 2))
    while (n % p == 0) {
      primes.push_back(p);
      n /= p;
    }
  split(n, primes);
  std::sort(primes.begin(), primes.end());
  std::vector<std::pair<std::uint64_t, unsigned>> out;
  for (auto p : primes) {
    if (!out.empty() && out.back().first == p)
      ++out.back().second;
    else
      out.emplace_back(p, 1);
  }
  return out;
}

bool is_near_rational(double x, std::uint64_t max_den, double tol) {
  for (std::uint64_t q = 1; q <= max_den; ++q) {
    const double qx = static_cast<double>(q) * x;
    if (std::abs(qx - std::round(qx)) <= static_cast<double>(q) * tol) return true;
  }
  return false;
}

// ---------------------------------------------------------------- PrimeSet

PrimeSet PrimeSet::of(std::vector<std::uint64_t> primes) {
  std::sort(primes.begin(), primes.end());
  primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
  for (auto p : primes)
    if (!is_prime_u64(p)) throw InvalidArgument(std::to_string(p) + " is not prime");
  return PrimeSet(Explicit{std::move(primes)});
}

PrimeSet PrimeSet::residue(std::uint64_t r, std::uint64_t m) {
  if (m == 0) throw InvalidArgument("residue class modulus must be >= 1");
  if (r >= m) throw InvalidArgument("residue must satisfy 0 <= r < m");
  return PrimeSet(Residue{r, m});
}

PrimeSet PrimeSet::complement(PrimeSet inner) {
  return PrimeSet(Complement{std::make_shared<const PrimeSet>(std::move(inner))});
}

bool PrimeSet::contains(std::uint64_t p) const {
  return std::visit(
      [p](const auto& v) -> bool {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Explicit>) {
          return std::binary_search(v.primes.begin(), v.primes.end(), p);
        } else if constexpr (std::is_same_v<V, Residue>) {
          return p % v.m == v.r;
        } else if constexpr (std::is_same_v<V, All>) {
          return true;
        } else {
          return !v.inner->contains(p);
        }
      },
      v_);
}

std::string PrimeSet::describe() const {
  return std::visit(
      [](const auto& v) -> std::string {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Explicit>) {
          if (v.primes.empty()) return "none";
          std::string s = "p:";
          for (std::size_t i = 0; i < v.primes.size(); ++i) {
            if (i) s += '|';
            s += std::to_string(v.primes[i]);
          }
          return s;
        } else if constexpr (std::is_same_v<V, Residue>) {
          return "mod:" + std::to_string(v.r) + "/" + std::to_string(v.m);
        } else if constexpr (std::is_same_v<V, All>) {
          return "all";
        } else {
          return "!" + v.inner->describe();
        }
      },
      v_);
}

// ------------------------------------------------------- function specs

std::uint32_t AdditiveFunctionSpec::at_prime(std::uint64_t p) const {
  for (const auto& [set, value] : assignments)
    if (set.contains(p)) return value;
  return fallback;
}

std::vector<std::uint32_t> AdditiveFunctionSpec::distinct_values() const {
  std::vector<std::uint32_t> out{fallback};
  for (const auto& a : assignments) out.push_back(a.second);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string AdditiveFunctionSpec::describe() const {
  std::string s;
  for (const auto& [set, value] : assignments) s += set.describe() + "=" + std::to_string(value) + ";";
  return s + "default=" + std::to_string(fallback);
}

MultiplicativeFunctionSpec::MultiplicativeFunctionSpec(
    std::vector<std::pair<PrimeSet, std::complex<double>>> assignments, std::complex<double> fallback)
    : assignments_(std::move(assignments)), fallback_(fallback) {
  auto unit = [](std::complex<double> v) { return std::abs(std::abs(v) - 1.0) <= 1e-9; };
  if (!unit(fallback_)) throw InvalidArgument("multiplicative function values must have modulus 1");
  for (const auto& a : assignments_)
    if (!unit(a.second)) throw InvalidArgument("multiplicative function values must have modulus 1");
}

std::complex<double> MultiplicativeFunctionSpec::at_prime(std::uint64_t p) const {
  for (const auto& [set, value] : assignments_)
    if (set.contains(p)) return value;
  return fallback_;
}

std::vector<std::complex<double>> MultiplicativeFunctionSpec::distinct_values() const {
  std::vector<std::complex<double>> out{fallback_};
  for (const auto& a : assignments_) {
    bool seen = false;
    for (auto v : out) seen = seen || std::abs(v - a.second) <= 1e-12;
    if (!seen) out.push_back(a.second);
  }
  return out;
}

std::string MultiplicativeFunctionSpec::describe() const {
  auto fmt = [](std::complex<double> v) {
    std::ostringstream os;
    os.precision(12);
    os << "(" << v.real() << "," << v.imag() << ")";
    return os.str();
  };
  std::string s;
  for (const auto& [set, value] : assignments_) s += set.describe() + "=" + fmt(value) + ";";
  return s + "default=" + fmt(fallback_);
}

// ------------------------------------------------- pointwise functions

unsigned big_omega(const FactorSieve& sieve, std::uint64_t n) {
  unsigned total = 0;
  sieve.for_each_prime_power(n, [&](std::uint32_t, unsigned e) { total += e; });
  return total;
}

unsigned small_omega(const FactorSieve& sieve, std::uint64_t n) {
  unsigned total = 0;
  sieve.for_each_prime_power(n, [&](std::uint32_t, unsigned) { ++total; });
  return total;
}

int liouville(const FactorSieve& sieve, std::uint64_t n) { return big_omega(sieve, n) % 2 ? -1 : 1; }

int moebius(const FactorSieve& sieve, std::uint64_t n) {
  int sign = 1;
  bool squarefree = true;
  sieve.for_each_prime_power(n, [&](std::uint32_t, unsigned e) {
    if (e > 1) squarefree = false;
    sign = -sign;
  });
  return squarefree ? sign : 0;
}

bool is_k_free(const FactorSieve& sieve, std::uint64_t n, unsigned k) {
  if (k < 2) throw InvalidArgument("k-free test needs k >= 2");
  bool free = true;
  sieve.for_each_prime_power(n, [&](std::uint32_t, unsigned e) { free = free && e < k; });
  return free;
}

std::uint64_t digit_sum(std::uint64_t n, std::uint64_t q) {
  if (q < 2) throw InvalidArgument("digit base must be >= 2");
  std::uint64_t s = 0;
  for (; n; n /= q) s += n % q;
  return s;
}

unsigned padic_valuation(std::uint64_t n, std::uint64_t p) {
  if (n < 1) throw InvalidArgument("p-adic valuation needs n >= 1");
  if (!is_prime_u64(p)) throw InvalidArgument(std::to_string(p) + " is not prime");
  unsigned e = 0;
  for (; n % p == 0; n /= p) ++e;
  return e;
}

unsigned omega_restricted(const FactorSieve& sieve, std::uint64_t n, const PrimeSet& q) {
  unsigned total = 0;
  sieve.for_each_prime_power(n, [&](std::uint32_t p, unsigned e) {
    if (q.contains(p)) total += e;
  });
  return total;
}

std::uint64_t completely_additive_eval(const FactorSieve& sieve, const AdditiveFunctionSpec& spec,
                                       std::uint64_t n) {
  std::uint64_t total = 0;
  sieve.for_each_prime_power(n, [&](std::uint32_t p, unsigned e) {
    total += static_cast<std::uint64_t>(e) * spec.at_prime(p);
  });
  return total;
}

std::complex<double> completely_multiplicative_eval(const FactorSieve& sieve,
                                                    const MultiplicativeFunctionSpec& spec,
                                                    std::uint64_t n) {
  std::complex<double> v = 1.0;
  sieve.for_each_prime_power(n, [&](std::uint32_t p, unsigned e) {
    std::complex<double> b = spec.at_prime(p);
    for (unsigned i = 0; i < e; ++i) v *= b;
  });
  return v;
}

// ------------------------------------------------------------ tables

namespace {

void check_table_range(const FactorSieve& sieve, std::uint32_t n_max) {
  if (n_max > sieve.limit())
    throw OutOfRange("table up to " + std::to_string(n_max) + " exceeds sieve limit " +
                     std::to_string(sieve.limit()));
}

}  // namespace

std::vector<std::uint8_t> big_omega_table(const FactorSieve& sieve, std::uint32_t n_max) {
  check_table_range(sieve, n_max);
  std::vector<std::uint8_t> t(static_cast<std::size_t>(n_max) + 1, 0);
  auto spf = sieve.table();
  for (std::uint32_t n = 2; n <= n_max; ++n) t[n] = static_cast<std::uint8_t>(t[n / spf[n]] + 1);
  return t;
}

std::vector<std::uint8_t> small_omega_table(const FactorSieve& sieve, std::uint32_t n_max) {
  check_table_range(sieve, n_max);
  std::vector<std::uint8_t> t(static_cast<std::size_t>(n_max) + 1, 0);
  auto spf = sieve.table();
  for (std::uint32_t n = 2; n <= n_max; ++n) {
    std::uint32_t p = spf[n], m = n / p;
    t[n] = static_cast<std::uint8_t>(t[m] + (m % p == 0 ? 0 : 1));
  }
  return t;
}

std::vector<std::uint64_t> big_omega_histogram(const FactorSieve& sieve, std::uint32_t n_max) {
  const auto t = big_omega_table(sieve, n_max);
  std::vector<std::uint64_t> counts;
  for (std::uint32_t n = 1; n <= n_max; ++n) {
    if (t[n] >= counts.size()) counts.resize(t[n] + 1, 0);
    ++counts[t[n]];
  }
  return counts;
}

std::vector<std::uint32_t> additive_table(const FactorSieve& sieve, const AdditiveFunctionSpec& spec,
                                          std::uint32_t n_max) {
  check_table_range(sieve, n_max);
  std::vector<std::uint32_t> t(static_cast<std::size_t>(n_max) + 1, 0);
  auto spf = sieve.table();
  // a(p) is looked up once per prime and reused for every multiple.
  for (std::uint32_t n = 2; n <= n_max; ++n) {
    std::uint32_t p = spf[n];
    t[n] = (p == n) ? spec.at_prime(p) : t[n / p] + t[p];
  }
  return t;
}

}  // namespace ergolab
