#include "ergolab/prime_sets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "ergolab/error.hpp"
#include "ergolab/summation.hpp"

namespace ergolab {

using boost::multiprecision::cpp_int;

std::vector<std::uint64_t> primes_up_to(std::uint64_t limit) {
  if (limit < 2) throw InvalidArgument("prime limit must be >= 2");
  std::vector<bool> composite(limit + 1, false);
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::uint64_t k = i * i; k <= limit; k += i) composite[k] = true;
  }
  return out;
}

std::vector<std::uint64_t> k_almost_primes_up_to(const FactorSieve& sieve, unsigned k,
                                                 std::uint64_t limit) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (limit > sieve.limit())
    throw OutOfRange("limit " + std::to_string(limit) + " exceeds sieve limit " +
                     std::to_string(sieve.limit()));
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = 2; n <= limit; ++n)
    if (big_omega(sieve, n) == k) out.push_back(n);
  return out;
}

RhoPartition::RhoPartition(double rho_, double epsilon_) : rho(rho_), epsilon(epsilon_) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("epsilon must lie in (0, 1)");
  if (!(rho > 1.0 && rho <= 1.0 + epsilon)) throw InvalidArgument("rho must lie in (1, 1 + epsilon]");
}

// ------------------------------------------------------------- RhoGrid

struct RhoGrid::Powers {
  cpp_int mantissa;
  std::uint64_t shift;  // rho = mantissa / 2^shift

  // x >= rho^j
  bool at_least(const cpp_int& x, std::uint64_t j) const {
    cpp_int lhs = x;
    lhs <<= static_cast<unsigned>(shift * j);
    return lhs >= boost::multiprecision::pow(mantissa, static_cast<unsigned>(j));
  }
};

RhoGrid::RhoGrid(double rho) : rho_(rho), log_rho_(std::log(rho)), powers_(std::make_unique<Powers>()) {
  if (!(rho > 1.0) || !std::isfinite(rho)) throw InvalidArgument("rho must be a finite real > 1");
  int exp = 0;
  double frac = std::frexp(rho, &exp);
  auto m = static_cast<std::uint64_t>(std::ldexp(frac, 53));
  std::int64_t k = 53 - exp;
  while (k > 0 && (m & 1) == 0) {
    m >>= 1;
    --k;
  }
  powers_->mantissa = m;
  powers_->shift = static_cast<std::uint64_t>(k);
}

RhoGrid::~RhoGrid() = default;
RhoGrid::RhoGrid(RhoGrid&&) noexcept = default;
RhoGrid& RhoGrid::operator=(RhoGrid&&) noexcept = default;

bool RhoGrid::at_least_power(std::uint64_t x, std::uint64_t j) const {
  return powers_->at_least(cpp_int(x), j);
}

std::uint64_t RhoGrid::bucket(std::uint64_t n) const {
  if (n < 1) throw InvalidArgument("bucket index needs n >= 1");
  const double x = std::log(static_cast<double>(n)) / log_rho_;
  auto j = static_cast<std::uint64_t>(std::floor(x));
  const double guard = 1e-9 * (1.0 + x);
  if (x - std::floor(x) < guard || std::floor(x) + 1.0 - x < guard) {
    while (j > 0 && !at_least_power(n, j)) --j;
    while (at_least_power(n, j + 1)) ++j;
  }
  return j;
}

bool RhoGrid::in_half_bucket(std::uint64_t n, std::uint64_t l) const {
  if (bucket(n) != l) return false;
  cpp_int sq = cpp_int(n) * n;
  return !powers_->at_least(sq, 2 * l + 1);
}

std::uint64_t RhoGrid::threshold(std::uint64_t j) const {
  const double v = std::exp(static_cast<double>(j) * log_rho_);
  if (!(v < 1.8e19)) throw OutOfRange("rho^" + std::to_string(j) + " exceeds 64 bits");
  auto n = static_cast<std::uint64_t>(std::ceil(v));
  if (n < 1) n = 1;
  while (n > 1 && at_least_power(n - 1, j)) --n;
  while (!at_least_power(n, j)) ++n;
  return n;
}

std::uint64_t RhoGrid::half_threshold(std::uint64_t l) const {
  const double v = std::exp((static_cast<double>(l) + 0.5) * log_rho_);
  if (!(v < 4e9)) throw OutOfRange("half bucket " + std::to_string(l) + " beyond supported range");
  auto n = static_cast<std::uint64_t>(std::ceil(v));
  if (n < 1) n = 1;
  auto sq_ge = [&](std::uint64_t x) { return powers_->at_least(cpp_int(x) * x, 2 * l + 1); };
  while (n > 1 && sq_ge(n - 1)) --n;
  while (!sq_ge(n)) ++n;
  return n;
}

std::uint64_t rho_bucket(std::uint64_t n, const RhoPartition& partition) {
  return RhoGrid(partition.rho).bucket(n);
}

// -------------------------------------------------------- construction

namespace {

// Rosser-Schoenfeld: sum_{p <= x} 1/p < ln ln x + B + 1/ln^2 x for x > 1.
constexpr double kMertens = 0.2614972128476428;

std::string limit_lower_bound(double needed, std::uint64_t have) {
  const double lnl = std::log(static_cast<double>(have));
  const double log10_x = std::exp(needed - kMertens - 1.0 / (lnl * lnl)) / std::log(10.0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "sieve limit >= 10^%.0f (a prime reciprocal sum of %.4g is needed)",
                log10_x, needed);
  return buf;
}

struct PrimeBuckets {
  std::vector<std::uint64_t> primes;
  std::vector<std::uint64_t> start;       // bucket j: primes[start[j], start[j+1])
  std::vector<std::uint64_t> half_end;    // half-bucket l: primes[start[l], half_end[l])
  std::uint64_t full = 0;                 // buckets 0..full-1 lie inside the sieve

  std::uint64_t count(std::uint64_t j) const { return start[j + 1] - start[j]; }
  std::uint64_t half_count(std::uint64_t l) const { return half_end[l] - start[l]; }
};

PrimeBuckets bucket_primes(const RhoGrid& grid, const FactorSieve& sieve) {
  PrimeBuckets pb;
  const std::uint64_t limit = sieve.limit();
  for (std::uint64_t n = 2; n <= limit; ++n)
    if (sieve.is_prime(n)) pb.primes.push_back(n);
  std::vector<std::uint64_t> thr{grid.threshold(0)};
  while (thr.back() <= limit + 1) thr.push_back(grid.threshold(thr.size()));
  // thr[k] > limit + 1 for the last k, so buckets 0..k-2 are complete.
  pb.full = thr.size() - 1;
  for (std::uint64_t j = 0; j <= pb.full; ++j) {
    auto lo = std::lower_bound(pb.primes.begin(), pb.primes.end(), thr[j]) - pb.primes.begin();
    pb.start.push_back(static_cast<std::uint64_t>(lo));
  }
  for (std::uint64_t l = 0; l < pb.full; ++l) {
    const std::uint64_t h = grid.half_threshold(l);
    auto hi = std::lower_bound(pb.primes.begin(), pb.primes.end(), h) - pb.primes.begin();
    pb.half_end.push_back(static_cast<std::uint64_t>(hi));
  }
  return pb;
}

struct Plan {
  std::uint64_t s = 0, t = 0;
  std::vector<std::uint64_t> p2_size;  // index j = 1..t
  double s1 = 0.0, s2 = 0.0;
};

double half_reciprocal_sum(const PrimeBuckets& pb, std::uint64_t l, std::uint64_t take) {
  CompensatedSum<double> s;
  for (std::uint64_t i = 0; i < take; ++i) s.add(1.0 / static_cast<double>(pb.primes[pb.start[l] + i]));
  return s.value();
}

// Largest usable |P2,j|: bounded by the half-bucket sj itself and, for every
// l with P1,l nonempty, by the primes available in bucket sj+l-shift.
std::uint64_t p2_cap(const PrimeBuckets& pb, std::uint64_t j0, std::uint64_t s, std::uint64_t j,
                     int shift) {
  std::uint64_t cap = pb.half_count(s * j);
  for (std::uint64_t l = j0; l < s; ++l) {
    const std::uint64_t c1 = pb.half_count(l);
    if (c1 == 0) continue;
    cap = std::min(cap, pb.count(s * j + l - shift) / c1);
  }
  return cap;
}

// Largest bucket index touched by a plan with parameters s, t.
std::uint64_t top_bucket(std::uint64_t s, std::uint64_t t, int shift) {
  return s * t + s - 1 + (shift < 0 ? 1 : 0);
}

// B1 bucket j paired with B2 bucket j + shift.
std::vector<BucketCount> tally_buckets(const RhoGrid& grid, const MatchedBlocks& blocks) {
  std::map<std::int64_t, BucketCount> counts;
  auto slot = [&](std::int64_t j) -> BucketCount& {
    return counts.try_emplace(j, BucketCount{static_cast<std::uint64_t>(std::max<std::int64_t>(j, 0)), 0, 0})
        .first->second;
  };
  for (auto p : blocks.b1) slot(static_cast<std::int64_t>(grid.bucket(p))).b1++;
  for (auto q : blocks.b2) slot(static_cast<std::int64_t>(grid.bucket(q)) - blocks.shift).b2++;
  std::vector<BucketCount> out;
  for (auto& [j, c] : counts) out.push_back(c);
  return out;
}

}  // namespace

MatchedBlocks construct_matched_blocks(double epsilon, double rho, const FactorSieve& sieve,
                                       BlockMode mode, int shift) {
  RhoPartition partition(rho, epsilon);
  if (shift < -1 || shift > 1) throw InvalidArgument("shift must be -1, 0 or 1");
  RhoGrid grid(rho);
  const PrimeBuckets pb = bucket_primes(grid, sieve);
  const double target = 3.0 / epsilon;
  auto fits = [&](std::uint64_t s, std::uint64_t t) { return top_bucket(s, t, shift) < pb.full; };

  std::uint64_t j0 = 0;
  while (j0 < pb.full && pb.half_count(j0) == 0) ++j0;
  if (j0 + 1 >= pb.full || !fits(j0 + 1, 1))
    throw ResourceExhausted("sieve limit " + std::to_string(sieve.limit()) + " too small for any block",
                            limit_lower_bound(target, sieve.limit()));

  std::vector<double> s1_prefix{0.0};  // s1_prefix[k] = S1 for s = j0 + k
  for (std::uint64_t l = j0; l < pb.full; ++l)
    s1_prefix.push_back(s1_prefix.back() + half_reciprocal_sum(pb, l, pb.half_count(l)));
  auto s1_of = [&](std::uint64_t s) { return s1_prefix[s - j0]; };

  auto plan_for = [&](std::uint64_t s, std::uint64_t t_max, bool stop_at_target) {
    Plan plan;
    plan.s = s;
    plan.s1 = s1_of(s);
    plan.p2_size.push_back(0);
    CompensatedSum<double> s2;
    for (std::uint64_t j = 1; j <= t_max && fits(s, j); ++j) {
      const std::uint64_t cap = p2_cap(pb, j0, s, j, shift);
      plan.p2_size.push_back(cap);
      s2.add(half_reciprocal_sum(pb, s * j, cap));
      plan.t = j;
      if (stop_at_target && s2.value() >= target) break;
    }
    plan.s2 = s2.value();
    return plan;
  };

  Plan plan;
  if (mode == BlockMode::strict) {
    std::uint64_t s = j0 + 1;
    while (s1_of(s) < target && fits(s + 1, 1)) ++s;
    if (s1_of(s) < target) {
      char what[200];
      std::snprintf(what, sizeof what,
                    "P1 reciprocal sum reaches %.6g < 3/epsilon = %.6g inside sieve limit %u",
                    s1_of(s), target, sieve.limit());
      throw ResourceExhausted(what, limit_lower_bound(target, sieve.limit()));
    }
    plan = plan_for(s, ~std::uint64_t{0}, true);
    if (plan.s2 < target) {
      char what[200];
      std::snprintf(what, sizeof what,
                    "P2 reciprocal sum reaches %.6g < 3/epsilon = %.6g inside sieve limit %u", plan.s2,
                    target, sieve.limit());
      throw ResourceExhausted(what, limit_lower_bound(target, sieve.limit()));
    }
  } else {
    double best = INFINITY;
    for (std::uint64_t s = j0 + 1; fits(s, 1); ++s) {
      Plan candidate = plan_for(s, ~std::uint64_t{0}, false);
      if (candidate.s1 <= 0.0 || candidate.s2 <= 0.0) continue;
      const double bound = 1.0 / candidate.s1 + 1.0 / candidate.s2 + 1.0 / (candidate.s1 * candidate.s2);
      if (bound < best) {
        best = bound;
        plan = std::move(candidate);
      }
    }
    if (plan.s == 0)
      throw ResourceExhausted("sieve limit " + std::to_string(sieve.limit()) + " too small for any block",
                              limit_lower_bound(target, sieve.limit()));
  }

  MatchedBlocks out{partition, shift, {}, {}, {}, 0.0, 0.0};
  out.j0 = j0;
  out.s = plan.s;
  out.t = plan.t;
  out.p1_reciprocal_sum = plan.s1;
  out.p2_reciprocal_sum = plan.s2;
  for (std::uint64_t l = j0; l < plan.s; ++l) out.p1_size += pb.half_count(l);
  for (std::uint64_t j = 1; j <= plan.t; ++j) {
    const std::uint64_t c2 = plan.p2_size[j];
    out.p2_size += c2;
    for (std::uint64_t l = j0; l < plan.s; ++l) {
      const std::uint64_t c1 = pb.half_count(l);
      for (std::uint64_t a = 0; a < c1; ++a)
        for (std::uint64_t b = 0; b < c2; ++b)
          out.b2.push_back(pb.primes[pb.start[l] + a] * pb.primes[pb.start[plan.s * j] + b]);
      const std::uint64_t target_bucket = plan.s * j + l - shift;
      for (std::uint64_t i = 0; i < c1 * c2; ++i) out.b1.push_back(pb.primes[pb.start[target_bucket] + i]);
    }
  }
  std::sort(out.b1.begin(), out.b1.end());
  std::sort(out.b2.begin(), out.b2.end());

  out.bucket_counts = tally_buckets(grid, out);
  out.measure_b1 = coprimality_measure(out.b1);
  out.measure_b2 = coprimality_measure(out.b2);
  return out;
}

// ------------------------------------------------------- verification

bool BlockVerification::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.passed; });
}

BlockVerification verify_matched_blocks(const MatchedBlocks& blocks) {
  BlockVerification report;
  const auto& b1 = blocks.b1;
  const auto& b2 = blocks.b2;

  {
    PropertyCheck a{"(a) B1 primes, B2 2-almost primes", true, "ok"};
    if (b1.empty() || b2.empty()) {
      a = {a.name, false, "empty set"};
    }
    for (auto p : b1)
      if (a.passed && !is_prime_u64(p)) a = {a.name, false, "B1 element " + std::to_string(p) + " is not prime"};
    for (auto q : b2) {
      if (!a.passed) break;
      unsigned total = 0;
      for (auto [p, e] : factorize_u64(q)) total += e;
      if (total != 2) a = {a.name, false, "B2 element " + std::to_string(q) + " has Omega " + std::to_string(total)};
    }
    report.checks.push_back(a);
  }

  {
    PropertyCheck b{"(b) equal bucket counts (shift " + std::to_string(blocks.shift) + ")", true, "ok"};
    RhoGrid grid(blocks.partition.rho);
    std::map<std::int64_t, std::pair<std::uint64_t, std::uint64_t>> counts;
    for (auto p : b1) counts[static_cast<std::int64_t>(grid.bucket(p))].first++;
    for (auto q : b2) counts[static_cast<std::int64_t>(grid.bucket(q)) - blocks.shift].second++;
    for (auto& [j, c] : counts) {
      if (c.first != c.second) {
        b = {b.name, false,
             "bucket " + std::to_string(j) + ": |B1| = " + std::to_string(c.first) + ", |B2| at bucket " +
                 std::to_string(j + blocks.shift) + " = " + std::to_string(c.second)};
        break;
      }
    }
    report.checks.push_back(b);
  }

  {
    report.measure_b1 = b1.empty() ? INFINITY : coprimality_measure(b1);
    report.measure_b2 = b2.empty() ? INFINITY : coprimality_measure(b2);
    const double eps = blocks.partition.epsilon;
    char buf[160];
    std::snprintf(buf, sizeof buf, "measure(B1) = %.6g, measure(B2) = %.6g, epsilon = %.6g", report.measure_b1,
                  report.measure_b2, eps);
    report.checks.push_back({"(c) coprimality measures <= epsilon",
                             report.measure_b1 <= eps && report.measure_b2 <= eps, buf});
  }
  return report;
}

// --------------------------------------------------------- comparison

double block_comparison_defect(const Sequence& a, const std::vector<std::uint64_t>& b1,
                               const std::vector<std::uint64_t>& b2, std::uint64_t n_max) {
  if (b1.empty() || b2.empty()) throw InvalidArgument("block sets must be nonempty");
  const std::uint64_t top = std::max(*std::max_element(b1.begin(), b1.end()),
                                     *std::max_element(b2.begin(), b2.end()));
  if (n_max < top) throw InvalidArgument("N must be at least the largest block element");

  std::vector<std::uint64_t> cuts;
  for (auto m : b1) cuts.push_back(n_max / m);
  for (auto m : b2) cuts.push_back(n_max / m);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // prefix[i] = sum_{n <= cuts[i]} a(n)
  std::vector<std::complex<double>> prefix(cuts.size());
  CompensatedSum<std::complex<double>> running;
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    for (; n < cuts[i];) {
      ++n;
      auto v = a(n);
      if (std::abs(v) > 1.0 + 1e-9) throw InvalidArgument("|a(" + std::to_string(n) + ")| exceeds 1");
      running.add(v);
    }
    prefix[i] = running.value();
  }
  auto block_average = [&](const std::vector<std::uint64_t>& b) {
    std::vector<std::complex<double>> inner(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
      const std::uint64_t c = n_max / b[i];
      auto it = std::lower_bound(cuts.begin(), cuts.end(), c);
      inner[i] = prefix[static_cast<std::size_t>(it - cuts.begin())] / static_cast<double>(c);
    }
    return log_average(b, inner);
  };
  return std::abs(block_average(b1) - block_average(b2));
}

double block_comparison_defect(const Sequence& a, const MatchedBlocks& blocks, std::uint64_t n_max) {
  return block_comparison_defect(a, blocks.b1, blocks.b2, n_max);
}

// ------------------------------------------------------------- text io

void write_matched_blocks(std::ostream& out, const MatchedBlocks& blocks) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g %.17g %d\n", blocks.partition.rho, blocks.partition.epsilon, blocks.shift);
  out << buf;
  for (std::size_t i = 0; i < blocks.b1.size(); ++i) out << "b1 " << i << ' ' << blocks.b1[i] << '\n';
  for (std::size_t i = 0; i < blocks.b2.size(); ++i) out << "b2 " << i << ' ' << blocks.b2[i] << '\n';
}

MatchedBlocks read_matched_blocks(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing header", 0);
  double rho = 0, eps = 0;
  int shift = 0;
  {
    std::istringstream hs(line);
    if (!(hs >> rho >> eps >> shift)) throw ParseError("header must be 'rho epsilon shift'", 0);
  }
  if (shift < -1 || shift > 1) throw InvalidArgument("shift must be -1, 0 or 1");
  MatchedBlocks out{RhoPartition(rho, eps), shift, {}, {}, {}, 0.0, 0.0};
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string set;
    std::uint64_t index = 0, value = 0;
    if (!(ls >> set >> index >> value) || (set != "b1" && set != "b2"))
      throw ParseError("bad block line '" + line + "'", lineno);
    auto& target = set == "b1" ? out.b1 : out.b2;
    if (index != target.size()) throw ParseError("indices must be consecutive", lineno);
    target.push_back(value);
  }
  out.bucket_counts = tally_buckets(RhoGrid(rho), out);
  if (!out.b1.empty()) out.measure_b1 = coprimality_measure(out.b1);
  if (!out.b2.empty()) out.measure_b2 = coprimality_measure(out.b2);
  return out;
}

}  // namespace ergolab
