#pragma once

// Almost primes and the matched prime / 2-almost-prime block construction:
// sets B1 of primes and B2 of products of two primes with equal counts in
// every rho-adic interval [rho^j, rho^{j+1}) and small coprimality measure.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "ergolab/arith.hpp"
#include "ergolab/averaging.hpp"

namespace ergolab {

// Primes in [2, limit] by a plain sieve of Eratosthenes, independent of
// FactorSieve.
std::vector<std::uint64_t> primes_up_to(std::uint64_t limit);

// All n <= limit with Omega(n) = k, ascending.
std::vector<std::uint64_t> k_almost_primes_up_to(const FactorSieve& sieve, unsigned k,
                                                 std::uint64_t limit);

struct RhoPartition {
  double rho;
  double epsilon;

  // Checks 0 < epsilon < 1 and 1 < rho <= 1 + epsilon.
  RhoPartition(double rho, double epsilon);
};

// Bucket arithmetic for a fixed rho. A double rho is exactly M / 2^K, so
// n >= rho^j is decided exactly as n * 2^{Kj} >= M^j whenever the
// floating-point estimate is within a guard band of a boundary.
class RhoGrid {
 public:
  explicit RhoGrid(double rho);
  ~RhoGrid();
  RhoGrid(RhoGrid&&) noexcept;
  RhoGrid& operator=(RhoGrid&&) noexcept;

  double rho() const { return rho_; }
  // x >= rho^j, exactly.
  bool at_least_power(std::uint64_t x, std::uint64_t j) const;
  // j with rho^j <= n < rho^{j+1}.
  std::uint64_t bucket(std::uint64_t n) const;
  // True iff rho^l <= n < rho^{l + 1/2}.
  bool in_half_bucket(std::uint64_t n, std::uint64_t l) const;
  // Smallest n with n >= rho^j.
  std::uint64_t threshold(std::uint64_t j) const;
  // Smallest n with n^2 >= rho^{2l+1}, i.e. the end of half-bucket l.
  std::uint64_t half_threshold(std::uint64_t l) const;

 private:
  struct Powers;
  double rho_;
  double log_rho_;
  std::unique_ptr<Powers> powers_;
};

std::uint64_t rho_bucket(std::uint64_t n, const RhoPartition& partition);

enum class BlockMode {
  // Reciprocal-sum thresholds 3/epsilon must be met inside the sieve.
  strict,
  // Largest construction the sieve allows; property (c) is only measured.
  budget,
};

struct BucketCount {
  std::uint64_t bucket;  // index j of the B1 bucket
  std::uint64_t b1;      // |B1 n [rho^j, rho^{j+1})|
  std::uint64_t b2;      // |B2 n [rho^{j+shift}, rho^{j+shift+1})|
};

struct MatchedBlocks {
  RhoPartition partition;
  int shift = 0;
  std::vector<std::uint64_t> b1;  // primes, ascending
  std::vector<std::uint64_t> b2;  // 2-almost primes, ascending
  std::vector<BucketCount> bucket_counts;
  double measure_b1 = 0.0;
  double measure_b2 = 0.0;

  // Construction parameters; zero when loaded from text.
  std::uint64_t j0 = 0, s = 0, t = 0;
  std::size_t p1_size = 0, p2_size = 0;
  double p1_reciprocal_sum = 0.0, p2_reciprocal_sum = 0.0;
};

// Follows the proof: P1 from prime half-buckets [rho^l, rho^{l+1/2}),
// j0 <= l < s; P2,j from half-buckets [rho^{sj}, rho^{sj+1/2}), j = 1..t;
// B2 = P1 * P2; B1 takes the smallest |B2 n bucket(sj+l)| primes of bucket
// sj+l-shift. Bucket densities are measured from the sieve.
//
// In strict mode s and t are the first indices whose reciprocal sums reach
// 3/epsilon; if the sieve ends first, ResourceExhausted is thrown and its
// suggestion is a lower bound on the sufficient limit (as a power of ten).
// In budget mode s minimizes 1/S1 + 1/S2 + 1/(S1 S2) over the constructions
// that fit.
MatchedBlocks construct_matched_blocks(double epsilon, double rho, const FactorSieve& sieve,
                                       BlockMode mode = BlockMode::strict, int shift = 0);

struct PropertyCheck {
  std::string name;
  bool passed;
  std::string detail;
};

struct BlockVerification {
  std::vector<PropertyCheck> checks;  // (a), (b), (c) in that order
  double measure_b1 = 0.0;
  double measure_b2 = 0.0;
  bool all_passed() const;
};

// Recomputes everything from b1, b2, the partition and the shift.
BlockVerification verify_matched_blocks(const MatchedBlocks& blocks);

// |E^log_{p in B1} E_{n in [N/p]} a(n) - E^log_{q in B2} E_{n in [N/q]} a(n)|.
// One pass over n <= N / min(B1 u B2); memory O(|B1| + |B2|).
double block_comparison_defect(const Sequence& a, const std::vector<std::uint64_t>& b1,
                               const std::vector<std::uint64_t>& b2, std::uint64_t n_max);
double block_comparison_defect(const Sequence& a, const MatchedBlocks& blocks, std::uint64_t n_max);

// Text form: "rho epsilon shift" header, then "b1 <index> <value>" and
// "b2 <index> <value>" lines. Reading recomputes counts and measures.
void write_matched_blocks(std::ostream& out, const MatchedBlocks& blocks);
MatchedBlocks read_matched_blocks(std::istream& in);

}  // namespace ergolab
