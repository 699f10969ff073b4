#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "common.hpp"
#include "ergolab/equidist.hpp"
#include "ergolab/error.hpp"
#include "ergolab/summation.hpp"

using namespace ergolab;
using testing_support::rng;
using testing_support::sieve;

namespace {

const double kSqrt2m1 = std::numbers::sqrt2 - 1.0;

// sup over a grid of t of |#{x < t}/M - t|, plus the sample points themselves
double brute_star(const std::vector<double>& xs) {
  double d = 0;
  auto f = [&](double t, bool closed) {
    std::size_t c = 0;
    for (double x : xs) c += closed ? x <= t : x < t;
    return static_cast<double>(c) / static_cast<double>(xs.size());
  };
  for (int i = 0; i <= 1000; ++i) {
    const double t = i / 1000.0;
    d = std::max(d, std::abs(f(t, false) - t));
  }
  for (double x : xs) d = std::max({d, std::abs(f(x, true) - x), std::abs(f(x, false) - x)});
  return d;
}

}  // namespace

TEST_CASE("weyl sums") {
  std::vector<double> zero(100, 0.0);
  CHECK(std::abs(weyl_sum(zero, 3) - std::complex<double>(1.0)) < 1e-15);
  CHECK(std::abs(weyl_sum([](std::uint64_t n) { return n / 2.0; }, 1001, 1)) <= 1.0 / 1001);
  CHECK(std::abs(weyl_sum([](std::uint64_t n) { return n * kSqrt2m1; }, 1000000, 1)) <= 2e-3);
  CHECK_THROWS_AS(weyl_sum(zero, 0), InvalidArgument);
}

TEST_CASE("star discrepancy") {
  CHECK(star_discrepancy(std::vector<double>{0.0}) == 1.0);
  for (int m : {1, 5, 64, 1000}) {
    std::vector<double> g;
    for (int i = 1; i <= m; ++i) g.push_back((2.0 * i - 1) / (2.0 * m));
    CHECK(star_discrepancy(g) == doctest::Approx(1.0 / (2 * m)));
  }
  std::vector<double> w;
  for (int n = 1; n <= 10000; ++n) w.push_back(std::fmod(n * kSqrt2m1, 1.0));
  CHECK(star_discrepancy(w) <= 0.01);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> sz(1, 1000);
  for (int t = 0; t < 30; ++t) {
    std::vector<double> xs(static_cast<std::size_t>(sz(rng())));
    for (auto& x : xs) x = std::round(u(rng()) * 4000) / 4000 * 0.99975;
    const double d = star_discrepancy(xs);
    REQUIRE(d >= 1.0 / (2.0 * xs.size()) - 1e-15);
    REQUIRE(d <= 1.0);
    REQUIRE(d == doctest::Approx(brute_star(xs)).epsilon(1e-12));
    // weighted form on the distinct points
    std::vector<double> pts = xs;
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<std::uint64_t> wts;
    for (double p : pts) wts.push_back(static_cast<std::uint64_t>(std::count(xs.begin(), xs.end(), p)));
    REQUIRE(star_discrepancy(pts, wts) == doctest::Approx(d).epsilon(1e-12));
  }
  CHECK_THROWS_AS(star_discrepancy(std::vector<double>{1.0}), InvalidArgument);
}

TEST_CASE("Erdos-Turan coherence") {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double alpha : {kSqrt2m1, std::numbers::phi - 1, 0.1234567, 1.0 / 7}) {
    std::vector<double> xs;
    for (int n = 1; n <= 5000; ++n) xs.push_back(std::fmod(n * alpha, 1.0));
    double delta = 0;
    for (int h = 1; h <= 5; ++h) delta = std::max(delta, std::abs(weyl_sum(xs, h)));
    double bound = 1.0 / 6;
    for (int h = 1; h <= 5; ++h) bound += delta / h;
    CHECK(star_discrepancy(xs) <= bound);
  }
}

TEST_CASE("residue densities") {
  const IntSequence id = [](std::uint64_t n) { return static_cast<std::int64_t>(n); };
  const auto p = residue_density(id, 1000, 7);
  CHECK(std::accumulate(p.counts.begin(), p.counts.end(), std::uint64_t{0}) == 1000);
  for (double d : p.densities()) CHECK(std::abs(d - 1.0 / 7) <= 1.0 / 1000);
  CHECK(residue_density(id, 1000, 1).densities() == std::vector<double>{1.0});
  const auto& s = sieve(1000000);
  const IntSequence om = [&s](std::uint64_t n) { return static_cast<std::int64_t>(big_omega(s, n)); };
  CHECK(residue_density(om, 1000000, 2).max_deviation() <= 0.01);
}

TEST_CASE("beatty membership against enumeration") {
  for (double alpha : {std::numbers::sqrt2 + 1, std::numbers::phi, 2.0 + 1e-3, std::numbers::pi}) {
    for (double beta : {0.0, 0.37, -1.25}) {
      std::vector<bool> in(10001, false);
      // long double keeps alpha * m exact for the double alpha; a double product can round across an integer
      for (std::int64_t m = 1;; ++m) {
        const auto k = static_cast<std::int64_t>(
            std::floor(static_cast<long double>(alpha) * static_cast<long double>(m) + static_cast<long double>(beta)));
        if (k > 10000) break;
        if (k >= 0) in[static_cast<std::size_t>(k)] = true;
      }
      for (std::int64_t k = 0; k <= 10000; ++k) REQUIRE(in_beatty_set(k, alpha, beta) == in[static_cast<std::size_t>(k)]);
    }
  }
  const IntSequence id = [](std::uint64_t n) { return static_cast<std::int64_t>(n); };
  const double a = 2.0 + 1e-3;
  CHECK(std::abs(beatty_density(id, 1000000, a, 0.0) - 1.0 / a) <= 1e-5);
  CHECK(std::abs(beatty_density(id, 1000000, a, 0.7) - 1.0 / a) <= 1e-5);
  CHECK_THROWS_AS(beatty_density(id, 10, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("digit class densities") {
  const IntSequence id = [](std::uint64_t n) { return static_cast<std::int64_t>(n); };
  const auto g = digit_class_density(id, 1000000, 2, 2);
  CHECK(g.max_deviation() <= 0.01);
  CHECK(g.note.empty());
  CHECK_FALSE(digit_class_density(id, 1000, 10, 3).note.empty());
}

TEST_CASE("polynomial phases") {
  const std::vector<double> q{0.25, std::numbers::sqrt2, 0.5};
  for (std::uint64_t n = 0; n <= 1000; ++n) {
    // sqrt2 is k * 2^-52 for an odd k; n sqrt2 mod 1 is exact in 2^-64 units.
    const long double exact = 0.25L + static_cast<long double>(n) * std::numbers::sqrt2 + 0.5L * n * n;
    REQUIRE(std::abs(poly_phase(q, n) - static_cast<double>(exact - std::floor(exact))) < 1e-12);
  }
  CHECK(has_irrational_nonconstant(q));
  CHECK_FALSE(has_irrational_nonconstant(std::vector<double>{std::numbers::sqrt2, 0.5}));
}

TEST_CASE("joint torus defect") {
  const auto& s = sieve(1000000);
  const std::vector<double> p{0.0, std::numbers::sqrt2}, q{0.1, std::numbers::phi, 0.25};
  const std::uint32_t n_max = 5000;
  const int hh = 2;
  // Direct double sum over every frequency pair, h2 = 0 slice included.
  double best = 0;
  for (int h1 = -hh; h1 <= hh; ++h1)
    for (int h2 = -hh; h2 <= hh; ++h2) {
      if (!h1 && !h2) continue;
      std::complex<double> acc = 0;
      for (std::uint64_t n = 1; n <= n_max; ++n) {
        const long double t = h1 * static_cast<long double>(poly_phase(p, n)) +
                              h2 * static_cast<long double>(poly_phase(q, big_omega(s, n)));
        acc += e(static_cast<double>(t - std::floor(t)));
      }
      best = std::max(best, std::abs(acc) / n_max);
    }
  CHECK(joint_torus_defect(p, q, n_max, s, hh).max_modulus == doctest::Approx(best).epsilon(1e-9));
  CHECK_THROWS_AS(joint_torus_defect(std::vector<double>{0.0, 0.5}, q, 1000, s, 2), InvalidArgument);
  CHECK_THROWS_AS(joint_torus_defect(p, q, 2000000, s, 2), OutOfRange);
}
