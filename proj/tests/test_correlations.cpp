#include <doctest.h>

#include <cmath>
#include <numbers>

#include "common.hpp"
#include "ergolab/correlations.hpp"
#include "ergolab/equidist.hpp"
#include "ergolab/error.hpp"
#include "ergolab/summation.hpp"

using namespace ergolab;
using testing_support::sieve;
using C = std::complex<double>;

namespace {

const double kSqrt2m1 = std::numbers::sqrt2 - 1.0;
const double kPhim1 = std::numbers::phi - 1.0;

Observable sign() { return Observable::table({1.0, -1.0}); }

ArithmeticSequence constant(C c) {
  return {[c](std::uint64_t) { return c; }, std::abs(c), "const"};
}

ArithmeticSequence mod3_indicator() {
  return {[](std::uint64_t n) { return C(n % 3 == 0 ? 1.0 : 0.0); }, 1.0, "1_{3|n}"};
}

}  // namespace

TEST_CASE("independence defect") {
  const auto& s = sieve(50000000);
  CHECK(independence_defect(constant(C(0.3, 0.1)), constant(C(-0.5, 0.2)), 1000) == C(0.0));
  const auto ph = linear_phase_sequence(kSqrt2m1);
  CHECK(std::abs(independence_defect(ph, ph, 100000)) >= 0.99);
  const auto lam = liouville_sequence(s);
  CHECK(std::abs(independence_defect(ph, lam, 10000000)) <= 0.01);
  const auto d1 = independence_defect(ph, mod3_indicator(), 10000);
  const auto d2 = independence_defect(mod3_indicator(), ph, 10000);
  CHECK(std::abs(d1 - std::conj(d2)) < 1e-15);
  CHECK_THROWS_AS(independence_defect(constant(2.0), {[](std::uint64_t) { return C(1.5); }, 1.0, "big"}, 10),
                  InvalidArgument);
}

TEST_CASE("Katai table") {
  const auto& s = sieve(50000000);
  const std::vector<std::uint64_t> p{2, 3, 5, 7};
  const auto ph = katai_table(linear_phase_sequence(kSqrt2m1), p, 100000);
  CHECK(ph.max_off_diagonal() <= 1e-3);
  CHECK(std::abs(ph.mean) <= 1e-3);
  const auto one = katai_table(constant(1.0), p, 1000);
  CHECK(one.max_off_diagonal() == doctest::Approx(1.0));
  CHECK(one.mean == C(1.0));
  const auto a = pointwise_product(liouville_sequence(s), linear_phase_sequence(kSqrt2m1));
  const std::vector<std::uint64_t> small{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47};
  const auto t = katai_table(a, small, 100000);
  CHECK(t.max_off_diagonal() <= 0.05);
  CHECK(std::abs(t.mean) <= 0.02);
  for (std::size_t i = 0; i < small.size(); ++i)
    for (std::size_t j = 0; j < small.size(); ++j) REQUIRE(t.entries[i][j] == std::conj(t.entries[j][i]));
  CHECK_THROWS_AS(katai_table(a, std::vector<std::uint64_t>{4}, 10), InvalidArgument);
}

TEST_CASE("aperiodicity") {
  const auto& s = sieve(50000000);
  CHECK(std::abs(aperiodicity_defect(mod3_indicator(), 1, 3, 99999)) >= 0.3);
  CHECK(std::abs(aperiodicity_defect(liouville_sequence(s), 1, 3, 10000000)) <= 0.01);
  CHECK(std::abs(aperiodicity_defect(constant(C(0.7, -0.2)), 1, 3, 1000)) == 0.0);
  CHECK(std::abs(aperiodicity_defect(liouville_sequence(s), 0, 1, 100000)) < 1e-15);
  CHECK(std::abs(aperiodicity_defect(mod3_indicator(), 0, 1, 100000)) < 1e-15);
  CHECK_THROWS_AS(aperiodicity_defect(mod3_indicator(), 2, 6, 100), InvalidArgument);
}

TEST_CASE("local aperiodicity") {
  const auto& s = sieve(50000000);
  CHECK(local_aperiodicity_defect(mod3_indicator(), 1.0 / 3, 30, 100000) >= 0.3);
  CHECK(local_aperiodicity_defect(liouville_sequence(s), 0.0, 1000, 10000000) <= 0.1);
  // H = 1 against the definition: windows of the two terms h = n, n + 1.
  const auto lam = liouville_sequence(s);
  const std::uint64_t n_max = 5000;
  C mean = 0;
  for (std::uint64_t n = 1; n <= n_max; ++n) mean += lam(n);
  mean /= static_cast<double>(n_max);
  double direct = 0;
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    C w = 0;
    for (std::uint64_t h = n; h <= n + 1; ++h) w += e(h * 0.3) * (lam(h) - mean);
    direct += std::abs(w);
  }
  CHECK(local_aperiodicity_defect(lam, 0.3, 1, n_max) == doctest::Approx(direct / n_max).epsilon(1e-12));
  // A long run crosses the periodic resynchronization of the sliding sum.
  const std::uint64_t big = 200000;
  const std::uint64_t hh = 50;
  mean = 0;
  for (std::uint64_t n = 1; n <= big; ++n) mean += lam(n);
  mean /= static_cast<double>(big);
  direct = 0;
  for (std::uint64_t n = 1; n <= big; ++n) {
    C w = 0;
    for (std::uint64_t h = n; h <= n + hh; ++h) w += e(h * kSqrt2m1) * (lam(h) - mean);
    direct += std::abs(w) / hh;
  }
  CHECK(local_aperiodicity_defect(lam, kSqrt2m1, hh, big) == doctest::Approx(direct / big).epsilon(1e-9));
}

TEST_CASE("mean values") {
  const auto& s = sieve(50000000);
  CHECK(mean_value(MultiplicativeFunctionSpec({}, 1.0), 100000, s) == C(1.0));
  CHECK(std::abs(mean_value(MultiplicativeFunctionSpec::liouville(), 1000000, s)) <= 0.01);
  const MultiplicativeFunctionSpec chi({{PrimeSet::residue(3, 4), -1.0}}, 1.0);
  const auto a = mean_value(chi, 100000, s), b = mean_value(chi, 1000000, s), c = mean_value(chi, 10000000, s);
  CHECK(std::abs(a - b) <= 0.02);
  CHECK(std::abs(b - c) <= 0.02);
  CHECK(std::abs(a - c) <= 0.02);
}

TEST_CASE("idempotency defect") {
  const auto& s = sieve(50000000);
  const auto nu2 = MultiplicativeSystem::nu_two(kSqrt2m1);
  const auto gens = generator_diagnostics(nu2, s);
  for (std::size_t i = 0; i < gens.size(); ++i)
    if (gens[i].identity) CHECK(idempotency_defect(nu2, i, {0.2}, Observable::character({1}), 100000, s) == 0.0);
  const auto om = MultiplicativeSystem::derived(AdditiveSystem::cyclic(2), AdditiveFunctionSpec::big_omega());
  CHECK(idempotency_defect(om, 0, {0.0}, sign(), 10000000, s) <= 0.02);
  CHECK_THROWS_AS(idempotency_defect(om, 5, {0.0}, sign(), 100, s), InvalidArgument);
}

TEST_CASE("Dirichlet characters") {
  const auto c3 = dirichlet_characters(3);
  REQUIRE(c3.size() == 2);
  CHECK(c3[0].table == std::vector<C>{0.0, 1.0, 1.0});
  CHECK(c3[1].table == std::vector<C>{0.0, 1.0, -1.0});
  CHECK(primitive_root(3) == 2);
  CHECK(primitive_root(7) == 3);
  for (std::uint64_t d : {2, 3, 5, 7, 11, 13, 31, 97, 101}) {
    const auto chars = dirichlet_characters(d);
    REQUIRE(chars.size() == d - 1);
    for (const auto& chi : chars) {
      REQUIRE(chi(0) == C(0.0));
      REQUIRE(chi(d) == C(0.0));
      for (std::uint64_t n = 1; n < d; ++n) REQUIRE(std::abs(std::pow(chi(n), static_cast<double>(d - 1)) - C(1.0)) < 1e-9);
      for (std::uint64_t m = 1; m <= d * d; ++m)
        for (std::uint64_t n = 1; m * n <= d * d; ++n) REQUIRE(std::abs(chi(m * n) - chi(m) * chi(n)) < 1e-12);
    }
    const auto pm = cesaro_average(100000, [&](std::uint64_t n) { return chars[0](n); });
    CHECK(std::abs(pm - C((d - 1.0) / d)) <= 1e-3);
  }
  CHECK_THROWS_AS(dirichlet_characters(15), UnsupportedOperation);
  CHECK_THROWS_AS(dirichlet_characters(10007), OutOfRange);
}

TEST_CASE("linear phases along Omega") {
  const auto& s = sieve(50000000);
  const auto c2 = AdditiveSystem::cyclic(2);
  const auto t = AdditiveSystem::torus({kPhim1});
  const auto f = Observable::character({1});
  CHECK(std::abs(linear_phase_omega_defect(3.0, t, {0.1}, f, 100000, s) -
                 (omega_orbit_average(t, {0.1}, f, 100000, s) - invariant_mean(t, f))) < 1e-12);
  CHECK(std::abs(linear_phase_omega_defect(1.0 / 3, c2, {0.0}, sign(), 10000000, s)) <= 0.02);
  CHECK(std::abs(linear_phase_omega_defect(kSqrt2m1, c2, {0.0}, sign(), 10000000, s)) <= 0.02);
}

TEST_CASE("progressions along Omega") {
  const auto& s = sieve(50000000);
  const auto c2 = AdditiveSystem::cyclic(2);
  const auto t = AdditiveSystem::torus({kSqrt2m1});
  const auto f = Observable::character({1});
  CHECK(std::abs(progression_omega_average(t, {0.2}, f, 1, 0, 100000, s) - omega_orbit_average(t, {0.2}, f, 100000, s)) <
        1e-12);
  CHECK(std::abs(progression_omega_average(c2, {0.0}, sign(), 4, 1, 10000000, s)) <= 0.03);
  CHECK(std::abs(progression_omega_average(t, {0.2}, f, 2, 0, 100000, s) -
                 omega_orbit_average(t, t.step({0.2}), f, 100000, s)) < 1e-12);
  CHECK_THROWS_AS(progression_omega_average(c2, {0.0}, sign(), 4, 4, 10, s), InvalidArgument);
  CHECK_THROWS_AS(progression_omega_average(c2, {0.0}, sign(), 4, 1, 20000000, s), OutOfRange);
}

TEST_CASE("Besicovitch means") {
  CHECK(besicovitch_mean({{{C(0.4, 0.3), 0.0}}}) == C(0.4, 0.3));
  CHECK(besicovitch_mean({{{C(1.0), kSqrt2m1}}}) == C(0.0));
  const TrigPolynomial p{{{C(1.0), 0.0}, {C(0.5), 0.5}}};
  CHECK(besicovitch_mean(p) == C(1.0));
  CHECK(std::abs(cesaro_average(100001, [&](std::uint64_t n) { return p(n); }) - C(1.0)) <= 1e-5);
}

TEST_CASE("Sarnak-style battery against Liouville") {
  const auto& s = sieve(50000000);
  const auto lam = liouville_sequence(s);
  const std::vector<double> q{0.0, 0.0, std::numbers::sqrt2};
  const std::vector<ArithmeticSequence> roster{
      {[](std::uint64_t n) { return C(n % 2 ? -1.0 : 1.0); }, 1.0, "cyclic:2 sign"},
      {[](std::uint64_t n) { return e(static_cast<double>(n % 3) / 3); }, 1.0, "cyclic:3 character"},
      linear_phase_sequence(kSqrt2m1),
      linear_phase_sequence(kPhim1),
      {[q](std::uint64_t n) { return e(poly_phase(q, n)); }, 1.0, "unipotent sqrt2 n^2"}};
  for (const auto& a : roster) {
    INFO(a.description);
    CHECK(std::abs(independence_defect(a, lam, 10000000)) <= 0.02);
  }
}
