#include <doctest.h>

#include <cmath>
#include <numbers>

#include "common.hpp"
#include "ergolab/averaging.hpp"
#include "ergolab/dynsys.hpp"
#include "ergolab/prime_sets.hpp"
#include "ergolab/equidist.hpp"
#include "ergolab/error.hpp"
#include "ergolab/summation.hpp"

using namespace ergolab;
using testing_support::rng;
using testing_support::sieve;
using C = std::complex<double>;

namespace {

const double kSqrt2m1 = std::numbers::sqrt2 - 1.0;
const double kPhim1 = std::numbers::phi - 1.0;

Observable sign() { return Observable::table({1.0, -1.0}); }

double circle_distance(double a, double b) {
  double d = std::abs(a - b);
  d -= std::floor(d);
  return std::min(d, 1.0 - d);
}

}  // namespace

TEST_CASE("additive orbit averages") {
  const auto c2 = AdditiveSystem::cyclic(2);
  CHECK(additive_orbit_average(c2, {0.0}, sign(), 4) == C(0.0));
  CHECK(additive_orbit_average(c2, {0.0}, sign(), 1) == C(-1.0));
  const auto t0 = AdditiveSystem::torus({0.0});
  CHECK(std::abs(additive_orbit_average(t0, {0.0}, Observable::character({1}), 1000) - C(1.0)) < 1e-15);
  const auto t = AdditiveSystem::torus({kSqrt2m1});
  const auto f = Observable::character({1});
  CHECK(std::abs(additive_orbit_average(t, {0.25}, f, 1) - f(t.shape(), t.step({0.25}))) < 1e-15);
  CHECK_THROWS_AS(AdditiveSystem::cyclic(0), InvalidArgument);
  CHECK_THROWS(additive_orbit_average(c2, {0.0}, Observable::character({1}), 10));
}

TEST_CASE("torus steps are exact in fixed point") {
  const auto t = AdditiveSystem::torus({kSqrt2m1, kPhim1});
  const auto x = t.power({0.1, 0.7}, 1000000);
  const auto raw = t.shape().to_raw(State{0.1, 0.7});
  const auto a = torus_to_raw(kSqrt2m1), b = torus_to_raw(kPhim1);
  CHECK(x[0] == torus_from_raw(raw[0] + 1000000 * a));
  CHECK(x[1] == torus_from_raw(raw[1] + 1000000 * b));
}

TEST_CASE("omega orbit averages") {
  const auto& s = sieve(1000000);
  const auto c2 = AdditiveSystem::cyclic(2);
  const auto lam = cesaro_average(100000, [&](std::uint64_t n) { return C(liouville(s, n)); });
  CHECK(std::abs(omega_orbit_average(c2, {0.0}, sign(), 100000, s) - lam) < 1e-15);
  CHECK(std::abs(omega_orbit_average(c2, {0.0}, sign(), 1000000, s)) <= 0.01);
  CHECK(omega_orbit_average(c2, {1.0}, Observable::constant(C(0.3, 0.4)), 1000, s) == C(0.3, 0.4));
  CHECK(omega_orbit_average(c2, {1.0}, sign(), 1000, s) == -omega_orbit_average(c2, {0.0}, sign(), 1000, s));
}

TEST_CASE("additive function orbit averages") {
  const auto& s = sieve(1000000);
  const std::vector<std::pair<AdditiveSystem, Observable>> roster{
      {AdditiveSystem::cyclic(2), sign()},
      {AdditiveSystem::cyclic(3), Observable::table({1.0, e(1.0 / 3), e(2.0 / 3)})},
      {AdditiveSystem::torus({kSqrt2m1}), Observable::character({1})},
      {AdditiveSystem::product({AdditiveSystem::cyclic(2), AdditiveSystem::torus({kPhim1})}),
       Observable::product({sign(), Observable::character({2})})}};
  for (const auto& [sys, f] : roster) {
    const State x(sys.shape().size(), 0.0);
    const auto a = additive_fn_orbit_average(sys, x, f, AdditiveFunctionSpec::big_omega(), 100000, s);
    CHECK(std::abs(a - omega_orbit_average(sys, x, f, 100000, s)) < 1e-12);
    CHECK(std::abs(additive_fn_orbit_average(sys, x, f, AdditiveFunctionSpec{{}, 0}, 1000, s) - f(sys.shape(), x)) <
          1e-12);
    // Derived multiplicative system with a = Omega reproduces the additive average.
    const auto msys = MultiplicativeSystem::derived(sys, AdditiveFunctionSpec::big_omega());
    CHECK(std::abs(multiplicative_orbit_average(msys, x, f, 100000, s) - a) < 1e-12);
  }
}

TEST_CASE("multiplicative orbit averages") {
  const auto& s = sieve(1000000);
  const auto rot = MultiplicativeSystem::rotation(MultiplicativeFunctionSpec::liouville());
  const auto lam = cesaro_average(100000, [&](std::uint64_t n) { return C(liouville(s, n)); });
  CHECK(std::abs(multiplicative_orbit_average(rot, {0.0}, Observable::character({1}), 100000, s) - lam) < 1e-12);
  CHECK(std::abs(multiplicative_orbit_average(rot, {0.3}, Observable::constant(1.0), 1000, s) - C(1.0)) < 1e-15);
  const auto nu2 = MultiplicativeSystem::nu_two(kSqrt2m1);
  const auto g = Observable::character({1});
  CHECK(std::abs(multiplicative_orbit_average(nu2, {0.0}, g, 1000000, s) - nu2_limit_series(g, 0.0, kSqrt2m1, 19)) <=
        2e-3);
}

TEST_CASE("nu2 limit series") {
  const auto one = Observable::constant(1.0);
  CHECK(std::abs(nu2_limit_series(one, 0.2, kSqrt2m1, 10) - C(1.0 - std::ldexp(1.0, -11))) < 1e-15);
  const auto g = Observable::character({1});
  CHECK(std::abs(nu2_limit_series(g, 0.2, kSqrt2m1, 0) - e(0.2) / 2.0) < 1e-15);
  CHECK(std::abs(nu2_limit_series(g, 0.0, kSqrt2m1, 30) - nu2_limit_series(g, 0.0, kSqrt2m1, 60)) <= std::ldexp(1.0, -31));
}

TEST_CASE("semigroup law") {
  const auto& s = sieve(1000000);
  const std::vector<MultiplicativeSystem> roster{
      MultiplicativeSystem::derived(AdditiveSystem::cyclic(5), AdditiveFunctionSpec::big_omega()),
      MultiplicativeSystem::derived(AdditiveSystem::torus({kSqrt2m1, kPhim1}),
                                    AdditiveFunctionSpec{{{PrimeSet::residue(1, 4), 2}}, 1}),
      MultiplicativeSystem::rotation(MultiplicativeFunctionSpec(
          {{PrimeSet::residue(3, 4), C(0, 1)}, {PrimeSet::of({2}), std::polar(1.0, 2.0)}}, -1.0)),
      MultiplicativeSystem::nu_two(kSqrt2m1),
      MultiplicativeSystem::product({MultiplicativeSystem::nu_two(kPhim1),
                                     MultiplicativeSystem::derived(AdditiveSystem::cyclic(3),
                                                                   AdditiveFunctionSpec::big_omega())})};
  std::uniform_int_distribution<std::uint64_t> d(1, 1000);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& ms : roster) {
    const auto& shape = ms.shape();
    for (int t = 0; t < 1000; ++t) {
      const auto m = d(rng()), n = d(rng());
      State y(shape.size(), 0.0);
      if (shape.kind != Shape::Kind::cyclic)
        for (auto& v : y) v = u(rng());
      if (shape.kind == Shape::Kind::product) y[1] = 0.0;  // cyclic part of the last roster entry
      const auto lhs = ms.apply(m * n, y, s);
      const auto rhs = ms.apply(m, ms.apply(n, y, s), s);
      for (std::size_t i = 0; i < y.size(); ++i) REQUIRE(circle_distance(lhs[i], rhs[i]) <= 1e-9);
    }
  }
}

TEST_CASE("polynomial orbit system") {
  {
    const auto po = polynomial_orbit_system({0.0, kSqrt2m1}, 1);
    const auto orbit = po.system.orbit(po.x, 1000);
    for (std::uint64_t n = 0; n <= 1000; ++n)
      REQUIRE(std::abs(po.f(po.system.shape(), orbit[n]) - e(static_cast<double>(n) * kSqrt2m1)) < 1e-12);
  }
  {
    // Exact oracle: sqrt2 n^2 mod 1 in 2^-64 units.
    const std::vector<double> q{0.0, 0.0, std::numbers::sqrt2};
    const auto po = polynomial_orbit_system(q, 1);
    const auto orbit = po.system.orbit(po.x, 1000);
    for (std::uint64_t n = 0; n <= 1000; ++n)
      REQUIRE(std::abs(po.f(po.system.shape(), orbit[n]) - e(poly_phase(q, n))) < 1e-12);
  }
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int t = 0; t < 20; ++t) {
    const std::size_t deg = 1 + static_cast<std::size_t>(t % 4);
    std::vector<double> q(deg + 1);
    for (auto& c : q) c = u(rng());
    const auto po = polynomial_orbit_system(q, 1);
    const auto orbit = po.system.orbit(po.x, 10000);
    for (std::uint64_t n = 0; n <= 10000; n += 7)
      REQUIRE(std::abs(po.f(po.system.shape(), orbit[n]) - e(poly_phase(q, n))) < 1e-6);
  }
  const auto h0 = polynomial_orbit_system({0.3, 0.7}, 0);
  CHECK(std::abs(additive_orbit_average(h0.system, h0.x, h0.f, 100) - C(1.0)) < 1e-15);
}

TEST_CASE("invariant means") {
  CHECK(invariant_mean(AdditiveSystem::cyclic(2), sign()) == C(0.0));
  CHECK(invariant_mean(AdditiveSystem::torus({kSqrt2m1}), Observable::character({1})) == C(0.0));
  CHECK(invariant_mean(AdditiveSystem::torus({kSqrt2m1}), Observable::character({0})) == C(1.0));
  CHECK_THROWS_AS(invariant_mean(AdditiveSystem::torus({0.25}), Observable::character({1})), UnsupportedOperation);
  const auto prod = AdditiveSystem::product({AdditiveSystem::cyclic(3), AdditiveSystem::torus({kPhim1})});
  CHECK(std::abs(invariant_mean(prod, Observable::product({Observable::table({3.0, 0.0, 0.0}),
                                                         Observable::character({0})})) -
                 C(1.0)) < 1e-15);
}

TEST_CASE("weighted omega averages") {
  const auto& s = sieve(10000000);
  const auto c2 = AdditiveSystem::cyclic(2);
  const Sequence sqfree = [&s](std::uint64_t n) { return C(is_k_free(s, n, 2) ? 1.0 : 0.0); };
  const auto mu = cesaro_average(100000, [&](std::uint64_t n) { return C(moebius(s, n)); });
  CHECK(std::abs(weighted_omega_average(c2, {0.0}, sign(), sqfree, 100000, s) - mu) < 1e-15);
  CHECK(std::abs(weighted_omega_average(c2, {0.0}, sign(), [](std::uint64_t) { return C(1.0); }, 100000, s) -
                 omega_orbit_average(c2, {0.0}, sign(), 100000, s)) < 1e-15);
  const Sequence cubefree = [&s](std::uint64_t n) { return C(is_k_free(s, n, 3) ? 1.0 : 0.0); };
  CHECK(std::abs(weighted_omega_average(c2, {0.0}, Observable::constant(1.0), cubefree, 10000000, s).real() -
                 1.0 / zeta(3)) <= 0.003);
  CHECK_THROWS_AS(weighted_omega_average(c2, {0.0}, sign(), [](std::uint64_t) { return C(2.0); }, 100, s),
                  InvalidArgument);
}

TEST_CASE("generator diagnostics") {
  const auto& s = sieve(1000000);
  const auto nu2 = generator_diagnostics(MultiplicativeSystem::nu_two(kSqrt2m1), s);
  REQUIRE(nu2.size() == 2);
  int ids = 0;
  for (const auto& g : nu2) {
    if (g.identity) {
      ++ids;
      CHECK(g.prime_count == primes_up_to(s.limit()).size() - 1);
    } else {
      CHECK(g.prime_count == 1);
      CHECK(g.reciprocal_sum == 0.5);
    }
  }
  CHECK(ids == 1);
  const auto om = generator_diagnostics(MultiplicativeSystem::derived(AdditiveSystem::cyclic(2),
                                                                      AdditiveFunctionSpec::big_omega()),
                                        s);
  REQUIRE(om.size() == 1);
  CHECK_FALSE(om[0].identity);
  CHECK(om[0].reciprocal_sum > 2.8);
}
