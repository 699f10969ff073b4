#include <doctest.h>

#include <cmath>
#include <numbers>

#include "common.hpp"
#include "ergolab/error.hpp"
#include "ergolab/gp.hpp"

using namespace ergolab;
using testing_support::rng;
using testing_support::sieve;

namespace {

GPExpr random_tree(int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 1 ? 1 : 5);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  switch (pick(rng())) {
    case 0: {
      std::uniform_int_distribution<int> kind(0, 4);
      switch (kind(rng())) {
        case 0: return gp_const(gp_named_constant("sqrt2"), "sqrt2");
        case 1: return gp_const(gp_named_constant("phi"), "phi");
        case 2: return gp_const(gp_named_constant("pi"), "pi");
        case 3: return gp_const(std::round(u(rng())));
        default: return gp_const(u(rng()));
      }
    }
    case 1: return gp_var();
    case 2: return gp_add(random_tree(depth - 1), random_tree(depth - 1));
    case 3: return gp_mul(random_tree(depth - 1), random_tree(depth - 1));
    case 4: return gp_floor(random_tree(depth - 1));
    default: return gp_frac(random_tree(depth - 1));
  }
}

}  // namespace

TEST_CASE("parse shapes") {
  const auto v = parse_gp("n");
  CHECK(v->kind == GPNode::Kind::var);
  const auto e = parse_gp("floor(n*sqrt2)*0.618");
  REQUIRE(e->kind == GPNode::Kind::mul);
  REQUIRE(e->lhs->kind == GPNode::Kind::floor);
  REQUIRE(e->lhs->lhs->kind == GPNode::Kind::mul);
  CHECK(e->lhs->lhs->lhs->kind == GPNode::Kind::var);
  CHECK(e->lhs->lhs->rhs->value == std::numbers::sqrt2);
  CHECK(e->rhs->value == 0.618);
  CHECK(gp_equal(parse_gp(print_gp(e)), e));
  const auto p = parse_gp("(n*n + 2*n) + (n*sqrt2 + 1)*floor(n*n*phi + 0.5)");
  CHECK(eval_gp(p, 3) == doctest::Approx(15 + (3 * std::numbers::sqrt2 + 1) * std::floor(9 * std::numbers::phi + 0.5)));
  CHECK(parse_gp("n - 2")->kind == GPNode::Kind::add);
  CHECK(eval_gp(parse_gp("n - 2*n"), 5) == -5.0);
  CHECK(eval_gp(parse_gp("-n*-3"), 2) == 6.0);
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(parse_gp("n +"), ParseError);
  CHECK_THROWS_AS(parse_gp("floor(n"), ParseError);
  CHECK_THROWS_AS(parse_gp("n / 2"), ParseError);
  try {
    parse_gp("n + foo");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 4);
  }
}

TEST_CASE("evaluation") {
  CHECK(eval_gp(gp_var(), 7) == 7.0);
  CHECK(eval_gp(gp_frac(gp_const(2.5)), 0) == 0.5);
  CHECK(eval_gp(parse_gp("floor(n*sqrt2)"), 5) == 7.0);
  CHECK(eval_gp(parse_gp("frac(-0.25)"), 0) == 0.75);
}

TEST_CASE("random round trips and frac identity") {
  for (int t = 0; t < 1000; ++t) {
    const auto e = random_tree(6);
    const auto text = print_gp(e);
    const auto back = parse_gp(text);
    INFO(text);
    REQUIRE(gp_equal(back, e));
    const auto fr = gp_frac(e);
    for (std::uint64_t n : {0, 1, 7}) {
      const auto v = eval_gp_checked(e, n, 0.0).value;
      REQUIRE(eval_gp_checked(fr, n, 0.0).value == v - std::floor(v));
    }
  }
}

TEST_CASE("boundary flags") {
  CHECK(eval_gp_checked(parse_gp("floor(n*0.1)"), 10).near_boundary);
  CHECK_FALSE(eval_gp_checked(parse_gp("floor(n*sqrt2)"), 10).near_boundary);
  CHECK_FALSE(eval_gp_checked(parse_gp("floor(n)"), 10).near_boundary);  // exact integers are safe
}

TEST_CASE("equidistribution comparison") {
  const auto& s = sieve(1000000);
  const auto half = gp_equidistribution_compare(parse_gp("0.5*n"), 1000000, s, 3);
  CHECK(half.rows[0].direct <= 1e-6);
  CHECK(half.rows[1].direct == doctest::Approx(1.0));
  const auto c = gp_equidistribution_compare(parse_gp("0.3"), 10000, s, 2);
  for (const auto& r : c.rows) {
    CHECK(r.direct == doctest::Approx(1.0));
    CHECK(r.along_omega == doctest::Approx(1.0));
  }
  const auto w = gp_equidistribution_compare(parse_gp("n*sqrt2"), 1000000, s, 1);
  CHECK(w.rows[0].direct <= 1e-3);
  CHECK(w.rows[0].along_omega <= 0.1);
}
