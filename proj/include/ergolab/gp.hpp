#pragma once

// Generalized polynomials: expressions in n built from real constants, +, *,
// floor(.) and frac(.).
//
// Grammar (standard precedence, left-associative):
//   expr    := term (('+' | '-') term)*
//   term    := unary ('*' unary)*
//   unary   := '-' unary | primary
//   primary := number | 'n' | 'sqrt2' | 'phi' | 'pi'
//            | 'floor' '(' expr ')' | 'frac' '(' expr ')' | '(' expr ')'
// A minus directly in front of a numeric literal folds into the constant;
// any other unary minus becomes Mul(Const(-1), e), and a - b becomes
// Add(a, Mul(Const(-1), b)).

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ergolab/arith.hpp"

namespace ergolab {

struct GPNode;
using GPExpr = std::shared_ptr<const GPNode>;

struct GPNode {
  enum class Kind { constant, var, add, mul, floor, frac };
  Kind kind;
  double value = 0.0;  // constant
  std::string name;    // constant: "sqrt2", "phi", "pi" or empty
  GPExpr lhs, rhs;     // add/mul use both; floor/frac use lhs
};

GPExpr gp_const(double v, std::string name = {});
GPExpr gp_var();
GPExpr gp_add(GPExpr a, GPExpr b);
GPExpr gp_mul(GPExpr a, GPExpr b);
GPExpr gp_floor(GPExpr a);
GPExpr gp_frac(GPExpr a);

// Named constants: sqrt2 = 1.4142..., phi = golden ratio 1.6180..., pi.
double gp_named_constant(std::string_view name);

GPExpr parse_gp(std::string_view text);
// Inverse of parse_gp: parse_gp(print_gp(e)) is structurally equal to e.
std::string print_gp(const GPExpr& e);
bool gp_equal(const GPExpr& a, const GPExpr& b);

double eval_gp(const GPExpr& e, std::uint64_t n);

// Evaluation that also reports whether some floor/frac argument was within
// `tol` of an integer, where rounding could flip the result.
struct GPValue {
  long double value;
  bool near_boundary;
};
GPValue eval_gp_checked(const GPExpr& e, std::uint64_t n, double tol = 1e-9);

struct GPCompareRow {
  int h;
  double direct;       // |E_{n in [N]} e(h Q(n))|
  double along_omega;  // |E_{n in [N]} e(h Q(Omega(n)))|
};
struct GPCompareReport {
  std::vector<GPCompareRow> rows;
  std::uint64_t flagged_direct = 0;  // n <= N with a near-boundary evaluation
  std::uint64_t flagged_omega = 0;   // n <= N whose Omega(n) gives one
};
GPCompareReport gp_equidistribution_compare(const GPExpr& e, std::uint32_t n_max, const FactorSieve& sieve,
                                            int h_max = 5);

}  // namespace ergolab
