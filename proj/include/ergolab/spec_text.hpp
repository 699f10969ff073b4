#pragma once

// Text forms of configuration values.
//
//   real        := gp-constant ['/' gp-constant]       e.g. 1/3, sqrt2-1, 0.25
//   count       := real that is a nonnegative integer  e.g. 1e7
//   list        := item (',' item)*
//   system      := part ('&' part)*
//   part        := 'cyclic:' count | 'torus:' real (';' real)*
//   observable  := factor ('&' factor)*
//   factor      := 'sign' | 'const:' value | 'table:' value (';' value)*
//                | 'char:' int (';' int)*
//   value       := real | 'e(' real ')'
//   mult-fn     := 'liouville' | rule (';' rule)*
//   rule        := primes '->' value
//   primes      := '*' | r '%' m | p ('|' p)* | '!' primes
//
// 'sign' is the table (+1, -1) on a two-point cyclic component.

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ergolab/arith.hpp"
#include "ergolab/dynsys.hpp"

namespace ergolab {

double parse_real(std::string_view text);
std::uint64_t parse_count(std::string_view text);
std::int64_t parse_int(std::string_view text);
std::complex<double> parse_value(std::string_view text);

std::vector<double> parse_real_list(std::string_view text);
std::vector<std::uint64_t> parse_count_list(std::string_view text);

AdditiveSystem parse_system(std::string_view text);
Observable parse_observable(std::string_view text);
MultiplicativeFunctionSpec parse_multiplicative(std::string_view text);
PrimeSet parse_prime_set(std::string_view text);

// Splits on `sep`, trimming blanks; empty input gives no items.
std::vector<std::string> split(std::string_view text, char sep);
std::string trim(std::string_view text);

}  // namespace ergolab
