#pragma once

// Additive systems (X, T) and multiplicative systems (Y, S) with orbit
// averages along n, Omega(n), a(n) and S_n.
//
// A state is a flat vector of doubles. Cyclic components hold an integer in
// [0, m); torus components hold coordinates in [0, 1). Internally torus
// coordinates are 64-bit fixed point (units of 2^-64), so every step is exact
// mod 1 and the only drift comes from rounding the parameters to 2^-64:
// about N * 2^-65 after N rotation steps, N^k / k! * 2^-65 for the k-th
// coordinate of a unipotent map.

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ergolab/arith.hpp"
#include "ergolab/averaging.hpp"

namespace ergolab {

using State = std::vector<double>;
using RawState = std::vector<std::uint64_t>;

// Layout of a state vector.
struct Shape {
  enum class Kind { cyclic, torus, product };
  Kind kind;
  std::uint64_t modulus = 0;   // cyclic
  std::size_t dim = 0;         // torus
  std::vector<Shape> parts;    // product

  std::size_t size() const;
  bool has_cyclic() const;
  void check_state(std::span<const double> x) const;
  std::string describe() const;

  // Exact conversions between doubles and the fixed-point representation.
  RawState to_raw(std::span<const double> x) const;
  State from_raw(std::span<const std::uint64_t> r) const;
};

// Torus coordinate t in [0, 1) to fixed point and back.
std::uint64_t torus_to_raw(double t);
double torus_from_raw(std::uint64_t r);

class AdditiveSystem {
 public:
  struct Cyclic {
    std::uint64_t m;
  };
  struct Torus {
    std::vector<double> alpha;
    std::vector<std::uint64_t> alpha_raw;
  };
  struct Unipotent {
    std::vector<std::vector<std::int64_t>> a;  // d x d, (A - I)^d = 0
    std::vector<std::uint64_t> b;              // units of 2^-64
  };
  struct Product {
    std::vector<AdditiveSystem> parts;
  };
  using Variant = std::variant<Cyclic, Torus, Unipotent, Product>;

  static AdditiveSystem cyclic(std::uint64_t m);
  static AdditiveSystem torus(std::vector<double> alpha);
  static AdditiveSystem unipotent(std::vector<std::vector<std::int64_t>> a, std::vector<double> b);
  // Translation given directly in units of 2^-64.
  static AdditiveSystem unipotent_fixed(std::vector<std::vector<std::int64_t>> a, std::vector<std::uint64_t> b);
  static AdditiveSystem product(std::vector<AdditiveSystem> parts);

  const Variant& variant() const { return v_; }
  const Shape& shape() const { return shape_; }
  std::string describe() const;

  void step_raw(std::uint64_t* x) const;
  State step(State x) const;
  // T^k x
  State power(State x, std::uint64_t k) const;
  // x, Tx, ..., T^{k_max} x
  std::vector<State> orbit(const State& x, std::uint64_t k_max) const;

 private:
  explicit AdditiveSystem(Variant v);
  Variant v_;
  Shape shape_;
};

class Observable {
 public:
  struct Character {
    std::vector<std::int64_t> h;
  };
  struct Table {
    std::vector<std::complex<double>> values;
  };
  struct Constant {
    std::complex<double> c;
  };
  struct Product {
    std::vector<Observable> parts;
  };
  using Variant = std::variant<Character, Table, Constant, Product>;

  static Observable character(std::vector<std::int64_t> h) { return Observable(Character{std::move(h)}); }
  static Observable table(std::vector<std::complex<double>> v) { return Observable(Table{std::move(v)}); }
  static Observable constant(std::complex<double> c) { return Observable(Constant{c}); }
  static Observable product(std::vector<Observable> parts) { return Observable(Product{std::move(parts)}); }

  const Variant& variant() const { return v_; }
  std::string describe() const;

  // Character fits a torus shape (or a product of tori) of matching total
  // dimension; Table fits a cyclic shape of matching modulus; Product fits a
  // product shape part by part.
  void check(const Shape& shape) const;
  // No shape checks; call check() once first.
  std::complex<double> eval_raw(const Shape& shape, const std::uint64_t* x) const;
  std::complex<double> operator()(const Shape& shape, const State& x) const {
    auto r = shape.to_raw(x);
    return eval_raw(shape, r.data());
  }

 private:
  explicit Observable(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

// E_{n in [N]} f(T^n x)
std::complex<double> additive_orbit_average(const AdditiveSystem& sys, const State& x, const Observable& f,
                                            std::uint64_t n_max);
// E_{n in [N]} f(T^{Omega(n)} x)
std::complex<double> omega_orbit_average(const AdditiveSystem& sys, const State& x, const Observable& f,
                                         std::uint32_t n_max, const FactorSieve& sieve);
// E_{n in [N]} f(T^{a(n)} x)
std::complex<double> additive_fn_orbit_average(const AdditiveSystem& sys, const State& x, const Observable& f,
                                               const AdditiveFunctionSpec& a, std::uint32_t n_max,
                                               const FactorSieve& sieve);
// E_{n in [N]} w(n) f(T^{Omega(n)} x). Throws if some |w(n)| > w_bound.
std::complex<double> weighted_omega_average(const AdditiveSystem& sys, const State& x, const Observable& f,
                                            const Sequence& w, std::uint32_t n_max, const FactorSieve& sieve,
                                            double w_bound = 1.0);

// Integral of f against the invariant measure: uniform on cyclic states,
// Haar on tori, products multiply. Throws UnsupportedOperation for a torus
// rotation whose frequency h.alpha is rational (the orbit closure is then
// not the whole torus) and for shapes it cannot handle.
std::complex<double> invariant_mean(const AdditiveSystem& sys, const Observable& f);

struct PolynomialOrbit {
  AdditiveSystem system;
  State x;
  Observable f;
};

// For Q(t) = sum c_i t^i of degree k >= 1: the unipotent map
// (x1 + k! c_k, x2 + x1, ..., xk + x_{k-1}) on T^k started at
// (p_1(0), ..., p_k(0)), p_k = Q, p_i(t) = p_{i+1}(t+1) - p_{i+1}(t), with
// f = e(h x_k), so f(T^n x) = e(h Q(n)). Degree 0 gives the one-point
// system with f = e(h c_0).
PolynomialOrbit polynomial_orbit_system(const std::vector<double>& coeffs, std::int64_t h);

// ----------------------------------------------------------------------
// Multiplicative systems: S_{mn} = S_m S_n, S_1 = id.

class MultiplicativeSystem {
 public:
  struct Derived {  // S_n = T^{a(n)}
    AdditiveSystem base;
    AdditiveFunctionSpec a;
  };
  struct Rotation {  // y -> y + arg(b(n)) / 2 pi on T^1
    MultiplicativeFunctionSpec b;
  };
  struct NuTwo {  // y -> y + nu_2(n) alpha on T^1
    double alpha;
  };
  struct Product {
    std::vector<MultiplicativeSystem> parts;
  };
  using Variant = std::variant<Derived, Rotation, NuTwo, Product>;

  static MultiplicativeSystem derived(AdditiveSystem base, AdditiveFunctionSpec a);
  static MultiplicativeSystem rotation(MultiplicativeFunctionSpec b);
  static MultiplicativeSystem nu_two(double alpha);
  static MultiplicativeSystem product(std::vector<MultiplicativeSystem> parts);

  const Variant& variant() const { return v_; }
  const Shape& shape() const { return shape_; }
  std::string describe() const;

  // S_n is determined by finitely many completely additive counters
  // c_1(n), ..., c_r(n) (for Derived, a(n); for Rotation, the number of
  // prime factors taking each distinct value of b; for NuTwo, nu_2(n)).
  const std::vector<AdditiveFunctionSpec>& coordinates() const { return coords_; }
  // y moved by the element with counters c.
  State act(State y, std::span<const std::uint64_t> c) const;
  // S_n y
  State apply(std::uint64_t n, State y, const FactorSieve& sieve) const;
  // act() on a fixed-point state, without checks.
  void act_raw(std::uint64_t* y, const std::uint64_t* c) const;

 private:
  explicit MultiplicativeSystem(Variant v);
  Variant v_;
  Shape shape_;
  std::vector<AdditiveFunctionSpec> coords_;
  std::vector<std::uint64_t> rotation_angles_;  // Rotation: angle of each distinct value, fixed point
};

// E_{n in [N]} g(S_n y)
std::complex<double> multiplicative_orbit_average(const MultiplicativeSystem& msys, const State& y,
                                                  const Observable& g, std::uint32_t n_max,
                                                  const FactorSieve& sieve);

// sum_{i=0}^{K} 2^{-(i+1)} g(y + i alpha) on T^1.
std::complex<double> nu2_limit_series(const Observable& g, double y, double alpha, unsigned k_max);

// Primes grouped by the map S_p they induce.
struct GeneratorDiagnostic {
  std::vector<std::uint64_t> counters;  // c(p) for primes in the group
  bool identity;                        // S_p = id
  std::uint64_t prime_count;            // primes <= sieve limit in the group
  double reciprocal_sum;                // sum of 1/p over them
};
std::vector<GeneratorDiagnostic> generator_diagnostics(const MultiplicativeSystem& msys,
                                                       const FactorSieve& sieve);

}  // namespace ergolab
