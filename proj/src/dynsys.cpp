#include "ergolab/dynsys.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <unordered_map>

#include "ergolab/error.hpp"
#include "ergolab/summation.hpp"

namespace ergolab {

namespace {

double wrap(double v) {
  double f = v - std::floor(v);
  return f >= 1.0 ? 0.0 : f;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& xs, const char* sep, std::string (*f)(T)) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? sep : "") + f(xs[i]);
  return s;
}

std::string fmt_int(std::int64_t v) { return std::to_string(v); }

std::uint64_t long_double_to_raw(long double t) {
  t -= std::floor(t);
  long double scaled = std::ldexp(t, 64);
  if (scaled >= 18446744073709551616.0L) return 0;
  return static_cast<std::uint64_t>(scaled);
}

constexpr std::size_t kMaxUnipotentDim = 32;

}  // namespace

std::uint64_t torus_to_raw(double t) {
  // t < 1 has at most 53 significant bits, so t * 2^64 is an exact integer.
  return static_cast<std::uint64_t>(std::ldexp(wrap(t), 64));
}

double torus_from_raw(std::uint64_t r) {
  double t = std::ldexp(static_cast<double>(r), -64);
  return t >= 1.0 ? 0.0 : t;
}

// --------------------------------------------------------------- Shape

RawState Shape::to_raw(std::span<const double> x) const {
  RawState r(x.size());
  std::size_t off = 0;
  std::function<void(const Shape&)> walk = [&](const Shape& s) {
    if (s.kind == Kind::cyclic) {
      r[off] = static_cast<std::uint64_t>(x[off]);
      ++off;
    } else if (s.kind == Kind::torus) {
      for (std::size_t i = 0; i < s.dim; ++i, ++off) r[off] = torus_to_raw(x[off]);
    } else {
      for (const auto& p : s.parts) walk(p);
    }
  };
  walk(*this);
  return r;
}

State Shape::from_raw(std::span<const std::uint64_t> r) const {
  State x(r.size());
  std::size_t off = 0;
  std::function<void(const Shape&)> walk = [&](const Shape& s) {
    if (s.kind == Kind::cyclic) {
      x[off] = static_cast<double>(r[off]);
      ++off;
    } else if (s.kind == Kind::torus) {
      for (std::size_t i = 0; i < s.dim; ++i, ++off) x[off] = torus_from_raw(r[off]);
    } else {
      for (const auto& p : s.parts) walk(p);
    }
  };
  walk(*this);
  return x;
}

std::size_t Shape::size() const {
  switch (kind) {
    case Kind::cyclic:
      return 1;
    case Kind::torus:
      return dim;
    case Kind::product: {
      std::size_t n = 0;
      for (const auto& p : parts) n += p.size();
      return n;
    }
  }
  return 0;
}

bool Shape::has_cyclic() const {
  if (kind == Kind::cyclic) return true;
  return std::any_of(parts.begin(), parts.end(), [](const Shape& p) { return p.has_cyclic(); });
}

void Shape::check_state(std::span<const double> x) const {
  if (x.size() != size())
    throw InvalidArgument("state has " + std::to_string(x.size()) + " coordinates, system needs " +
                          std::to_string(size()));
  switch (kind) {
    case Kind::cyclic:
      if (x[0] != std::floor(x[0]) || x[0] < 0 || x[0] >= static_cast<double>(modulus))
        throw InvalidArgument("cyclic state must be an integer in [0, " + std::to_string(modulus) + ")");
      return;
    case Kind::torus:
      for (double v : x)
        if (!(v >= 0.0 && v < 1.0)) throw InvalidArgument("torus coordinates must lie in [0, 1)");
      return;
    case Kind::product: {
      std::size_t off = 0;
      for (const auto& p : parts) {
        p.check_state(x.subspan(off, p.size()));
        off += p.size();
      }
    }
  }
}

std::string Shape::describe() const {
  switch (kind) {
    case Kind::cyclic:
      return "Z/" + std::to_string(modulus);
    case Kind::torus:
      return "T^" + std::to_string(dim);
    case Kind::product: {
      std::string s;
      for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? " x " : "") + parts[i].describe();
      return s;
    }
  }
  return {};
}

// ------------------------------------------------------- AdditiveSystem

AdditiveSystem::AdditiveSystem(Variant v) : v_(std::move(v)) {
  std::visit(
      [&](const auto& s) {
        using V = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<V, Cyclic>) {
          shape_ = {Shape::Kind::cyclic, s.m, 0, {}};
        } else if constexpr (std::is_same_v<V, Torus>) {
          shape_ = {Shape::Kind::torus, 0, s.alpha.size(), {}};
        } else if constexpr (std::is_same_v<V, Unipotent>) {
          shape_ = {Shape::Kind::torus, 0, s.b.size(), {}};
        } else {
          shape_ = {Shape::Kind::product, 0, 0, {}};
          for (const auto& p : s.parts) shape_.parts.push_back(p.shape());
        }
      },
      v_);
}

AdditiveSystem AdditiveSystem::cyclic(std::uint64_t m) {
  if (m < 1) throw InvalidArgument("cyclic rotation needs m >= 1");
  return AdditiveSystem(Cyclic{m});
}

AdditiveSystem AdditiveSystem::torus(std::vector<double> alpha) {
  if (alpha.empty()) throw InvalidArgument("torus rotation needs dimension >= 1");
  std::vector<std::uint64_t> raw;
  for (auto& a : alpha) {
    if (!std::isfinite(a)) throw InvalidArgument("rotation parameters must be finite");
    a = wrap(a);
    raw.push_back(torus_to_raw(a));
  }
  return AdditiveSystem(Torus{std::move(alpha), std::move(raw)});
}

AdditiveSystem AdditiveSystem::unipotent(std::vector<std::vector<std::int64_t>> a, std::vector<double> b) {
  std::vector<std::uint64_t> raw;
  for (double v : b) {
    if (!std::isfinite(v)) throw InvalidArgument("translation must be finite");
    raw.push_back(torus_to_raw(v));
  }
  return unipotent_fixed(std::move(a), std::move(raw));
}

AdditiveSystem AdditiveSystem::unipotent_fixed(std::vector<std::vector<std::int64_t>> a,
                                               std::vector<std::uint64_t> b) {
  const std::size_t d = b.size();
  if (d == 0 || d > kMaxUnipotentDim)
    throw InvalidArgument("unipotent affine map needs dimension in [1, " + std::to_string(kMaxUnipotentDim) + "]");
  if (a.size() != d) throw InvalidArgument("matrix size does not match translation vector");
  for (const auto& row : a)
    if (row.size() != d) throw InvalidArgument("matrix must be square");
  // (A - I)^d == 0 over the integers
  std::vector<std::vector<__int128>> n(d, std::vector<__int128>(d)), p;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) n[i][j] = a[i][j] - (i == j ? 1 : 0);
  p = n;
  for (std::size_t k = 1; k < d; ++k) {
    std::vector<std::vector<__int128>> q(d, std::vector<__int128>(d, 0));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t l = 0; l < d; ++l)
        for (std::size_t j = 0; j < d; ++j) q[i][j] += p[i][l] * n[l][j];
    for (const auto& row : q)
      for (auto v : row)
        if (v > INT64_MAX || v < INT64_MIN) throw InvalidArgument("matrix entries overflow while checking (A - I)^d");
    p = std::move(q);
  }
  for (const auto& row : p)
    for (auto v : row)
      if (v != 0) throw InvalidArgument("matrix is not unipotent: (A - I)^d != 0");
  return AdditiveSystem(Unipotent{std::move(a), std::move(b)});
}

AdditiveSystem AdditiveSystem::product(std::vector<AdditiveSystem> parts) {
  if (parts.empty()) throw InvalidArgument("product of no systems");
  return AdditiveSystem(Product{std::move(parts)});
}

std::string AdditiveSystem::describe() const {
  return std::visit(
      [](const auto& s) -> std::string {
        using V = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<V, Cyclic>) {
          return "cyclic:" + std::to_string(s.m);
        } else if constexpr (std::is_same_v<V, Torus>) {
          return "torus:" + join(s.alpha, ";", fmt);
        } else if constexpr (std::is_same_v<V, Unipotent>) {
          std::string m;
          for (std::size_t i = 0; i < s.a.size(); ++i) m += (i ? "/" : "") + join(s.a[i], ",", fmt_int);
          std::vector<double> b;
          for (auto r : s.b) b.push_back(torus_from_raw(r));
          return "affine:[" + m + "]+" + join(b, ";", fmt);
        } else {
          std::string r;
          for (std::size_t i = 0; i < s.parts.size(); ++i) r += (i ? "*" : "") + s.parts[i].describe();
          return r;
        }
      },
      v_);
}

// Torus arithmetic wraps mod 2^64, i.e. exactly mod 1.
void AdditiveSystem::step_raw(std::uint64_t* x) const {
  std::visit(
      [x](const auto& s) {
        using V = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<V, Cyclic>) {
          x[0] = (x[0] + 1 == s.m) ? 0 : x[0] + 1;
        } else if constexpr (std::is_same_v<V, Torus>) {
          for (std::size_t i = 0; i < s.alpha_raw.size(); ++i) x[i] += s.alpha_raw[i];
        } else if constexpr (std::is_same_v<V, Unipotent>) {
          const std::size_t d = s.b.size();
          std::array<std::uint64_t, kMaxUnipotentDim> y{};
          for (std::size_t i = 0; i < d; ++i) {
            std::uint64_t acc = s.b[i];
            for (std::size_t j = 0; j < d; ++j)
              if (s.a[i][j]) acc += static_cast<std::uint64_t>(s.a[i][j]) * x[j];
            y[i] = acc;
          }
          std::copy(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(d), x);
        } else {
          std::size_t off = 0;
          for (const auto& p : s.parts) {
            p.step_raw(x + off);
            off += p.shape().size();
          }
        }
      },
      v_);
}

State AdditiveSystem::step(State x) const { return power(std::move(x), 1); }

State AdditiveSystem::power(State x, std::uint64_t k) const {
  shape_.check_state(x);
  auto r = shape_.to_raw(x);
  for (std::uint64_t i = 0; i < k; ++i) step_raw(r.data());
  return shape_.from_raw(r);
}

std::vector<State> AdditiveSystem::orbit(const State& x, std::uint64_t k_max) const {
  shape_.check_state(x);
  auto r = shape_.to_raw(x);
  std::vector<State> out{x};
  for (std::uint64_t k = 0; k < k_max; ++k) {
    step_raw(r.data());
    out.push_back(shape_.from_raw(r));
  }
  return out;
}

// ----------------------------------------------------------- Observable

std::string Observable::describe() const {
  return std::visit(
      [](const auto& f) -> std::string {
        using V = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<V, Character>) {
          return "char:" + join(f.h, ";", fmt_int);
        } else if constexpr (std::is_same_v<V, Table>) {
          std::string s = "table:";
          for (std::size_t i = 0; i < f.values.size(); ++i) {
            s += i ? ";" : "";
            s += fmt(f.values[i].real());
            if (f.values[i].imag() != 0.0) s += (f.values[i].imag() > 0 ? "+" : "") + fmt(f.values[i].imag()) + "i";
          }
          return s;
        } else if constexpr (std::is_same_v<V, Constant>) {
          return "const:" + fmt(f.c.real()) + (f.c.imag() != 0.0 ? "," + fmt(f.c.imag()) : "");
        } else {
          std::string s;
          for (std::size_t i = 0; i < f.parts.size(); ++i) s += (i ? "*" : "") + f.parts[i].describe();
          return s;
        }
      },
      v_);
}

void Observable::check(const Shape& shape) const {
  std::visit(
      [&](const auto& f) {
        using V = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<V, Character>) {
          if (shape.has_cyclic()) throw InvalidArgument("character observable needs a torus state, got " + shape.describe());
          if (f.h.size() != shape.size())
            throw InvalidArgument("character has " + std::to_string(f.h.size()) + " frequencies for " + shape.describe());
        } else if constexpr (std::is_same_v<V, Table>) {
          if (shape.kind != Shape::Kind::cyclic || f.values.size() != shape.modulus)
            throw InvalidArgument("table of length " + std::to_string(f.values.size()) + " does not fit " +
                                  shape.describe());
        } else if constexpr (std::is_same_v<V, Product>) {
          if (shape.kind != Shape::Kind::product || shape.parts.size() != f.parts.size())
            throw InvalidArgument("product observable does not match " + shape.describe());
          for (std::size_t i = 0; i < f.parts.size(); ++i) f.parts[i].check(shape.parts[i]);
        }
      },
      v_);
}

std::complex<double> Observable::eval_raw(const Shape& shape, const std::uint64_t* x) const {
  return std::visit(
      [&](const auto& f) -> std::complex<double> {
        using V = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<V, Character>) {
          std::uint64_t t = 0;
          for (std::size_t i = 0; i < f.h.size(); ++i) t += static_cast<std::uint64_t>(f.h[i]) * x[i];
          return e(torus_from_raw(t));
        } else if constexpr (std::is_same_v<V, Table>) {
          return f.values[static_cast<std::size_t>(x[0])];
        } else if constexpr (std::is_same_v<V, Constant>) {
          return f.c;
        } else {
          std::complex<double> v = 1.0;
          std::size_t off = 0;
          for (std::size_t i = 0; i < f.parts.size(); ++i) {
            v *= f.parts[i].eval_raw(shape.parts[i], x + off);
            off += shape.parts[i].size();
          }
          return v;
        }
      },
      v_);
}

// ------------------------------------------------------ orbit averages

namespace {

// sum_k weight[k] f(T^k x), stepping the orbit once.
template <typename W>
std::complex<double> orbit_weighted(const AdditiveSystem& sys, const State& x, const Observable& f,
                                    const std::vector<W>& weight) {
  CompensatedSum<std::complex<double>> total;
  auto r = sys.shape().to_raw(x);
  for (std::size_t k = 0; k < weight.size(); ++k) {
    if (k) sys.step_raw(r.data());
    if (weight[k] != W{}) total.add(f.eval_raw(sys.shape(), r.data()) * weight[k]);
  }
  return total.value();
}

void check_inputs(const Shape& shape, const State& x, const Observable& f) {
  shape.check_state(x);
  f.check(shape);
}

void check_n(std::uint64_t n_max, const FactorSieve* sieve) {
  if (n_max < 1) throw InvalidArgument("N must be >= 1");
  if (sieve && n_max > sieve->limit())
    throw OutOfRange("N = " + std::to_string(n_max) + " exceeds sieve limit " + std::to_string(sieve->limit()));
}

}  // namespace

std::complex<double> additive_orbit_average(const AdditiveSystem& sys, const State& x, const Observable& f,
                                            std::uint64_t n_max) {
  check_inputs(sys.shape(), x, f);
  check_n(n_max, nullptr);
  auto y = sys.shape().to_raw(x);
  auto sum = blocked_sum<std::complex<double>>(1, n_max, [&](std::uint64_t) {
    sys.step_raw(y.data());
    return f.eval_raw(sys.shape(), y.data());
  });
  return sum / static_cast<double>(n_max);
}

std::complex<double> omega_orbit_average(const AdditiveSystem& sys, const State& x, const Observable& f,
                                         std::uint32_t n_max, const FactorSieve& sieve) {
  check_inputs(sys.shape(), x, f);
  check_n(n_max, &sieve);
  const auto counts = big_omega_histogram(sieve, n_max);
  std::vector<double> w(counts.begin(), counts.end());
  return orbit_weighted(sys, x, f, w) / static_cast<double>(n_max);
}

std::complex<double> additive_fn_orbit_average(const AdditiveSystem& sys, const State& x, const Observable& f,
                                               const AdditiveFunctionSpec& a, std::uint32_t n_max,
                                               const FactorSieve& sieve) {
  check_inputs(sys.shape(), x, f);
  check_n(n_max, &sieve);
  const auto table = additive_table(sieve, a, n_max);
  std::vector<double> w;
  for (std::uint32_t n = 1; n <= n_max; ++n) {
    if (table[n] >= w.size()) w.resize(table[n] + 1, 0.0);
    w[table[n]] += 1.0;
  }
  return orbit_weighted(sys, x, f, w) / static_cast<double>(n_max);
}

std::complex<double> weighted_omega_average(const AdditiveSystem& sys, const State& x, const Observable& f,
                                            const Sequence& w, std::uint32_t n_max, const FactorSieve& sieve,
                                            double w_bound) {
  check_inputs(sys.shape(), x, f);
  check_n(n_max, &sieve);
  const auto omega = big_omega_table(sieve, n_max);
  std::vector<CompensatedSum<std::complex<double>>> acc;
  for (std::uint32_t n = 1; n <= n_max; ++n) {
    auto v = w(n);
    if (std::abs(v) > w_bound + 1e-9) throw InvalidArgument("|w(" + std::to_string(n) + ")| exceeds its bound");
    if (omega[n] >= acc.size()) acc.resize(omega[n] + 1);
    acc[omega[n]].add(v);
  }
  std::vector<std::complex<double>> weights;
  for (const auto& s : acc) weights.push_back(s.value());
  return orbit_weighted(sys, x, f, weights) / static_cast<double>(n_max);
}

std::complex<double> invariant_mean(const AdditiveSystem& sys, const Observable& f) {
  f.check(sys.shape());
  if (auto c = std::get_if<Observable::Constant>(&f.variant())) return c->c;
  if (auto t = std::get_if<Observable::Table>(&f.variant())) {
    CompensatedSum<std::complex<double>> s;
    for (auto v : t->values) s.add(v);
    return s.value() / static_cast<double>(t->values.size());
  }
  if (auto ch = std::get_if<Observable::Character>(&f.variant())) {
    if (std::all_of(ch->h.begin(), ch->h.end(), [](std::int64_t v) { return v == 0; })) return 1.0;
    // Frequency of the character along the orbit when it is an eigenfunction.
    std::vector<double> alpha;
    std::function<bool(const AdditiveSystem&)> collect = [&](const AdditiveSystem& s) {
      if (auto tr = std::get_if<AdditiveSystem::Torus>(&s.variant())) {
        alpha.insert(alpha.end(), tr->alpha.begin(), tr->alpha.end());
        return true;
      }
      if (auto pr = std::get_if<AdditiveSystem::Product>(&s.variant())) {
        for (const auto& p : pr->parts)
          if (!collect(p)) return false;
        return true;
      }
      if (auto u = std::get_if<AdditiveSystem::Unipotent>(&s.variant())) {
        // e(h.x) is an eigenfunction iff h A = h; it then rotates by h.b.
        const std::size_t d = u->b.size(), off = alpha.size();
        for (std::size_t j = 0; j < d; ++j) {
          std::int64_t col = 0;
          for (std::size_t i = 0; i < d; ++i) col += ch->h[off + i] * u->a[i][j];
          if (col != ch->h[off + j]) return false;
        }
        for (auto r : u->b) alpha.push_back(torus_from_raw(r));
        return true;
      }
      return false;
    };
    if (collect(sys)) {
      double freq = 0.0;
      for (std::size_t i = 0; i < alpha.size(); ++i) freq += static_cast<double>(ch->h[i]) * alpha[i];
      if (is_near_rational(wrap(freq)))
        throw UnsupportedOperation("h . alpha is rational: the orbit average of " + f.describe() +
                                   " does not reach the Haar mean");
    }
    return 0.0;
  }
  if (auto pf = std::get_if<Observable::Product>(&f.variant())) {
    auto ps = std::get_if<AdditiveSystem::Product>(&sys.variant());
    if (!ps) throw UnsupportedOperation("product observable on a non-product system");
    std::complex<double> v = 1.0;
    for (std::size_t i = 0; i < pf->parts.size(); ++i) v *= invariant_mean(ps->parts[i], pf->parts[i]);
    return v;
  }
  throw UnsupportedOperation("no invariant mean for " + f.describe() + " on " + sys.describe());
}

PolynomialOrbit polynomial_orbit_system(const std::vector<double>& coeffs, std::int64_t h) {
  std::size_t k = coeffs.size();
  while (k > 1 && coeffs[k - 1] == 0.0) --k;
  if (k == 0) throw InvalidArgument("polynomial needs at least one coefficient");
  const std::size_t deg = k - 1;
  for (double c : coeffs)
    if (!std::isfinite(c)) throw InvalidArgument("polynomial coefficients must be finite");
  if (deg == 0) {
    return {AdditiveSystem::cyclic(1), State{0.0},
            Observable::table({e(static_cast<double>(h) * coeffs[0])})};
  }
  if (deg > kMaxUnipotentDim) throw InvalidArgument("polynomial degree too large");
  // Q(t) mod 1 at t = 0..deg, then p_i(0) = Delta^{deg-i} Q(0).
  auto q_at = [&](std::size_t t) {
    long double acc = 0.0L, tp = 1.0L;
    for (std::size_t i = 0; i <= deg; ++i) {
      long double term = static_cast<long double>(coeffs[i]) * tp;
      acc += term - std::floor(term);
      tp *= static_cast<long double>(t);
    }
    return acc;
  };
  std::vector<long double> diff(deg + 1);
  for (std::size_t t = 0; t <= deg; ++t) diff[t] = q_at(t);
  State x(deg);
  x[deg - 1] = torus_from_raw(long_double_to_raw(diff[0]));
  for (std::size_t order = 1; order < deg; ++order) {
    for (std::size_t t = 0; t + order <= deg; ++t) diff[t] = diff[t + 1] - diff[t];
    x[deg - 1 - order] = torus_from_raw(long_double_to_raw(diff[0]));
  }
  long double fact = 1.0L;
  for (std::size_t i = 2; i <= deg; ++i) fact *= static_cast<long double>(i);
  const long double lead = fact * static_cast<long double>(coeffs[deg]);
  std::vector<std::vector<std::int64_t>> a(deg, std::vector<std::int64_t>(deg, 0));
  for (std::size_t i = 0; i < deg; ++i) {
    a[i][i] = 1;
    if (i) a[i][i - 1] = 1;
  }
  std::vector<std::uint64_t> b(deg, 0);
  b[0] = long_double_to_raw(lead);
  std::vector<std::int64_t> freq(deg, 0);
  freq[deg - 1] = h;
  return {AdditiveSystem::unipotent_fixed(std::move(a), std::move(b)), std::move(x), Observable::character(freq)};
}

// ------------------------------------------------- MultiplicativeSystem

MultiplicativeSystem::MultiplicativeSystem(Variant v) : v_(std::move(v)) {
  std::visit(
      [&](const auto& s) {
        using V = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<V, Derived>) {
          shape_ = s.base.shape();
          coords_ = {s.a};
        } else if constexpr (std::is_same_v<V, Rotation>) {
          shape_ = {Shape::Kind::torus, 0, 1, {}};
          for (auto value : s.b.distinct_values()) {
            auto same = [&](std::complex<double> u) { return std::abs(u - value) <= 1e-12 ? 1u : 0u; };
            AdditiveFunctionSpec c;
            for (const auto& [set, u] : s.b.assignments()) c.assignments.emplace_back(set, same(u));
            c.fallback = same(s.b.fallback());
            coords_.push_back(std::move(c));
            rotation_angles_.push_back(torus_to_raw(std::arg(value) / (2.0 * std::numbers::pi)));
          }
        } else if constexpr (std::is_same_v<V, NuTwo>) {
          shape_ = {Shape::Kind::torus, 0, 1, {}};
          coords_ = {AdditiveFunctionSpec::restricted(PrimeSet::of({2}))};
        } else {
          shape_ = {Shape::Kind::product, 0, 0, {}};
          for (const auto& p : s.parts) {
            shape_.parts.push_back(p.shape());
            coords_.insert(coords_.end(), p.coordinates().begin(), p.coordinates().end());
          }
        }
      },
      v_);
}

MultiplicativeSystem MultiplicativeSystem::derived(AdditiveSystem base, AdditiveFunctionSpec a) {
  return MultiplicativeSystem(Derived{std::move(base), std::move(a)});
}

MultiplicativeSystem MultiplicativeSystem::rotation(MultiplicativeFunctionSpec b) {
  return MultiplicativeSystem(Rotation{std::move(b)});
}

MultiplicativeSystem MultiplicativeSystem::nu_two(double alpha) {
  if (!std::isfinite(alpha)) throw InvalidArgument("alpha must be finite");
  return MultiplicativeSystem(NuTwo{wrap(alpha)});
}

MultiplicativeSystem MultiplicativeSystem::product(std::vector<MultiplicativeSystem> parts) {
  if (parts.empty()) throw InvalidArgument("product of no systems");
  return MultiplicativeSystem(Product{std::move(parts)});
}

std::string MultiplicativeSystem::describe() const {
  return std::visit(
      [](const auto& s) -> std::string {
        using V = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<V, Derived>) {
          return "derived:" + s.base.describe() + "@" + s.a.describe();
        } else if constexpr (std::is_same_v<V, Rotation>) {
          return "mrot:" + s.b.describe();
        } else if constexpr (std::is_same_v<V, NuTwo>) {
          return "nu2:" + fmt(s.alpha);
        } else {
          std::string r;
          for (std::size_t i = 0; i < s.parts.size(); ++i) r += (i ? "*" : "") + s.parts[i].describe();
          return r;
        }
      },
      v_);
}

void MultiplicativeSystem::act_raw(std::uint64_t* y, const std::uint64_t* c) const {
  std::visit(
      [&](const auto& s) {
        using V = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<V, Derived>) {
          for (std::uint64_t i = 0; i < c[0]; ++i) s.base.step_raw(y);
        } else if constexpr (std::is_same_v<V, Rotation>) {
          for (std::size_t i = 0; i < rotation_angles_.size(); ++i) y[0] += c[i] * rotation_angles_[i];
        } else if constexpr (std::is_same_v<V, NuTwo>) {
          y[0] += c[0] * torus_to_raw(s.alpha);
        } else {
          std::size_t off = 0, coff = 0;
          for (const auto& p : s.parts) {
            p.act_raw(y + off, c + coff);
            off += p.shape().size();
            coff += p.coordinates().size();
          }
        }
      },
      v_);
}

State MultiplicativeSystem::act(State y, std::span<const std::uint64_t> c) const {
  shape_.check_state(y);
  if (c.size() != coords_.size()) throw InvalidArgument("wrong number of counters");
  auto r = shape_.to_raw(y);
  act_raw(r.data(), c.data());
  return shape_.from_raw(r);
}

State MultiplicativeSystem::apply(std::uint64_t n, State y, const FactorSieve& sieve) const {
  std::vector<std::uint64_t> c;
  for (const auto& spec : coords_) c.push_back(completely_additive_eval(sieve, spec, n));
  return act(std::move(y), c);
}

std::complex<double> multiplicative_orbit_average(const MultiplicativeSystem& msys, const State& y,
                                                  const Observable& g, std::uint32_t n_max,
                                                  const FactorSieve& sieve) {
  check_inputs(msys.shape(), y, g);
  check_n(n_max, &sieve);
  const auto& coords = msys.coordinates();
  const std::size_t r = coords.size();
  // Counters are packed in mixed radix; digit i never exceeds
  // max_p c_i(p) * floor(log2 N), so the per-n recurrence never carries.
  const auto spf = sieve.table();
  std::vector<std::uint64_t> radix(r);
  std::uint64_t log2n = 0;
  while ((std::uint64_t{2} << log2n) <= n_max) ++log2n;
  long double capacity = 1.0L;
  std::vector<std::uint64_t> place(r);
  std::vector<std::uint64_t> prime_key(static_cast<std::size_t>(n_max) + 1, 0);
  {
    std::vector<std::uint32_t> top(r, 0);
    for (std::uint32_t p = 2; p <= n_max; ++p)
      if (spf[p] == p)
        for (std::size_t i = 0; i < r; ++i) top[i] = std::max(top[i], coords[i].at_prime(p));
    for (std::size_t i = 0; i < r; ++i) {
      radix[i] = static_cast<std::uint64_t>(top[i]) * log2n + 1;
      place[i] = static_cast<std::uint64_t>(capacity);
      capacity *= static_cast<long double>(radix[i]);
    }
    if (capacity > 1.8e19L) throw UnsupportedOperation("too many distinct generator values to tabulate");
    for (std::uint32_t p = 2; p <= n_max; ++p)
      if (spf[p] == p)
        for (std::size_t i = 0; i < r; ++i) prime_key[p] += coords[i].at_prime(p) * place[i];
  }
  // prime_key[n] becomes the packed counter vector of n.
  for (std::uint32_t n = 2; n <= n_max; ++n)
    if (spf[n] != n) prime_key[n] = prime_key[n / spf[n]] + prime_key[spf[n]];
  std::unordered_map<std::uint64_t, std::uint64_t> hist;
  for (std::uint32_t n = 1; n <= n_max; ++n) ++hist[prime_key[n]];
  prime_key.clear();
  prime_key.shrink_to_fit();
  std::vector<std::pair<std::uint64_t, std::uint64_t>> keys(hist.begin(), hist.end());
  std::sort(keys.begin(), keys.end());
  CompensatedSum<std::complex<double>> total;
  std::vector<std::uint64_t> c(r);
  const auto y_raw = msys.shape().to_raw(y);
  for (auto [key, count] : keys) {
    for (std::size_t i = r; i-- > 0;) {
      c[i] = key / place[i];
      key %= place[i];
    }
    auto z = y_raw;
    msys.act_raw(z.data(), c.data());
    total.add(g.eval_raw(msys.shape(), z.data()) * static_cast<double>(count));
  }
  return total.value() / static_cast<double>(n_max);
}

std::complex<double> nu2_limit_series(const Observable& g, double y, double alpha, unsigned k_max) {
  const Shape circle{Shape::Kind::torus, 0, 1, {}};
  g.check(circle);
  CompensatedSum<std::complex<double>> s;
  const std::uint64_t a = torus_to_raw(alpha);
  std::uint64_t x = torus_to_raw(y);
  for (unsigned i = 0; i <= k_max; ++i, x += a) s.add(std::ldexp(1.0, -static_cast<int>(i) - 1) * g.eval_raw(circle, &x));
  return s.value();
}

std::vector<GeneratorDiagnostic> generator_diagnostics(const MultiplicativeSystem& msys,
                                                       const FactorSieve& sieve) {
  const auto& coords = msys.coordinates();
  std::map<std::vector<std::uint64_t>, std::pair<std::uint64_t, CompensatedSum<double>>> groups;
  const auto spf = sieve.table();
  std::vector<std::uint64_t> c(coords.size());
  for (std::uint64_t p = 2; p <= sieve.limit(); ++p) {
    if (spf[p] != p) continue;
    for (std::size_t i = 0; i < coords.size(); ++i) c[i] = coords[i].at_prime(p);
    auto& g = groups[c];
    ++g.first;
    g.second.add(1.0 / static_cast<double>(p));
  }
  // Identity test on a probe point away from rational coordinates.
  // Cyclic coordinates must match exactly; torus ones within about 1e-12.
  RawState y0(msys.shape().size()), slack(msys.shape().size(), 0);
  std::function<void(const Shape&, std::size_t)> probe = [&](const Shape& s, std::size_t at) {
    if (s.kind == Shape::Kind::cyclic) {
      y0[at] = 0;
    } else if (s.kind == Shape::Kind::torus) {
      for (std::size_t i = 0; i < s.dim; ++i) {
        y0[at + i] = torus_to_raw(0.31830988618379067 * static_cast<double>(i + 1));
        slack[at + i] = std::uint64_t{1} << 24;
      }
    } else {
      for (const auto& p : s.parts) {
        probe(p, at);
        at += p.size();
      }
    }
  };
  probe(msys.shape(), 0);
  std::vector<GeneratorDiagnostic> out;
  for (auto& [key, g] : groups) {
    RawState y1 = y0;
    msys.act_raw(y1.data(), key.data());
    bool identity = true;
    for (std::size_t i = 0; i < y0.size(); ++i) {
      const std::uint64_t d = y1[i] - y0[i];
      identity = identity && std::min(d, ~d + 1) <= slack[i];
    }
    out.push_back({key, identity, g.first, g.second.value()});
  }
  return out;
}

}  // namespace ergolab
