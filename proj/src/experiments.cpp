#include "ergolab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <istream>
#include <numbers>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include "ergolab/arith.hpp"
#include "ergolab/averaging.hpp"
#include "ergolab/correlations.hpp"
#include "ergolab/dynsys.hpp"
#include "ergolab/equidist.hpp"
#include "ergolab/error.hpp"
#include "ergolab/gp.hpp"
#include "ergolab/prime_sets.hpp"
#include "ergolab/sieve_cache.hpp"
#include "ergolab/spec_text.hpp"
#include "ergolab/summation.hpp"

namespace ergolab {

namespace {

using Complex = std::complex<double>;

struct Params {
  std::map<std::string, std::string> v;

  const std::string& str(const std::string& k) const { return v.at(k); }
  double real(const std::string& k) const { return parse_real(str(k)); }
  std::uint64_t count(const std::string& k) const { return parse_count(str(k)); }
  std::int64_t integer(const std::string& k) const { return parse_int(str(k)); }
  // "none" disables a check.
  bool has_tol(const std::string& k) const { return str(k) != "none"; }
};

struct Ctx {
  const Params& p;
  std::vector<std::uint64_t> grid;
  unsigned threads = 1;
  std::string echo;
  std::shared_ptr<const FactorSieve> sieve_ptr;
  ExperimentReport report;
  std::string name;

  const FactorSieve& sieve() const { return *sieve_ptr; }
  std::uint32_t n32(std::uint64_t n) const {
    if (n > 0xffffffffull) throw OutOfRange("N too large");
    return static_cast<std::uint32_t>(n);
  }

  ReportRow row(std::uint64_t n, Complex est, Complex target, const std::string& extra = {}) const {
    return {name, extra.empty() ? echo : (echo.empty() ? extra : echo + ";" + extra), n, est, target,
            std::abs(est - target)};
  }
  void add(ReportRow r) { report.rows.push_back(std::move(r)); }
  void fail(const std::string& why) {
    report.accepted = false;
    report.notes.push_back(why);
  }
  void note(const std::string& s) { report.notes.push_back(s); }

  // Evaluates fn at every grid point, at most `threads` at a time, and
  // appends the rows in grid order.
  void map_grid(const std::function<std::vector<ReportRow>(std::uint64_t)>& fn) {
    const std::size_t t = std::max(1u, threads);
    for (std::size_t lo = 0; lo < grid.size(); lo += t) {
      const std::size_t hi = std::min(grid.size(), lo + t);
      std::vector<std::future<std::vector<ReportRow>>> fut;
      if (t == 1) {
        for (auto& r : fn(grid[lo])) add(std::move(r));
        continue;
      }
      for (std::size_t i = lo; i < hi; ++i) fut.push_back(std::async(std::launch::async, fn, grid[i]));
      for (auto& f : fut)
        for (auto& r : f.get()) add(std::move(r));
    }
  }

  // Every row at the largest N with the given extra-prefix filter must have
  // defect <= tol.
  void check_final(double tol, const std::string& label = {}) {
    const std::uint64_t top = grid.back();
    for (const auto& r : report.rows) {
      if (r.n != top) continue;
      if (!label.empty() && r.params.find(label) == std::string::npos) continue;
      if (!(r.defect <= tol)) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "defect %.6g > %.6g at N=%llu (%s)", r.defect, tol,
                      static_cast<unsigned long long>(top), r.params.c_str());
        fail(buf);
      }
    }
  }
  void check_tol(const std::string& key = "tol", const std::string& label = {}) {
    if (p.has_tol(key)) check_final(p.real(key), label);
  }
};

struct Experiment {
  ExperimentInfo info;
  // Sieve limit needed for the largest N (0: none).
  std::function<std::uint64_t(const Params&, std::uint64_t)> sieve_need;
  std::function<void(Ctx&)> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::uint64_t need_n(const Params&, std::uint64_t n) { return n; }
std::uint64_t need_none(const Params&, std::uint64_t) { return 0; }

State zeros_or(const Params& p, const std::string& key, std::size_t size) {
  if (p.str(key).empty()) return State(size, 0.0);
  return parse_real_list(p.str(key));
}

// sum_k counts[k] fn(k) / N
Complex hist_mean(const std::vector<std::uint64_t>& counts, std::uint64_t n, const std::function<Complex(std::size_t)>& fn) {
  CompensatedSum<Complex> s;
  for (std::size_t k = 0; k < counts.size(); ++k)
    if (counts[k]) s.add(static_cast<double>(counts[k]) * fn(k));
  return s.value() / static_cast<double>(n);
}

std::vector<Complex> orbit_values(const AdditiveSystem& sys, const State& x, const Observable& f, std::size_t k_max) {
  f.check(sys.shape());
  std::vector<Complex> out;
  for (const auto& s : sys.orbit(x, k_max)) out.push_back(f(sys.shape(), s));
  return out;
}

const ExperimentKey kGrid{"N", "1e4,1e5,1e6", "comma-separated N grid"};
const ExperimentKey kSystem{"system", "cyclic:2", "additive system"};
const ExperimentKey kState{"x", "", "initial point, comma-separated (default 0)"};
const ExperimentKey kSign{"f", "sign", "observable"};

ExperimentKey tol(const std::string& v, const std::string& name = "tol") {
  return {name, v, "acceptance tolerance on the final-N defect, or none"};
}

std::vector<Experiment> build_registry() {
  std::vector<Experiment> r;

  r.push_back({{"pnt", "The Liouville function has mean zero.", {kGrid, tol("0.01")}}, need_n, [](Ctx& c) {
                 const auto sys = AdditiveSystem::cyclic(2);
                 const auto f = Observable::table({1.0, -1.0});
                 c.map_grid([&](std::uint64_t n) {
                   return std::vector{c.row(n, omega_orbit_average(sys, {0.0}, f, c.n32(n), c.sieve()), 0.0)};
                 });
                 c.check_tol();
               }});

  r.push_back({{"pillai-selberg", "Omega(n) is equidistributed among the residue classes mod m.",
                {{"m", "3", "modulus"}, kGrid, tol("0.01")}},
               need_n, [](Ctx& c) {
                 const std::uint64_t m = c.p.count("m");
                 if (m < 1) throw InvalidArgument("m must be >= 1");
                 c.map_grid([&](std::uint64_t n) {
                   const auto h = big_omega_histogram(c.sieve(), c.n32(n));
                   std::vector<std::uint64_t> cls(m, 0);
                   for (std::size_t k = 0; k < h.size(); ++k) cls[k % m] += h[k];
                   std::vector<ReportRow> rows;
                   for (std::uint64_t i = 0; i < m; ++i)
                     rows.push_back(c.row(n, static_cast<double>(cls[i]) / static_cast<double>(n), 1.0 / static_cast<double>(m),
                                          "r=" + std::to_string(i)));
                   return rows;
                 });
                 c.check_tol();
               }});

  r.push_back({{"erdos-delange", "Omega(n) alpha is uniformly distributed mod 1 for irrational alpha.",
                {{"alpha", "sqrt2-1", "rotation number"}, {"H", "5", "largest frequency"}, kGrid, tol("0.03"),
                 tol("0.05", "star_tol")}},
               need_n, [](Ctx& c) {
                 const long double alpha = c.p.real("alpha");
                 const auto hh = static_cast<int>(c.p.count("H"));
                 c.map_grid([&](std::uint64_t n) {
                   const auto h = big_omega_histogram(c.sieve(), c.n32(n));
                   std::vector<ReportRow> rows;
                   for (int j = 1; j <= hh; ++j) {
                     const auto w = hist_mean(h, n, [&](std::size_t k) {
                       const long double t = j * alpha * static_cast<long double>(k);
                       return e(static_cast<double>(t - std::floor(t)));
                     });
                     rows.push_back(c.row(n, w, 0.0, "h=" + std::to_string(j)));
                   }
                   std::vector<double> pts;
                   for (std::size_t k = 0; k < h.size(); ++k) {
                     const long double t = alpha * static_cast<long double>(k);
                     pts.push_back(static_cast<double>(t - std::floor(t)));
                   }
                   rows.push_back(c.row(n, star_discrepancy(pts, h), 0.0, "stat=star"));
                   return rows;
                 });
                 c.check_tol("tol", ";h=");
                 c.check_tol("star_tol", "stat=star");
               }});

  r.push_back({{"gelfond-omega", "The base-q digit sum of Omega(n) is equidistributed mod m when gcd(m, q-1) = 1.",
                {{"q", "2", "digit base"}, {"m", "2", "modulus"}, kGrid, tol("0.01")}},
               need_n, [](Ctx& c) {
                 const std::uint64_t q = c.p.count("q"), m = c.p.count("m");
                 if (q < 2 || m < 1) throw InvalidArgument("need q >= 2 and m >= 1");
                 if (std::gcd(m, q - 1) > 1) c.note("outside hypothesis: gcd(m, q-1) > 1");
                 c.map_grid([&](std::uint64_t n) {
                   const auto h = big_omega_histogram(c.sieve(), c.n32(n));
                   std::vector<std::uint64_t> cls(m, 0);
                   for (std::size_t k = 0; k < h.size(); ++k) cls[digit_sum(k, q) % m] += h[k];
                   std::vector<ReportRow> rows;
                   for (std::uint64_t i = 0; i < m; ++i)
                     rows.push_back(c.row(n, static_cast<double>(cls[i]) / static_cast<double>(n), 1.0 / static_cast<double>(m),
                                          "class=" + std::to_string(i)));
                   return rows;
                 });
                 c.check_tol();
               }});

  auto weighted = [](const std::string& name, const std::string& statement, bool kfree, const std::string& tv) {
    std::vector<ExperimentKey> keys{kSystem, kState, {"f", "const:1", "observable"}, kGrid, tol(tv)};
    if (kfree) keys.insert(keys.begin(), ExperimentKey{"k", "3", "power-free exponent"});
    return Experiment{{name, statement, keys}, need_n, [kfree](Ctx& c) {
                        const auto sys = parse_system(c.p.str("system"));
                        const auto x = zeros_or(c.p, "x", sys.shape().size());
                        const auto f = parse_observable(c.p.str("f"));
                        const unsigned k = kfree ? static_cast<unsigned>(c.p.count("k")) : 2;
                        if (k < 2) throw InvalidArgument("k must be >= 2");
                        const Complex target = invariant_mean(sys, f) / zeta(k);
                        const FactorSieve& s = c.sieve();
                        const Sequence w = [&s, k](std::uint64_t n) { return Complex(is_k_free(s, n, k) ? 1.0 : 0.0); };
                        c.map_grid([&](std::uint64_t n) {
                          return std::vector{c.row(n, weighted_omega_average(sys, x, f, w, c.n32(n), s), target)};
                        });
                        c.check_tol();
                      }};
  };
  r.push_back(weighted("squarefree",
                       "Averages of f(T^Omega(n) x) over squarefree n tend to 6/pi^2 times the integral of f.", false,
                       "0.001"));
  r.push_back(weighted("kfree", "Averages of f(T^Omega(n) x) over k-free n tend to 1/zeta(k) times the integral of f.",
                       true, "0.003"));

  r.push_back({{"omega-small", "Orbit averages along omega(n), prime factors without multiplicity, tend to the integral of f.",
                {kSystem, kState, kSign, kGrid, tol("0.03")}},
               need_n, [](Ctx& c) {
                 const auto sys = parse_system(c.p.str("system"));
                 const auto x = zeros_or(c.p, "x", sys.shape().size());
                 const auto f = parse_observable(c.p.str("f"));
                 const Complex target = invariant_mean(sys, f);
                 c.map_grid([&](std::uint64_t n) {
                   const auto t = small_omega_table(c.sieve(), c.n32(n));
                   std::vector<std::uint64_t> h;
                   for (std::uint64_t i = 1; i <= n; ++i) {
                     if (t[i] >= h.size()) h.resize(t[i] + 1, 0);
                     ++h[t[i]];
                   }
                   const auto vals = orbit_values(sys, x, f, h.size());
                   return std::vector{c.row(n, hist_mean(h, n, [&](std::size_t k) { return vals[k]; }), target)};
                 });
                 c.check_tol();
               }});

  r.push_back({{"wirsing-lambda-q", "The Liouville variant that counts only prime factors in Q has mean zero.",
                {{"primes", "1%4", "prime set Q"}, kSystem, kState, kSign, kGrid, tol("none")}},
               need_n, [](Ctx& c) {
                 const auto sys = parse_system(c.p.str("system"));
                 const auto x = zeros_or(c.p, "x", sys.shape().size());
                 const auto f = parse_observable(c.p.str("f"));
                 const auto a = AdditiveFunctionSpec::restricted(parse_prime_set(c.p.str("primes")));
                 const Complex target = invariant_mean(sys, f);
                 c.map_grid([&](std::uint64_t n) {
                   return std::vector{c.row(n, additive_fn_orbit_average(sys, x, f, a, c.n32(n), c.sieve()), target)};
                 });
                 c.check_tol();
               }});

  r.push_back({{"davenport", "The Liouville function is orthogonal to e(n alpha).",
                {{"alpha", "sqrt2-1", "frequency"}, kGrid, tol("0.01")}},
               need_n, [](Ctx& c) {
                 const double alpha = c.p.real("alpha");
                 const auto sys = AdditiveSystem::cyclic(2);
                 const auto f = Observable::table({1.0, -1.0});
                 c.map_grid([&](std::uint64_t n) {
                   return std::vector{
                       c.row(n, linear_phase_omega_average(alpha, sys, {0.0}, f, c.n32(n), c.sieve()).estimate, 0.0)};
                 });
                 c.check_tol();
               }});

  r.push_back({{"daboussi",
                "A completely multiplicative function of modulus one is orthogonal to e(n alpha) for irrational alpha.",
                {{"b", "liouville", "completely multiplicative function"}, {"alpha", "sqrt2-1", "frequency"}, kGrid,
                 tol("0.02")}},
               need_n, [](Ctx& c) {
                 const auto b = parse_multiplicative(c.p.str("b"));
                 const long double alpha = c.p.real("alpha");
                 if (is_near_rational(static_cast<double>(alpha))) c.note("outside hypothesis: alpha is rational");
                 c.map_grid([&](std::uint64_t n) {
                   const auto s = blocked_sum<Complex>(1, n, [&](std::uint64_t k) {
                     const long double t = alpha * static_cast<long double>(k);
                     return completely_multiplicative_eval(c.sieve(), b, k) * e(static_cast<double>(t - std::floor(t)));
                   });
                   return std::vector{c.row(n, s / static_cast<double>(n), 0.0)};
                 });
                 c.check_tol();
               }});

  r.push_back({{"matched-blocks",
                "Matched blocks of primes and 2-almost primes with small coprimality measures make dilation averages agree.",
                {{"eps", "0.25", "epsilon"}, {"rho", "1.2", "bucket ratio"}, {"mode", "strict", "strict or budget"},
                 {"shift", "0", "bucket shift"}, {"sieve", "1e7", "sieve limit for the construction"},
                 {"N", "1e7", "comma-separated N grid, each >= the largest block element"}, tol("none")}},
               [](const Params& p, std::uint64_t n) { return std::max(p.count("sieve"), n); },
               [](Ctx& c) {
                 const double eps = c.p.real("eps");
                 const std::string mode = c.p.str("mode");
                 if (mode != "strict" && mode != "budget") throw InvalidArgument("mode must be strict or budget");
                 const auto blocks = construct_matched_blocks(eps, c.p.real("rho"), c.sieve(),
                                                              mode == "strict" ? BlockMode::strict : BlockMode::budget,
                                                              static_cast<int>(c.p.integer("shift")));
                 const auto v = verify_matched_blocks(blocks);
                 std::string extra = std::string("verified=") + (v.all_passed() ? "pass" : "fail");
                 for (const auto& ch : v.checks) extra += ";" + ch.name + "=" + (ch.passed ? "pass" : "fail");
                 extra += ";B1=" + std::to_string(blocks.b1.size()) + ";B2=" + std::to_string(blocks.b2.size());
                 c.add(c.row(0, std::max(v.measure_b1, v.measure_b2), 0.0, extra));
                 for (const auto& ch : v.checks)
                   if (!ch.passed) c.fail("property " + ch.name + ": " + ch.detail);
                 const FactorSieve& s = c.sieve();
                 const Sequence lambda = [&s](std::uint64_t n) { return Complex(liouville(s, n)); };
                 c.map_grid([&](std::uint64_t n) {
                   return std::vector{c.row(n, block_comparison_defect(lambda, blocks, n), 0.0, "stat=block_defect")};
                 });
                 c.check_final(c.p.has_tol("tol") ? c.p.real("tol") : 3 * eps + 0.05, "stat=block_defect");
               }});

  r.push_back({{"tk-identity",
                "The Turan-Kubilius L2 discrepancy of a set B tends to its coprimality measure.",
                {{"B", "2,3,5,7", "finite set of integers >= 2"}, kGrid, tol("0.01")}},
               need_none, [](Ctx& c) {
                 const auto b = parse_count_list(c.p.str("B"));
                 const double target = coprimality_measure(b);
                 c.map_grid([&](std::uint64_t n) { return std::vector{c.row(n, tk_l2_discrepancy(b, n), target)}; });
                 c.check_tol();
               }});

  r.push_back({{"nu2-counterexample",
                "Orbit averages of the nu_2 rotation converge, but to a limit that is not the Haar integral.",
                {{"alpha", "sqrt2-1", "rotation number"}, {"y", "0", "initial point"}, {"K", "19", "series length"},
                 {"g", "char:1", "observable on T^1"}, kGrid, tol("2e-3")}},
               need_n, [](Ctx& c) {
                 const double alpha = c.p.real("alpha"), y = c.p.real("y");
                 const auto g = parse_observable(c.p.str("g"));
                 const auto msys = MultiplicativeSystem::nu_two(alpha);
                 const Complex target = nu2_limit_series(g, y, alpha, static_cast<unsigned>(c.p.count("K")));
                 c.map_grid([&](std::uint64_t n) {
                   return std::vector{c.row(n, multiplicative_orbit_average(msys, {y}, g, c.n32(n), c.sieve()), target)};
                 });
                 c.check_tol();
               }});

  r.push_back({{"idempotency",
                "For a generator R whose primes have divergent reciprocal sum, g(R S_n y) and g(R^2 S_n y) have equal averages.",
                {{"msys", "omega", "omega (T^Omega over system), nu2 or rotation"}, kSystem,
                 {"alpha", "sqrt2-1", "nu2 rotation number"}, {"b", "liouville", "rotation: multiplicative function"},
                 {"f", "", "observable (default sign for omega, char:1 otherwise)"}, {"y", "", "initial point"}, kGrid,
                 tol("0.02")}},
               need_n, [](Ctx& c) {
                 const std::string kind = c.p.str("msys");
                 std::optional<MultiplicativeSystem> ms;
                 std::string fdef = "char:1";
                 if (kind == "omega") {
                   ms = MultiplicativeSystem::derived(parse_system(c.p.str("system")), AdditiveFunctionSpec::big_omega());
                   fdef = "sign";
                 } else if (kind == "nu2") {
                   ms = MultiplicativeSystem::nu_two(c.p.real("alpha"));
                 } else if (kind == "rotation") {
                   ms = MultiplicativeSystem::rotation(parse_multiplicative(c.p.str("b")));
                 } else {
                   throw InvalidArgument("msys must be omega, nu2 or rotation");
                 }
                 const auto g = parse_observable(c.p.str("f").empty() ? fdef : c.p.str("f"));
                 const auto y = zeros_or(c.p, "y", ms->shape().size());
                 const auto gens = generator_diagnostics(*ms, c.sieve());
                 c.map_grid([&](std::uint64_t n) {
                   std::vector<ReportRow> rows;
                   for (std::size_t i = 0; i < gens.size(); ++i) {
                     const std::string extra = "generator=" + std::to_string(i) +
                                               ";identity=" + (gens[i].identity ? "1" : "0") +
                                               ";sum_inv_p=" + fmt("%.4g", gens[i].reciprocal_sum);
                     rows.push_back(c.row(n, idempotency_defect(*ms, i, y, g, c.n32(n), c.sieve()), 0.0, extra));
                   }
                   return rows;
                 });
                 if (kind == "nu2") {
                   c.note("report only: a generator is hit by finitely many primes, so no bound is asserted");
                   return;
                 }
                 c.check_tol();
               }});

  r.push_back({{"katai", "Small pair correlations of a(pn) and a(qn) over primes p != q force a small mean of a.",
                {{"b", "liouville", "completely multiplicative factor"}, {"alpha", "sqrt2-1", "phase frequency"},
                 {"pmax", "50", "primes up to pmax"}, {"N", "1e4,1e5", "comma-separated N grid"},
                 tol("0.05", "tol_pair"), tol("0.02", "tol_mean")}},
               [](const Params& p, std::uint64_t n) { return p.count("pmax") * n; },
               [](Ctx& c) {
                 const auto b = parse_multiplicative(c.p.str("b"));
                 const FactorSieve& s = c.sieve();
                 const ArithmeticSequence bs{[&s, b](std::uint64_t n) { return completely_multiplicative_eval(s, b, n); },
                                             1.0, b.describe()};
                 const auto a = pointwise_product(bs, linear_phase_sequence(c.p.real("alpha")));
                 const auto primes = primes_up_to(c.p.count("pmax"));
                 c.map_grid([&](std::uint64_t n) {
                   const auto t = katai_table(a, primes, n);
                   return std::vector{c.row(n, t.max_off_diagonal(), 0.0, "stat=max_pair"),
                                      c.row(n, t.mean, 0.0, "stat=mean")};
                 });
                 c.check_tol("tol_pair", "stat=max_pair");
                 c.check_tol("tol_mean", "stat=mean");
               }});

  r.push_back({{"linear-phase",
                "e(n alpha) f(T^Omega(n) x) averages to the integral of f for integer alpha and to 0 otherwise.",
                {{"alpha", "1/3", "frequency"}, kSystem, kState, kSign, kGrid, tol("0.02")}},
               need_n, [](Ctx& c) {
                 const double alpha = c.p.real("alpha");
                 const auto sys = parse_system(c.p.str("system"));
                 const auto x = zeros_or(c.p, "x", sys.shape().size());
                 const auto f = parse_observable(c.p.str("f"));
                 c.map_grid([&](std::uint64_t n) {
                   const auto a = linear_phase_omega_average(alpha, sys, x, f, c.n32(n), c.sieve());
                   return std::vector{c.row(n, a.estimate, a.target)};
                 });
                 c.check_tol();
               }});

  r.push_back({{"besicovitch", "The mean of a trigonometric polynomial is the sum of its integer-frequency coefficients.",
                {{"terms", "1@0;0.5@1/2", "c@alpha terms separated by ;"}, kGrid, tol("0.01")}},
               need_none, [](Ctx& c) {
                 TrigPolynomial poly;
                 for (const auto& t : split(c.p.str("terms"), ';')) {
                   const auto at = t.find('@');
                   if (at == std::string::npos) throw ParseError("term '" + t + "' lacks '@'", 0);
                   poly.terms.emplace_back(parse_value(t.substr(0, at)), parse_real(t.substr(at + 1)));
                 }
                 const Complex target = besicovitch_mean(poly);
                 c.map_grid([&](std::uint64_t n) {
                   const auto s = blocked_sum<Complex>(1, n, [&](std::uint64_t k) { return poly(k); });
                   return std::vector{c.row(n, s / static_cast<double>(n), target)};
                 });
                 c.check_tol();
               }});

  r.push_back({{"joint-poly",
                "(p(n), q(Omega(n))) is equidistributed on the 2-torus when p and q each have an irrational non-constant coefficient.",
                {{"p", "0;sqrt2", "coefficients of p, constant first"}, {"q", "0;phi-1", "coefficients of q"},
                 {"H", "2", "largest frequency"}, kGrid, tol("none")}},
               need_n, [](Ctx& c) {
                 std::vector<double> p, q;
                 for (const auto& s : split(c.p.str("p"), ';')) p.push_back(parse_real(s));
                 for (const auto& s : split(c.p.str("q"), ';')) q.push_back(parse_real(s));
                 const int hh = static_cast<int>(c.p.count("H"));
                 c.map_grid([&](std::uint64_t n) {
                   const auto d = joint_torus_defect(p, q, c.n32(n), c.sieve(), hh);
                   return std::vector{
                       c.row(n, d.max_modulus, 0.0, "h1=" + std::to_string(d.h1) + ";h2=" + std::to_string(d.h2))};
                 });
                 c.check_tol();
               }});

  r.push_back({{"gp-compare", "Weyl sums of a generalized polynomial g along n and along Omega(n), side by side.",
                {{"expr", "floor(n*sqrt2)*(phi-1)", "generalized polynomial in n"}, {"H", "3", "largest frequency"},
                 kGrid, tol("none")}},
               need_n, [](Ctx& c) {
                 const auto g = parse_gp(c.p.str("expr"));
                 const int hh = static_cast<int>(c.p.count("H"));
                 c.map_grid([&](std::uint64_t n) {
                   const auto rep = gp_equidistribution_compare(g, c.n32(n), c.sieve(), hh);
                   std::vector<ReportRow> rows;
                   for (const auto& row : rep.rows)
                     rows.push_back(c.row(n, row.along_omega, row.direct,
                                          "h=" + std::to_string(row.h) + ";flagged=" + std::to_string(rep.flagged_direct) +
                                              "/" + std::to_string(rep.flagged_omega)));
                   return rows;
                 });
                 // Acceptance bounds the Omega-side Weyl sums, not their gap to the direct ones.
                 if (c.p.has_tol("tol")) {
                   const double t = c.p.real("tol");
                   for (const auto& row : c.report.rows)
                     if (row.n == c.grid.back() && !(std::abs(row.estimate) <= t))
                       c.fail("Omega-side Weyl sum " + fmt("%.6g", std::abs(row.estimate)) + " > tol (" + row.params + ")");
                 }
               }});

  r.push_back({{"poly-omega", "Q(Omega(n)) is uniformly distributed mod 1 when Q has an irrational non-constant coefficient.",
                {{"coeffs", "0;0;sqrt2", "coefficients of Q, constant first"}, {"h", "1", "frequency"}, kGrid,
                 tol("none")}},
               need_n, [](Ctx& c) {
                 std::vector<double> q;
                 for (const auto& s : split(c.p.str("coeffs"), ';')) q.push_back(parse_real(s));
                 if (!has_irrational_nonconstant(q)) c.note("outside hypothesis: all non-constant coefficients rational");
                 const auto po = polynomial_orbit_system(q, c.p.integer("h"));
                 c.map_grid([&](std::uint64_t n) {
                   return std::vector{c.row(n, omega_orbit_average(po.system, po.x, po.f, c.n32(n), c.sieve()), 0.0)};
                 });
                 c.check_tol();
               }});

  return r;
}

const std::vector<Experiment>& registry() {
  static const std::vector<Experiment> r = build_registry();
  return r;
}

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

}  // namespace

std::vector<ExperimentInfo> experiment_registry() {
  std::vector<ExperimentInfo> out;
  for (const auto& e : registry()) out.push_back(e.info);
  return out;
}

std::string list_experiments() {
  std::ostringstream os;
  for (const auto& e : registry()) {
    os << e.info.name << "\n  " << e.info.statement << "\n";
    for (const auto& k : e.info.keys)
      os << "    " << k.name << "=" << (k.fallback.empty() ? "<" + k.help + ">" : k.fallback) << "  " << k.help << "\n";
  }
  return os.str();
}

std::pair<std::string, std::string> parse_assignment(const std::string& token) {
  const auto eq = token.find('=');
  if (eq == std::string::npos || eq == 0) throw InvalidArgument("expected key=value, got '" + token + "'");
  return {trim(token.substr(0, eq)), trim(token.substr(eq + 1))};
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (trim(line).empty()) continue;
    try {
      out.insert_or_assign(parse_assignment(line).first, parse_assignment(line).second);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  const auto& reg = registry();
  const auto it = std::find_if(reg.begin(), reg.end(), [&](const Experiment& e) { return e.info.name == config.experiment; });
  if (it == reg.end()) throw InvalidArgument("unknown experiment '" + config.experiment + "'");
  Params p;
  for (const auto& k : it->info.keys) p.v[k.name] = k.fallback;
  for (const auto& [k, v] : config.params) {
    if (!p.v.count(k)) throw InvalidArgument("unknown key '" + k + "' for experiment " + config.experiment);
    p.v[k] = v;
  }
  for (const auto& k : it->info.keys)
    if (k.fallback.empty() && p.v[k.name].empty() && k.name != "x" && k.name != "y" && k.name != "f")
      throw InvalidArgument("missing required key '" + k.name + "'");

  Ctx c{p, {}, options.threads, {}, nullptr, {}, it->info.name};
  c.grid = parse_count_list(p.str("N"));
  if (c.grid.empty()) throw InvalidArgument("empty N grid");
  for (auto n : c.grid)
    if (n < 1) throw InvalidArgument("grid values must be >= 1");
  std::sort(c.grid.begin(), c.grid.end());
  c.grid.erase(std::unique(c.grid.begin(), c.grid.end()), c.grid.end());
  for (const auto& [k, v] : p.v) {
    if (k == "N" || k.rfind("tol", 0) == 0 || k == "star_tol") continue;
    if (!c.echo.empty()) c.echo += ";";
    c.echo += k + "=" + v;
  }
  if (const auto need = it->sieve_need(p, c.grid.back()); need > 0) c.sieve_ptr = obtain_sieve(need, options.cache_dir);
  it->run(c);
  std::stable_sort(c.report.rows.begin(), c.report.rows.end(),
                   [](const ReportRow& a, const ReportRow& b) { return a.n < b.n; });
  return std::move(c.report);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void write_csv(std::ostream& out, const ExperimentReport& report) {
  out << kCsvHeader << "\n";
  for (const auto& r : report.rows)
    out << csv_field(r.experiment) << ',' << csv_field(r.params) << ',' << r.n << ',' << fmt12(r.estimate.real()) << ','
        << fmt12(r.estimate.imag()) << ',' << fmt12(r.target.real()) << ',' << fmt12(r.target.imag()) << ','
        << fmt12(r.defect) << "\n";
}

namespace {

std::vector<std::string> parse_csv_record(std::istream& in, bool& ok) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false, any = false;
  ok = false;
  for (int ch; (ch = in.get()) != EOF;) {
    any = true;
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          cur += '"';
          in.get();
        } else {
          quoted = false;
        }
      } else {
        cur += static_cast<char>(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (ch == '\n') {
      fields.push_back(std::move(cur));
      ok = true;
      return fields;
    } else if (ch != '\r') {
      cur += static_cast<char>(ch);
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", 0);
  if (any) {
    fields.push_back(std::move(cur));
    ok = true;
  }
  return fields;
}

double to_double(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end) throw ParseError("bad number '" + s + "' on line " + std::to_string(line), line);
  return v;
}

}  // namespace

ExperimentReport read_csv(std::istream& in) {
  bool ok = false;
  auto header = parse_csv_record(in, ok);
  std::string joined;
  for (std::size_t i = 0; i < header.size(); ++i) joined += (i ? "," : "") + header[i];
  if (!ok || joined != kCsvHeader) throw ParseError("missing CSV header", 0);
  ExperimentReport rep;
  for (std::size_t line = 2;; ++line) {
    auto f = parse_csv_record(in, ok);
    if (!ok) break;
    if (f.size() != 8) throw ParseError("expected 8 fields on line " + std::to_string(line), line);
    ReportRow r;
    r.experiment = f[0];
    r.params = f[1];
    r.n = std::stoull(f[2]);
    r.estimate = {to_double(f[3], line), to_double(f[4], line)};
    r.target = {to_double(f[5], line), to_double(f[6], line)};
    r.defect = to_double(f[7], line);
    rep.rows.push_back(std::move(r));
  }
  return rep;
}

}  // namespace ergolab
