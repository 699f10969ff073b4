#include "ergolab/spec_text.hpp"

#include <cmath>

#include "ergolab/error.hpp"
#include "ergolab/gp.hpp"
#include "ergolab/summation.hpp"

namespace ergolab {

namespace {

bool mentions_n(const GPExpr& e) {
  if (!e) return false;
  if (e->kind == GPNode::Kind::var) return true;
  return mentions_n(e->lhs) || mentions_n(e->rhs);
}

double constant_expr(std::string_view text) {
  const auto e = parse_gp(text);
  if (mentions_n(e)) throw ParseError("constant expected, found a use of n in '" + std::string(text) + "'", 0);
  return eval_gp(e, 0);
}

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

}  // namespace

std::string trim(std::string_view text) {
  const auto b = text.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    out.push_back(trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_real(std::string_view text) {
  const std::string t = trim(text);
  if (t.empty()) throw ParseError("empty number", 0);
  const auto slash = t.find('/');
  if (slash == std::string::npos) return constant_expr(t);
  const double num = constant_expr(std::string_view(t).substr(0, slash));
  const double den = constant_expr(std::string_view(t).substr(slash + 1));
  if (den == 0.0) throw ParseError("division by zero in '" + t + "'", slash);
  return num / den;
}

std::uint64_t parse_count(std::string_view text) {
  const double v = parse_real(text);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1.8e19)
    throw ParseError("nonnegative integer expected, got '" + trim(text) + "'", 0);
  return static_cast<std::uint64_t>(v);
}

std::int64_t parse_int(std::string_view text) {
  const double v = parse_real(text);
  if (v != std::floor(v) || std::abs(v) > 9e18) throw ParseError("integer expected, got '" + trim(text) + "'", 0);
  return static_cast<std::int64_t>(v);
}

std::complex<double> parse_value(std::string_view text) {
  const std::string t = trim(text);
  if (starts_with(t, "e(") && t.back() == ')') return e(parse_real(std::string_view(t).substr(2, t.size() - 3)));
  return parse_real(t);
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  for (const auto& s : split(text, ',')) out.push_back(parse_real(s));
  return out;
}

std::vector<std::uint64_t> parse_count_list(std::string_view text) {
  std::vector<std::uint64_t> out;
  for (const auto& s : split(text, ',')) out.push_back(parse_count(s));
  return out;
}

AdditiveSystem parse_system(std::string_view text) {
  std::vector<AdditiveSystem> parts;
  for (const auto& p : split(text, '&')) {
    if (starts_with(p, "cyclic:")) {
      parts.push_back(AdditiveSystem::cyclic(parse_count(p.substr(7))));
    } else if (starts_with(p, "torus:")) {
      std::vector<double> alpha;
      for (const auto& s : split(p.substr(6), ';')) alpha.push_back(parse_real(s));
      parts.push_back(AdditiveSystem::torus(std::move(alpha)));
    } else {
      throw ParseError("unknown system '" + p + "' (expected cyclic:M or torus:a;b;...)", 0);
    }
  }
  if (parts.empty()) throw ParseError("empty system", 0);
  if (parts.size() == 1) return parts.front();
  return AdditiveSystem::product(std::move(parts));
}

Observable parse_observable(std::string_view text) {
  std::vector<Observable> parts;
  for (const auto& p : split(text, '&')) {
    if (p == "sign") {
      parts.push_back(Observable::table({1.0, -1.0}));
    } else if (starts_with(p, "const:")) {
      parts.push_back(Observable::constant(parse_value(p.substr(6))));
    } else if (starts_with(p, "table:")) {
      std::vector<std::complex<double>> v;
      for (const auto& s : split(p.substr(6), ';')) v.push_back(parse_value(s));
      parts.push_back(Observable::table(std::move(v)));
    } else if (starts_with(p, "char:")) {
      std::vector<std::int64_t> h;
      for (const auto& s : split(p.substr(5), ';')) h.push_back(parse_int(s));
      parts.push_back(Observable::character(std::move(h)));
    } else {
      throw ParseError("unknown observable '" + p + "' (expected sign, const:, table: or char:)", 0);
    }
  }
  if (parts.empty()) throw ParseError("empty observable", 0);
  if (parts.size() == 1) return parts.front();
  return Observable::product(std::move(parts));
}

MultiplicativeFunctionSpec parse_multiplicative(std::string_view text) {
  const std::string t = trim(text);
  if (t == "liouville") return MultiplicativeFunctionSpec::liouville();
  std::vector<std::pair<PrimeSet, std::complex<double>>> rules;
  std::complex<double> fallback = 1.0;
  bool have_fallback = false;
  for (const auto& r : split(t, ';')) {
    const auto arrow = r.find("->");
    if (arrow == std::string::npos) throw ParseError("rule '" + r + "' lacks '->'", 0);
    const std::string lhs = trim(std::string_view(r).substr(0, arrow));
    const auto v = parse_value(std::string_view(r).substr(arrow + 2));
    if (lhs == "*") {
      fallback = v;
      have_fallback = true;
    } else {
      rules.emplace_back(parse_prime_set(lhs), v);
    }
  }
  if (rules.empty() && !have_fallback) throw ParseError("empty multiplicative function", 0);
  return MultiplicativeFunctionSpec(std::move(rules), fallback);
}

PrimeSet parse_prime_set(std::string_view text) {
  const std::string t = trim(text);
  if (t.empty()) throw ParseError("empty prime set", 0);
  if (t == "*") return PrimeSet::all();
  if (t[0] == '!') return PrimeSet::complement(parse_prime_set(std::string_view(t).substr(1)));
  if (const auto pc = t.find('%'); pc != std::string::npos)
    return PrimeSet::residue(parse_count(t.substr(0, pc)), parse_count(t.substr(pc + 1)));
  std::vector<std::uint64_t> ps;
  for (const auto& s : split(t, '|')) ps.push_back(parse_count(s));
  return PrimeSet::of(std::move(ps));
}

}  // namespace ergolab
