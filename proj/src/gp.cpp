#include "ergolab/gp.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

#include "ergolab/error.hpp"
#include "ergolab/summation.hpp"

namespace ergolab {

GPExpr gp_const(double v, std::string name) {
  if (!std::isfinite(v)) throw InvalidArgument("constants must be finite");
  return std::make_shared<const GPNode>(GPNode{GPNode::Kind::constant, v, std::move(name), nullptr, nullptr});
}
GPExpr gp_var() { return std::make_shared<const GPNode>(GPNode{GPNode::Kind::var, 0.0, {}, nullptr, nullptr}); }
GPExpr gp_add(GPExpr a, GPExpr b) {
  return std::make_shared<const GPNode>(GPNode{GPNode::Kind::add, 0.0, {}, std::move(a), std::move(b)});
}
GPExpr gp_mul(GPExpr a, GPExpr b) {
  return std::make_shared<const GPNode>(GPNode{GPNode::Kind::mul, 0.0, {}, std::move(a), std::move(b)});
}
GPExpr gp_floor(GPExpr a) {
  return std::make_shared<const GPNode>(GPNode{GPNode::Kind::floor, 0.0, {}, std::move(a), nullptr});
}
GPExpr gp_frac(GPExpr a) {
  return std::make_shared<const GPNode>(GPNode{GPNode::Kind::frac, 0.0, {}, std::move(a), nullptr});
}

double gp_named_constant(std::string_view name) {
  if (name == "sqrt2") return std::numbers::sqrt2;
  if (name == "phi") return std::numbers::phi;
  if (name == "pi") return std::numbers::pi;
  throw InvalidArgument("unknown constant '" + std::string(name) + "'");
}

// ---------------------------------------------------------------- parser

namespace {

class Parser {
 public:
  explicit Parser(std::string_view t) : t_(t) {}

  GPExpr parse() {
    GPExpr e = expr();
    skip();
    if (pos_ != t_.size()) fail("unexpected '" + std::string(1, t_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip() {
    while (pos_ < t_.size() && std::isspace(static_cast<unsigned char>(t_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < t_.size() && t_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  GPExpr expr() {
    GPExpr e = term();
    for (;;) {
      if (eat('+'))
        e = gp_add(e, term());
      else if (eat('-'))
        e = gp_add(e, gp_mul(gp_const(-1.0), term()));
      else
        return e;
    }
  }

  GPExpr term() {
    GPExpr e = unary();
    while (eat('*')) e = gp_mul(e, unary());
    return e;
  }

  GPExpr unary() {
    if (eat('-')) {
      skip();
      if (pos_ < t_.size() && (std::isdigit(static_cast<unsigned char>(t_[pos_])) || t_[pos_] == '.'))
        return gp_const(-number());
      return gp_mul(gp_const(-1.0), unary());
    }
    return primary();
  }

  double number() {
    const std::size_t start = pos_;
    while (pos_ < t_.size() && (std::isdigit(static_cast<unsigned char>(t_[pos_])) || t_[pos_] == '.')) ++pos_;
    if (pos_ < t_.size() && (t_[pos_] == 'e' || t_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < t_.size() && (t_[p] == '+' || t_[p] == '-')) ++p;
      if (p < t_.size() && std::isdigit(static_cast<unsigned char>(t_[p]))) {
        pos_ = p;
        while (pos_ < t_.size() && std::isdigit(static_cast<unsigned char>(t_[pos_]))) ++pos_;
      }
    }
    const std::string lit(t_.substr(start, pos_ - start));
    char* end = nullptr;
    const double v = std::strtod(lit.c_str(), &end);
    if (lit.empty() || end != lit.c_str() + lit.size()) {
      pos_ = start;
      fail("malformed number '" + lit + "'");
    }
    if (!std::isfinite(v)) {
      pos_ = start;
      fail("number out of range");
    }
    return v;
  }

  GPExpr primary() {
    skip();
    if (pos_ >= t_.size()) fail("unexpected end of input");
    const char c = t_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return gp_const(number());
    if (c == '(') {
      ++pos_;
      GPExpr e = expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < t_.size() && std::isalnum(static_cast<unsigned char>(t_[pos_]))) ++pos_;
      const std::string id(t_.substr(start, pos_ - start));
      if (id == "n") return gp_var();
      if (id == "sqrt2" || id == "phi" || id == "pi") return gp_const(gp_named_constant(id), id);
      if (id == "floor" || id == "frac") {
        expect('(');
        GPExpr inner = expr();
        expect(')');
        return id == "floor" ? gp_floor(inner) : gp_frac(inner);
      }
      pos_ = start;
      fail("unknown identifier '" + id + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view t_;
  std::size_t pos_ = 0;
};

void print_into(const GPExpr& e, std::string& out) {
  switch (e->kind) {
    case GPNode::Kind::constant:
      if (!e->name.empty()) {
        out += e->name;
      } else {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", e->value);
        out += buf;
      }
      return;
    case GPNode::Kind::var:
      out += 'n';
      return;
    case GPNode::Kind::add:
      print_into(e->lhs, out);
      out += " + ";
      if (e->rhs->kind == GPNode::Kind::add) {
        out += '(';
        print_into(e->rhs, out);
        out += ')';
      } else {
        print_into(e->rhs, out);
      }
      return;
    case GPNode::Kind::mul: {
      const bool lp = e->lhs->kind == GPNode::Kind::add;
      const bool rp = e->rhs->kind == GPNode::Kind::add || e->rhs->kind == GPNode::Kind::mul;
      if (lp) out += '(';
      print_into(e->lhs, out);
      if (lp) out += ')';
      out += '*';
      if (rp) out += '(';
      print_into(e->rhs, out);
      if (rp) out += ')';
      return;
    }
    case GPNode::Kind::floor:
    case GPNode::Kind::frac:
      out += e->kind == GPNode::Kind::floor ? "floor(" : "frac(";
      print_into(e->lhs, out);
      out += ')';
      return;
  }
}

long double eval_ld(const GPNode& e, long double n, long double tol, bool& near) {
  switch (e.kind) {
    case GPNode::Kind::constant:
      return e.value;
    case GPNode::Kind::var:
      return n;
    case GPNode::Kind::add:
      return eval_ld(*e.lhs, n, tol, near) + eval_ld(*e.rhs, n, tol, near);
    case GPNode::Kind::mul:
      return eval_ld(*e.lhs, n, tol, near) * eval_ld(*e.rhs, n, tol, near);
    case GPNode::Kind::floor:
    case GPNode::Kind::frac: {
      const long double v = eval_ld(*e.lhs, n, tol, near);
      const long double f = std::floor(v);
      if (v - f < tol || f + 1 - v < tol) {
        // exact integers coming from integer subexpressions are not ambiguous
        if (v != f) near = true;
      }
      return e.kind == GPNode::Kind::floor ? f : v - f;
    }
  }
  return 0.0L;
}

double eval_d(const GPNode& e, double n) {
  switch (e.kind) {
    case GPNode::Kind::constant:
      return e.value;
    case GPNode::Kind::var:
      return n;
    case GPNode::Kind::add:
      return eval_d(*e.lhs, n) + eval_d(*e.rhs, n);
    case GPNode::Kind::mul:
      return eval_d(*e.lhs, n) * eval_d(*e.rhs, n);
    case GPNode::Kind::floor:
      return std::floor(eval_d(*e.lhs, n));
    case GPNode::Kind::frac: {
      const double v = eval_d(*e.lhs, n);
      return v - std::floor(v);
    }
  }
  return 0.0;
}

}  // namespace

GPExpr parse_gp(std::string_view text) { return Parser(text).parse(); }

std::string print_gp(const GPExpr& e) {
  std::string out;
  print_into(e, out);
  return out;
}

bool gp_equal(const GPExpr& a, const GPExpr& b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case GPNode::Kind::constant:
      return a->value == b->value && a->name == b->name;
    case GPNode::Kind::var:
      return true;
    case GPNode::Kind::add:
    case GPNode::Kind::mul:
      return gp_equal(a->lhs, b->lhs) && gp_equal(a->rhs, b->rhs);
    case GPNode::Kind::floor:
    case GPNode::Kind::frac:
      return gp_equal(a->lhs, b->lhs);
  }
  return false;
}

double eval_gp(const GPExpr& e, std::uint64_t n) { return eval_d(*e, static_cast<double>(n)); }

GPValue eval_gp_checked(const GPExpr& e, std::uint64_t n, double tol) {
  bool near = false;
  const long double v = eval_ld(*e, static_cast<long double>(n), tol, near);
  return {v, near};
}

GPCompareReport gp_equidistribution_compare(const GPExpr& e, std::uint32_t n_max, const FactorSieve& sieve,
                                            int h_max) {
  if (n_max < 1) throw InvalidArgument("N must be >= 1");
  if (n_max > sieve.limit())
    throw OutOfRange("N = " + std::to_string(n_max) + " exceeds sieve limit " + std::to_string(sieve.limit()));
  if (h_max < 1) throw InvalidArgument("H must be >= 1");
  GPCompareReport report;
  const auto hs = static_cast<std::size_t>(h_max);

  auto phase = [](long double v) { return static_cast<double>(v - std::floor(v)); };

  std::vector<CompensatedSum<std::complex<double>>> direct(hs);
  std::vector<std::complex<double>> block(hs);
  for (std::uint64_t lo = 1; lo <= n_max; lo += kSumBlock) {
    const std::uint64_t hi = std::min<std::uint64_t>(n_max, lo + kSumBlock - 1);
    CompensatedSum<std::complex<double>> zero;
    std::vector<CompensatedSum<std::complex<double>>> part(hs, zero);
    for (std::uint64_t n = lo; n <= hi; ++n) {
      const GPValue v = eval_gp_checked(e, n);
      if (v.near_boundary) ++report.flagged_direct;
      const double x = phase(v.value);
      const std::complex<double> z = ergolab::e(x);
      std::complex<double> zh = z;
      for (std::size_t h = 0; h < hs; ++h) {
        part[h].add(zh);
        zh *= z;
      }
    }
    for (std::size_t h = 0; h < hs; ++h) direct[h].add(part[h].value());
  }

  const auto counts = big_omega_histogram(sieve, n_max);
  std::vector<CompensatedSum<std::complex<double>>> omega(hs);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) continue;
    const GPValue v = eval_gp_checked(e, k);
    if (v.near_boundary) report.flagged_omega += counts[k];
    const double x = phase(v.value);
    for (std::size_t h = 0; h < hs; ++h)
      omega[h].add(ergolab::e(static_cast<double>(h + 1) * x) * static_cast<double>(counts[k]));
  }
  for (std::size_t h = 0; h < hs; ++h)
    report.rows.push_back({static_cast<int>(h + 1), std::abs(direct[h].value()) / n_max,
                           std::abs(omega[h].value()) / n_max});
  return report;
}

}  // namespace ergolab
