#include "nccalc/scalar.hpp"

#include <algorithm>

#include "nccalc/expr.hpp"

namespace nccalc {

namespace {
thread_local SideConditionRecorder* g_recorder = nullptr;

Poly exact_div(const Poly& a, const Poly& b) {
  auto q = a.divide_exact(b);
  if (!q) throw std::logic_error("inexact division in scalar normalization");
  return *q;
}
}  // namespace

SideConditionRecorder::SideConditionRecorder() : prev_(g_recorder) { g_recorder = this; }
SideConditionRecorder::~SideConditionRecorder() { g_recorder = prev_; }

void SideConditionRecorder::note(const Poly& p) {
  if (!g_recorder || p.is_constant()) return;
  std::string s = p.monic().to_string() + " != 0";
  auto& c = g_recorder->conds_;
  if (std::find(c.begin(), c.end(), s) == c.end()) c.push_back(std::move(s));
}

Scalar::Scalar(Poly num, Poly den) {
  if (den.is_zero()) throw DivisionByZero("division by zero scalar");
  if (num.is_zero()) {
    den_ = Poly(1);
    return;
  }
  if (den.is_constant()) {
    num_ = num.scaled(Rational(1) / den.constant_value());
    den_ = Poly(1);
    return;
  }
  if (num.is_monomial() && den.is_monomial()) {
    Monomial g = Monomial::gcd(num.leading().m, den.leading().m);
    num_ = Poly(num.leading().m.divided_by(g), num.leading().c / den.leading().c);
    den_ = Poly(den.leading().m.divided_by(g), Rational(1));
    return;
  }
  Poly g = gcd(num, den);
  if (!g.is_one()) {
    num = exact_div(num, g);
    den = exact_div(den, g);
  }
  Rational lc = den.leading().c;
  if (lc != 1) {
    num = num.scaled(Rational(1) / lc);
    den = den.scaled(Rational(1) / lc);
  }
  if (den.is_constant()) den = Poly(1);
  num_ = std::move(num);
  den_ = std::move(den);
}

std::set<Var> Scalar::params() const {
  auto s = num_.vars();
  auto t = den_.vars();
  s.insert(t.begin(), t.end());
  return s;
}

Scalar Scalar::operator-() const { return Scalar(Raw{}, -num_, den_); }

Scalar operator+(const Scalar& a, const Scalar& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.den_.is_one() && b.den_.is_one()) return Scalar(Scalar::Raw{}, a.num_ + b.num_, Poly(1));
  if (a.den_ == b.den_) return Scalar(a.num_ + b.num_, a.den_);
  if (b.den_.is_one()) return Scalar(Scalar::Raw{}, a.num_ + b.num_ * a.den_, a.den_);
  if (a.den_.is_one()) return Scalar(Scalar::Raw{}, a.num_ * b.den_ + b.num_, b.den_);
  Poly g = gcd(a.den_, b.den_);
  Poly da = exact_div(a.den_, g), db = exact_div(b.den_, g);
  return Scalar(a.num_ * db + b.num_ * da, da * b.den_);
}

Scalar operator-(const Scalar& a, const Scalar& b) { return a + (-b); }

Scalar operator*(const Scalar& a, const Scalar& b) {
  if (a.is_zero() || b.is_zero()) return Scalar();
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  if (a.den_.is_one() && b.den_.is_one()) return Scalar(Scalar::Raw{}, a.num_ * b.num_, Poly(1));
  Poly na = a.num_, nb = b.num_, da = a.den_, db = b.den_;
  Poly g1 = gcd(na, db), g2 = gcd(nb, da);
  if (!g1.is_one()) {
    na = exact_div(na, g1);
    db = exact_div(db, g1);
  }
  if (!g2.is_one()) {
    nb = exact_div(nb, g2);
    da = exact_div(da, g2);
  }
  // remaining factors are coprime; products of monic polynomials are monic
  return Scalar(Scalar::Raw{}, na * nb, da * db);
}

Scalar Scalar::inverse() const {
  if (is_zero()) throw DivisionByZero("division by zero scalar");
  SideConditionRecorder::note(num_);
  return Scalar(den_, num_);
}

Scalar operator/(const Scalar& a, const Scalar& b) { return a * b.inverse(); }

Scalar Scalar::pow(int n) const {
  if (n < 0) return inverse().pow(-n);
  Scalar r(1), base = *this;
  while (n) {
    if (n & 1) r *= base;
    n >>= 1;
    if (n) base *= base;
  }
  return r;
}

Scalar evaluate_poly(const Poly& p, const Bindings& b) {
  Scalar acc;
  std::map<std::pair<std::string, int>, Scalar> powers;
  for (auto& t : p.terms()) {
    Scalar term(t.c);
    Poly rest(1);
    for (auto& [v, e] : t.m.factors()) {
      auto it = b.find(v.name());
      if (it == b.end()) {
        rest = rest * Poly(Monomial(v, e), Rational(1));
        continue;
      }
      auto key = std::make_pair(v.name(), e);
      auto pit = powers.find(key);
      if (pit == powers.end()) pit = powers.emplace(key, it->second.pow(e)).first;
      term *= pit->second;
    }
    acc += term * Scalar(rest, Poly(1));
  }
  return acc;
}

Scalar Scalar::substitute(const Bindings& b) const {
  Scalar n = evaluate_poly(num_, b);
  Scalar d = evaluate_poly(den_, b);
  if (d.is_zero())
    throw DivisionByZero("denominator factor (" + den_.to_string() + ") vanishes under substitution");
  return n / d;
}

std::string Scalar::to_string() const {
  if (den_.is_one()) return num_.to_string();
  std::string n = num_.to_string();
  if (num_.terms().size() > 1) n = "(" + n + ")";
  std::string d = den_.to_string();
  bool bare = den_.is_monomial() && den_.leading().m.factors().size() == 1 &&
              den_.leading().m.factors()[0].second == 1;
  if (!bare) d = "(" + d + ")";
  return n + "/" + d;
}

namespace {
Scalar eval_scalar(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Number:
      return Scalar(e.number);
    case Expr::Kind::Ident:
      return Scalar::param(e.name);
    case Expr::Kind::Neg:
      return -eval_scalar(*e.args[0]);
    case Expr::Kind::Add:
      return eval_scalar(*e.args[0]) + eval_scalar(*e.args[1]);
    case Expr::Kind::Sub:
      return eval_scalar(*e.args[0]) - eval_scalar(*e.args[1]);
    case Expr::Kind::Mul:
      return eval_scalar(*e.args[0]) * eval_scalar(*e.args[1]);
    case Expr::Kind::Div:
      return eval_scalar(*e.args[0]) / eval_scalar(*e.args[1]);
    case Expr::Kind::Pow:
      return eval_scalar(*e.args[0]).pow(e.exponent);
    default:
      throw ParseError("not a scalar expression: " + e.text);
  }
}
}  // namespace

Scalar Scalar::parse(std::string_view text) { return eval_scalar(*parse_expr(text)); }

}  // namespace nccalc
