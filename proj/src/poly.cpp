#include "nccalc/poly.hpp"

#include <algorithm>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace nccalc {

Var Var::intern(std::string_view name) {
  static std::mutex mu;
  static std::unordered_map<std::string, std::unique_ptr<std::string>> table;
  if (name.empty()) throw std::invalid_argument("empty parameter name");
  std::lock_guard<std::mutex> lock(mu);
  auto it = table.find(std::string(name));
  if (it == table.end()) {
    auto s = std::make_unique<std::string>(name);
    it = table.emplace(std::string(name), std::move(s)).first;
  }
  return Var(it->second.get());
}

// ---------------------------------------------------------------- Monomial

Monomial::Monomial(Var v, int e) {
  if (e < 0) throw std::invalid_argument("negative exponent in polynomial monomial");
  if (e > 0) {
    f_.push_back({v, e});
    degree_ = e;
  }
}

int Monomial::exponent(Var v) const {
  for (auto& [w, e] : f_)
    if (w == v) return e;
  return 0;
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial r;
  r.f_.reserve(f_.size() + o.f_.size());
  auto i = f_.begin(), j = o.f_.begin();
  while (i != f_.end() || j != o.f_.end()) {
    if (j == o.f_.end() || (i != f_.end() && i->first < j->first)) {
      r.f_.push_back(*i++);
    } else if (i == f_.end() || j->first < i->first) {
      r.f_.push_back(*j++);
    } else {
      r.f_.push_back({i->first, i->second + j->second});
      ++i;
      ++j;
    }
  }
  r.degree_ = degree_ + o.degree_;
  return r;
}

bool Monomial::divides(const Monomial& o) const {
  if (degree_ > o.degree_) return false;
  auto j = o.f_.begin();
  for (auto& [v, e] : f_) {
    while (j != o.f_.end() && j->first < v) ++j;
    if (j == o.f_.end() || !(j->first == v) || j->second < e) return false;
  }
  return true;
}

Monomial Monomial::divided_by(const Monomial& d) const {
  Monomial r;
  auto j = d.f_.begin();
  for (auto& [v, e] : f_) {
    int k = e;
    if (j != d.f_.end() && j->first == v) {
      k -= j->second;
      ++j;
    }
    if (k < 0) throw std::logic_error("monomial division not exact");
    if (k > 0) r.f_.push_back({v, k});
  }
  if (j != d.f_.end()) throw std::logic_error("monomial division not exact");
  r.degree_ = degree_ - d.degree_;
  return r;
}

Monomial Monomial::without(Var v) const {
  Monomial r;
  for (auto& f : f_)
    if (!(f.first == v)) {
      r.f_.push_back(f);
      r.degree_ += f.second;
    }
  return r;
}

Monomial Monomial::gcd(const Monomial& a, const Monomial& b) {
  Monomial r;
  auto j = b.f_.begin();
  for (auto& [v, e] : a.f_) {
    while (j != b.f_.end() && j->first < v) ++j;
    if (j != b.f_.end() && j->first == v) {
      int k = std::min(e, j->second);
      r.f_.push_back({v, k});
      r.degree_ += k;
    }
  }
  return r;
}

std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
  if (a.degree_ != b.degree_) return a.degree_ <=> b.degree_;
  auto i = a.f_.begin(), j = b.f_.begin();
  for (; i != a.f_.end() && j != b.f_.end(); ++i, ++j) {
    if (!(i->first == j->first))
      return i->first < j->first ? std::strong_ordering::greater : std::strong_ordering::less;
    if (i->second != j->second) return i->second <=> j->second;
  }
  if (i != a.f_.end()) return std::strong_ordering::greater;
  if (j != b.f_.end()) return std::strong_ordering::less;
  return std::strong_ordering::equal;
}

std::string Monomial::to_string() const {
  std::string s;
  for (auto& [v, e] : f_) {
    if (!s.empty()) s += '*';
    s += v.name();
    if (e != 1) s += "^" + std::to_string(e);
  }
  return s.empty() ? "1" : s;
}

// -------------------------------------------------------------------- Poly

Poly::Poly(long c) {
  if (c != 0) t_.push_back({Monomial(), Rational(c)});
}

Poly::Poly(const Rational& c) {
  if (c != 0) t_.push_back({Monomial(), c});
}

Poly::Poly(Var v) { t_.push_back({Monomial(v), Rational(1)}); }

Poly::Poly(Monomial m, Rational c) {
  if (c != 0) t_.push_back({std::move(m), std::move(c)});
}

Poly Poly::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.m > b.m; });
  Poly p;
  for (auto& t : terms) {
    if (!p.t_.empty() && p.t_.back().m == t.m) {
      p.t_.back().c += t.c;
      if (p.t_.back().c == 0) p.t_.pop_back();
    } else if (t.c != 0) {
      p.t_.push_back(std::move(t));
    }
  }
  return p;
}

bool Poly::is_one() const { return t_.size() == 1 && t_[0].m.is_one() && t_[0].c == 1; }

Rational Poly::constant_value() const {
  if (t_.empty()) return Rational(0);
  if (!is_constant()) throw std::logic_error("polynomial is not constant");
  return t_[0].c;
}

std::set<Var> Poly::vars() const {
  std::set<Var> s;
  for (auto& t : t_)
    for (auto& f : t.m.factors()) s.insert(f.first);
  return s;
}

int Poly::total_degree() const { return t_.empty() ? 0 : t_.front().m.degree(); }

int Poly::degree_in(Var v) const {
  int d = 0;
  for (auto& t : t_) d = std::max(d, t.m.exponent(v));
  return d;
}

std::map<int, Poly> Poly::coefficients_in(Var v) const {
  std::map<int, std::vector<Term>> parts;
  for (auto& t : t_) parts[t.m.exponent(v)].push_back({t.m.without(v), t.c});
  std::map<int, Poly> out;
  for (auto& [d, ts] : parts) out.emplace(d, from_terms(std::move(ts)));
  return out;
}

Poly Poly::from_coefficients_in(Var v, const std::map<int, Poly>& cs) {
  std::vector<Term> ts;
  for (auto& [d, c] : cs) {
    Monomial m(v, d);
    for (auto& t : c.t_) ts.push_back({t.m * m, t.c});
  }
  return from_terms(std::move(ts));
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& t : r.t_) t.c = -t.c;
  return r;
}

namespace {
std::vector<Term> merge_terms(const std::vector<Term>& a, const std::vector<Term>& b, bool subtract) {
  std::vector<Term> r;
  r.reserve(a.size() + b.size());
  auto i = a.begin(), j = b.begin();
  while (i != a.end() || j != b.end()) {
    if (j == b.end() || (i != a.end() && i->m > j->m)) {
      r.push_back(*i++);
    } else if (i == a.end() || j->m > i->m) {
      r.push_back({j->m, subtract ? Rational(-j->c) : j->c});
      ++j;
    } else {
      Rational c = subtract ? Rational(i->c - j->c) : Rational(i->c + j->c);
      if (c != 0) r.push_back({i->m, c});
      ++i;
      ++j;
    }
  }
  return r;
}
}  // namespace

Poly& Poly::operator+=(const Poly& o) {
  if (o.t_.empty()) return *this;
  if (t_.empty()) return *this = o;
  t_ = merge_terms(t_, o.t_, false);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (o.t_.empty()) return *this;
  t_ = merge_terms(t_, o.t_, true);
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.t_.empty() || b.t_.empty()) return Poly();
  if (a.t_.size() == 1) return b.times(a.t_[0].m).scaled(a.t_[0].c);
  if (b.t_.size() == 1) return a.times(b.t_[0].m).scaled(b.t_[0].c);
  std::vector<Term> ts;
  ts.reserve(a.t_.size() * b.t_.size());
  for (auto& x : a.t_)
    for (auto& y : b.t_) ts.push_back({x.m * y.m, x.c * y.c});
  return Poly::from_terms(std::move(ts));
}

Poly Poly::scaled(const Rational& c) const {
  if (c == 0) return Poly();
  Poly r = *this;
  if (c != 1)
    for (auto& t : r.t_) t.c *= c;
  return r;
}

Poly Poly::times(const Monomial& m) const {
  if (m.is_one()) return *this;
  Poly r = *this;
  for (auto& t : r.t_) t.m = t.m * m;  // order preserved by multiplicativity of grlex
  return r;
}

Poly Poly::pow(unsigned n) const {
  Poly r(1), b = *this;
  while (n) {
    if (n & 1) r = r * b;
    n >>= 1;
    if (n) b = b * b;
  }
  return r;
}

bool operator==(const Poly& a, const Poly& b) {
  if (a.t_.size() != b.t_.size()) return false;
  for (size_t i = 0; i < a.t_.size(); ++i)
    if (!(a.t_[i].m == b.t_[i].m) || a.t_[i].c != b.t_[i].c) return false;
  return true;
}

std::optional<Poly> Poly::divide_exact(const Poly& b) const {
  if (b.is_zero()) throw std::domain_error("polynomial division by zero");
  if (is_zero()) return Poly();
  if (b.is_constant()) return scaled(Rational(1) / b.t_[0].c);
  const Term& lb = b.leading();
  if (b.t_.size() == 1) {
    Poly q;
    for (auto& t : t_) {
      if (!lb.m.divides(t.m)) return std::nullopt;
      q.t_.push_back({t.m.divided_by(lb.m), t.c / lb.c});
    }
    return q;
  }
  Poly q, r = *this;
  while (!r.is_zero()) {
    const Term& lt = r.leading();
    if (!lb.m.divides(lt.m)) return std::nullopt;
    Monomial qm = lt.m.divided_by(lb.m);
    Rational qc = lt.c / lb.c;
    r -= b.times(qm).scaled(qc);
    q.t_.push_back({std::move(qm), std::move(qc)});
  }
  return q;
}

Poly Poly::monic() const {
  if (t_.empty() || t_[0].c == 1) return *this;
  return scaled(Rational(1) / t_[0].c);
}

Monomial Poly::monomial_content() const {
  if (t_.empty()) return Monomial();
  Monomial g = t_[0].m;
  for (size_t i = 1; i < t_.size() && !g.is_one(); ++i) g = Monomial::gcd(g, t_[i].m);
  return g;
}

std::string Poly::to_string() const {
  if (t_.empty()) return "0";
  std::string s;
  bool first = true;
  for (auto& t : t_) {
    std::string term;
    Rational c = t.c;
    bool neg = c < 0;
    if (neg) c = -c;
    if (t.m.is_one()) {
      term = c.get_str();
    } else if (c == 1) {
      term = t.m.to_string();
    } else {
      term = c.get_str() + "*" + t.m.to_string();
    }
    if (first) {
      s = neg ? "-" + term : term;
      first = false;
    } else {
      s += neg ? " - " : " + ";
      s += term;
    }
  }
  return s;
}

// --------------------------------------------------------------------- gcd

namespace {

Poly divide_by_monomial(const Poly& p, const Monomial& m) {
  if (m.is_one()) return p;
  std::vector<Term> ts;
  for (auto& t : p.terms()) ts.push_back({t.m.divided_by(m), t.c});
  return Poly::from_terms(std::move(ts));
}

Poly content_in(const Poly& p, Var v) {
  Poly g;
  for (auto& [d, c] : p.coefficients_in(v)) {
    g = gcd(g, c);
    if (g.is_one()) break;
  }
  return g;
}

Poly pseudo_remainder(const Poly& a, const Poly& b, Var v) {
  auto bc = b.coefficients_in(v);
  int db = bc.rbegin()->first;
  const Poly& lb = bc.rbegin()->second;
  Poly r = a;
  int dr = r.degree_in(v);
  while (!r.is_zero() && dr >= db) {
    Poly lr = r.coefficients_in(v).rbegin()->second;
    r = r * lb - (lr * b).times(Monomial(v, dr - db));
    dr = r.degree_in(v);
  }
  return r;
}

Poly eval_except(const Poly& p, Var keep, const std::map<Var, Rational>& pt) {
  std::vector<Term> ts;
  for (auto& t : p.terms()) {
    Rational c = t.c;
    int e = 0;
    for (auto& [v, k] : t.m.factors()) {
      if (v == keep) {
        e = k;
        continue;
      }
      Rational x = pt.at(v);
      for (int i = 0; i < k; ++i) c *= x;
    }
    ts.push_back({Monomial(keep, e), c});
  }
  return Poly::from_terms(std::move(ts));
}

// Upper bound for the degree in v of gcd(a, b): the degree of a univariate
// image at a point where both leading coefficients in v survive.
int image_gcd_degree(const Poly& a, const Poly& b, Var v, const std::set<Var>& vars) {
  static const int seq[] = {3, -2, 5, 7, -4, 11, 2, 13, -6, 17, 19, -9, 23, 29};
  std::map<Var, Rational> pt;
  Poly la = a.coefficients_in(v).rbegin()->second, lb = b.coefficients_in(v).rbegin()->second;
  for (int attempt = 0; attempt < 8; ++attempt) {
    int i = attempt;
    for (Var w : vars)
      if (!(w == v)) pt[w] = Rational(seq[(i++ * 5 + attempt) % 14] + attempt);
    Poly one_la = eval_except(la, v, pt), one_lb = eval_except(lb, v, pt);
    if (one_la.is_zero() || one_lb.is_zero()) continue;
    Poly ga = eval_except(a, v, pt), gb = eval_except(b, v, pt);
    return gcd(ga, gb).degree_in(v);
  }
  return std::max(a.degree_in(v), b.degree_in(v));
}

Poly exact(const Poly& a, const Poly& b) {
  auto q = a.divide_exact(b);
  if (!q) throw std::logic_error("gcd: inexact division " + a.to_string() + " / " + b.to_string());
  return *q;
}

}  // namespace

Poly gcd(const Poly& a0, const Poly& b0) {
  if (a0.is_zero()) return b0.monic();
  if (b0.is_zero()) return a0.monic();
  if (a0.is_constant() || b0.is_constant()) return Poly(1);
  if (a0 == b0) return a0.monic();
  Monomial ma = a0.monomial_content(), mb = b0.monomial_content();
  Poly m(Monomial::gcd(ma, mb), Rational(1));
  Poly a = divide_by_monomial(a0, ma).monic();
  Poly b = divide_by_monomial(b0, mb).monic();
  if (a == b) return (m * a).monic();
  for (;;) {
    if (a.is_constant() || b.is_constant()) return m;
    auto va = a.vars(), vb = b.vars();
    bool changed = false;
    for (Var v : va)
      if (!vb.count(v)) {
        a = content_in(a, v);
        changed = true;
        break;
      }
    if (changed) continue;
    for (Var v : vb)
      if (!va.count(v)) {
        b = content_in(b, v);
        changed = true;
        break;
      }
    if (!changed) break;
  }
  {
    // coprimality certificate on univariate images
    auto vs = a.vars();
    if (vs.size() > 1) {
      bool coprime = true;
      for (Var w : vs)
        if (image_gcd_degree(a, b, w, vs) > 0) {
          coprime = false;
          break;
        }
      if (coprime) return m;
    }
  }
  // choose the shared variable of smallest degree as main variable
  auto vs = a.vars();
  Var v = *vs.begin();
  int best = 1 << 30;
  for (Var w : vs) {
    int d = std::max(a.degree_in(w), b.degree_in(w));
    if (d < best) {
      best = d;
      v = w;
    }
  }
  Poly ca = content_in(a, v), cb = content_in(b, v);
  Poly c = gcd(ca, cb);
  Poly pa = exact(a, ca), pb = exact(b, cb);
  if (pa.degree_in(v) < pb.degree_in(v)) std::swap(pa, pb);
  Poly g;
  for (;;) {
    if (pb.degree_in(v) == 0) {
      g = Poly(1);
      break;
    }
    Poly r = pseudo_remainder(pa, pb, v);
    if (r.is_zero()) {
      g = pb;
      break;
    }
    if (r.degree_in(v) == 0) {
      g = Poly(1);
      break;
    }
    pa = pb;
    pb = exact(r, content_in(r, v)).monic();
  }
  g = exact(g, content_in(g, v));
  return (m * c * g).monic();
}

}  // namespace nccalc
