#pragma once

#include <gmpxx.h>

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nccalc {

using Rational = mpq_class;

/// Interned parameter name. Two Vars with the same name share storage, so
/// equality is a pointer comparison; ordering is alphabetical.
class Var {
 public:
  static Var intern(std::string_view name);
  const std::string& name() const { return *name_; }

  friend bool operator==(Var a, Var b) { return a.name_ == b.name_; }
  friend bool operator<(Var a, Var b) { return a.name_ != b.name_ && *a.name_ < *b.name_; }

 private:
  explicit Var(const std::string* n) : name_(n) {}
  const std::string* name_;
};

class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(Var v, int e = 1);

  int degree() const { return degree_; }
  int exponent(Var v) const;
  bool is_one() const { return f_.empty(); }
  const std::vector<std::pair<Var, int>>& factors() const { return f_; }

  Monomial operator*(const Monomial& o) const;
  bool divides(const Monomial& o) const;
  // requires divides(o)... i.e. this / d with d | this
  Monomial divided_by(const Monomial& d) const;
  Monomial without(Var v) const;
  static Monomial gcd(const Monomial& a, const Monomial& b);

  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.degree_ == b.degree_ && a.f_ == b.f_;
  }
  // graded lexicographic, variables ordered alphabetically (first name most significant)
  friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b);

  std::string to_string() const;

 private:
  std::vector<std::pair<Var, int>> f_;  // sorted by name, exponents > 0
  int degree_ = 0;
};

struct Term {
  Monomial m;
  Rational c;
};

/// Multivariate polynomial over Q; terms kept sorted by decreasing monomial.
class Poly {
 public:
  Poly() = default;
  Poly(long c);  // NOLINT
  Poly(const Rational& c);  // NOLINT
  explicit Poly(Var v);
  Poly(Monomial m, Rational c);

  static Poly from_terms(std::vector<Term> terms);  // sorts and merges

  bool is_zero() const { return t_.empty(); }
  bool is_constant() const { return t_.empty() || (t_.size() == 1 && t_[0].m.is_one()); }
  bool is_one() const;
  bool is_monomial() const { return t_.size() == 1; }
  Rational constant_value() const;  // requires is_constant
  const Term& leading() const { return t_.front(); }
  const std::vector<Term>& terms() const { return t_; }
  std::set<Var> vars() const;
  int total_degree() const;

  int degree_in(Var v) const;
  std::map<int, Poly> coefficients_in(Var v) const;
  static Poly from_coefficients_in(Var v, const std::map<int, Poly>& cs);

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o) { return *this = *this * o; }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly scaled(const Rational& c) const;
  Poly times(const Monomial& m) const;
  Poly pow(unsigned n) const;

  friend bool operator==(const Poly& a, const Poly& b);
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  /// Exact division; nullopt when b does not divide *this.
  std::optional<Poly> divide_exact(const Poly& b) const;
  Poly monic() const;
  /// gcd of all monomials of the polynomial
  Monomial monomial_content() const;

  std::string to_string() const;

 private:
  std::vector<Term> t_;
};

/// Monic gcd (zero only if both are zero).
Poly gcd(const Poly& a, const Poly& b);

}  // namespace nccalc
