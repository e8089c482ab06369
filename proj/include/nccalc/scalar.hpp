#pragma once

#include <map>
#include <string>
#include <vector>

#include "nccalc/error.hpp"
#include "nccalc/poly.hpp"

namespace nccalc {

class Scalar;
using Bindings = std::map<std::string, Scalar>;

/// Element of Q(params): numerator/denominator in lowest terms, monic denominator.
class Scalar {
 public:
  Scalar() : den_(1) {}
  Scalar(long c) : num_(c), den_(1) {}  // NOLINT
  Scalar(const Rational& c) : num_(c), den_(1) {}  // NOLINT
  Scalar(Poly num, Poly den);
  static Scalar param(std::string_view name) { return Scalar(Poly(Var::intern(name)), Poly(1)); }

  const Poly& numerator() const { return num_; }
  const Poly& denominator() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return num_.is_one() && den_.is_one(); }
  bool is_constant() const { return num_.is_constant() && den_.is_one(); }
  Rational constant_value() const { return num_.constant_value(); }
  std::set<Var> params() const;

  Scalar operator-() const;
  friend Scalar operator+(const Scalar& a, const Scalar& b);
  friend Scalar operator-(const Scalar& a, const Scalar& b);
  friend Scalar operator*(const Scalar& a, const Scalar& b);
  friend Scalar operator/(const Scalar& a, const Scalar& b);
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
  Scalar& operator/=(const Scalar& o) { return *this = *this / o; }
  Scalar inverse() const;
  Scalar pow(int n) const;

  friend bool operator==(const Scalar& a, const Scalar& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

  /// Evaluate with parameters replaced; throws DivisionByZero naming the
  /// vanishing denominator.
  Scalar substitute(const Bindings& b) const;

  std::string to_string() const;
  static Scalar parse(std::string_view text);

 private:
  struct Raw {};
  Scalar(Raw, Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {}
  Poly num_, den_;
};

Scalar evaluate_poly(const Poly& p, const Bindings& b);

/// Records denominators that had to be assumed nonzero. Each thread has a
/// stack of active recorders; divisions by non-constant scalars append to the
/// innermost one.
class SideConditionRecorder {
 public:
  SideConditionRecorder();
  ~SideConditionRecorder();
  SideConditionRecorder(const SideConditionRecorder&) = delete;
  SideConditionRecorder& operator=(const SideConditionRecorder&) = delete;

  /// distinct nonzero assumptions in first-seen order, printed canonically
  const std::vector<std::string>& conditions() const { return conds_; }
  static void note(const Poly& p);

 private:
  std::vector<std::string> conds_;
  SideConditionRecorder* prev_;
};

}  // namespace nccalc
