#pragma once

// Randomized algebraic properties shared by property_test and the acceptance
// binary.

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "nccalc/geometry.hpp"
#include "nccalc/presets.hpp"

namespace nccalc::props {

inline const std::vector<std::string>& names() {
  static const std::vector<std::string> n = {"twisted-leibniz", "d-leibniz",      "d-squared",  "zeta-central",
                                             "delta-squared",   "move-left-trip", "tensor-l-assoc"};
  return n;
}

struct Outcome {
  bool applicable = true;
  std::string reason;  // why not applicable
  int instances = 0;
  int failures = 0;
  std::string first_failure;
};

class Sampler {
 public:
  Sampler(const Calculus& c, unsigned seed) : c_(c), A_(c.algebra()), rng_(seed) {
    words_ = A_->normal_words(2);
    for (auto& p : A_->params()) params_.push_back(p);
  }

  NCPoly poly() {
    NCPoly f = c_.zero();
    int terms = 1 + pick(3);
    for (int i = 0; i < terms; ++i) {
      int k = pick(7) - 3;
      if (k == 0) k = 1;
      NCPoly t = NCPoly::from_word(A_, words_[pick(words_.size())], Scalar(k));
      if (!params_.empty() && pick(3) == 0) t = A_->parse(params_[pick(params_.size())]) * t;
      f += t;
    }
    return f;
  }

  Form one_form() {
    Form w(A_);
    size_t first = pick(c_.size());
    for (size_t s = 0; s < c_.size(); ++s)
      if (s == first || pick(2)) w += poly() * c_.theta(static_cast<int>(s));
    return w;
  }

  ThetaWord theta_word(size_t max_len) {
    ThetaWord w(1 + pick(max_len));
    for (auto& k : w) k = static_cast<int>(pick(c_.size()));
    return w;
  }

  // unreduced tensor of the given degree with random coefficients
  Form tensor(size_t deg) {
    Form t(A_);
    for (int k = 0; k < 2; ++k) {
      ThetaWord w(deg);
      for (auto& i : w) i = static_cast<int>(pick(c_.size()));
      t.add(w, poly());
    }
    return t;
  }

  size_t pick(size_t n) { return std::uniform_int_distribution<size_t>(0, n - 1)(rng_); }

 private:
  const Calculus& c_;
  const Algebra& A_;
  std::mt19937 rng_;
  std::vector<Word> words_;
  std::vector<std::string> params_;
};

inline std::string na_reason(const Calculus& c, const std::string& prop) {
  bool two = c.has_two_forms();
  if (prop == "d-squared" && !two) return "first-order only: no two-forms";
  if (prop == "zeta-central" || prop == "delta-squared") {
    if (!two) return "first-order only: no two-forms";
    if (!c.is_inner()) return "not inner: zeta and Delta are undefined";
  }
  return "";
}

inline Outcome run(const PresetBundle& b, const std::string& prop, int count, unsigned seed) {
  const Calculus& c = *b.calculus;
  Outcome out;
  out.reason = na_reason(c, prop);
  if (!out.reason.empty()) {
    out.applicable = false;
    return out;
  }
  Sampler S(c, seed);
  bool two = c.has_two_forms();
  auto fail = [&](const std::string& what, const std::string& detail) {
    if (out.failures++ == 0) out.first_failure = what + " :: " + detail;
  };
  for (int i = 0; i < count; ++i) {
    ++out.instances;
    if (prop == "twisted-leibniz") {
      NCPoly f = S.poly(), g = S.poly();
      int s = static_cast<int>(S.pick(c.size()));
      NCPoly r = c.e(s, f * g) - c.e(s, f) * c.phi(s).apply(g) - f * c.e(s, g);
      if (!r.is_zero()) fail("e_" + c.label(s) + "(" + f.to_string() + " * " + g.to_string() + ")", r.to_string());
    } else if (prop == "d-leibniz") {
      NCPoly f = S.poly(), g = S.poly();
      if (two && i % 2) {
        Form w = S.one_form();
        Form r = c.d_form(c.right_mul(w, f)) - c.right_mul(c.d_form(w), f) + c.wedge(w, c.d(f));
        if (!r.is_zero()) fail("d(w f) with w = " + c.format(w) + ", f = " + f.to_string(), c.format(r));
      } else {
        Form r = c.d(f * g) - c.right_mul(c.d(f), g) - f * c.d(g);
        if (!r.is_zero()) fail("d(f g) with f = " + f.to_string() + ", g = " + g.to_string(), c.format(r));
      }
    } else if (prop == "d-squared") {
      if (i % 2) {
        Form w = S.one_form();
        Form r = c.d_form(c.d_form(w));
        if (!r.is_zero()) fail("dd(" + c.format(w) + ")", c.format(r));
      } else {
        NCPoly f = S.poly();
        Form r = c.d_form(c.d(f));
        if (!r.is_zero()) fail("dd(" + f.to_string() + ")", c.format(r));
      }
    } else if (prop == "zeta-central") {
      NCPoly f = S.poly();
      Form r = c.commutator(c.zeta(), c.scalar_form(f));
      if (!r.is_zero()) fail("[zeta, " + f.to_string() + "]", c.format(r));
    } else if (prop == "delta-squared") {
      Form w = i % 3 == 0 ? c.wedge(S.one_form(), S.one_form()) : S.one_form();
      Form r = c.delta(c.delta(w)) + c.commutator(c.zeta(), w);
      if (!r.is_zero()) fail("Delta^2(" + c.format(w) + ") + [zeta, .]", c.format(r));
    } else if (prop == "move-left-trip") {
      ThetaWord w = S.theta_word(2);
      NCPoly g = S.poly(), f = S.poly();
      Form tw = Form::word(c.algebra(), w, c.algebra()->one());
      Form back = c.right_mul(tw, c.phi_inverse_word(w, g));
      if (back != Form::word(c.algebra(), w, g)) fail("move " + g.to_string() + " across " + c.format_word(w), c.format(back));
      Form one = c.right_mul(c.right_mul(tw, f), g), both = c.right_mul(tw, f * g);
      if (one != both) fail("move " + f.to_string() + ", " + g.to_string() + " across " + c.format_word(w), c.format(one - both));
    } else if (prop == "tensor-l-assoc") {
      Form a = S.tensor(1 + i % 2), m = S.tensor(1), z = S.tensor(1);
      Form l = tensor_l(c, tensor_l(c, a, m), z), r = tensor_l(c, a, tensor_l(c, m, z));
      if (l != r) fail("(a (x)_L b) (x)_L c", c.format(l - r));
    } else {
      throw std::invalid_argument("unknown property " + prop);
    }
  }
  return out;
}

// FNV-1a, stable across standard libraries
inline unsigned seed_for(const std::string& preset, const std::string& prop) {
  unsigned h = 2166136261u;
  for (char ch : preset + "/" + prop) h = (h ^ static_cast<unsigned char>(ch)) * 16777619u;
  return h;
}

}  // namespace nccalc::props
