#include <gtest/gtest.h>

#include <random>

#include "nccalc/scalar.hpp"

using namespace nccalc;

namespace {

Scalar S(const char* s) { return Scalar::parse(s); }

Poly random_poly(std::mt19937& rng, int max_terms = 3) {
  static const char* names[] = {"p", "q", "r"};
  std::uniform_int_distribution<int> nterms(1, max_terms), coef(-3, 3), exp(0, 2), var(0, 2);
  Poly p;
  int n = nterms(rng);
  for (int i = 0; i < n; ++i) {
    Monomial m;
    for (int k = 0; k < 2; ++k) m = m * Monomial(Var::intern(names[var(rng)]), exp(rng));
    p += Poly(m, Rational(coef(rng)));
  }
  return p;
}

Scalar random_scalar(std::mt19937& rng) {
  Poly d;
  while (d.is_zero()) d = random_poly(rng, 2);
  return Scalar(random_poly(rng), d);
}

}  // namespace

TEST(Scalar, CancelsCommonFactor) {
  EXPECT_EQ(S("(q^3 - 1)/(q - 1)"), S("q^2 + q + 1"));
  EXPECT_EQ(S("(q^3 - 1)/(q - 1)").to_string(), "q^2 + q + 1");
}

TEST(Scalar, DivideByInverseWeight) {
  Scalar a = S("(1 - alpha)/t");
  EXPECT_EQ(a / S("t^-1"), S("1 - alpha"));
}

TEST(Scalar, QuantumPlaneDeterminant) {
  Scalar A = S("(1-alpha)/t1"), B = S("(1-beta)/t1"), C = S("(1-gamma)/t2"), D = S("(1-delta)/t2");
  Scalar det = A * D - B * C;
  EXPECT_EQ(det, S("((1-alpha)*(1-delta) - (1-beta)*(1-gamma))/(t1*t2)"));
  EXPECT_EQ(det.denominator(), (Scalar::param("t1") * Scalar::param("t2")).numerator());
}

TEST(Scalar, SubstituteWeightCancels) {
  Scalar a = S("(1 - r)/t2");
  EXPECT_EQ(a.substitute({{"t2", S("1 - r")}}), Scalar(1));
  EXPECT_EQ(S("r").substitute({{"r", S("p*q")}}), S("p*q"));
}

TEST(Scalar, CancellationPrecedesSubstitution) {
  Scalar a = S("(r - 1)/(r - 1)");
  EXPECT_TRUE(a.is_one());
  EXPECT_EQ(a.substitute({{"r", Scalar(1)}}), Scalar(1));
}

TEST(Scalar, SubstituteIntoVanishingDenominatorNamesIt) {
  Scalar a = S("p/(r - 1)");
  try {
    a.substitute({{"r", Scalar(1)}});
    FAIL() << "expected DivisionByZero";
  } catch (const DivisionByZero& e) {
    EXPECT_NE(std::string(e.what()).find("r - 1"), std::string::npos);
  }
}

TEST(Scalar, DivisionByZeroThrows) { EXPECT_THROW(S("p") / Scalar(0), DivisionByZero); }

TEST(Scalar, DenominatorIsMonic) {
  Scalar a = S("1/(2*p - 4)");
  EXPECT_EQ(a.denominator().leading().c, 1);
  EXPECT_EQ(a, S("(1/2)/(p - 2)"));
}

TEST(Scalar, SideConditionsAreRecorded) {
  SideConditionRecorder rec;
  Scalar a = S("1/(q - 1)");
  (void)(a / S("2*p"));
  ASSERT_EQ(rec.conditions().size(), 2u);
  EXPECT_EQ(rec.conditions()[0], "q - 1 != 0");
  EXPECT_EQ(rec.conditions()[1], "p != 0");
}

TEST(Poly, GcdOfProducts) {
  std::mt19937 rng(7);
  for (int i = 0; i < 60; ++i) {
    Poly a = random_poly(rng), b = random_poly(rng), c = random_poly(rng);
    if (a.is_zero() || b.is_zero() || c.is_zero()) continue;
    Poly g = gcd(a * c, b * c);
    ASSERT_TRUE((a * c).divide_exact(g).has_value());
    ASSERT_TRUE((b * c).divide_exact(g).has_value());
    ASSERT_TRUE(g.divide_exact(c.monic()).has_value()) << g.to_string() << " vs " << c.to_string();
  }
}

TEST(Poly, GcdMultivariateKnown) {
  Poly x(Var::intern("x")), y(Var::intern("y"));
  Poly f = (x * x - y * y) * (x + Poly(2) * y);
  Poly g = (x - y) * (x + Poly(2) * y) * (y + Poly(1));
  EXPECT_EQ(gcd(f, g), ((x - y) * (x + Poly(2) * y)).monic());
}

TEST(ScalarProperties, FieldAxioms) {
  std::mt19937 rng(11);
  for (int i = 0; i < 120; ++i) {
    Scalar a = random_scalar(rng), b = random_scalar(rng), c = random_scalar(rng);
    ASSERT_EQ((a + b) + c, a + (b + c));
    ASSERT_EQ(a * (b + c), a * b + a * c);
    ASSERT_EQ(a * b, b * a);
    if (!a.is_zero()) ASSERT_TRUE((a * a.inverse()).is_one());
  }
}

TEST(ScalarProperties, CanonicalFormIdempotent) {
  std::mt19937 rng(12);
  for (int i = 0; i < 120; ++i) {
    Scalar a = random_scalar(rng);
    Scalar again(a.numerator(), a.denominator());
    ASSERT_EQ(a, again);
    ASSERT_EQ(S(a.to_string().c_str()), a) << a.to_string();
  }
}

TEST(ScalarProperties, SubstitutionCommutesWithArithmetic) {
  std::mt19937 rng(13);
  Bindings b = {{"p", S("2")}, {"q", S("r + 1")}};
  int checked = 0;
  for (int i = 0; i < 150; ++i) {
    Scalar x = random_scalar(rng), y = random_scalar(rng);
    try {
      Scalar xs = x.substitute(b), ys = y.substitute(b);
      ASSERT_EQ((x + y).substitute(b), xs + ys);
      ASSERT_EQ((x * y).substitute(b), xs * ys);
      ++checked;
    } catch (const DivisionByZero&) {
    }
  }
  EXPECT_GT(checked, 100);
}
