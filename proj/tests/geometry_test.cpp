#include <gtest/gtest.h>

#include <random>

#include "nccalc/geometry.hpp"

using namespace nccalc;

namespace {

CalculusPtr quantum_plane() {
  PresentationBuilder b;
  b.param("q").param("p");
  b.generator("x").generator("y");
  b.relation("x*y", "q*y*x");
  CalculusSpec spec;
  spec.algebra = b.build();
  auto A = spec.algebra;
  spec.group = Group::parse("Z^2");
  DirectionSpec d1, d2;
  d1.label = "1";
  d1.images = {{"x", A->parse("1/(p*q)*x")}, {"y", A->parse("1/(p*q)*y")}};
  d1.element = GroupElement{1, 0};
  d2.label = "2";
  d2.images = {{"y", A->parse("1/(p*q)*y")}};
  d2.element = GroupElement{0, 1};
  spec.directions = {d1, d2};
  return Calculus::build(spec);
}

// functions on Z3 spanned by 1, x, x^2 with x^3 = 1, q a primitive cube root of unity
CalculusPtr z3_lattice() {
  PresentationBuilder b;
  b.generator("q").generator("x");
  b.central("q");
  b.rule("q*q", "-q - 1");
  b.relation("x^3", "1");
  CalculusSpec spec;
  spec.algebra = b.build();
  auto A = spec.algebra;
  spec.group = Group::parse("Z3");
  DirectionSpec d1, d2;
  d1.label = "1";
  d1.images = {{"x", A->parse("q*x")}};
  d1.inverse_images = {{"x", A->parse("q^2*x")}};
  d1.element = GroupElement{1};
  d2.label = "2";
  d2.images = {{"x", A->parse("q^2*x")}};
  d2.inverse_images = {{"x", A->parse("q*x")}};
  d2.element = GroupElement{2};
  spec.directions = {d1, d2};
  return Calculus::build(spec);
}

CalculusPtr shift_pm1() {
  PresentationBuilder b;
  b.generator("x");
  CalculusSpec spec;
  spec.algebra = b.build();
  auto A = spec.algebra;
  spec.group = Group::abelian({0});
  for (int i : {-1, 1}) {
    DirectionSpec d;
    d.label = std::to_string(i);
    d.images["x"] = A->parse("x + " + std::to_string(i));
    d.inverse_images["x"] = A->parse("x - " + std::to_string(i));
    d.element = GroupElement{i};
    spec.directions.push_back(d);
  }
  return Calculus::build(spec);
}

NCPoly random_poly(const Calculus& c, std::mt19937& rng) {
  static const char* pool[] = {"0", "1", "-1", "x", "y", "x*y + 2", "q*x - y^2", "1/2*y*x", "p"};
  std::uniform_int_distribution<int> pick(0, 8);
  return c.algebra()->parse(pool[pick(rng)]);
}

Connection random_connection(const Calculus& c, std::mt19937& rng) {
  Connection conn;
  int n = static_cast<int>(c.size());
  for (int a = 0; a < n; ++a)
    for (int s = 0; s < n; ++s)
      for (int b = 0; b < n; ++b) conn.set(a, s, b, random_poly(c, rng));
  return conn;
}

Connection identity_connection(const Calculus& c) {
  Connection conn;
  int n = static_cast<int>(c.size());
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < n; ++a) conn.set(a, s, a, c.algebra()->one());
  return conn;
}

Metric unit_metric(const Calculus& c) {
  Metric g;
  for (int s = 0; s < static_cast<int>(c.size()); ++s) g.g[{s, s}] = c.algebra()->one();
  return g;
}

}  // namespace

TEST(Torsion, QuantumPlaneConditions) {
  auto c = quantum_plane();
  auto conds = torsion_free_conditions(*c);
  ASSERT_EQ(conds.equations.size(), 2u);
  EXPECT_EQ(conds.equations[0].normalized(*c), "V[1,2,1] = V[1,1,2] + 1");
  EXPECT_EQ(conds.equations[1].normalized(*c), "V[2,2,1] = V[2,1,2] - 1");
  EXPECT_EQ(conds.of_kind(PairKind::Quadrangle).size(), 2u);
  EXPECT_TRUE(conds.of_kind(PairKind::Biangle).empty());
}

TEST(Torsion, QuantumPlaneZeroConnection) {
  auto c = quantum_plane();
  auto tor = torsion_theta(*c, Connection{});
  for (int s = 0; s < 2; ++s) {
    Form expect = c->wedge(c->theta(s), c->vartheta());
    EXPECT_FALSE(expect.is_zero());
    EXPECT_EQ(tor[s], expect);
  }
  EXPECT_EQ(tor[0], c->parse_form("theta(1)*theta(2)"));
}

TEST(Torsion, ConditionsMatchTorsionBySubstitution) {
  auto c = quantum_plane();
  auto conds = torsion_free_conditions(*c);
  std::mt19937 rng(7);
  int torsion_free = 0;
  for (int trial = 0; trial < 40; ++trial) {
    Connection conn = random_connection(*c, rng);
    if (trial % 2 == 0) {
      // force the conditions with algebra-valued entries
      conn.set(0, 1, 0, conn.get(*c, 0, 0, 1) + c->algebra()->one());
      conn.set(1, 1, 0, conn.get(*c, 1, 0, 1) - c->algebra()->one());
    }
    auto tor = torsion_theta(*c, conn);
    bool zero = tor[0].is_zero() && tor[1].is_zero();
    bool sat = true;
    for (auto& e : conds.equations) {
      NCPoly r = e.residue(*c, conn);
      EXPECT_EQ(tor[e.upper].coefficient({e.pair.first, e.pair.second}), r);
      sat = sat && r.is_zero();
    }
    EXPECT_EQ(zero, sat);
    torsion_free += zero;
  }
  EXPECT_GE(torsion_free, 20);
}

TEST(Torsion, GroupLatticeTriangleAndBiangleSolution) {
  auto c = z3_lattice();
  auto conds = torsion_free_conditions(*c);
  EXPECT_TRUE(conds.of_kind(PairKind::Quadrangle).empty());
  EXPECT_FALSE(conds.of_kind(PairKind::Triangle).empty());
  EXPECT_FALSE(conds.of_kind(PairKind::Biangle).empty());
  // V^s_{s',s''} = δ^s_{s's''} - δ^s_{s'}
  Connection conn;
  Group g = Group::parse("Z3");
  for (int s = 0; s < 2; ++s)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        int prod = g.mul({a + 1}, {b + 1})[0];
        int v = (prod == s + 1 ? 1 : 0) - (a == s ? 1 : 0);
        conn.set(s, a, b, NCPoly(c->algebra(), Scalar(v)));
      }
  for (auto& t : torsion_theta(*c, conn)) EXPECT_TRUE(t.is_zero()) << c->format(t);
  for (auto& e : conds.equations) EXPECT_TRUE(e.residue(*c, conn).is_zero());
}

TEST(Torsion, ShiftBiangleTorsion) {
  auto c = shift_pm1();
  auto conds = torsion_free_conditions(*c);
  Connection conn;
  for (int s = 0; s < 2; ++s)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        if (a != b && a == s) conn.set(s, a, b, -c->algebra()->one());
  auto bi = conds.of_kind(PairKind::Biangle);
  ASSERT_FALSE(bi.empty());
  for (auto* e : bi) EXPECT_TRUE(e->residue(*c, conn).is_zero()) << e->normalized(*c);
  // without those entries the biangle part does not vanish
  bool some = false;
  for (auto* e : bi) some = some || !e->residue(*c, Connection{}).is_zero();
  EXPECT_TRUE(some);
}

TEST(Torsion, LeftLinear) {
  auto c = quantum_plane();
  std::mt19937 rng(3);
  for (int t = 0; t < 10; ++t) {
    Connection conn = random_connection(*c, rng);
    NCPoly f = random_poly(*c, rng);
    Form alpha = random_poly(*c, rng) * c->theta(0) + random_poly(*c, rng) * c->theta(1);
    EXPECT_EQ(torsion(*c, conn, f * alpha), f * torsion(*c, conn, alpha));
  }
}

TEST(Nabla, ZeroConnectionAndLeibniz) {
  auto c = quantum_plane();
  for (int s = 0; s < 2; ++s) {
    FormTensor n = nabla(*c, Connection{}, c->theta(s));
    ASSERT_EQ(n.size(), 1u);
    EXPECT_EQ(n.begin()->first, s);
    EXPECT_EQ(n.begin()->second, c->vartheta());
  }
  std::mt19937 rng(11);
  NCPoly x = c->algebra()->gen("x");
  for (int t = 0; t < 10; ++t) {
    Connection conn = random_connection(*c, rng);
    FormTensor lhs = tensor_sub(nabla(*c, conn, x * c->theta(0)), tensor_left_mul(x, nabla(*c, conn, c->theta(0))));
    FormTensor expect{{0, c->d(x)}};
    EXPECT_TRUE(tensor_is_zero(tensor_sub(lhs, expect))) << format_tensor(*c, lhs);
    NCPoly f = random_poly(*c, rng);
    Form alpha = random_poly(*c, rng) * c->theta(1);
    FormTensor l2 = tensor_sub(nabla(*c, conn, f * alpha), tensor_left_mul(f, nabla(*c, conn, alpha)));
    FormTensor e2;
    for (auto& [w, coef] : alpha.terms()) e2[w[0]] = c->right_mul(c->d(f), coef);
    EXPECT_TRUE(tensor_is_zero(tensor_sub(l2, e2)));
  }
}

TEST(Nabla, ScriptVSemilinear) {
  auto c = quantum_plane();
  std::mt19937 rng(5);
  for (int t = 0; t < 10; ++t) {
    Connection conn = random_connection(*c, rng);
    NCPoly f = random_poly(*c, rng);
    for (int s = 0; s < 2; ++s)
      for (int a = 0; a < 2; ++a)
        EXPECT_EQ(script_v(*c, conn, s, f * c->theta(a)), c->phi_inverse(s).apply(f) * script_v(*c, conn, s, c->theta(a)));
  }
}

TEST(Curvature, QuantumPlane) {
  auto c = quantum_plane();
  for (int s = 0; s < 2; ++s) EXPECT_TRUE(tensor_is_zero(curvature(*c, Connection{}, c->theta(s))));
  EXPECT_TRUE(tensor_is_zero(curvature(*c, Connection{}, Form(c->algebra()))));
  std::mt19937 rng(9);
  for (int t = 0; t < 5; ++t) {
    Connection conn = random_connection(*c, rng);
    NCPoly f = random_poly(*c, rng);
    Form alpha = c->theta(0) + random_poly(*c, rng) * c->theta(1);
    EXPECT_TRUE(tensor_is_zero(tensor_sub(curvature(*c, conn, f * alpha), tensor_left_mul(f, curvature(*c, conn, alpha)))));
  }
}

TEST(TensorL, SemiLeftLinearAndAssociative) {
  auto c = quantum_plane();
  auto A = c->algebra();
  NCPoly f = A->parse("x^2 + y");
  for (int s = 0; s < 2; ++s)
    for (int s2 = 0; s2 < 2; ++s2) {
      Form lhs = tensor_l(*c, c->theta(s), f * c->theta(s2));
      // stored convention: coefficient placed right of θ^s is φ_s^{-1}(f)
      Form rhs = tensor_a(*c, c->right_mul(c->theta(s), c->phi_inverse(s).apply(f)), phi_inverse_tensor(*c, s, c->theta(s2)));
      EXPECT_EQ(lhs, rhs);
      EXPECT_EQ(lhs, f * tensor_l(*c, c->theta(s), c->theta(s2)));
    }
  std::mt19937 rng(21);
  auto rand_tensor = [&](size_t deg) {
    Form t(A);
    for (int k = 0; k < 2; ++k) {
      ThetaWord w;
      for (size_t i = 0; i < deg; ++i) w.push_back(static_cast<int>(rng() % 2));
      t.add(w, random_poly(*c, rng));
    }
    return t;
  };
  for (int t = 0; t < 20; ++t) {
    Form a = rand_tensor(1 + t % 2), b = rand_tensor(1), d = rand_tensor(1 + (t / 2) % 2);
    EXPECT_EQ(tensor_l(*c, tensor_l(*c, a, b), d), tensor_l(*c, a, tensor_l(*c, b, d)));
    EXPECT_EQ(to_a(*c, to_l(*c, a)), a);
    EXPECT_EQ(to_l(*c, to_a(*c, a)), a);
  }
}

TEST(TensorL, IdentityAutomorphismsGivePlainProduct) {
  PresentationBuilder b;
  b.generator("x").generator("y");
  CalculusSpec spec;
  spec.algebra = b.build();
  auto A = spec.algebra;
  DirectionSpec d1, d2;
  d1.label = "1";
  d1.mode = DirectionMode::Derivation;
  d1.e_images = {{"x", A->one()}, {"y", A->parse("0")}};
  d2.label = "2";
  d2.mode = DirectionMode::Derivation;
  d2.e_images = {{"x", A->parse("0")}, {"y", A->one()}};
  spec.directions = {d1, d2};
  auto flat = Calculus::build(spec);
  Form a = A->parse("x*y") * flat->theta(0) + flat->theta(1);
  Form bb = A->parse("y + 1") * flat->theta(1);
  EXPECT_EQ(tensor_l(*flat, a, bb), tensor_a(*flat, a, bb));
}

TEST(Metric, CompatibilityRoutesAgree) {
  auto c = quantum_plane();
  Metric g = unit_metric(*c);
  auto rep = metric_compatibility(*c, identity_connection(*c), g);
  EXPECT_TRUE(rep.component_ok());
  EXPECT_TRUE(rep.tensor_ok());
  std::mt19937 rng(13);
  for (int t = 0; t < 20; ++t) {
    Connection conn = random_connection(*c, rng);
    Metric h;
    h.g[{0, 0}] = random_poly(*c, rng);
    h.g[{0, 1}] = random_poly(*c, rng);
    h.g[{1, 1}] = random_poly(*c, rng);
    EXPECT_TRUE(metric_compatibility(*c, conn, h).agree());
  }
}

TEST(Metric, CentralMatrixForm) {
  // scalar V_s and g: φ_s(g) = V_s^T g V_s
  auto c = quantum_plane();
  auto A = c->algebra();
  Metric g;
  g.g[{0, 0}] = A->parse("2");
  g.g[{0, 1}] = A->parse("1");
  g.g[{1, 0}] = A->parse("1");
  g.g[{1, 1}] = A->parse("3");
  Connection conn;
  int vals[2][2][2] = {{{1, 1}, {0, 1}}, {{1, 0}, {2, 1}}};
  for (int s = 0; s < 2; ++s)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) conn.set(a, s, b, NCPoly(A, Scalar(vals[s][a][b])));
  auto rep = metric_compatibility(*c, conn, g);
  for (size_t i = 0; i < rep.index.size(); ++i) {
    auto [s, s1, s2] = rep.index[i];
    Scalar vtgv = 0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) vtgv += Scalar(vals[s][a][s1]) * g.g[{a, b}].scalar_value() * Scalar(vals[s][b][s2]);
    EXPECT_EQ(rep.component_residue[i], NCPoly(A, g.g[{s1, s2}].scalar_value() - vtgv));
  }
  EXPECT_TRUE(rep.agree());
}

TEST(Metric, InvarianceTrivial) {
  auto c = quantum_plane();
  Metric g;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) g.g[{a, b}] = c->algebra()->one();
  EXPECT_TRUE(metric_invariance(*c, g).ok());
  g.g[{0, 0}] = c->algebra()->gen("x");
  EXPECT_FALSE(metric_invariance(*c, g).ok());
}

TEST(LeviCivita, GridSearchQuantumPlane) {
  auto c = quantum_plane();
  auto A = c->algebra();
  std::vector<NCPoly> grid;
  for (auto e : {"0", "1", "-1", "q", "-q", "1/q", "-1/q"}) grid.push_back(A->parse(e));
  Metric g = unit_metric(*c);
  auto mats = compatible_matrices(*c, g, grid, 1);
  // oracle: V^T V = I over the grid means signed permutation matrices
  for (auto& per : mats) EXPECT_EQ(per.size(), 8u);
  auto serial = levi_civita_search(*c, g, grid, 1);
  auto parallel = levi_civita_search(*c, g, grid, 4);
  ASSERT_EQ(serial.found.size(), parallel.found.size());
  for (size_t i = 0; i < serial.found.size(); ++i) EXPECT_EQ(serial.found[i].V, parallel.found[i].V);
  EXPECT_EQ(serial.candidates, 64u);
  bool has_identity = false;
  for (auto& conn : serial.found) {
    EXPECT_TRUE(levi_civita_check(*c, conn, g).ok());
    has_identity = has_identity || conn.V == identity_connection(*c).V;
  }
  EXPECT_TRUE(has_identity);
  EXPECT_TRUE(levi_civita_check(*c, identity_connection(*c), g).ok());
  EXPECT_FALSE(levi_civita_check(*c, Connection{}, g).ok());
}

TEST(LeviCivita, NoCandidateIsBounded) {
  auto c = quantum_plane();
  auto A = c->algebra();
  Metric g;
  g.g[{0, 0}] = A->one();
  g.g[{1, 1}] = A->gen("x");
  auto r = levi_civita_search(*c, g, {A->one(), -A->one()}, 2);
  EXPECT_TRUE(r.found.empty());
  EXPECT_NE(r.summary().find("no candidate found at this bound"), std::string::npos);
}

TEST(GeometryText, RoundTrip) {
  auto c = quantum_plane();
  Connection conn;
  conn.set(0, 1, 0, c->algebra()->parse("x + 1"));
  conn.set(1, 0, 1, c->algebra()->parse("-q*y"));
  EXPECT_EQ(parse_connection(*c, format_connection(*c, conn)).V, conn.V);
  Metric g = unit_metric(*c);
  g.symmetric = true;
  g.g[{0, 1}] = c->algebra()->parse("x");
  Metric back = parse_metric(*c, format_metric(*c, g));
  EXPECT_EQ(back.g, g.g);
  EXPECT_TRUE(back.symmetric);
  EXPECT_THROW(parse_metric(*c, "symmetric = true\ng[1,2] = x\ng[2,1] = y\n"), InputError);
}
