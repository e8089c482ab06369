// One line per acceptance criterion; exit status 0 iff all pass.

#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "nccalc/error.hpp"
#include "nccalc/geometry.hpp"
#include "nccalc/presets.hpp"
#include "properties.hpp"

using namespace nccalc;

namespace {

struct Verdict {
  bool ok = true;
  std::vector<std::string> notes;

  void need(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes.push_back(what);
    }
  }
};

bool same(const PresetBundle& b, const std::string& lhs, const std::string& rhs) {
  return b.form(lhs) == b.form(rhs);
}

void equal(Verdict& v, const PresetBundle& b, const std::string& lhs, const std::string& rhs) {
  v.need(same(b, lhs, rhs), b.id + ": " + lhs + " = " + rhs);
}

// --------------------------------------------------------------------- 1

Verdict shift_calculus() {
  Verdict v;
  auto b = load_preset("poly_shift_S12");
  const Calculus& c = *b->calculus;
  const Algebra& A = c.algebra();
  auto sol = solve_theta_in_differentials(c, {A->parse("x"), A->parse("x^2")});
  v.need(sol.ok, "theta in dx, dx^2 solvable");
  if (sol.ok) {
    auto theta = [&](int s) { return sol.inverse[s][0] * c.d(A->parse("x")) + sol.inverse[s][1] * c.d(A->parse("x^2")); };
    v.need(theta(0) == b->form("2*(1 + x)*d(x) - d(x^2)"), "theta(1) = 2(1+x)dx - dx^2");
    v.need(theta(1) == b->form("-(1/2 + x)*d(x) + 1/2*d(x^2)"), "theta(2) = -(1/2+x)dx + 1/2 dx^2");
    v.need(theta(0) == c.theta(0) && theta(1) == c.theta(1), "solution matches the basis");
  }
  v.need(c.delta(c.theta(0)).is_zero(), "Delta(theta1) = 0");
  v.need(c.delta(c.theta(1)) == c.wedge(c.theta(0), c.theta(0)), "Delta(theta2) = theta1^2");
  v.need(c.wedge(c.theta(1), c.theta(0)) == -c.wedge(c.theta(0), c.theta(1)), "theta2 theta1 = -theta1 theta2");
  v.need(c.wedge(c.theta(1), c.theta(1)).is_zero(), "theta2^2 = 0");
  v.need(c.zeta().is_zero(), "zeta = 0");
  auto s = load_preset("poly_shift_sym");
  const Calculus& cs = *s->calculus;
  v.need(cs.vartheta() == s->form("d(x^2) - 2*x*d(x)"), "S={-1,1}: vartheta = dx^2 - 2x dx");
  v.need(cs.zeta() == s->form("theta(-1)*theta(1) + theta(1)*theta(-1)"), "S={-1,1}: zeta");
  return v;
}

// --------------------------------------------------------------------- 2

// Laplace expansion along the first row
Scalar cofactor_det(const std::vector<std::vector<Scalar>>& m) {
  size_t n = m.size();
  if (n == 1) return m[0][0];
  Scalar out(0);
  for (size_t j = 0; j < n; ++j) {
    std::vector<std::vector<Scalar>> minor;
    for (size_t i = 1; i < n; ++i) {
      std::vector<Scalar> row;
      for (size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(m[i][k]);
      minor.push_back(row);
    }
    Scalar t = m[0][j] * cofactor_det(minor);
    out = j % 2 ? out - t : out + t;
  }
  return out;
}

Verdict vandermonde() {
  Verdict v;
  for (int n = 2; n <= 5; ++n) {
    PresentationBuilder pb;
    for (int k = 1; k <= n; ++k) pb.param("i" + std::to_string(k));
    pb.generator("x");
    CalculusSpec spec;
    spec.algebra = pb.build();
    const Algebra& A = spec.algebra;
    for (int k = 1; k <= n; ++k) {
      std::string i = "i" + std::to_string(k);
      DirectionSpec d;
      d.label = std::to_string(k);
      d.images["x"] = A->parse("x + " + i);
      d.inverse_images["x"] = A->parse("x - " + i);
      spec.directions.push_back(d);
    }
    auto c = Calculus::build(spec);
    std::vector<std::vector<NCPoly>> M;
    std::vector<std::vector<Scalar>> Ms;
    for (int r = 1; r <= n; ++r) {
      std::vector<NCPoly> row;
      std::vector<Scalar> srow;
      for (int s = 0; s < n; ++s) {
        row.push_back(c->e(s, A->parse("x^" + std::to_string(r))));
        srow.push_back(to_commutative_scalar(row.back()));
      }
      M.push_back(row);
      Ms.push_back(srow);
    }
    std::string expect = "1";
    for (int k = 1; k <= n; ++k) expect += "*i" + std::to_string(k);
    for (int j = 1; j <= n; ++j)
      for (int k = j + 1; k <= n; ++k) expect += "*(i" + std::to_string(k) + " - i" + std::to_string(j) + ")";
    Scalar det = commutative_determinant(M);
    v.need(det == Scalar::parse(expect), "n=" + std::to_string(n) + ": det = " + det.to_string());
    v.need(cofactor_det(Ms) == det, "n=" + std::to_string(n) + ": cofactor oracle");
  }
  return v;
}

// --------------------------------------------------------------------- 3

void two_form_basics(Verdict& v, const PresetBundle& b) {
  const Calculus& c = *b.calculus;
  equal(v, b, "theta(2)*theta(1)", "-theta(1)*theta(2)");
  equal(v, b, "theta(1)*theta(1)", "0");
  equal(v, b, "theta(2)*theta(2)", "0");
  v.need(c.d_form(c.vartheta()).is_zero(), b.id + ": d(vartheta) = 0");
  for (size_t s = 0; s < c.size(); ++s) {
    std::vector<Form> id;
    for (size_t t = 0; t < c.size(); ++t) id.push_back(c.theta(static_cast<int>(t)));
    auto d = check_differentiability(c, c.phi(static_cast<int>(s)), id, false);
    v.need(d.report.ok(), b.id + ": phi_" + c.label(static_cast<int>(s)) + " differentiable");
  }
}

Verdict quantum_plane() {
  Verdict v;
  auto a = load_preset("quantum_plane_a");
  equal(v, *a, "x*d(x)", "p*q*d(x)*x");
  equal(v, *a, "y*d(x)", "p*d(x)*y");
  equal(v, *a, "y*d(y)", "p*q*d(y)*y");
  equal(v, *a, "x*d(y)", "q*d(y)*x + (p*q - 1)*d(x)*y");
  two_form_basics(v, *a);
  auto b = load_preset("quantum_plane_b");
  equal(v, *b, "x*d(x)", "alpha*d(x)*x");
  equal(v, *b, "x*d(y)", "q*alpha*d(y)*x");
  equal(v, *b, "y*d(y)", "delta*d(y)*y");
  equal(v, *b, "y*d(x)", "1/q*d(x)*y + (alpha - 1)*d(y)*x");
  two_form_basics(v, *b);
  auto c = load_preset("quantum_plane_c");
  equal(v, *c, "x*d(x)", "alpha*d(x)*x");
  equal(v, *c, "y*d(x)", "1/q*d(x)*y");
  equal(v, *c, "y*d(y)", "delta*d(y)*y");
  equal(v, *c, "x*d(y)", "q*d(y)*x");
  two_form_basics(v, *c);
  return v;
}

// --------------------------------------------------------------------- 4

Verdict heisenberg() {
  Verdict v;
  auto b = load_preset("heisenberg");
  const Calculus& c = *b->calculus;
  auto br = [&](const char* f, const char* g) { return c.commutator(b->form(f), b->form(g)); };
  v.need(br("d(x)", "x") == b->form("a*d(x)"), "[dx, x] = a dx");
  v.need(br("d(x)", "y").is_zero(), "[dx, y] = 0");
  v.need(br("d(y)", "x").is_zero(), "[dy, x] = 0");
  v.need(br("d(y)", "y") == b->form("b*d(y)"), "[dy, y] = b dy");
  return v;
}

// --------------------------------------------------------------------- 5

Verdict h_plane() {
  Verdict v;
  auto b = load_preset("h_plane");
  equal(v, *b, "[x, d(x)]", "(p - h)*(d(y)*(x + h*y) - d(x)*y) + (r - 1)*d(y)*y^-1*x^2");
  equal(v, *b, "[y, d(x)]", "-h*d(y)*y + (r - 1)*d(y)*x");
  equal(v, *b, "[y, d(y)]", "(r - 1)*d(y)*y");
  equal(v, *b, "[x, d(y)]", "r*h*d(y)*y + (r - 1)*d(y)*x");
  auto r1 = load_preset("h_plane_r1");
  equal(v, *r1, "d(x)*d(x)", "(p - h)*d(x)*d(y)");
  equal(v, *r1, "d(y)*d(y)", "0");
  equal(v, *r1, "d(x)*d(y) + d(y)*d(x)", "0");
  v.need(is_central_one_form(*r1->calculus, r1->form("theta(2)")).central, "theta(2) central at r = 1");
  v.need(!is_central_one_form(*r1->calculus, r1->form("theta(1)")).central, "theta(1) not central");
  return v;
}

// --------------------------------------------------------------------- 6

Verdict z3() {
  Verdict v;
  auto b = load_preset("z3_root_of_unity");
  const Calculus& c = *b->calculus;
  const Algebra& A = c.algebra();
  std::vector<NCPoly> cs;
  for (auto e : {"x^3", "y^3", "x*y", "y*x"}) {
    NCPoly f = A->parse(e);
    v.need(c.d(f).is_zero(), std::string("d(") + e + ") = 0");
    cs.push_back(f);
  }
  for (auto& r : constants(c, cs)) v.need(r.by_differential && r.by_criterion, "constant " + r.candidate.to_string());
  v.need(!c.d(A->parse("x^2")).is_zero(), "x^2 is not constant");
  equal(v, *b, "x^2", "x^3*(y*x)^-1*y");
  equal(v, *b, "y^2", "y^3*(x*y)^-1*x");
  auto q = load_preset("z3_quotient");
  const Algebra& Q = q->calculus->algebra();
  for (auto e : {"x^3", "y^3", "x*y", "y*x"}) v.need(Q->parse(e) == Q->one(), std::string("quotient: ") + e + " = 1");
  // every c_i is 1 in the quotient, so c4^-1 = c4
  v.need(Q->parse("x^2") == Q->parse("x^3*(y*x)*y"), "quotient: x^2 = c1 c4^-1 y");
  v.need(Q->parse("y^2") == Q->parse("y^3*(x*y)*x"), "quotient: y^2 = c2 c3^-1 x");
  v.need(Q->parse("x^2") == Q->parse("y"), "quotient: x^2 = y");
  return v;
}

// --------------------------------------------------------------------- 7

Verdict twisted_heisenberg() {
  Verdict v;
  auto b2 = load_preset("twisted_heisenberg_2");
  const Calculus& c2 = *b2->calculus;
  v.need(c2.vartheta() == b2->form("x*d(y) - y*d(x)"), "2: vartheta = x dy - y dx");
  v.need(c2.zeta() == b2->form("theta(1)*theta(2)"), "2: zeta = theta1 theta2");
  v.need(verify_twisted_two_forms(c2, *b2->definition.spec.two_forms).ok(), "2: verify_twisted_two_forms");
  auto b3 = load_preset("twisted_heisenberg_3");
  const Calculus& c3 = *b3->calculus;
  v.need(c3.delta(c3.theta(0)) == b3->form("-theta(1)*theta(3)"), "3: Delta(theta1)");
  v.need(c3.delta(c3.theta(1)) == b3->form("theta(2)*theta(3)"), "3: Delta(theta2)");
  v.need(c3.delta(c3.theta(2)) == b3->form("-theta(1)*theta(2) - theta(2)*theta(1)"), "3: Delta(theta3)");
  v.need(c3.zeta() == b3->form("-theta(2)*theta(1)"), "3: zeta = -theta2 theta1");
  v.need(verify_twisted_two_forms(c3, *b3->definition.spec.two_forms).ok(), "3: verify_twisted_two_forms");
  return v;
}

// --------------------------------------------------------------------- 8

Verdict glpq2() {
  Verdict v;
  auto b = load_preset("glpq2");
  const Calculus& c = *b->calculus;
  const Algebra& A = c.algebra();
  const std::vector<std::string> gens = {"a", "b", "c", "d"};
  const char* alpha[4][4] = {{"p*q", "1", "p*q", "1"}, {"p*q", "q", "p", "1"}, {"p*q", "q", "p", "1"}, {"p*q", "p*q", "1", "1"}};
  for (int s = 0; s < 4; ++s)
    for (int k = 0; k < 4; ++k) {
      NCPoly g = A->gen(gens[k]);
      v.need(c.phi(s).apply(g) == A->parse(alpha[s][k]) * g, "alpha matrix at (" + std::to_string(s + 1) + ", " + gens[k] + ")");
    }
  v.need(c.vartheta() == b->form("theta(1) + a*theta(2) + d*theta(3) + theta(4)"), "vartheta");
  CheckReport r = glpq2_checks(c);
  v.need(r.ok(), "coframe checks (" + std::to_string(r.failures()) + " failed)");
  for (size_t s = 0; s < 4; ++s) {
    Form img = c.theta_image(static_cast<int>(s), 1);
    v.need(img == A->parse("1/(p*q)")*c.theta(1), "phi_s(theta2) = theta2/r");
    for (int t : {0, 2, 3}) v.need(c.theta_image(static_cast<int>(s), t) == c.theta(t), "other theta fixed");
  }
  return v;
}

// --------------------------------------------------------------------- 9

Verdict torsion_free() {
  Verdict v;
  auto b = load_preset("quantum_plane_a");
  const Calculus& c = *b->calculus;
  auto conds = torsion_free_conditions(c);
  std::set<std::string> got;
  for (auto& e : conds.equations) got.insert(e.normalized(c));
  std::set<std::string> want = {"V[1,2,1] = V[1,1,2] + 1", "V[2,2,1] = V[2,1,2] - 1"};
  v.need(got == want, "exactly the two quadrangle equations");
  return v;
}

// -------------------------------------------------------------------- 10

Verdict metric_classes() {
  Verdict v;
  auto b = load_preset("glpq2");
  const Calculus& c = *b->calculus;
  const Algebra& A = c.algebra();
  auto scan = glpq2_metric_scan(c, 2);
  std::set<std::string> factors;
  for (auto& m : scan) factors.insert(m.factor.to_string());
  std::set<std::string> want = {A->one().to_string(), A->parse("p*q").to_string(), A->parse("(p*q)^2").to_string()};
  v.need(factors == want, "three scaling classes 1, r, r^2");
  Metric g;
  g.symmetric = true;
  bool nonzero = false;
  for (auto& m : scan)
    if (!m.monomials.empty()) {
      g.g[m.component] = m.monomials.back();
      nonzero = true;
    }
  v.need(nonzero, "some component admits a monomial");
  v.need(metric_invariance(c, g).ok(), "scanned assignment is invariant");
  Connection conn;
  for (int s = 0; s < 4; ++s)
    for (int a = 0; a < 4; ++a) conn.set(a, s, a, A->one());
  auto comp = metric_compatibility(c, conn, g);
  v.need(comp.agree(), "compatibility routes agree");
  return v;
}

// -------------------------------------------------------------------- 11

Verdict tensor_presets() {
  Verdict v;
  auto q = load_preset("tensor_qplane");
  equal(v, *q, "x*y", "q*y*x");
  equal(v, *q, "x*d(x)", "p*q*d(x)*x");
  equal(v, *q, "y*d(x)", "p*d(x)*y");
  equal(v, *q, "y*d(y)", "p*q*d(y)*y");
  equal(v, *q, "x*d(y)", "q*d(y)*x + (p*q - 1)*d(x)*y");
  auto h = load_preset("tensor_hplane");
  equal(v, *h, "x*y - y*x", "h*y^2");
  equal(v, *h, "[x, d(x)]", "(p - h)*(d(y)*(x + h*y) - d(x)*y)");
  equal(v, *h, "[y, d(x)]", "-h*d(y)*y");
  equal(v, *h, "[y, d(y)]", "0");
  equal(v, *h, "[x, d(y)]", "h*d(y)*y");
  return v;
}

// -------------------------------------------------------------------- 12

Verdict properties() {
  Verdict v;
  int run = 0, na = 0;
  for (auto& id : preset_ids()) {
    auto b = load_preset(id);
    for (auto& p : props::names()) {
      auto r = props::run(*b, p, 200, props::seed_for(id, p));
      if (!r.applicable) {
        ++na;
        continue;
      }
      run += r.instances;
      v.need(r.failures == 0, id + "/" + p + ": " + r.first_failure);
    }
  }
  v.notes.insert(v.notes.begin(), std::to_string(run) + " instances, " + std::to_string(na) + " inapplicable pairs");
  return v;
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"shift calculus on C[x]", shift_calculus},
      {"shift determinant is Vandermonde, n = 2..5", vandermonde},
      {"quantum plane cases a, b, c", quantum_plane},
      {"Heisenberg brackets", heisenberg},
      {"h-plane brackets, r = 1 two-forms and centrality", h_plane},
      {"Z3 constants and derived identities", z3},
      {"twisted Heisenberg two-forms", twisted_heisenberg},
      {"GL_pq(2) coframe", glpq2},
      {"torsion-free conditions on the quantum plane", torsion_free},
      {"metric scaling classes and compatibility routes", metric_classes},
      {"tensor presets", tensor_presets},
      {"property suites, 200 instances each", properties},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.ok = false;
      v.notes = {std::string("exception: ") + e.what()};
    }
    std::cout << (v.ok ? "PASS" : "FAIL") << "  " << i + 1 << ". " << criteria[i].first << "\n";
    if (!v.ok) {
      ++failed;
      for (auto& n : v.notes) std::cerr << "    " << n << "\n";
    }
  }
  std::cout.flush();
  return failed ? 1 : 0;
}
