#include "nccalc/presets.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>

#include "nccalc/error.hpp"

namespace nccalc {

namespace {

const char* kPolyShiftS12 = R"(
[meta]
id = poly_shift_S12
title = C[x] with the shifts x -> x + 1 and x -> x + 2

[generators]
names = [x]

[directions]
labels = [1, 2]
group = Z
element.1 = (1)
element.2 = (2)

[automorphisms]
1.x = x + 1
inverse.1.x = x - 1
2.x = x + 2
inverse.2.x = x - 2

[fixtures]
theta(1) = 2*(1 + x)*d(x) - d(x^2)
theta(2) = -(1/2 + x)*d(x) + 1/2*d(x^2)
d(x^2) = 2*x*theta(1) + theta(1) + 4*x*theta(2) + 4*theta(2)
Delta(theta(1)) = 0
Delta(theta(2)) = theta(1)*theta(1)
theta(2)*theta(1) = -theta(1)*theta(2)
theta(2)*theta(2) = 0
zeta = 0
)";

const char* kPolyShiftSym = R"(
[meta]
id = poly_shift_sym
title = C[x] with the shifts x -> x - 1 and x -> x + 1

[generators]
names = [x]

[directions]
labels = [-1, 1]
group = Z
element.-1 = (-1)
element.1 = (1)

[automorphisms]
-1.x = x - 1
inverse.-1.x = x + 1
1.x = x + 1
inverse.1.x = x - 1

[fixtures]
theta(-1) = -1/2*((x + 1)^2 - x^2)*d(x) + 1/2*d(x^2)
theta(1) = 1/2*((x - 1)^2 - x^2)*d(x) + 1/2*d(x^2)
vartheta = d(x^2) - 2*x*d(x)
vartheta = [d(x), x]
theta(-1)*theta(-1) = 0
theta(1)*theta(1) = 0
Delta(theta(-1)) = 0
Delta(theta(1)) = 0
zeta = theta(-1)*theta(1) + theta(1)*theta(-1)
)";

const char* kQuantumPlaneA = R"(
[meta]
id = quantum_plane_a
title = quantum plane xy = qyx, alpha = beta = delta = pq, gamma = 1

[params]
names = [q, p]
side_conditions = [p*q - 1]

[generators]
names = [x, y]

[relations]
x*y = q*y*x

[directions]
labels = [1, 2]
group = Z^2
element.1 = (1,0)
element.2 = (0,1)

[automorphisms]
1.x = 1/(p*q)*x
1.y = 1/(p*q)*y
2.y = 1/(p*q)*y

[fixtures]
x*d(x) = p*q*d(x)*x
y*d(x) = p*d(x)*y
y*d(y) = p*q*d(y)*y
x*d(y) = q*d(y)*x + (p*q - 1)*d(x)*y
d(x) = (1 - p*q)*theta(1)*x
d(y) = (1 - p*q)*theta(1)*y + (1 - p*q)*theta(2)*y
theta(1)*theta(1) = 0
theta(2)*theta(2) = 0
theta(2)*theta(1) = -theta(1)*theta(2)
d(vartheta) = 0
zeta = 0
d(x)*d(x) = 0
not-central: theta(1)
not-central: theta(2)

[connection]
V[1,1,1] = 1
V[2,1,2] = 1
V[1,2,1] = 1
V[2,2,2] = 1

[metric]
symmetric = true
g[1,1] = 1
g[2,2] = 1
)";

const char* kQuantumPlaneB = R"(
[meta]
id = quantum_plane_b
title = quantum plane xy = qyx, gamma = alpha, beta = 1

[params]
names = [q, alpha, delta]
side_conditions = [alpha - 1, delta - 1, alpha - delta]

[generators]
names = [x, y]

[relations]
x*y = q*y*x

[directions]
labels = [1, 2]
group = Z^2
element.1 = (1,0)
element.2 = (0,1)

[automorphisms]
1.x = 1/alpha*x
2.x = 1/alpha*x
2.y = 1/delta*y

[fixtures]
x*d(x) = alpha*d(x)*x
x*d(y) = q*alpha*d(y)*x
y*d(y) = delta*d(y)*y
y*d(x) = 1/q*d(x)*y + (alpha - 1)*d(y)*x
theta(2)*theta(1) = -theta(1)*theta(2)
d(vartheta) = 0
zeta = 0
)";

const char* kQuantumPlaneC = R"(
[meta]
id = quantum_plane_c
title = quantum plane xy = qyx, beta = gamma = 1

[params]
names = [q, alpha, delta]
side_conditions = [alpha - 1, delta - 1]

[generators]
names = [x, y]

[relations]
x*y = q*y*x

[directions]
labels = [1, 2]
group = Z^2
element.1 = (1,0)
element.2 = (0,1)

[automorphisms]
1.x = 1/alpha*x
2.y = 1/delta*y

[fixtures]
x*d(x) = alpha*d(x)*x
y*d(x) = 1/q*d(x)*y
y*d(y) = delta*d(y)*y
x*d(y) = q*d(y)*x
theta(2)*theta(1) = -theta(1)*theta(2)
d(vartheta) = 0
zeta = 0
)";

const char* kQuantumTorus = R"(
[meta]
id = quantum_torus
title = quantum plane with x^-1, y^-1 and generic scalings

[params]
names = [q, alpha, beta, gamma, delta]
side_conditions = [(1 - alpha)*(1 - delta) - (1 - beta)*(1 - gamma)]

[generators]
names = [x, y]
invertible = [x, y]

[relations]
x*y = q*y*x

[directions]
labels = [1, 2]
group = Z^2
element.1 = (1,0)
element.2 = (0,1)

[automorphisms]
1.x = 1/alpha*x
1.y = 1/beta*y
2.x = 1/gamma*x
2.y = 1/delta*y

[aliases]
A = 1 - alpha
B = 1 - beta
C = 1 - gamma
D = 1 - delta
N = (A*D - B*C)^-1

[fixtures]
d(x) = A*theta(1)*x + C*theta(2)*x
d(y) = B*theta(1)*y + D*theta(2)*y
theta(1) = N*(D*d(x)*x^-1 - C*d(y)*y^-1)
theta(2) = N*(A*d(y)*y^-1 - B*d(x)*x^-1)
x*d(x) = N*((alpha*A*D - gamma*B*C)*d(x) + (gamma - alpha)*A*C*d(y)*y^-1*x)*x
y*d(x) = N*(1/q*(beta*A*D - delta*B*C)*d(x)*y + (delta - beta)*A*C*d(y)*x)
y*d(y) = N*((beta - delta)*B*D*d(x)*x^-1*y + (delta*A*D - beta*B*C)*d(y))*y
x*d(y) = N*((alpha - gamma)*B*D*d(x)*y + q*(gamma*A*D - alpha*B*C)*d(y)*x)
zeta = 0
)";

const char* kHeisenberg = R"(
[meta]
id = heisenberg
title = Heisenberg algebra [x, y] = h with shifts of weight a and b

[params]
names = [h, a, b]

[generators]
names = [x, y]

[relations]
x*y = y*x + h

[directions]
labels = [1, 2]
group = Z^2
element.1 = (1,0)
element.2 = (0,1)

[automorphisms]
1.x = x + a
inverse.1.x = x - a
2.y = y + b
inverse.2.y = y - b

[weights]
1 = a
2 = b

[fixtures]
[d(x), x] = a*d(x)
[d(x), y] = 0
[d(y), x] = 0
[d(y), y] = b*d(y)
theta(1) = d(x)
theta(2) = d(y)
vartheta = 1/a*d(x) + 1/b*d(y)
zeta = 0
)";

const char* kHPlane = R"(
[meta]
id = h_plane
title = h-deformed plane [x, y] = h y^2 with y^-1, generic r

[params]
names = [h, p, r, t1]
side_conditions = [r - 1]

[generators]
names = [y, x]
invertible = [y]

[relations]
x*y = y*x + h*y^2

[rules]
x*y^-1 = y^-1*x - h

[directions]
labels = [1, 2]
group = Z^2
element.1 = (1,0)
element.2 = (0,1)

[automorphisms]
1.x = x + p*y
inverse.1.x = x - p*y
2.x = 1/r*x
2.y = 1/r*y

[weights]
1 = t1
2 = 1 - r

[aliases]
t2 = 1 - r

[fixtures]
d(x) = p/t1*theta(1)*y + (1 - r)/t2*theta(2)*x
d(y) = (1 - r)/t2*theta(2)*y
x*d(x) = p/t1*theta(1)*(y*x + (h - p)*y^2) + (r - r^2)/t2*theta(2)*x^2
x*d(y) = (r - r^2)/t2*theta(2)*(y*x + h*y^2)
y*d(x) = p/t1*theta(1)*y^2 + (r - r^2)/t2*theta(2)*(x*y - h*y^2)
y*d(y) = (r - r^2)/t2*theta(2)*y^2
theta(1) = t1/p*(d(x) - d(y)*y^-1*x)*y^-1
theta(2) = t2/(1 - r)*d(y)*y^-1
[x, d(x)] = (p - h)*(d(y)*(x + h*y) - d(x)*y) + (r - 1)*d(y)*y^-1*x^2
[y, d(x)] = -h*d(y)*y + (r - 1)*d(y)*x
[y, d(y)] = (r - 1)*d(y)*y
[x, d(y)] = r*h*d(y)*y + (r - 1)*d(y)*x
theta(1)*theta(1) = 0
theta(2)*theta(2) = 0
theta(2)*theta(1) = -theta(1)*theta(2)
Delta(theta(1)) = 0
Delta(theta(2)) = 0
zeta = 0
)";

const char* kHPlaneR1 = R"(
[meta]
id = h_plane_r1
title = h-deformed plane, limit r = 1 with t2 = 1 - r

[params]
names = [h, p, t1]

[generators]
names = [y, x]
invertible = [y]

[relations]
x*y = y*x + h*y^2

[rules]
x*y^-1 = y^-1*x - h

[directions]
labels = [1, 2]
group = Z^2
element.1 = (1,0)
element.2 = (0,1)

[automorphisms]
1.x = x + p*y
inverse.1.x = x - p*y

[weights]
1 = t1

[derivations]
2.x = x
2.y = y

[two-forms]
relation = theta(1)*theta(1) = 0
relation = theta(2)*theta(2) = 0
relation = theta(2)*theta(1) = -theta(1)*theta(2)
dtheta.1 = 0
dtheta.2 = 0

[fixtures]
d(x) = p/t1*theta(1)*y + theta(2)*x
d(y) = theta(2)*y
[x, d(x)] = (p - h)*(d(y)*(x + h*y) - d(x)*y)
[y, d(x)] = -h*d(y)*y
[y, d(y)] = 0
[x, d(y)] = h*d(y)*y
d(x)*d(x) = (p - h)*d(x)*d(y)
d(y)*d(y) = 0
d(x)*d(y) + d(y)*d(x) = 0
central: theta(2)
not-central: theta(1)
)";

const char* kZ3Root = R"(
[meta]
id = z3_root_of_unity
title = free group algebra on x, y with the Z3 action by q, q^2

[generators]
names = [q, x, y]
invertible = [x, y]
central = [q]

[rules]
q*q = -q - 1

[directions]
labels = [1, 2]
group = Z3
element.1 = (1)
element.2 = (2)

[automorphisms]
1.x = q*x
1.y = q^2*y
1.x^-1 = q^2*x^-1
1.y^-1 = q*y^-1
inverse.1.x = q^2*x
inverse.1.y = q*y
inverse.1.x^-1 = q*x^-1
inverse.1.y^-1 = q^2*y^-1
2.x = q^2*x
2.y = q*y
2.x^-1 = q*x^-1
2.y^-1 = q^2*y^-1
inverse.2.x = q*x
inverse.2.y = q^2*y
inverse.2.x^-1 = q^2*x^-1
inverse.2.y^-1 = q*y^-1

[weights]
1 = q - 1
inverse.1 = -(q + 2)/3
2 = q - 1
inverse.2 = -(q + 2)/3

[fixtures]
q^3 = 1
d(x) = x*theta(1) - q^2*x*theta(2)
d(y) = -q^2*y*theta(1) + y*theta(2)
theta(1) = (2 + q)/3*(x^-1*d(x) + q^2*y^-1*d(y))
theta(2) = (2 + q)/3*(q^2*x^-1*d(x) + y^-1*d(y))
d(x)*x = -x*d(x) + x^2*y^-1*d(y)
d(x)*y = -x*d(y)
d(y)*y = -y*d(y) + y^2*x^-1*d(x)
d(y)*x = -y*d(x)
d(x^2) = x^2*y^-1*d(y)
d(y^2) = y^2*x^-1*d(x)
d(x^3) = 0
d(y^3) = 0
d(x*y) = 0
d(y*x) = 0
constant: x^3
constant: y^3
constant: x*y
constant: y*x
d(x^2) = x^3*(y*x)^-1*d(y)
d(y^2) = y^3*(x*y)^-1*d(x)
x^2 = x^3*(y*x)^-1*y
y^2 = y^3*(x*y)^-1*x
)";

const char* kZ3Quotient = R"(
[meta]
id = z3_quotient
title = quotient of the Z3 example by x^3 = y^3 = xy = yx = 1

[generators]
names = [q, x, y]
central = [q]

[rules]
q*q = -q - 1
x*x = y
y*y = x
x*y = 1
y*x = 1

[directions]
labels = [1, 2]
group = Z3
element.1 = (1)
element.2 = (2)

[automorphisms]
1.x = q*x
1.y = q^2*y
inverse.1.x = q^2*x
inverse.1.y = q*y
2.x = q^2*x
2.y = q*y
inverse.2.x = q*x
inverse.2.y = q^2*y

[weights]
1 = q - 1
inverse.1 = -(q + 2)/3
2 = q - 1
inverse.2 = -(q + 2)/3

[aliases]
e0 = (1 + x + x^2)/3
e1 = (1 + q^2*x + q*x^2)/3
e2 = (1 + q*x + q^2*x^2)/3

[fixtures]
x^2 = y
y^2 = x
x^3 = 1
e0*e0 = e0
e1*e1 = e1
e2*e2 = e2
e0*e1 = 0
e0*e2 = 0
e1*e2 = 0
e0 + e1 + e2 = 1
d(x^3) = 0
constant: x^3
)";

const char* kTwistedHeisenberg2 = R"(
[meta]
id = twisted_heisenberg_2
title = Heisenberg algebra [x, y] = 1 with inner derivations of -y and x

[generators]
names = [x, y]

[relations]
x*y = y*x + 1

[directions]
labels = [1, 2]

[twists]
1 = -y
2 = x

[two-forms]
relation = theta(1)*theta(1) = 0
relation = theta(2)*theta(2) = 0
relation = theta(2)*theta(1) = -theta(1)*theta(2)

[fixtures]
theta(1) = d(x)
theta(2) = d(y)
vartheta = x*d(y) - y*d(x)
Delta(theta(1)) = 0
Delta(theta(2)) = 0
zeta = theta(1)*theta(2)
)";

const char* kTwistedHeisenberg3 = R"(
[meta]
id = twisted_heisenberg_3
title = Heisenberg algebra [x, y] = 1 with inner derivations of -y, x and yx

[generators]
names = [x, y]

[relations]
x*y = y*x + 1

[directions]
labels = [1, 2, 3]

[twists]
1 = -y
2 = x
3 = y*x

[two-forms]
relation = theta(1)*theta(1) = 0
relation = theta(2)*theta(2) = 0
relation = theta(3)*theta(3) = 0
relation = theta(3)*theta(1) = -theta(1)*theta(3)
relation = theta(3)*theta(2) = -theta(2)*theta(3)
delta.1 = -theta(1)*theta(3)
delta.2 = theta(2)*theta(3)
delta.3 = -theta(1)*theta(2) - theta(2)*theta(1)

[fixtures]
Delta(theta(1)) = -theta(1)*theta(3)
Delta(theta(2)) = theta(2)*theta(3)
Delta(theta(3)) = -theta(1)*theta(2) - theta(2)*theta(1)
zeta = -theta(2)*theta(1)
vartheta = -y*theta(1) + x*theta(2) + y*x*theta(3)
)";

const char* kGlpq2 = R"(
[meta]
id = glpq2
title = GL_{p,q}(2) bicovariant calculus in the coframe with b^-1, c^-1

[params]
names = [p, q]
side_conditions = [p*q - 1, p - q]

[generators]
names = [a, b, c, d]
invertible = [b, c]

[relations]
a*b = p*b*a
a*c = q*c*a
b*c = q/p*c*b
b*d = q*d*b
c*d = p*d*c
a*d = d*a + (p - 1/q)*b*c

[directions]
labels = [1, 2, 3, 4]
first_order_only = true

[twists]
1 = 1
2 = a
3 = d
4 = 1

[automorphisms]
1.a = p*q*a
1.c = p*q*c
2.a = p*q*a
2.b = q*b
2.c = p*c
3.a = p*q*a
3.b = q*b
3.c = p*c
4.a = p*q*a
4.b = p*q*b

[theta-images]
1.2 = 1/(p*q)*theta(2)
2.2 = 1/(p*q)*theta(2)
3.2 = 1/(p*q)*theta(2)
4.2 = 1/(p*q)*theta(2)

[aliases]
D = a*d - p*b*c

[fixtures]
vartheta = theta(1) + a*theta(2) + d*theta(3) + theta(4)
D*a = a*D
D*b = p/q*b*D
D*c = q/p*c*D
D*d = d*D
theta(2)*a = p*q*a*theta(2)
theta(4)*b = p*q*b*theta(4)
)";

const char* kTensorQPlane = R"(
[meta]
id = tensor_qplane
title = commutative lattice calculus on u, v tensored with the quantum plane U, V

[params]
names = [q, p]

[generators]
names = [u, v, U, V]

[relations]
v*u = u*v
U*V = q*V*U
U*u = u*U
V*u = u*V
U*v = v*U
V*v = v*V

[directions]
labels = [1, 2]
group = Z^2
element.1 = (1,0)
element.2 = (0,1)

[automorphisms]
1.u = 1/(p*q)*u
1.v = 1/(p*q)*v
2.v = 1/(p*q)*v

[aliases]
x = u*U
y = v*V

[fixtures]
u*d(u) = p*q*d(u)*u
v*d(u) = p*q*d(u)*v
u*d(v) = d(v)*u + (p*q - 1)*d(u)*v
v*d(v) = p*q*d(v)*v
x*y = q*y*x
x*d(x) = p*q*d(x)*x
y*d(x) = p*d(x)*y
y*d(y) = p*q*d(y)*y
x*d(y) = q*d(y)*x + (p*q - 1)*d(x)*y
)";

const char* kTensorHPlane = R"(
[meta]
id = tensor_hplane
title = calculus on functions of u, v (v invertible) tensored with the h-plane U, V

[params]
names = [h, p]

[generators]
names = [v, u, V, U]
invertible = [v]

[relations]
u*v = v*u
U*V = V*U + h*V^2
U*u = u*U
V*u = u*V
U*v = v*U
V*v = v*V

[directions]
labels = [1, 2]
group = Z^2
element.1 = (1,0)
element.2 = (0,1)

[automorphisms]
1.u = u + p*v
inverse.1.u = u - p*v

[derivations]
2.v = 1
2.u = u*v^-1
2.U = 0
2.V = 0

[two-forms]
relation = theta(1)*theta(1) = 0
relation = theta(2)*theta(2) = 0
relation = theta(2)*theta(1) = -theta(1)*theta(2)
dtheta.1 = 0
dtheta.2 = 0

[aliases]
x = v*U + u*V
y = v*V

[fixtures]
[v, d(v)] = 0
[v, d(u)] = 0
[u, d(v)] = 0
[u, d(u)] = p*(d(v)*u - d(u)*v)
x*y - y*x = h*y^2
[x, d(x)] = (p - h)*(d(y)*(x + h*y) - d(x)*y)
[y, d(x)] = -h*d(y)*y
[y, d(y)] = 0
[x, d(y)] = h*d(y)*y
)";

struct Entry {
  const char* id;
  std::string (*text)();
};

std::string z3_lattice() {
  Group g = Group::parse("Z3");
  return group_lattice_text("group_lattice_z3", g, {g.parse_element("(1)"), g.parse_element("(2)")});
}

std::string s3_lattice() {
  Group g = Group::parse("S3");
  return group_lattice_text("group_lattice_s3", g,
                            {g.parse_element("perm(1,0,2)"), g.parse_element("perm(2,1,0)"),
                             g.parse_element("perm(0,2,1)")});
}

#define NCCALC_TEXT(name) [] { return std::string(name); }

const std::vector<Entry>& catalog() {
  static const std::vector<Entry> entries = {
      {"poly_shift_S12", NCCALC_TEXT(kPolyShiftS12)},
      {"poly_shift_sym", NCCALC_TEXT(kPolyShiftSym)},
      {"quantum_plane_a", NCCALC_TEXT(kQuantumPlaneA)},
      {"quantum_plane_b", NCCALC_TEXT(kQuantumPlaneB)},
      {"quantum_plane_c", NCCALC_TEXT(kQuantumPlaneC)},
      {"quantum_torus", NCCALC_TEXT(kQuantumTorus)},
      {"heisenberg", NCCALC_TEXT(kHeisenberg)},
      {"h_plane", NCCALC_TEXT(kHPlane)},
      {"h_plane_r1", NCCALC_TEXT(kHPlaneR1)},
      {"z3_root_of_unity", NCCALC_TEXT(kZ3Root)},
      {"z3_quotient", NCCALC_TEXT(kZ3Quotient)},
      {"group_lattice_z3", z3_lattice},
      {"group_lattice_s3", s3_lattice},
      {"twisted_heisenberg_2", NCCALC_TEXT(kTwistedHeisenberg2)},
      {"twisted_heisenberg_3", NCCALC_TEXT(kTwistedHeisenberg3)},
      {"glpq2", NCCALC_TEXT(kGlpq2)},
      {"tensor_qplane", NCCALC_TEXT(kTensorQPlane)},
      {"tensor_hplane", NCCALC_TEXT(kTensorHPlane)},
  };
  return entries;
}

#undef NCCALC_TEXT

std::string trimmed(const std::string& s) {
  size_t a = s.find_first_not_of(" \n\t"), b = s.find_last_not_of(" \n\t");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1) + "\n";
}

void evaluate_fixtures(PresetBundle& B) {
  const Definition& D = B.definition;
  CheckReport R;
  R.title = "fixtures";
  if (!B.calculus) {
    if (!D.fixtures.empty()) R.add("fixtures", false, "fixtures need a calculus");
    B.checks.merge(R);
    return;
  }
  const Calculus& c = *B.calculus;
  for (auto& f : D.fixtures) {
    try {
      switch (f.kind) {
        case Fixture::Kind::Equal: {
          Form diff = c.parse_form(f.lhs, B.aliases) - c.parse_form(f.rhs, B.aliases);
          R.add(f.text(), diff.is_zero(), diff.is_zero() ? "" : c.format(diff));
          break;
        }
        case Fixture::Kind::Central:
        case Fixture::Kind::NotCentral: {
          auto w = is_central_one_form(c, c.parse_form(f.lhs, B.aliases));
          bool want = f.kind == Fixture::Kind::Central;
          std::string detail;
          if (!w.central) detail = "fails against " + w.generator + " in direction " + c.label(w.direction);
          R.add(f.text(), w.central == want, detail);
          break;
        }
        case Fixture::Kind::Constant: {
          Form v = c.parse_form(f.lhs, B.aliases);
          if (v.degrees() != std::set<size_t>{0} && !v.is_zero()) throw InputError("constant: needs a function");
          auto r = constants(c, {v.coefficient({})})[0];
          R.add(f.text(), r.by_differential && r.by_criterion,
                std::string("by d: ") + (r.by_differential ? "yes" : "no") +
                    ", by criterion: " + (r.by_criterion ? "yes" : "no"));
          break;
        }
      }
    } catch (const std::exception& e) {
      R.add(f.text(), false, e.what());
    }
  }
  B.checks.merge(R);
}

NCPoly num(const Algebra& A, const std::string& s) { return A->parse(s); }

}  // namespace

Form PresetBundle::form(const std::string& expr) const {
  if (!calculus) throw InputError("preset " + id + " has no calculus");
  return calculus->parse_form(expr, aliases);
}

std::vector<std::string> preset_ids() {
  std::vector<std::string> out;
  for (auto& e : catalog()) out.push_back(e.id);
  return out;
}

bool is_preset(const std::string& id) {
  auto& c = catalog();
  return std::any_of(c.begin(), c.end(), [&](const Entry& e) { return id == e.id; });
}

std::string preset_text(const std::string& id) {
  for (auto& e : catalog())
    if (id == e.id) return trimmed(e.text());
  throw InputError("unknown preset '" + id + "'");
}

BundlePtr build_bundle(const std::string& text, const std::vector<std::string>& extra_side_conditions) {
  auto B = std::make_shared<PresetBundle>();
  B->text = text;
  B->definition = parse_definition(text);
  B->id = B->definition.id;
  Definition& D = B->definition;
  for (auto& s : extra_side_conditions) D.spec.side_conditions.push_back(s);
  B->checks.title = B->id.empty() ? "definition" : B->id;
  SideConditionRecorder rec;
  if (D.has_calculus) {
    B->calculus = Calculus::build(D.spec);
    const Calculus& c = *B->calculus;
    for (auto& [name, expr] : D.aliases) B->aliases[name] = c.parse_form(expr, B->aliases);
    if (c.has_two_forms()) {
      if (c.is_inner()) {
        B->checks.merge(verify_two_forms(c));
        if (D.spec.two_forms && std::any_of(D.spec.directions.begin(), D.spec.directions.end(), [](auto& d) {
              return d.mode == DirectionMode::Twist;
            }))
          B->checks.merge(verify_twisted_two_forms(c, *D.spec.two_forms));
      } else {
        B->checks.merge(verify_d_squared(c));
      }
    }
    if (D.connection_text) B->connection = parse_connection(c, *D.connection_text);
    if (D.metric_text) B->metric = parse_metric(c, *D.metric_text);
  } else if (!D.aliases.empty()) {
    throw InputError("aliases need a calculus");
  }
  evaluate_fixtures(*B);
  if (B->calculus) {
    if (B->id == "glpq2") B->checks.merge(glpq2_checks(*B->calculus));
    if (B->id.rfind("group_lattice", 0) == 0) B->checks.merge(group_lattice_differentiability(*B->calculus));
  }
  B->assumptions = rec.conditions();
  return B;
}

BundlePtr load_preset(const std::string& id) {
  static std::mutex mu;
  static std::map<std::string, BundlePtr> cache;
  std::string text = preset_text(id);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(id); it != cache.end()) return it->second;
  }
  BundlePtr b;
  try {
    b = build_bundle(text);
  } catch (const InputError& e) {
    throw InconsistencyError("preset " + id + ": " + e.what());
  }
  if (!b->checks.ok()) {
    std::string first;
    for (auto& i : b->checks.items)
      if (!i.ok) {
        first = i.what + (i.detail.empty() ? "" : " (" + i.detail + ")");
        break;
      }
    throw InconsistencyError("preset " + id + " fails " + std::to_string(b->checks.failures()) +
                             " check(s), first: " + first);
  }
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(id, b).first->second;
}

// ------------------------------------------------------------ group lattice

std::string group_lattice_text(const std::string& id, const Group& g, const std::vector<GroupElement>& S) {
  auto elems = g.elements();
  size_t n = elems.size();
  auto index_of = [&](const GroupElement& e) {
    auto ne = g.normalize(e);
    for (size_t i = 0; i < n; ++i)
      if (elems[i] == ne) return i;
    throw InputError("element outside the group");
  };
  auto e_expr = [&](size_t k) {
    if (k + 1 < n) return "e" + std::to_string(k);
    std::string s = "1";
    for (size_t i = 0; i + 1 < n; ++i) s += " - e" + std::to_string(i);
    return s;
  };
  std::vector<size_t> s_index;
  for (auto& s : S) {
    size_t k = index_of(s);
    if (g.normalize(s) == g.identity()) throw InputError("S must not contain the unit");
    s_index.push_back(k);
  }
  auto label_of = [&](const GroupElement& e) -> std::optional<std::string> {
    size_t k = index_of(e);
    for (size_t i = 0; i < S.size(); ++i)
      if (s_index[i] == k) return std::to_string(i + 1);
    return std::nullopt;
  };
  bool closed = true;
  for (auto& s : S)
    for (auto& t : S)
      if (!label_of(g.mul(g.mul(s, t), g.inverse(s)))) closed = false;

  std::ostringstream o;
  o << "[meta]\nid = " << id << "\ntitle = functions on " << g.name() << " with right translations by S\n\n";
  o << "[generators]\nnames = [";
  for (size_t i = 0; i + 1 < n; ++i) o << (i ? ", " : "") << "e" << i;
  o << "]\n\n[rules]\n";
  for (size_t i = 0; i + 1 < n; ++i)
    for (size_t j = 0; j + 1 < n; ++j)
      o << "e" << i << "*e" << j << " = " << (i == j ? "e" + std::to_string(i) : "0") << "\n";
  o << "\n[directions]\nlabels = [";
  for (size_t i = 0; i < S.size(); ++i) o << (i ? ", " : "") << i + 1;
  o << "]\ngroup = " << g.name() << "\n";
  for (size_t i = 0; i < S.size(); ++i) o << "element." << i + 1 << " = " << g.format(S[i]) << "\n";
  o << "\n[automorphisms]\n";
  for (size_t i = 0; i < S.size(); ++i) {
    GroupElement si = g.inverse(S[i]);
    for (size_t h = 0; h + 1 < n; ++h) o << i + 1 << ".e" << h << " = " << e_expr(index_of(g.mul(elems[h], si))) << "\n";
    for (size_t h = 0; h + 1 < n; ++h)
      o << "inverse." << i + 1 << ".e" << h << " = " << e_expr(index_of(g.mul(elems[h], S[i]))) << "\n";
  }
  if (closed) {
    bool any = false;
    std::ostringstream t;
    for (size_t i = 0; i < S.size(); ++i)
      for (size_t j = 0; j < S.size(); ++j) {
        auto l = *label_of(g.mul(g.mul(S[i], S[j]), g.inverse(S[i])));
        if (l == std::to_string(j + 1)) continue;
        t << i + 1 << "." << j + 1 << " = theta(" << l << ")\n";
        any = true;
      }
    if (any) o << "\n[theta-images]\n" << t.str();
  }
  return o.str();
}

CheckReport group_lattice_differentiability(const Calculus& c) {
  CheckReport R;
  R.title = "R_s pullbacks";
  for (size_t s = 0; s < c.size(); ++s) {
    std::vector<Form> images;
    for (size_t t = 0; t < c.size(); ++t) images.push_back(c.theta_image(s, t));
    auto d = check_differentiability(c, c.phi(s), images, false);
    std::string detail;
    for (auto& i : d.report.items)
      if (!i.ok) {
        detail = i.what + ": " + i.detail;
        break;
      }
    R.add("R_" + c.label(s) + " differentiable", d.report.ok(), detail);
  }
  return R;
}

// --------------------------------------------------------------- GL_{p,q}(2)

MatrixBimodule glpq2_bimodule(const Algebra& A) {
  auto P = [&](const std::string& s) { return num(A, s); };
  NCPoly z = NCPoly(A, Scalar());
  using M = MatrixBimodule::Matrix;
  auto blank = [&] { return M(4, std::vector<NCPoly>(4, z)); };
  std::map<std::string, M> t;
  // tt_i f = Σ_j Φ(f)_ij tt_j
  auto ac_like = [&](const std::string& g, const std::string& h) {
    M m = blank();
    m[0][0] = P("p*q*" + g);
    m[0][2] = P("(p*q - 1)*" + h);
    m[1][1] = P("q*" + g);
    m[1][3] = P("(p*q - 1)/p*" + h);
    m[2][2] = P("p*" + g);
    m[3][3] = P(g);
    return m;
  };
  auto bd_like = [&](const std::string& g, const std::string& h) {
    M m = blank();
    m[0][0] = P(g);
    m[0][1] = P("(p*q - 1)*" + h);
    m[0][3] = P("(p*q - 1)^2/(p*q)*" + g);
    m[1][1] = P("q*" + g);
    m[2][2] = P("p*" + g);
    m[2][3] = P("(p*q - 1)/q*" + h);
    m[3][3] = P("p*q*" + g);
    return m;
  };
  t["a"] = ac_like("a", "b");
  t["c"] = ac_like("c", "d");
  t["b"] = bd_like("b", "a");
  t["d"] = bd_like("d", "c");
  return MatrixBimodule(A, {"tt1", "tt2", "tt3", "tt4"}, t);
}

std::vector<MatrixBimodule::Vec> glpq2_thetas(const MatrixBimodule& m) {
  const Algebra& A = m.algebra();
  auto P = [&](const std::string& s) { return num(A, s); };
  auto vec = [&](const std::string& pre, std::vector<std::string> comps) {
    MatrixBimodule::Vec v;
    NCPoly f = P(pre);
    for (auto& s : comps) v.push_back(f * P(s));
    return v;
  };
  return {
      vec("1/(p*q - 1)*c^-1*b^-1", {"b*c", "-1/p*a*c", "b*d", "-1/p*a*d"}),
      vec("q/(p*q - 1)*c^-1*b^-1", {"0", "c", "0", "d"}),
      vec("-1/(p*(p*q - 1))*c^-1*b^-1", {"0", "0", "b", "-1/(p*q)*a"}),
      vec("-1/(p*(p*q - 1))*c^-1*b^-1", {"0", "0", "0", "a*d - p*b*c"}),
  };
}

MatrixBimodule::Vec glpq2_differential(const MatrixBimodule& m, const std::string& gen) {
  const Algebra& A = m.algebra();
  // dT = T tt with T = [[a, b], [c, d]] and tt = [[tt1, tt2], [tt3, tt4]]
  static const std::map<std::string, std::array<const char*, 4>> table = {
      {"a", {"a", "0", "b", "0"}},
      {"b", {"0", "a", "0", "b"}},
      {"c", {"c", "0", "d", "0"}},
      {"d", {"0", "c", "0", "d"}},
  };
  auto it = table.find(gen);
  if (it == table.end()) throw InputError("no differential for '" + gen + "'");
  MatrixBimodule::Vec v;
  for (auto* s : it->second) v.push_back(A->parse(s));
  return v;
}

CheckReport glpq2_checks(const Calculus& c) {
  CheckReport R;
  R.title = "glpq2 coframe";
  const Algebra& A = c.algebra();
  MatrixBimodule m = glpq2_bimodule(A);
  R.merge(m.verify());
  auto th = glpq2_thetas(m);
  const std::vector<std::string> gens = {"a", "b", "c", "d"};
  for (size_t s = 0; s < 4; ++s)
    for (auto& g : gens) {
      NCPoly f = A->gen(g);
      auto diff = MatrixBimodule::sub(m.right_mul(th[s], f), MatrixBimodule::left_mul(c.phi(s).apply(f), th[s]));
      R.add("theta(" + c.label(s) + ")*" + g + " = phi(" + c.label(s) + ", " + g + ")*theta(" + c.label(s) + ")",
            m.is_zero(diff), m.format(diff));
    }
  MatrixBimodule::Vec vt = m.zero();
  for (size_t s = 0; s < 4; ++s) vt = MatrixBimodule::add(vt, MatrixBimodule::left_mul(c.lambda(s), th[s]));
  for (auto& g : gens) {
    NCPoly f = A->gen(g);
    auto df = glpq2_differential(m, g);
    auto comm = MatrixBimodule::sub(m.right_mul(vt, f), MatrixBimodule::left_mul(f, vt));
    R.add("[vartheta, " + g + "] = d(" + g + ")", m.is_zero(MatrixBimodule::sub(comm, df)),
          m.format(MatrixBimodule::sub(comm, df)));
    MatrixBimodule::Vec es = m.zero();
    for (size_t s = 0; s < 4; ++s) es = MatrixBimodule::add(es, MatrixBimodule::left_mul(c.e(s, f), th[s]));
    R.add("sum e_s(" + g + ") theta(s) = d(" + g + ")", m.is_zero(MatrixBimodule::sub(es, df)),
          m.format(MatrixBimodule::sub(es, df)));
  }
  std::vector<Form> images;
  for (size_t s = 0; s < 4; ++s) {
    images.clear();
    for (size_t t = 0; t < 4; ++t) images.push_back(c.theta_image(s, t));
    auto d = check_differentiability(c, c.phi(s), images, true);
    std::string detail;
    for (auto& i : d.report.items)
      if (!i.ok) {
        detail = i.what + ": " + i.detail;
        break;
      }
    R.add("phi(" + c.label(s) + ") differentiable", d.report.ok(), detail);
    R.add("phi(" + c.label(s) + ")(vartheta) = vartheta", d.vartheta_phi.is_zero(), c.format(d.vartheta_phi));
  }
  return R;
}

CheckReport glpq2_exponent_families(const Calculus& c, int max_exp) {
  CheckReport R;
  R.title = "glpq2 families";
  const Algebra& A = c.algebra();
  MatrixBimodule m = glpq2_bimodule(A);
  NCPoly Dq = A->parse("a*d - p*b*c");
  auto pw = [](const std::string& base, int e) { return "(" + base + ")^(" + std::to_string(e) + ")"; };
  struct Family {
    const char* name;
    std::vector<const char*> tail;  // components over tt1..tt4
    // exponents (X, Y, Z) for D^X b^Y c^Z; scalings of a, b, c, d
    std::function<std::array<std::string, 4>(int, int, int)> scale;
  };
  std::vector<Family> fams = {
      {"theta4", {"0", "0", "0", "1"},
       [&](int P, int N, int M) {
         return std::array<std::string, 4>{"p^(" + std::to_string(-N) + ")*q^(" + std::to_string(-M) + ")",
                                           "p*q*" + pw("p/q", M + P), pw("q/p", N + P),
                                           "p^(" + std::to_string(M + 1) + ")*q^(" + std::to_string(N + 1) + ")"};
       }},
      {"theta2", {"0", "c", "0", "d"},
       [&](int Q, int K, int L) {
         return std::array<std::string, 4>{
             "p^(" + std::to_string(-K) + ")*q^(" + std::to_string(-L) + ")",
             "p^(" + std::to_string(Q + L + 1) + ")*q^(" + std::to_string(-Q - L) + ")",
             "p^(" + std::to_string(-Q - K) + ")*q^(" + std::to_string(Q + K + 1) + ")",
             "p^(" + std::to_string(L + 1) + ")*q^(" + std::to_string(K + 1) + ")"};
       }},
      {"theta3", {"0", "0", "b", "-1/(p*q)*a"},
       [&](int Rr, int S, int T) {
         return std::array<std::string, 4>{
             "p^(" + std::to_string(-S) + ")*q^(" + std::to_string(-T) + ")",
             "p^(" + std::to_string(Rr + T + 1) + ")*q^(" + std::to_string(-Rr - T) + ")",
             "p^(" + std::to_string(-Rr - S) + ")*q^(" + std::to_string(Rr + S + 1) + ")",
             "p^(" + std::to_string(T + 1) + ")*q^(" + std::to_string(S + 1) + ")"};
       }},
      {"theta1", {"b*c", "-1/p*a*c", "b*d", "-1/p*a*d"},
       [&](int U, int V, int W) {
         return std::array<std::string, 4>{"p^(" + std::to_string(-V) + ")*q^(" + std::to_string(-W) + ")",
                                           pw("p/q", U + W + 1), "q^2*" + pw("q/p", U + V),
                                           "p^(" + std::to_string(W + 1) + ")*q^(" + std::to_string(V + 1) + ")"};
       }},
  };
  const std::vector<std::string> gens = {"a", "b", "c", "d"};
  for (auto& F : fams)
    for (int X = 0; X <= max_exp; ++X)
      for (int Y = 0; Y <= max_exp; ++Y)
        for (int Z = 0; Z <= max_exp; ++Z) {
          NCPoly pre = Dq.pow(X) * A->gen("b").pow(Y) * A->gen("c").pow(Z);
          MatrixBimodule::Vec v;
          for (auto* t : F.tail) v.push_back(pre * A->parse(t));
          auto sc = F.scale(X, Y, Z);
          bool ok = true;
          std::string detail;
          for (size_t k = 0; k < 4 && ok; ++k) {
            NCPoly f = A->gen(gens[k]);
            NCPoly img = A->parse(sc[k]) * f;
            auto diff = MatrixBimodule::sub(m.right_mul(v, f), MatrixBimodule::left_mul(img, v));
            if (!m.is_zero(diff)) {
              ok = false;
              detail = gens[k] + ": " + m.format(diff);
            }
          }
          R.add(std::string(F.name) + " exponents (" + std::to_string(X) + "," + std::to_string(Y) + "," +
                    std::to_string(Z) + ")",
                ok, detail);
        }
  return R;
}

std::vector<MetricClass> glpq2_metric_scan(const Calculus& c, int bound) {
  const Algebra& A = c.algebra();
  size_t n = c.size();
  Metric probe;
  probe.symmetric = true;
  for (size_t a = 0; a < n; ++a)
    for (size_t b = a; b < n; ++b) probe.g[{static_cast<int>(a), static_cast<int>(b)}] = A->one();
  auto inv = metric_invariance(c, probe);
  std::vector<MetricClass> out;
  std::vector<NCPoly> monos;
  for (int i = 0; i <= bound; ++i)
    for (int j = 0; j <= bound; ++j)
      for (int k = 0; k <= bound; ++k)
        for (int l = 0; l <= bound; ++l)
          monos.push_back(A->gen("a").pow(i) * A->gen("b").pow(j) * A->gen("c").pow(k) * A->gen("d").pow(l));
  for (size_t a = 0; a < n; ++a)
    for (size_t b = a; b < n; ++b) {
      MetricClass mc;
      mc.component = {static_cast<int>(a), static_cast<int>(b)};
      std::vector<NCPoly> factors;
      for (auto& it : inv.items)
        if (it.a == static_cast<int>(a) && it.b == static_cast<int>(b)) {
          if (!it.factor) throw InputError("metric scan needs scaling theta-images");
          factors.push_back(*it.factor);
        }
      if (factors.empty()) continue;
      bool uniform = std::all_of(factors.begin(), factors.end(), [&](auto& f) { return f == factors[0]; });
      if (!uniform) throw InconsistencyError("scaling factor depends on the direction");
      mc.factor = factors[0];
      for (auto& mono : monos) {
        bool ok = true;
        for (size_t s = 0; s < n && ok; ++s) ok = c.phi(s).apply(mono) == mc.factor * mono;
        if (ok) mc.monomials.push_back(mono);
      }
      out.push_back(mc);
    }
  return out;
}

}  // namespace nccalc
