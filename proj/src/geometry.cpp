#include "nccalc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <sstream>
#include <thread>

#include "nccalc/error.hpp"

namespace nccalc {

namespace {

void require_inner(const Calculus& c) {
  if (!c.is_inner()) throw InputError("connections need an inner calculus");
}

std::string coef_text(const Calculus& c, const NCPoly& f) { return c.format(Form(f)); }

bool is_unit_like(const NCPoly& f) { return f.is_scalar() && !f.is_zero(); }

}  // namespace

std::string format_tensor_words(const Calculus& c, const Form& t, bool l_product) {
  const char* sep = l_product ? " ⊗_L " : " ⊗ ";
  if (t.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (auto& [w, coef] : t.terms()) {
    std::string th;
    for (size_t k = 0; k < w.size(); ++k) {
      if (k) th += sep;
      th += "theta(" + c.label(w[k]) + ")";
    }
    std::string ct = coef_text(c, coef);
    bool neg = !ct.empty() && ct[0] == '-' && coef.terms().size() == 1;
    std::string body;
    if (w.empty()) {
      body = ct;
      neg = false;
    } else if (coef == c.algebra()->one()) {
      body = th;
    } else if (neg && -coef == c.algebra()->one()) {
      body = th;
    } else if (coef.terms().size() == 1) {
      body = (neg ? ct.substr(1) : ct) + "*" + th;
    } else {
      body = "(" + ct + ")*" + th;
    }
    if (first) out += (neg ? "-" : "") + body;
    else out += (neg ? " - " : " + ") + body;
    first = false;
  }
  return out;
}

namespace {

/// L-product: coefficients multiply, words concatenate.
Form l_concat(const Calculus& c, const Form& a, const Form& b) {
  Form r(c.algebra());
  for (auto& [w1, c1] : a.terms())
    for (auto& [w2, c2] : b.terms()) {
      ThetaWord w = w1;
      w.insert(w.end(), w2.begin(), w2.end());
      r.add(w, c1 * c2);
    }
  return r;
}

std::string v_name(const Calculus& c, const std::array<int, 3>& k) {
  return "V[" + c.label(k[0]) + "," + c.label(k[1]) + "," + c.label(k[2]) + "]";
}

int kind_rank(PairKind k) {
  switch (k) {
    case PairKind::Biangle: return 0;
    case PairKind::Triangle: return 1;
    case PairKind::Quadrangle: return 2;
    default: return 3;
  }
}

}  // namespace

NCPoly Connection::get(const Calculus& c, int upper, int s, int s2) const {
  auto it = V.find({upper, s, s2});
  return it == V.end() ? c.zero() : it->second;
}

void Connection::set(int upper, int s, int s2, const NCPoly& v) {
  if (v.is_zero()) V.erase({upper, s, s2});
  else V[{upper, s, s2}] = v;
}

NCPoly Metric::get(const Calculus& c, int s, int s2) const {
  auto it = g.find({s, s2});
  if (it != g.end()) return it->second;
  if (symmetric) {
    it = g.find({s2, s});
    if (it != g.end()) return it->second;
  }
  return c.zero();
}

std::string format_tensor(const Calculus& c, const FormTensor& t) {
  std::string out;
  for (auto& [i, w] : t) {
    if (w.is_zero()) continue;
    if (!out.empty()) out += " + ";
    out += "(" + c.format(w) + ") ⊗ theta(" + c.label(i) + ")";
  }
  return out.empty() ? "0" : out;
}

bool tensor_is_zero(const FormTensor& t) {
  return std::all_of(t.begin(), t.end(), [](auto& p) { return p.second.is_zero(); });
}

FormTensor tensor_sub(const FormTensor& a, const FormTensor& b) {
  FormTensor r = a;
  for (auto& [i, w] : b) {
    auto it = r.find(i);
    if (it == r.end()) r.emplace(i, -w);
    else it->second -= w;
  }
  return r;
}

FormTensor tensor_left_mul(const NCPoly& f, const FormTensor& t) {
  FormTensor r;
  for (auto& [i, w] : t) r.emplace(i, f * w);
  return r;
}

Form script_v(const Calculus& c, const Connection& conn, int s, const Form& alpha) {
  const auto& pinv = c.phi_inverse(s);
  Form r(c.algebra());
  for (auto& [w, coef] : alpha.terms()) {
    if (w.size() != 1) throw InputError("V_s acts on 1-forms");
    NCPoly pre = pinv.apply(coef);
    for (int s2 = 0; s2 < static_cast<int>(c.size()); ++s2) {
      NCPoly v = conn.get(c, w[0], s, s2);
      if (!v.is_zero()) r.add({s2}, pre * pinv.apply(v));
    }
  }
  return r;
}

FormTensor nabla(const Calculus& c, const Connection& conn, const Form& alpha) {
  require_inner(c);
  FormTensor r;
  Form vt = c.vartheta();
  for (auto& [w, coef] : alpha.terms()) {
    if (w.size() != 1) throw InputError("nabla acts on 1-forms");
    auto [it, _] = r.try_emplace(w[0], Form(c.algebra()));
    it->second += c.right_mul(vt, coef);
  }
  for (int s = 0; s < static_cast<int>(c.size()); ++s) {
    Form v = script_v(c, conn, s, alpha);
    for (auto& [w, coef] : v.terms()) {
      auto [it, _] = r.try_emplace(w[0], Form(c.algebra()));
      it->second -= c.right_mul(c.theta(s), coef);
    }
  }
  for (auto it = r.begin(); it != r.end();) it = it->second.is_zero() ? r.erase(it) : std::next(it);
  return r;
}

FormTensor nabla_extended(const Calculus& c, const Connection& conn, const FormTensor& t) {
  require_inner(c);
  FormTensor r;
  auto acc = [&](int j, const Form& f) {
    auto [it, _] = r.try_emplace(j, Form(c.algebra()));
    it->second += f;
  };
  for (auto& [i, omega] : t) {
    FormTensor ni = nabla(c, conn, c.theta(i));
    for (size_t deg : omega.degrees()) {
      Form part = omega.part(deg);
      acc(i, c.d_form(part));
      for (auto& [j, beta] : ni) {
        Form prod = c.wedge(part, beta);
        acc(j, deg % 2 ? -prod : prod);
      }
    }
  }
  for (auto it = r.begin(); it != r.end();) it = it->second.is_zero() ? r.erase(it) : std::next(it);
  return r;
}

Form wedge_projection(const Calculus& c, const FormTensor& t) {
  Form r(c.algebra());
  for (auto& [i, w] : t) r += c.wedge(w, c.theta(i));
  return r;
}

Form torsion(const Calculus& c, const Connection& conn, const Form& alpha) {
  return c.d_form(alpha) - wedge_projection(c, nabla(c, conn, alpha));
}

std::vector<Form> torsion_theta(const Calculus& c, const Connection& conn) {
  std::vector<Form> r;
  for (int s = 0; s < static_cast<int>(c.size()); ++s) r.push_back(torsion(c, conn, c.theta(s)));
  return r;
}

FormTensor curvature(const Calculus& c, const Connection& conn, const Form& alpha) {
  if (!c.has_two_forms()) throw InputError("curvature needs a two-form structure");
  FormTensor r = nabla_extended(c, conn, nabla(c, conn, alpha));
  for (auto& [i, w] : r) w = -w;
  return r;
}

// ------------------------------------------------------------- conditions

std::string TorsionEquation::normalized(const Calculus& c) const {
  // pivot: largest unknown with invertible coefficient
  std::optional<std::array<int, 3>> pivot;
  NCPoly pivot_inv;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    if (is_unit_like(it->second)) {
      pivot = it->first;
      pivot_inv = NCPoly(c.algebra(), it->second.scalar_value().inverse());
      break;
    }
    if (auto inv = it->second.syntactic_inverse()) {
      pivot = it->first;
      pivot_inv = *inv;
      break;
    }
  }
  auto render = [&](const std::vector<std::pair<std::array<int, 3>, NCPoly>>& terms, const NCPoly& k) {
    std::string out;
    auto push = [&](std::string body, bool neg) {
      if (out.empty()) out = (neg ? "-" : "") + body;
      else out += (neg ? " - " : " + ") + body;
    };
    for (auto& [key, coef] : terms) {
      std::string name = v_name(c, key);
      if (coef == c.algebra()->one()) push(name, false);
      else if (-coef == c.algebra()->one()) push(name, true);
      else if (coef.is_scalar()) {
        std::string t = coef_text(c, coef);
        bool neg = t[0] == '-';
        std::string body = neg ? t.substr(1) : t;
        if (body.find_first_of("+- ") != std::string::npos) body = "(" + body + ")";
        push(body + "*" + name, neg);
      } else {
        push(name + "*(" + coef_text(c, coef) + ")", false);
      }
    }
    if (!k.is_zero()) {
      std::string t = coef_text(c, k);
      bool neg = t[0] == '-' && k.terms().size() == 1;
      push(neg ? t.substr(1) : (k.terms().size() > 1 && !out.empty() ? "(" + t + ")" : t), neg);
    }
    return out.empty() ? std::string("0") : out;
  };
  if (!pivot) {
    std::vector<std::pair<std::array<int, 3>, NCPoly>> lhs(coeffs.begin(), coeffs.end());
    return render(lhs, c.zero()) + " = " + render({}, -constant);
  }
  std::vector<std::pair<std::array<int, 3>, NCPoly>> rhs;
  for (auto& [k, coef] : coeffs)
    if (k != *pivot) rhs.push_back({k, -(coef * pivot_inv)});
  return v_name(c, *pivot) + " = " + render(rhs, -(constant * pivot_inv));
}

NCPoly TorsionEquation::residue(const Calculus& c, const Connection& conn) const {
  NCPoly r = constant;
  for (auto& [k, coef] : coeffs) r += conn.get(c, k[0], k[1], k[2]) * coef;
  return r;
}

std::vector<const TorsionEquation*> TorsionConditions::of_kind(PairKind k) const {
  std::vector<const TorsionEquation*> r;
  for (auto& e : equations)
    if (e.kind == k) r.push_back(&e);
  return r;
}

TorsionConditions torsion_free_conditions(const Calculus& c) {
  require_inner(c);
  int n = static_cast<int>(c.size());
  Form vt = c.vartheta();
  TorsionConditions out;
  for (int s = 0; s < n; ++s) {
    // Θ(θ^s) = dθ^s - ϑθ^s + Σ V^s_{s',s''} θ^{s'}θ^{s''}
    Form k = c.d_form(c.theta(s)) - c.wedge(vt, c.theta(s));
    std::map<std::pair<int, int>, TorsionEquation> eqs;
    auto eq = [&](const ThetaWord& w) -> TorsionEquation& {
      auto [it, fresh] = eqs.try_emplace({w[0], w[1]});
      if (fresh) {
        it->second.upper = s;
        it->second.pair = {w[0], w[1]};
        it->second.kind = c.classify(w[0], w[1]).kind;
        it->second.constant = c.zero();
      }
      return it->second;
    };
    for (auto& [w, coef] : k.terms()) eq(w).constant += coef;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        Form red = c.reduce(Form::word(c.algebra(), {a, b}, c.algebra()->one()));
        for (auto& [w, coef] : red.terms()) {
          auto& e = eq(w);
          NCPoly& slot = e.coeffs.try_emplace({s, a, b}, c.zero()).first->second;
          slot += coef;
          if (slot.is_zero()) e.coeffs.erase({s, a, b});
        }
      }
    for (auto& [p, e] : eqs)
      if (!e.coeffs.empty() || !e.constant.is_zero()) out.equations.push_back(e);
  }
  std::stable_sort(out.equations.begin(), out.equations.end(), [](const TorsionEquation& a, const TorsionEquation& b) {
    return kind_rank(a.kind) < kind_rank(b.kind);
  });
  return out;
}

// ---------------------------------------------------------------- tensors

Form tensor_a(const Calculus& c, const Form& a, const Form& b) { return c.concat(a, b); }

Form apply_to_tensor(const Calculus& c, const AlgebraMorphism& phi, const std::vector<Form>& images, const Form& t) {
  Form r(c.algebra());
  for (auto& [w, coef] : t.terms()) {
    Form acc(phi.apply(coef));
    for (int k : w) acc = c.concat(acc, images[k]);
    r += acc;
  }
  return r;
}

Form phi_tensor(const Calculus& c, int s, const Form& t) {
  std::vector<Form> im;
  for (int k = 0; k < static_cast<int>(c.size()); ++k) im.push_back(c.theta_image(s, k));
  return apply_to_tensor(c, c.phi(s), im, t);
}

Form phi_inverse_tensor(const Calculus& c, int s, const Form& t) {
  std::vector<Form> im;
  for (int k = 0; k < static_cast<int>(c.size()); ++k) im.push_back(c.theta_inverse_image(s, k));
  return apply_to_tensor(c, c.phi_inverse(s), im, t);
}

Form to_l(const Calculus& c, const Form& t) {
  // c θ^{w0} ⊗_A X = c θ^{w0} ⊗_L φ_{w0}(X)
  Form r(c.algebra());
  for (auto& [w, coef] : t.terms()) {
    if (w.size() <= 1) {
      r.add(w, coef);
      continue;
    }
    Form tail = Form::word(c.algebra(), ThetaWord(w.begin() + 1, w.end()), c.algebra()->one());
    Form rest = to_l(c, phi_tensor(c, w[0], tail));
    r += l_concat(c, Form::word(c.algebra(), {w[0]}, coef), rest);
  }
  return r;
}

Form to_a(const Calculus& c, const Form& t) {
  Form r(c.algebra());
  for (auto& [w, coef] : t.terms()) {
    if (w.size() <= 1) {
      r.add(w, coef);
      continue;
    }
    Form tail = Form::word(c.algebra(), ThetaWord(w.begin() + 1, w.end()), c.algebra()->one());
    Form rest = phi_inverse_tensor(c, w[0], to_a(c, tail));
    r += coef * c.concat(c.theta(w[0]), rest);
  }
  return r;
}

Form tensor_l(const Calculus& c, const Form& a, const Form& b) {
  Form r(c.algebra());
  Form la = to_l(c, a);
  for (auto& [w, coef] : la.terms()) {
    Form t = b;
    for (size_t k = w.size(); k-- > 0;) t = c.concat(c.theta(w[k]), phi_inverse_tensor(c, w[k], t));
    r += coef * t;
  }
  return r;
}

Form script_v_tensor(const Calculus& c, const Connection& conn, int s, const Form& l) {
  const auto& pinv = c.phi_inverse(s);
  Form r(c.algebra());
  for (auto& [w, coef] : l.terms()) {
    Form acc(pinv.apply(coef));
    for (int k : w) acc = l_concat(c, acc, script_v(c, conn, s, c.theta(k)));
    r += acc;
  }
  return r;
}

Form metric_tensor(const Calculus& c, const Metric& g) {
  Form r(c.algebra());
  int n = static_cast<int>(c.size());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) r.add({a, b}, g.get(c, a, b));
  return r;
}

// ----------------------------------------------------------------- metrics

bool InvarianceReport::ok() const {
  return std::all_of(items.begin(), items.end(), [](auto& i) { return i.residue.is_zero(); });
}

CheckReport InvarianceReport::to_check(const Calculus& c) const {
  CheckReport r;
  r.title = "metric invariance";
  for (auto& i : items) {
    std::string comp = "g[" + c.label(i.a) + "," + c.label(i.b) + "]";
    std::string what = "phi_" + c.label(i.s) + "(" + comp + ") = ";
    if (i.factor) {
      what += i.factor->is_scalar() && i.factor->scalar_value().is_one() ? comp : "(" + coef_text(c, *i.factor) + ")*" + comp;
    } else {
      what += "invariant tensor component";
    }
    r.add(what, i.residue.is_zero(), i.residue.is_zero() ? "" : "residue " + coef_text(c, i.residue));
  }
  return r;
}

InvarianceReport metric_invariance(const Calculus& c, const Metric& g) {
  int n = static_cast<int>(c.size());
  Form gl = metric_tensor(c, g);
  InvarianceReport rep;
  for (int s = 0; s < n; ++s) {
    Form moved = to_l(c, phi_tensor(c, s, to_a(c, gl)));
    // scalar θ-images give a per-component scaling factor
    std::vector<std::optional<Scalar>> scale(n);
    for (int k = 0; k < n; ++k) {
      const Form& im = c.theta_image(s, k);
      if (im.terms().size() == 1 && im.terms().begin()->first == ThetaWord{k} && im.terms().begin()->second.is_scalar())
        scale[k] = im.terms().begin()->second.scalar_value();
    }
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        InvarianceItem it;
        it.s = s;
        it.a = a;
        it.b = b;
        if (scale[a] && scale[b]) it.factor = NCPoly(c.algebra(), (*scale[a] * *scale[b]).inverse());
        it.residue = moved.coefficient({a, b}) - gl.coefficient({a, b});
        rep.items.push_back(it);
      }
  }
  return rep;
}

bool CompatibilityReport::component_ok() const {
  return std::all_of(component_residue.begin(), component_residue.end(), [](auto& r) { return r.is_zero(); });
}

bool CompatibilityReport::tensor_ok() const {
  return std::all_of(tensor_residue.begin(), tensor_residue.end(), [](auto& r) { return r.is_zero(); });
}

bool CompatibilityReport::agree() const {
  for (size_t i = 0; i < index.size(); ++i)
    if (component_residue[i].is_zero() != tensor_residue[i].is_zero()) return false;
  return true;
}

CheckReport CompatibilityReport::to_check(const Calculus& c) const {
  CheckReport r;
  r.title = "metric compatibility";
  for (size_t i = 0; i < index.size(); ++i) {
    auto [s, a, b] = index[i];
    bool ok = component_residue[i].is_zero() && tensor_residue[i].is_zero();
    std::string what = "phi_" + c.label(s) + "(g[" + c.label(a) + "," + c.label(b) + "]) = sum g V V";
    r.add(what, ok, ok ? "" : "residue " + coef_text(c, component_residue[i]));
  }
  r.add("component and tensor routes agree", agree());
  return r;
}

CompatibilityReport metric_compatibility(const Calculus& c, const Connection& conn, const Metric& g) {
  int n = static_cast<int>(c.size());
  CompatibilityReport rep;
  Form gl = metric_tensor(c, g);
  for (int s = 0; s < n; ++s) {
    Form diff = script_v_tensor(c, conn, s, gl) - gl;
    for (int s1 = 0; s1 < n; ++s1)
      for (int s2 = 0; s2 < n; ++s2) {
        NCPoly sum = c.zero();
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            NCPoly gab = g.get(c, a, b);
            if (gab.is_zero()) continue;
            sum += gab * conn.get(c, a, s, s1) * conn.get(c, b, s, s2);
          }
        rep.index.push_back({s, s1, s2});
        rep.component_residue.push_back(c.phi(s).apply(g.get(c, s1, s2)) - sum);
        rep.tensor_residue.push_back(diff.coefficient({s1, s2}));
      }
  }
  return rep;
}

CheckReport levi_civita_check(const Calculus& c, const Connection& conn, const Metric& g) {
  CheckReport r;
  r.title = "Levi-Civita";
  auto tor = torsion_theta(c, conn);
  for (size_t s = 0; s < tor.size(); ++s)
    r.add("torsion of theta(" + c.label(static_cast<int>(s)) + ") vanishes", tor[s].is_zero(),
          tor[s].is_zero() ? "" : c.format(tor[s]));
  r.merge(metric_compatibility(c, conn, g).to_check(c));
  return r;
}

// ------------------------------------------------------------ grid search

namespace {

using Matrix = std::vector<std::vector<NCPoly>>;

template <class F>
void run_partitioned(size_t total, int jobs, F body) {
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(std::max<size_t>(total, 1))));
  if (jobs == 1) {
    body(size_t{0}, total, 0);
    return;
  }
  std::vector<std::thread> pool;
  size_t chunk = (total + jobs - 1) / jobs;
  for (int j = 0; j < jobs; ++j) {
    size_t lo = j * chunk, hi = std::min(total, lo + chunk);
    pool.emplace_back([=, &body] { body(lo, hi, j); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

std::vector<std::vector<Matrix>> compatible_matrices(const Calculus& c, const Metric& g,
                                                     const std::vector<NCPoly>& values, int jobs) {
  int n = static_cast<int>(c.size());
  size_t cells = static_cast<size_t>(n) * n;
  double size = std::pow(static_cast<double>(values.size()), static_cast<double>(cells));
  if (size > 5e7) throw InputError("grid too large: " + std::to_string(values.size()) + "^" + std::to_string(cells));
  size_t total = 1;
  for (size_t i = 0; i < cells; ++i) total *= values.size();
  std::vector<std::vector<Matrix>> out(n);
  for (int s = 0; s < n; ++s) {
    Matrix target(n, std::vector<NCPoly>(n));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) target[a][b] = c.phi(s).apply(g.get(c, a, b));
    std::vector<std::vector<std::pair<size_t, Matrix>>> parts(std::max(1, jobs));
    run_partitioned(total, jobs, [&](size_t lo, size_t hi, int slot) {
      for (size_t code = lo; code < hi; ++code) {
        Matrix m(n, std::vector<NCPoly>(n));
        size_t k = code;
        for (size_t cell = cells; cell-- > 0;) {
          m[cell / n][cell % n] = values[k % values.size()];
          k /= values.size();
        }
        bool ok = true;
        for (int s1 = 0; s1 < n && ok; ++s1)
          for (int s2 = 0; s2 < n && ok; ++s2) {
            NCPoly sum = c.zero();
            for (int a = 0; a < n; ++a)
              for (int b = 0; b < n; ++b) {
                NCPoly gab = g.get(c, a, b);
                if (!gab.is_zero()) sum += gab * m[a][s1] * m[b][s2];
              }
            ok = sum == target[s1][s2];
          }
        if (ok) parts[slot].push_back({code, m});
      }
    });
    std::vector<std::pair<size_t, Matrix>> merged;
    for (auto& p : parts) merged.insert(merged.end(), p.begin(), p.end());
    std::sort(merged.begin(), merged.end(), [](auto& a, auto& b) { return a.first < b.first; });
    for (auto& [code, m] : merged) out[s].push_back(m);
  }
  return out;
}

std::string LeviCivitaSearch::summary() const {
  if (found.empty()) return "no candidate found at this bound (" + std::to_string(candidates) + " compatible connections tried)";
  return std::to_string(found.size()) + " Levi-Civita connection(s) found at this bound out of " +
         std::to_string(candidates) + " compatible candidates; uniqueness is not asserted";
}

LeviCivitaSearch levi_civita_search(const Calculus& c, const Metric& g, const std::vector<NCPoly>& values, int jobs) {
  int n = static_cast<int>(c.size());
  auto per_s = compatible_matrices(c, g, values, jobs);
  LeviCivitaSearch out;
  size_t total = 1;
  for (auto& l : per_s) total *= l.size();
  out.candidates = total;
  if (total == 0) return out;
  auto conds = torsion_free_conditions(c);
  std::vector<std::vector<std::pair<size_t, Connection>>> parts(std::max(1, jobs));
  run_partitioned(total, jobs, [&](size_t lo, size_t hi, int slot) {
    for (size_t code = lo; code < hi; ++code) {
      Connection conn;
      size_t k = code;
      for (int s = n; s-- > 0;) {
        const Matrix& m = per_s[s][k % per_s[s].size()];
        k /= per_s[s].size();
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) conn.set(a, s, b, m[a][b]);
      }
      bool ok = std::all_of(conds.equations.begin(), conds.equations.end(),
                            [&](const TorsionEquation& e) { return e.residue(c, conn).is_zero(); });
      if (ok) parts[slot].push_back({code, conn});
    }
  });
  std::vector<std::pair<size_t, Connection>> merged;
  for (auto& p : parts) merged.insert(merged.end(), p.begin(), p.end());
  std::sort(merged.begin(), merged.end(), [](auto& a, auto& b) { return a.first < b.first; });
  for (auto& [code, conn] : merged) out.found.push_back(conn);
  return out;
}

// ----------------------------------------------------------------- text io

std::string format_connection(const Calculus& c, const Connection& conn) {
  std::ostringstream os;
  for (auto& [k, v] : conn.V) os << v_name(c, k) << " = " << coef_text(c, v) << "\n";
  return os.str();
}

std::string format_metric(const Calculus& c, const Metric& g) {
  std::ostringstream os;
  if (g.symmetric) os << "symmetric = true\n";
  for (auto& [k, v] : g.g) os << "g[" << c.label(k.first) << "," << c.label(k.second) << "] = " << coef_text(c, v) << "\n";
  return os.str();
}

namespace {

std::vector<int> parse_index(const Calculus& c, const std::string& inside) {
  std::vector<int> r;
  std::stringstream ss(inside);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok.erase(0, tok.find_first_not_of(" \t"));
    tok.erase(tok.find_last_not_of(" \t") + 1);
    r.push_back(c.index(tok));
  }
  return r;
}

}  // namespace

Connection parse_connection(const Calculus& c, const std::string& text) {
  static const std::regex line_re(R"(^\s*V\[([^\]]*)\]\s*=\s*(.+?)\s*$)");
  Connection conn;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::smatch m;
    if (!std::regex_match(line, m, line_re)) continue;
    auto idx = parse_index(c, m[1]);
    if (idx.size() != 3) throw InputError("connection entry needs three labels: " + line);
    conn.set(idx[0], idx[1], idx[2], c.algebra()->parse(m[2].str()));
  }
  return conn;
}

Metric parse_metric(const Calculus& c, const std::string& text) {
  static const std::regex line_re(R"(^\s*g\[([^\]]*)\]\s*=\s*(.+?)\s*$)");
  static const std::regex sym_re(R"(^\s*symmetric\s*=\s*(true|false)\s*$)");
  Metric g;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::smatch m;
    if (std::regex_match(line, m, sym_re)) {
      g.symmetric = m[1] == "true";
      continue;
    }
    if (!std::regex_match(line, m, line_re)) continue;
    auto idx = parse_index(c, m[1]);
    if (idx.size() != 2) throw InputError("metric entry needs two labels: " + line);
    NCPoly v = c.algebra()->parse(m[2].str());
    if (!v.is_zero()) g.g[{idx[0], idx[1]}] = v;
  }
  if (g.symmetric)
    for (auto& [k, v] : g.g) {
      auto it = g.g.find({k.second, k.first});
      if (it != g.g.end() && it->second != v)
        throw InputError("metric declared symmetric but g[" + c.label(k.first) + "," + c.label(k.second) +
                         "] differs from its transpose");
    }
  return g;
}

}  // namespace nccalc
