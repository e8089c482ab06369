#include "nccalc/calculus.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <sstream>

#include "nccalc/error.hpp"
#include "nccalc/linalg.hpp"

namespace nccalc {

namespace {

NCPoly adopt(const Algebra& a, const NCPoly& f) { return NCPoly(a, Scalar()) + f; }

std::string trim(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  return s;
}

std::vector<NCPoly> letter_elements(const Algebra& a) {
  std::vector<NCPoly> out;
  for (Letter l = 0; l < a->num_letters(); ++l) out.push_back(NCPoly::from_word(a, Word{l}));
  return out;
}

std::string letter_label(const Algebra& a, Letter l) {
  return a->is_inverse_letter(l) ? a->letter_name(l) + "^-1" : a->letter_name(l);
}

}  // namespace

// ------------------------------------------------------------------ Form

Form::Form(const NCPoly& f) : alg_(f.algebra()) {
  if (!f.is_zero()) t_.emplace(ThetaWord{}, f);
}

Form Form::word(Algebra a, const ThetaWord& w, const NCPoly& c) {
  Form r(std::move(a));
  r.add(w, c);
  return r;
}

NCPoly Form::coefficient(const ThetaWord& w) const {
  auto it = t_.find(w);
  return it == t_.end() ? NCPoly(alg_, Scalar()) : it->second;
}

void Form::add(const ThetaWord& w, const NCPoly& c) {
  if (!alg_) alg_ = c.algebra();
  if (c.is_zero()) return;
  auto [it, fresh] = t_.try_emplace(w, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) t_.erase(it);
  }
}

Form Form::part(size_t degree) const {
  Form r(alg_);
  for (auto& [w, c] : t_)
    if (w.size() == degree) r.t_.emplace(w, c);
  return r;
}

std::set<size_t> Form::degrees() const {
  std::set<size_t> d;
  for (auto& [w, c] : t_) d.insert(w.size());
  return d;
}

size_t Form::degree() const { return t_.empty() ? 0 : t_.rbegin()->first.size(); }

Form Form::operator-() const {
  Form r(alg_);
  for (auto& [w, c] : t_) r.t_.emplace(w, -c);
  return r;
}

Form& Form::operator+=(const Form& o) {
  if (!alg_) alg_ = o.alg_;
  for (auto& [w, c] : o.t_) add(w, c);
  return *this;
}

Form& Form::operator-=(const Form& o) {
  if (!alg_) alg_ = o.alg_;
  for (auto& [w, c] : o.t_) add(w, -c);
  return *this;
}

Form operator*(const NCPoly& f, const Form& w) {
  Form r(w.alg_ ? w.alg_ : f.algebra());
  for (auto& [v, c] : w.t_) r.add(v, f * c);
  return r;
}

Form operator*(const Scalar& s, const Form& w) {
  Form r(w.alg_);
  for (auto& [v, c] : w.t_) r.add(v, s * c);
  return r;
}

Form Form::map_coefficients(const std::function<NCPoly(const NCPoly&)>& f) const {
  Form r(alg_);
  for (auto& [w, c] : t_) r.add(w, f(c));
  return r;
}

std::ostream& operator<<(std::ostream& os, const Form& f) {
  if (f.is_zero()) return os << "0";
  bool first = true;
  for (auto& [w, c] : f.terms()) {
    os << (first ? "" : " + ") << "(" << c.to_string() << ")[";
    for (size_t i = 0; i < w.size(); ++i) os << (i ? "," : "") << w[i];
    os << "]";
    first = false;
  }
  return os;
}

// ------------------------------------------------------------------ Group

Group Group::abelian(std::vector<int> moduli) {
  for (int m : moduli)
    if (m < 0 || m == 1) throw InputError("bad cyclic factor order " + std::to_string(m));
  if (moduli.empty()) throw InputError("abelian group needs at least one factor");
  Group g;
  g.kind_ = Kind::Abelian;
  g.moduli_ = std::move(moduli);
  return g;
}

Group Group::symmetric(int n) {
  if (n < 1) throw InputError("symmetric group needs n >= 1");
  Group g;
  g.kind_ = Kind::Permutation;
  g.n_ = n;
  return g;
}

Group Group::parse(const std::string& name0) {
  std::string name = trim(name0);
  if (name.size() > 1 && name[0] == 'S') return symmetric(std::stoi(name.substr(1)));
  std::vector<int> mods;
  size_t pos = 0;
  while (pos < name.size()) {
    size_t x = name.find('x', pos);
    std::string f = name.substr(pos, x == std::string::npos ? std::string::npos : x - pos);
    pos = x == std::string::npos ? name.size() : x + 1;
    if (f.empty() || f[0] != 'Z') throw InputError("unknown group '" + name0 + "'");
    int count = 1;
    if (auto c = f.find('^'); c != std::string::npos) {
      count = std::stoi(f.substr(c + 1));
      f = f.substr(0, c);
    }
    int m = f.size() > 1 ? std::stoi(f.substr(1)) : 0;
    for (int i = 0; i < count; ++i) mods.push_back(m);
  }
  return abelian(mods);
}

GroupElement Group::identity() const {
  if (kind_ == Kind::Abelian) return GroupElement(moduli_.size(), 0);
  GroupElement e(n_);
  std::iota(e.begin(), e.end(), 0);
  return e;
}

GroupElement Group::normalize(GroupElement a) const {
  if (kind_ == Kind::Abelian) {
    if (a.size() != moduli_.size()) throw InputError("group element has wrong size for " + name());
    for (size_t i = 0; i < a.size(); ++i)
      if (moduli_[i] > 0) a[i] = ((a[i] % moduli_[i]) + moduli_[i]) % moduli_[i];
    return a;
  }
  if (static_cast<int>(a.size()) != n_) throw InputError("permutation has wrong size for " + name());
  std::vector<bool> seen(n_, false);
  for (int v : a) {
    if (v < 0 || v >= n_ || seen[v]) throw InputError("not a permutation: " + format(a));
    seen[v] = true;
  }
  return a;
}

GroupElement Group::mul(const GroupElement& a, const GroupElement& b) const {
  GroupElement r(a.size());
  if (kind_ == Kind::Abelian) {
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return normalize(r);
  }
  for (int i = 0; i < n_; ++i) r[i] = a[b[i]];
  return r;
}

GroupElement Group::inverse(const GroupElement& a) const {
  GroupElement r(a.size());
  if (kind_ == Kind::Abelian) {
    for (size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
    return normalize(r);
  }
  for (int i = 0; i < n_; ++i) r[a[i]] = i;
  return r;
}

std::string Group::name() const {
  if (kind_ == Kind::Permutation) return "S" + std::to_string(n_);
  std::vector<std::string> parts;
  for (size_t i = 0; i < moduli_.size();) {
    size_t j = i;
    while (j < moduli_.size() && moduli_[j] == moduli_[i]) ++j;
    std::string f = moduli_[i] == 0 ? "Z" : "Z" + std::to_string(moduli_[i]);
    if (j - i > 1) f += "^" + std::to_string(j - i);
    parts.push_back(f);
    i = j;
  }
  std::string s;
  for (auto& p : parts) s += (s.empty() ? "" : " x ") + p;
  return s;
}

std::string Group::format(const GroupElement& e) const {
  std::string s = kind_ == Kind::Permutation ? "perm(" : "(";
  for (size_t i = 0; i < e.size(); ++i) s += (i ? "," : "") + std::to_string(e[i]);
  return s + ")";
}

GroupElement Group::parse_element(const std::string& text) const {
  std::string t = trim(text);
  if (t.rfind("perm", 0) == 0) t = t.substr(4);
  if (!t.empty() && t.front() == '(') {
    if (t.back() != ')') throw InputError("bad group element '" + text + "'");
    t = t.substr(1, t.size() - 2);
  }
  GroupElement e;
  std::stringstream ss(t);
  std::string item;
  try {
    while (std::getline(ss, item, ',')) e.push_back(std::stoi(item));
  } catch (const std::exception&) {
    throw InputError("bad group element '" + text + "'");
  }
  return normalize(e);
}

std::vector<GroupElement> Group::elements() const {
  std::vector<GroupElement> out;
  if (kind_ == Kind::Permutation) {
    GroupElement p = identity();
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return out;
  }
  for (int m : moduli_)
    if (m == 0) throw InputError("group " + name() + " is infinite");
  out.push_back(identity());
  for (size_t i = 0; i < moduli_.size(); ++i) {
    std::vector<GroupElement> next;
    for (auto& e : out)
      for (int k = 0; k < moduli_[i]; ++k) {
        GroupElement f = e;
        f[i] = k;
        next.push_back(f);
      }
    out = std::move(next);
  }
  return out;
}

const char* pair_kind_name(PairKind k) {
  switch (k) {
    case PairKind::Biangle: return "biangle";
    case PairKind::Triangle: return "triangle";
    case PairKind::Quadrangle: return "quadrangle";
    case PairKind::Unclassified: return "unclassified";
  }
  return "?";
}

// ---------------------------------------------------------------- reports

bool CheckReport::ok() const {
  return std::all_of(items.begin(), items.end(), [](const CheckItem& i) { return i.ok; });
}

void CheckReport::add(std::string what, bool ok, std::string detail) {
  items.push_back({std::move(what), ok, std::move(detail)});
}

void CheckReport::merge(const CheckReport& o) {
  for (auto& i : o.items) items.push_back({o.title.empty() ? i.what : o.title + ": " + i.what, i.ok, i.detail});
}

size_t CheckReport::failures() const {
  return std::count_if(items.begin(), items.end(), [](const CheckItem& i) { return !i.ok; });
}

// --------------------------------------------------------------- calculus

CalculusPtr Calculus::build(const CalculusSpec& spec) {
  if (!spec.algebra) throw InputError("calculus without algebra");
  if (spec.directions.empty()) throw InputError("calculus needs at least one direction");
  for (auto& cond : spec.side_conditions) {
    NCPoly v = spec.algebra->parse(cond);
    if (!v.is_scalar()) throw InputError("side condition '" + cond + "' involves generators");
    if (v.is_zero()) throw InconsistencyError("side condition '" + cond + "' is identically zero");
  }
  std::shared_ptr<Calculus> c(new Calculus());
  c->spec_ = spec;
  c->init_directions();
  c->init_classes();
  c->init_two_forms();
  return c;
}

int Calculus::index(const std::string& label) const {
  std::string l = trim(label);
  for (size_t s = 0; s < size(); ++s)
    if (spec_.directions[s].label == l) return static_cast<int>(s);
  throw InputError("unknown direction label '" + label + "'");
}

void Calculus::init_directions() {
  const Algebra& A = algebra();
  auto complete = [&](std::map<std::string, NCPoly> m) {
    for (auto& g : A->generators())
      if (!m.count(g.name)) m[g.name] = A->gen(g.name);
    return m;
  };
  std::set<std::string> seen;
  e_letter_.resize(size());
  for (size_t s = 0; s < size(); ++s) {
    DirectionSpec& D = spec_.directions[s];
    if (D.label.empty() || !seen.insert(D.label).second)
      throw InputError("duplicate or empty direction label '" + D.label + "'");
    AlgebraMorphism phi;
    try {
      phi = AlgebraMorphism::verify(A, A, complete(D.images));
      if (!D.inverse_images.empty())
        phi.set_inverse(AlgebraMorphism::verify(A, A, complete(D.inverse_images)));
      else if (phi.is_scaling())
        phi.set_inverse(phi.scaling_inverse());
      else
        throw InputError("automorphism is not a scaling; inverse images are required");
    } catch (const InconsistencyError& e) {
      throw InconsistencyError("direction " + D.label + ": " + e.what());
    } catch (const InputError& e) {
      throw InputError("direction " + D.label + ": " + e.what());
    }
    phi_.push_back(phi);

    switch (D.mode) {
      case DirectionMode::Weight: {
        if (!D.weight.algebra() && D.weight.is_zero()) D.weight = A->one();
        D.weight = adopt(A, D.weight);
        if (D.weight.is_zero()) throw InputError("direction " + D.label + ": zero weight");
        if (D.weight.is_scalar()) {
          D.weight_inverse = NCPoly(A, D.weight.scalar_value().inverse());
        } else {
          D.weight_inverse = adopt(A, D.weight_inverse);
          if (D.weight * D.weight_inverse != A->one() || D.weight_inverse * D.weight != A->one())
            throw InconsistencyError("direction " + D.label + ": weight inverse does not invert " + D.weight.to_string());
          for (auto& g : letter_elements(A))
            if (g * D.weight != D.weight * g)
              throw InconsistencyError("direction " + D.label + ": weight " + D.weight.to_string() + " is not central");
        }
        break;
      }
      case DirectionMode::Twist:
        D.lambda = adopt(A, D.lambda);
        if (D.lambda.is_zero()) throw InputError("direction " + D.label + ": zero twist");
        break;
      case DirectionMode::Derivation: {
        auto& E = e_letter_[s];
        for (auto& g : A->generators()) {
          auto it = D.e_images.find(g.name);
          if (it == D.e_images.end()) throw InputError("direction " + D.label + ": missing derivation image of " + g.name);
          E[g.letter] = adopt(A, it->second);
          if (g.invertible) {
            NCPoly G = NCPoly::from_word(A, Word{g.inverse});
            E[g.inverse] = -(G * E[g.letter] * phi.letter_image(g.inverse));
          }
        }
        for (auto& r : A->rules()) {
          NCPoly lhs = e_derivation(s, r.lhs), rhs = zero();
          for (auto& [w, c] : r.rhs) rhs += c * e_derivation(s, w);
          if (lhs != rhs)
            throw InconsistencyError("direction " + D.label + ": derivation violates " + A->word_to_string(r.lhs) +
                                     " -> " + NCPoly::from_terms(A, r.rhs).to_string() + " (residue " +
                                     (lhs - rhs).to_string() + ")");
        }
        break;
      }
    }
  }
  bool all_weight = std::all_of(spec_.directions.begin(), spec_.directions.end(),
                                [](const DirectionSpec& d) { return d.mode == DirectionMode::Weight; });
  if (all_weight)
    for (size_t s = 0; s < size(); ++s)
      for (size_t t = s + 1; t < size(); ++t)
        if (phi_[s].same_images(phi_[t]))
          throw InputError("directions " + label(s) + " and " + label(t) + " share the same automorphism");

  // θ-images under φ_s and their inverses
  theta_images_.assign(size(), {});
  theta_inverse_images_.assign(size(), {});
  for (size_t s = 0; s < size(); ++s) {
    auto& D = spec_.directions[s];
    for (auto& [l, txt] : D.theta_images) index(l);
    std::vector<int> target(size(), -1);
    for (size_t t = 0; t < size(); ++t) {
      Form img = theta(t);
      if (auto it = D.theta_images.find(label(t)); it != D.theta_images.end()) img = parse_raw(it->second);
      if (img.terms().size() != 1 || img.terms().begin()->first.size() != 1)
        throw InputError("direction " + D.label + ": theta image of " + label(t) + " must be a single c*theta term");
      theta_images_[s].push_back(img);
    }
    theta_inverse_images_[s].assign(size(), Form(A));
    std::vector<bool> hit(size(), false);
    for (size_t t = 0; t < size(); ++t) {
      auto& [w, c] = *theta_images_[s][t].terms().begin();
      int u = w[0];
      if (hit[u]) throw InputError("direction " + D.label + ": theta images are not a permutation");
      hit[u] = true;
      auto inv = c.syntactic_inverse();
      if (!inv) throw InputError("direction " + D.label + ": theta image coefficient " + c.to_string() + " is not invertible");
      theta_inverse_images_[s][u] = Form::word(A, {static_cast<int>(t)}, phi_inverse(s).apply(*inv));
    }
  }
}

void Calculus::init_classes() {
  size_t n = size();
  if (!spec_.classification.empty()) {
    if (spec_.classification.size() != n) throw InputError("classification table has wrong size");
    for (auto& row : spec_.classification)
      if (row.size() != n) throw InputError("classification table has wrong size");
    classes_ = spec_.classification;
    return;
  }
  if (!spec_.group) return;
  const Group& G = *spec_.group;
  std::vector<GroupElement> el;
  for (auto& d : spec_.directions) {
    if (!d.element) return;
    el.push_back(G.normalize(*d.element));
  }
  for (size_t s = 0; s < n; ++s) {
    if (el[s] == G.identity()) throw InputError("direction " + label(s) + " is the group identity");
    for (size_t t = s + 1; t < n; ++t)
      if (el[s] == el[t]) throw InputError("directions " + label(s) + " and " + label(t) + " share a group element");
  }
  std::map<GroupElement, int> ids;
  classes_.assign(n, std::vector<PairClass>(n));
  for (size_t s = 0; s < n; ++s)
    for (size_t t = 0; t < n; ++t) {
      GroupElement p = G.mul(el[s], el[t]);
      PairClass& pc = classes_[s][t];
      if (p == G.identity()) {
        pc.kind = PairKind::Biangle;
        continue;
      }
      auto it = std::find(el.begin(), el.end(), p);
      if (it != el.end()) {
        pc.kind = PairKind::Triangle;
        pc.third = static_cast<int>(it - el.begin());
        continue;
      }
      pc.kind = PairKind::Quadrangle;
      auto [jt, fresh] = ids.try_emplace(p, static_cast<int>(ids.size()));
      pc.class_id = jt->second;
    }
}

PairClass Calculus::classify(int s, int s2) const { return classes_.empty() ? PairClass{} : classes_[s][s2]; }

TwoFormStructure Calculus::derive_two_forms() const {
  const Algebra& A = algebra();
  TwoFormStructure T;
  T.derived = true;
  size_t n = size();
  auto w = [&](int s) { return spec_.directions[s].weight; };
  auto wi = [&](int s) { return spec_.directions[s].weight_inverse; };
  std::map<int, std::vector<std::pair<int, int>>> quads;
  for (size_t s = 0; s < n; ++s)
    for (size_t t = 0; t < n; ++t) {
      const PairClass& pc = classes_[s][t];
      if (pc.kind == PairKind::Quadrangle)
        quads[pc.class_id].push_back({s, t});
      else
        T.basis.push_back({s, t});
    }
  for (auto& [id, pairs] : quads) {
    std::sort(pairs.begin(), pairs.end());
    auto b = pairs.back();
    Form rhs(A);
    for (size_t k = 0; k + 1 < pairs.size(); ++k) {
      auto [p1, p2] = pairs[k];
      rhs.add({p1, p2}, -(w(b.first) * w(b.second) * wi(p1) * wi(p2)));
      T.basis.push_back(pairs[k]);
    }
    T.rules[b] = rhs;
  }
  std::sort(T.basis.begin(), T.basis.end());
  T.delta.assign(n, Form(A));
  T.zeta = Form(A);
  for (size_t s = 0; s < n; ++s)
    for (size_t t = 0; t < n; ++t) {
      const PairClass& pc = classes_[s][t];
      if (pc.kind == PairKind::Triangle)
        T.delta[pc.third].add({static_cast<int>(s), static_cast<int>(t)}, w(pc.third) * wi(s) * wi(t));
      else if (pc.kind == PairKind::Biangle)
        T.zeta.add({static_cast<int>(s), static_cast<int>(t)}, wi(s) * wi(t));
    }
  return T;
}

void Calculus::init_two_forms() {
  const Algebra& A = algebra();
  size_t n = size();
  if (spec_.first_order_only) return;
  std::unique_ptr<TwoFormStructure> T;
  if (spec_.two_forms) {
    T = std::make_unique<TwoFormStructure>();
    for (auto& rel : spec_.two_forms->relations) {
      auto eq = rel.find('=');
      if (eq == std::string::npos) throw InputError("two-form relation without '=': " + rel);
      Form lhs = parse_raw(rel.substr(0, eq)), rhs = parse_raw(rel.substr(eq + 1));
      if (lhs.terms().size() != 1 || lhs.terms().begin()->first.size() != 2)
        throw InputError("left side of two-form relation must be one theta pair: " + rel);
      auto& [w, c] = *lhs.terms().begin();
      if (!c.is_scalar()) throw InputError("left coefficient must be a scalar: " + rel);
      std::pair<int, int> b{w[0], w[1]};
      if (T->rules.count(b)) throw InputError("theta pair eliminated twice: " + rel);
      for (size_t d : rhs.degrees())
        if (d != 2) throw InputError("right side of two-form relation must be a 2-form: " + rel);
      T->rules[b] = c.scalar_value().inverse() * rhs;
    }
    for (size_t s = 0; s < n; ++s)
      for (size_t t = 0; t < n; ++t)
        if (!T->rules.count({s, t})) T->basis.push_back({s, t});
    for (auto& [b, rhs] : T->rules)
      for (auto& [w, c] : rhs.terms()) {
        std::pair<int, int> p{w[0], w[1]};
        if (T->rules.count(p))
          throw InputError("relation for " + format_word({b.first, b.second}) + " uses eliminated pair " + format_word(w));
        if (!(p < b))
          throw InputError("relation for " + format_word({b.first, b.second}) + " must only use smaller pairs");
      }
  } else if (is_inner() && !classes_.empty() &&
             std::all_of(spec_.directions.begin(), spec_.directions.end(),
                         [](const DirectionSpec& d) { return d.mode == DirectionMode::Weight; })) {
    T = std::make_unique<TwoFormStructure>(derive_two_forms());
  } else {
    return;
  }
  two_forms_ = std::move(T);
  for (auto& p : two_forms_->basis) basis_set_.insert(p);

  TwoFormStructure& S = *two_forms_;
  if (!S.derived) {
    auto& ts = *spec_.two_forms;
    S.delta.assign(n, Form(A));
    S.dtheta.assign(n, Form(A));
    for (auto& [l, txt] : ts.delta) {
      Form f = reduce(parse_raw(txt));
      for (size_t d : f.degrees())
        if (d != 2) throw InputError("Delta(theta(" + l + ")) must be a 2-form");
      S.delta[index(l)] = f;
    }
    for (auto& [l, txt] : ts.dtheta) S.dtheta[index(l)] = reduce(parse_raw(txt));
    if (is_inner()) {
      Form th = vartheta();
      Form computed = wedge(th, th) - delta(th);
      S.zeta = ts.zeta ? reduce(parse_raw(*ts.zeta)) : computed;
    } else {
      if (!ts.delta.empty() || ts.zeta) throw InputError("Delta and zeta require an inner calculus");
      S.zeta = Form(A);
    }
  }
  if (is_inner()) {
    Form th = vartheta();
    S.dtheta.assign(n, Form(A));
    for (size_t s = 0; s < n; ++s) S.dtheta[s] = commutator(th, theta(s)) - S.delta[s];
  }
}

const TwoFormStructure& Calculus::two_forms() const {
  if (!two_forms_) throw InputError("calculus has no two-form structure");
  return *two_forms_;
}

NCPoly Calculus::phi_word(const ThetaWord& w, const NCPoly& f) const {
  NCPoly r = f;
  for (size_t i = w.size(); i-- > 0;) r = phi_[w[i]].apply(r);
  return r;
}

NCPoly Calculus::phi_inverse_word(const ThetaWord& w, const NCPoly& f) const {
  NCPoly r = f;
  for (int s : w) r = phi_inverse(s).apply(r);
  return r;
}

Form Calculus::theta(int s) const { return Form::word(algebra(), {s}, algebra()->one()); }

Form Calculus::scalar_form(const NCPoly& f) const {
  Form r(algebra());
  r.add({}, f);
  return r;
}

NCPoly Calculus::e_derivation(int s, const Word& w) const {
  const Algebra& A = algebra();
  NCPoly r = zero();
  for (size_t k = 0; k < w.size(); ++k) {
    NCPoly pre = NCPoly::from_word(A, Word(w.begin(), w.begin() + k));
    NCPoly post = phi_[s].apply_word(Word(w.begin() + k + 1, w.end()));
    r += pre * e_letter_[s].at(w[k]) * post;
  }
  return r;
}

NCPoly Calculus::e(int s, const NCPoly& f0) const {
  NCPoly f = adopt(algebra(), f0);
  const DirectionSpec& D = spec_.directions[s];
  switch (D.mode) {
    case DirectionMode::Weight:
      return D.weight_inverse * (phi_[s].apply(f) - f);
    case DirectionMode::Twist:
      return D.lambda * phi_[s].apply(f) - f * D.lambda;
    case DirectionMode::Derivation: {
      NCPoly r = zero();
      for (auto& [w, c] : f.terms()) r += c * e_derivation(s, w);
      return r;
    }
  }
  return zero();
}

Form Calculus::d(const NCPoly& f) const {
  Form r(algebra());
  for (size_t s = 0; s < size(); ++s) r.add({static_cast<int>(s)}, e(s, f));
  return r;
}

bool Calculus::is_inner() const {
  return std::none_of(spec_.directions.begin(), spec_.directions.end(),
                      [](const DirectionSpec& d) { return d.mode == DirectionMode::Derivation; });
}

NCPoly Calculus::lambda(int s) const {
  const DirectionSpec& D = spec_.directions[s];
  if (D.mode == DirectionMode::Weight) return D.weight_inverse;
  if (D.mode == DirectionMode::Twist) return D.lambda;
  throw InputError("calculus is not inner (direction " + D.label + " is an explicit derivation)");
}

Form Calculus::vartheta() const {
  Form r(algebra());
  for (size_t s = 0; s < size(); ++s) r.add({static_cast<int>(s)}, lambda(s));
  return r;
}

Form Calculus::right_mul(const Form& w, const NCPoly& f) const {
  Form r(algebra());
  for (auto& [v, c] : w.terms()) r.add(v, c * phi_word(v, f));
  return r;
}

Form Calculus::concat(const Form& a, const Form& b) const {
  Form r(algebra());
  for (auto& [w1, c1] : a.terms())
    for (auto& [w2, c2] : b.terms()) {
      ThetaWord w = w1;
      w.insert(w.end(), w2.begin(), w2.end());
      r.add(w, c1 * phi_word(w1, c2));
    }
  return r;
}

const Form& Calculus::reduce_word(const ThetaWord& w) const {
  {
    std::lock_guard<std::mutex> lock(memo_mu_);
    if (auto it = memo_.find(w); it != memo_.end()) return it->second;
  }
  Form r(algebra());
  bool reducible = false;
  if (w.size() >= 2) {
    if (!two_forms_) throw InputError("calculus has no two-form structure");
    for (size_t i = 0; i + 1 < w.size() && !reducible; ++i) {
      auto it = two_forms_->rules.find({w[i], w[i + 1]});
      if (it == two_forms_->rules.end()) continue;
      reducible = true;
      ThetaWord prefix(w.begin(), w.begin() + i);
      for (auto& [p, c] : it->second.terms()) {
        ThetaWord v = prefix;
        v.insert(v.end(), p.begin(), p.end());
        v.insert(v.end(), w.begin() + i + 2, w.end());
        r += phi_word(prefix, c) * reduce_word(v);
      }
    }
  }
  if (!reducible) r = Form::word(algebra(), w, algebra()->one());
  std::lock_guard<std::mutex> lock(memo_mu_);
  return memo_.try_emplace(w, std::move(r)).first->second;
}

Form Calculus::reduce_impl(const Form& f, bool rightmost) const {
  Form r(algebra());
  for (auto& [w, c] : f.terms()) {
    if (!rightmost) {
      r += c * reduce_word(w);
      continue;
    }
    if (w.size() >= 2 && !two_forms_) throw InputError("calculus has no two-form structure");
    bool done = false;
    for (size_t i = w.size() >= 2 ? w.size() - 1 : 0; i-- > 0;) {
      auto it = two_forms_->rules.find({w[i], w[i + 1]});
      if (it == two_forms_->rules.end()) continue;
      ThetaWord prefix(w.begin(), w.begin() + i);
      Form next(algebra());
      for (auto& [p, k] : it->second.terms()) {
        ThetaWord v = prefix;
        v.insert(v.end(), p.begin(), p.end());
        v.insert(v.end(), w.begin() + i + 2, w.end());
        next.add(v, c * phi_word(prefix, k));
      }
      r += reduce_impl(next, true);
      done = true;
      break;
    }
    if (!done) r.add(w, c);
  }
  return r;
}

Form Calculus::reduce(const Form& w) const { return reduce_impl(w, false); }
Form Calculus::reduce_rightmost(const Form& w) const { return reduce_impl(w, true); }

Form Calculus::wedge(const Form& a, const Form& b) const { return reduce(concat(a, b)); }

Form Calculus::commutator(const Form& a, const Form& b) const {
  Form r(algebra());
  for (size_t da : a.degrees())
    for (size_t db : b.degrees()) {
      Form pa = a.part(da), pb = b.part(db);
      if ((da * db) % 2)
        r += wedge(pa, pb) + wedge(pb, pa);
      else
        r += wedge(pa, pb) - wedge(pb, pa);
    }
  return r;
}

Form Calculus::delta(const Form& f) const {
  if (!is_inner()) throw InputError("Delta requires an inner calculus");
  const TwoFormStructure& T = two_forms();
  Form r(algebra());
  for (auto& [w, c] : f.terms())
    for (size_t k = 0; k < w.size(); ++k) {
      Form left = Form::word(algebra(), ThetaWord(w.begin(), w.begin() + k), c);
      Form right = Form::word(algebra(), ThetaWord(w.begin() + k + 1, w.end()), algebra()->one());
      Form term = wedge(wedge(left, T.delta[w[k]]), right);
      if (k % 2) r -= term;
      else r += term;
    }
  return r;
}

Form Calculus::d_form(const Form& w) const {
  if (!is_inner()) return d_form_leibniz(w);
  Form r = commutator(vartheta(), w);
  if (w.degree() > 0) r -= delta(w);
  return r;
}

Form Calculus::d_form_leibniz(const Form& f) const {
  Form r(algebra());
  for (auto& [w, c] : f.terms()) {
    Form tw = Form::word(algebra(), w, algebra()->one());
    r += wedge(d(c), tw);
    for (size_t k = 0; k < w.size(); ++k) {
      Form left = Form::word(algebra(), ThetaWord(w.begin(), w.begin() + k), c);
      Form right = Form::word(algebra(), ThetaWord(w.begin() + k + 1, w.end()), algebra()->one());
      Form term = wedge(wedge(left, two_forms().dtheta[w[k]]), right);
      if (k % 2) r -= term;
      else r += term;
    }
  }
  return r;
}

Form Calculus::zeta() const {
  if (!is_inner()) throw InputError("zeta requires an inner calculus");
  return two_forms().zeta;
}

std::string Calculus::format_word(const ThetaWord& w) const {
  std::string s;
  for (size_t i = 0; i < w.size(); ++i) s += (i ? "*theta(" : "theta(") + label(w[i]) + ")";
  return s;
}

std::string Calculus::format(const Form& f) const {
  if (f.is_zero()) return "0";
  std::string out;
  bool first = true;
  bool several = f.terms().size() > 1;
  for (auto& [w, c] : f.terms()) {
    bool neg = false;
    std::string body;
    std::string th = format_word(w);
    if (c.terms().size() == 1) {
      auto& [cw, cs] = *c.terms().begin();
      if (cw.empty()) {
        Scalar v = cs;
        neg = !v.numerator().is_zero() && v.numerator().leading().c < 0;
        if (neg) v = -v;
        if (w.empty()) {
          body = v.to_string();
          if (v.denominator().is_one() && v.numerator().terms().size() > 1) body = "(" + body + ")";
        } else {
          body = coefficient_prefix(v, neg) + th;
          neg = !cs.numerator().is_zero() && cs.numerator().leading().c < 0;
        }
      } else {
        body = coefficient_prefix(cs, neg) + algebra()->word_to_string(cw);
        if (!w.empty()) body += "*" + th;
      }
    } else {
      body = c.to_string();
      if (!w.empty()) body = "(" + body + ")*" + th;
      else if (several) body = "(" + body + ")";
    }
    if (first) out = neg ? "-" + body : body;
    else out += (neg ? " - " : " + ") + body;
    first = false;
  }
  return out;
}

int Calculus::label_arg(const Expr& e) const {
  std::string t = trim(e.text.empty() ? e.name : e.text);
  if (e.kind == Expr::Kind::Number && t.empty()) t = e.number.get_str();
  return index(t);
}

Form Calculus::parse_form(std::string_view text, const std::map<std::string, Form>& aliases) const {
  return eval(*parse_expr(text), aliases, false);
}

Form Calculus::eval_form(const Expr& e, const std::map<std::string, Form>& aliases) const {
  return eval(e, aliases, false);
}

Form Calculus::parse_raw(std::string_view text) const { return eval(*parse_expr(text), {}, true); }

Form Calculus::eval(const Expr& e, const std::map<std::string, Form>& aliases, bool raw) const {
  const Algebra& A = algebra();
  auto prod = [&](const Form& a, const Form& b) { return raw ? concat(a, b) : wedge(a, b); };
  auto sub = [&](size_t i) { return eval(*e.args[i], aliases, raw); };
  auto function_of = [&](const Form& f, const char* what) {
    for (size_t d : f.degrees())
      if (d != 0) throw InputError(std::string(what) + " needs a function argument");
    return f.coefficient({});
  };
  switch (e.kind) {
    case Expr::Kind::Number:
      return scalar_form(NCPoly(A, Scalar(e.number)));
    case Expr::Kind::Ident: {
      if (auto it = aliases.find(e.name); it != aliases.end()) return it->second;
      if (e.name == "vartheta") return vartheta();
      if (e.name == "zeta") return zeta();
      return scalar_form(A->eval(e));
    }
    case Expr::Kind::Neg:
      return -sub(0);
    case Expr::Kind::Add:
      return sub(0) + sub(1);
    case Expr::Kind::Sub:
      return sub(0) - sub(1);
    case Expr::Kind::Mul:
      return prod(sub(0), sub(1));
    case Expr::Kind::Div: {
      NCPoly b = function_of(sub(1), "division");
      auto inv = b.syntactic_inverse();
      if (!inv) throw InputError("cannot divide by non-invertible element " + b.to_string());
      return right_mul(sub(0), *inv);
    }
    case Expr::Kind::Pow: {
      Form b = sub(0);
      if (e.exponent < 0) {
        NCPoly f = function_of(b, "negative power");
        auto inv = f.syntactic_inverse();
        if (!inv) throw InputError("negative power of non-invertible element " + f.to_string());
        return scalar_form(inv->pow(static_cast<unsigned>(-e.exponent)));
      }
      Form r = scalar_form(A->one());
      for (int i = 0; i < e.exponent; ++i) r = prod(r, b);
      return r;
    }
    case Expr::Kind::Bracket:
      return commutator(sub(0), sub(1));
    case Expr::Kind::Call: {
      auto need = [&](size_t n) {
        if (e.args.size() != n)
          throw InputError(e.name + "() takes " + std::to_string(n) + " argument" + (n == 1 ? "" : "s"));
      };
      if (e.name == "theta") {
        need(1);
        return theta(label_arg(*e.args[0]));
      }
      if (e.name == "d") {
        need(1);
        return d_form(sub(0));
      }
      if (e.name == "Delta") {
        need(1);
        return delta(sub(0));
      }
      if (e.name == "e") {
        need(2);
        return scalar_form(this->e(label_arg(*e.args[0]), function_of(sub(1), "e()")));
      }
      if (e.name == "phi") {
        need(2);
        return scalar_form(phi(label_arg(*e.args[0])).apply(function_of(sub(1), "phi()")));
      }
      throw InputError("unknown function '" + e.name + "' in form expression");
    }
  }
  throw InputError("bad form expression");
}

// ------------------------------------------------------------ verification

namespace {

std::vector<std::pair<std::string, NCPoly>> generator_list(const Algebra& A) {
  std::vector<std::pair<std::string, NCPoly>> out;
  for (Letter l = 0; l < A->num_letters(); ++l) out.push_back({letter_label(A, l), NCPoly::from_word(A, Word{l})});
  return out;
}

}  // namespace

CheckReport verify_two_forms(const Calculus& c) {
  CheckReport R;
  R.title = "two-forms";
  const Algebra& A = c.algebra();
  const TwoFormStructure& T = c.two_forms();
  size_t n = c.size();
  if (c.is_inner()) {
    Form th = c.vartheta();
    Form z = c.wedge(th, th) - c.delta(th);
    R.add("zeta = vartheta^2 - Delta(vartheta)", z == c.zeta(), c.format(z - c.zeta()));
    for (auto& [name, f] : generator_list(A)) {
      Form res(A);
      for (size_t s = 0; s < n; ++s)
        for (size_t t = 0; t < n; ++t) {
          NCPoly ls = c.lambda(s), lt = c.phi(s).apply(c.lambda(t));
          ThetaWord w{static_cast<int>(s), static_cast<int>(t)};
          res += c.reduce(Form::word(A, w, f * ls * lt - ls * lt * c.phi_word(w, f)));
        }
      for (size_t s = 0; s < n; ++s)
        res -= (f * c.lambda(s) - c.lambda(s) * c.phi(s).apply(f)) * T.delta[s];
      R.add("two-form identity at f = " + name, res.is_zero(), c.format(res));
      Form zc = c.commutator(c.zeta(), c.scalar_form(f));
      R.add("[zeta, " + name + "] = 0", zc.is_zero(), c.format(zc));
      Form zeta = c.zeta();
      for (auto& [w, z] : zeta.terms()) {
        NCPoly r = z * c.phi_word(w, f) - f * z;
        R.add("zeta coefficient " + c.format_word(w) + " at f = " + name, r.is_zero(), r.to_string());
      }
    }
  }
  for (auto& [b, rhs] : T.rules)
    for (auto& [name, f] : generator_list(A)) {
      ThetaWord bw{b.first, b.second};
      Form lhs = c.phi_word(bw, f) * rhs;
      Form right = c.reduce(c.right_mul(rhs, f));
      R.add("relation " + c.format_word(bw) + " commutes with " + name, lhs == right, c.format(lhs - right));
    }
  return R;
}

CheckReport verify_twisted_two_forms(const Calculus& c, const TwoFormSpec& candidate) {
  CalculusSpec spec = c.spec();
  spec.two_forms = candidate;
  spec.first_order_only = false;
  CalculusPtr k = Calculus::build(spec);
  CheckReport R = verify_two_forms(*k);
  R.merge(verify_reduction_order(*k));
  return R;
}

CheckReport verify_inner_first_order(const Calculus& c) {
  CheckReport R;
  R.title = "inner";
  Form th = c.vartheta();
  for (auto& [name, f] : generator_list(c.algebra())) {
    Form res = c.commutator(th, c.scalar_form(f)) - c.d(f);
    R.add("[vartheta, " + name + "] = d" + name, res.is_zero(), c.format(res));
  }
  return R;
}

CheckReport verify_inner_identities(const Calculus& c) {
  CheckReport R;
  R.title = "identities";
  const Algebra& A = c.algebra();
  Form z = c.zeta();
  std::vector<std::pair<std::string, Form>> probes;
  for (size_t s = 0; s < c.size(); ++s) probes.push_back({c.format(c.theta(s)), c.theta(s)});
  for (auto& [name, f] : generator_list(A)) {
    Form zc = c.commutator(z, c.scalar_form(f));
    R.add("[zeta, " + name + "] = 0", zc.is_zero(), c.format(zc));
    for (size_t s = 0; s < c.size(); ++s) probes.push_back({name + "*" + c.format(c.theta(s)), f * c.theta(s)});
  }
  for (auto& [name, w] : probes) {
    Form r = c.delta(c.delta(w)) + c.commutator(z, w);
    R.add("Delta^2(" + name + ") + [zeta, " + name + "] = 0", r.is_zero(), c.format(r));
  }
  Form dz = c.delta(z);
  R.add("Delta(zeta) = 0", dz.is_zero(), c.format(dz));
  Form dd = c.d_form_leibniz(z) - c.commutator(c.vartheta(), z);
  R.add("d zeta = [vartheta, zeta]", dd.is_zero(), c.format(dd));
  return R;
}

CheckReport verify_d_squared(const Calculus& c) {
  CheckReport R;
  R.title = "d2";
  const Algebra& A = c.algebra();
  for (auto& [name, f] : generator_list(A)) {
    Form r = c.d_form(c.d(f));
    R.add("d(d " + name + ") = 0", r.is_zero(), c.format(r));
    Form l = c.d_form_leibniz(c.d(f));
    R.add("d(d " + name + ") = 0 (Leibniz)", l.is_zero(), c.format(l));
  }
  for (size_t s = 0; s < c.size(); ++s) {
    Form r = c.d_form(c.d_form(c.theta(s)));
    R.add("d(d " + c.format(c.theta(s)) + ") = 0", r.is_zero(), c.format(r));
    if (c.is_inner())
      for (auto& [name, f] : generator_list(A)) {
        Form w = f * c.theta(s);
        Form g = c.d_form(w) - c.d_form_leibniz(w);
        R.add("inner and Leibniz d agree on " + name + "*" + c.format(c.theta(s)), g.is_zero(), c.format(g));
      }
  }
  return R;
}

CheckReport verify_reduction_order(const Calculus& c) {
  CheckReport R;
  R.title = "reduction order";
  int n = static_cast<int>(c.size());
  size_t bad = 0;
  std::string first;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int d = 0; d < n; ++d) {
        Form w = Form::word(c.algebra(), {a, b, d}, c.algebra()->one());
        Form diff = c.reduce(w) - c.reduce_rightmost(w);
        if (!diff.is_zero() && bad++ == 0) first = c.format_word({a, b, d}) + ": " + c.format(diff);
      }
  R.add("degree-3 reduction independent of order", bad == 0, first);
  return R;
}

DifferentiabilityReport check_differentiability(const Calculus& c, const AlgebraMorphism& phi,
                                                const std::vector<Form>& images, bool simple) {
  DifferentiabilityReport out;
  CheckReport& R = out.report;
  R.title = "differentiability";
  const Algebra& A = c.algebra();
  if (images.size() != c.size()) throw InputError("need one theta image per direction");
  if (!phi.has_inverse()) throw InputError("differentiability check needs the inverse automorphism");
  for (auto& [name, g] : generator_list(A)) {
    Form lhs = c.d(phi.apply(g)), rhs(A);
    for (size_t s = 0; s < c.size(); ++s) rhs += phi.apply(c.e(s, g)) * images[s];
    R.add("d phi(" + name + ") = phi(d " + name + ")", lhs == rhs, c.format(lhs - rhs));
  }
  for (size_t t = 0; t < c.size(); ++t)
    for (auto& [name, f] : generator_list(A)) {
      Form lhs = c.right_mul(images[t], f);
      Form rhs = phi.apply(c.phi(t).apply(phi.inverse().apply(f))) * images[t];
      R.add("phi(" + c.format(c.theta(t)) + ") " + name + " commutation", lhs == rhs, c.format(lhs - rhs));
    }
  if (c.is_inner()) {
    Form img(A);
    for (size_t s = 0; s < c.size(); ++s) img += phi.apply(c.lambda(s)) * images[s];
    out.vartheta_phi = img - c.vartheta();
    if (simple) {
      R.add("phi(vartheta) = vartheta", out.vartheta_phi.is_zero(), c.format(out.vartheta_phi));
    } else {
      auto w = is_central_one_form(c, out.vartheta_phi);
      R.add("vartheta_phi = " + c.format(out.vartheta_phi) + " is central", w.central,
            w.central ? "" : "fails at direction " + c.label(w.direction) + ", " + w.generator);
    }
  }
  return out;
}

CentralityWitness is_central_one_form(const Calculus& c, const Form& alpha) {
  CentralityWitness w;
  for (auto& [v, a] : alpha.terms()) {
    if (v.size() != 1) throw InputError("centrality test needs a 1-form");
    for (auto& [name, f] : generator_list(c.algebra()))
      if (a * c.phi(v[0]).apply(f) != f * a) {
        w.central = false;
        w.direction = v[0];
        w.generator = name;
        return w;
      }
  }
  return w;
}

std::vector<Form> central_one_forms(const Calculus& c, size_t bound) {
  const Algebra& A = c.algebra();
  std::vector<Word> words = A->normal_words(bound);
  std::vector<Form> out;
  auto gens = generator_list(A);
  for (size_t s = 0; s < c.size(); ++s) {
    std::map<std::pair<size_t, Word>, SparseRow> rows;
    for (size_t k = 0; k < words.size(); ++k) {
      NCPoly w = NCPoly::from_word(A, words[k]);
      for (size_t g = 0; g < gens.size(); ++g) {
        NCPoly r = w * c.phi(s).apply(gens[g].second) - gens[g].second * w;
        for (auto& [u, v] : r.terms()) rows[{g, u}][static_cast<int>(k)] += v;
      }
    }
    std::vector<SparseRow> eqs;
    for (auto& [key, row] : rows) {
      SparseRow clean;
      for (auto& [k, v] : row)
        if (!v.is_zero()) clean[k] = v;
      if (!clean.empty()) eqs.push_back(clean);
    }
    for (auto& vec : kernel(eqs, static_cast<int>(words.size()))) {
      NCPoly a = c.zero();
      for (size_t k = 0; k < words.size(); ++k)
        if (!vec[k].is_zero()) a += NCPoly::from_word(A, words[k], vec[k]);
      out.push_back(Form::word(A, {static_cast<int>(s)}, a));
    }
  }
  return out;
}

std::vector<ConstantReport> constants(const Calculus& c, const std::vector<NCPoly>& candidates) {
  std::vector<ConstantReport> out;
  for (auto& f0 : candidates) {
    NCPoly f = adopt(c.algebra(), f0);
    ConstantReport r;
    r.candidate = f;
    r.by_differential = c.d(f).is_zero();
    r.by_criterion = true;
    for (size_t s = 0; s < c.size(); ++s) {
      bool ok = true;
      switch (c.mode(s)) {
        case DirectionMode::Weight: ok = c.phi(s).apply(f) == f; break;
        case DirectionMode::Twist: ok = f * c.lambda(s) == c.lambda(s) * c.phi(s).apply(f); break;
        case DirectionMode::Derivation: ok = c.e(s, f).is_zero(); break;
      }
      r.by_criterion = r.by_criterion && ok;
    }
    out.push_back(r);
  }
  return out;
}

// ------------------------------------------------------ commutative helpers

bool is_commutative(const Algebra& A) {
  for (Letter a = 0; a < A->num_letters(); ++a)
    for (Letter b = a + 1; b < A->num_letters(); ++b)
      if (NCPoly::from_word(A, Word{a, b}) != NCPoly::from_word(A, Word{b, a})) return false;
  return true;
}

Scalar to_commutative_scalar(const NCPoly& f) {
  const Algebra& A = f.algebra();
  Scalar r;
  for (auto& [w, c] : f.terms()) {
    Scalar m = c;
    for (Letter l : w) {
      Scalar g = Scalar::param(A->letter_name(l));
      m *= A->is_inverse_letter(l) ? g.inverse() : g;
    }
    r += m;
  }
  return r;
}

std::optional<NCPoly> from_commutative_scalar(const Algebra& A, const Scalar& s) {
  std::map<std::string, const Presentation::Generator*> gens;
  for (auto& g : A->generators()) gens[g.name] = &g;
  auto split = [&](const Monomial& m, Monomial& params, std::vector<std::pair<const Presentation::Generator*, int>>& g) {
    params = Monomial();
    for (auto& [v, e] : m.factors()) {
      auto it = gens.find(v.name());
      if (it == gens.end()) params = params * Monomial(v, e);
      else g.push_back({it->second, e});
    }
  };
  Monomial dp;
  std::vector<std::pair<const Presentation::Generator*, int>> dg;
  split(s.denominator().monomial_content(), dp, dg);
  Poly gm(1);
  for (auto& [g, e] : dg) gm = gm * Poly(Var::intern(g->name)).pow(e);
  auto rest = s.denominator().divide_exact(gm);
  if (!rest) return std::nullopt;
  for (auto& v : rest->vars())
    if (gens.count(v.name())) return std::nullopt;
  NCPoly out(A, Scalar());
  for (auto& t : s.numerator().terms()) {
    Monomial mp;
    std::vector<std::pair<const Presentation::Generator*, int>> ng;
    split(t.m, mp, ng);
    std::map<const Presentation::Generator*, int> exps;
    for (auto& [g, e] : ng) exps[g] += e;
    for (auto& [g, e] : dg) exps[g] -= e;
    Word w;
    for (auto& [g, e] : exps) {
      if (e < 0 && !g->invertible) return std::nullopt;
      for (int i = 0; i < std::abs(e); ++i) w.push_back(e > 0 ? g->letter : g->inverse);
    }
    out += NCPoly::from_word(A, w, Scalar(Poly(mp, t.c), *rest));
  }
  return out;
}

Scalar commutative_determinant(const std::vector<std::vector<NCPoly>>& m) {
  std::vector<std::vector<Scalar>> s(m.size());
  for (size_t i = 0; i < m.size(); ++i)
    for (auto& x : m[i]) s[i].push_back(to_commutative_scalar(x));
  return determinant(s);
}

ThetaSolution solve_theta_in_differentials(const Calculus& c, const std::vector<NCPoly>& coords) {
  ThetaSolution sol;
  const Algebra& A = c.algebra();
  size_t n = c.size();
  for (auto& x : coords) {
    std::vector<NCPoly> row;
    for (size_t s = 0; s < n; ++s) row.push_back(c.e(s, x));
    sol.matrix.push_back(row);
  }
  if (coords.size() != n) {
    sol.failure = "need as many coordinates as directions";
    return sol;
  }
  std::vector<std::vector<NCPoly>> aug(n);
  for (size_t i = 0; i < n; ++i) {
    aug[i] = sol.matrix[i];
    for (size_t j = 0; j < n; ++j) aug[i].push_back(NCPoly(A, Scalar(i == j ? 1 : 0)));
  }
  bool done = true;
  for (size_t col = 0; col < n && done; ++col) {
    std::optional<NCPoly> inv;
    size_t piv = col;
    for (; piv < n; ++piv) {
      const NCPoly& p = aug[piv][col];
      if (p.is_zero()) continue;
      if (p.is_scalar()) inv = NCPoly(A, p.scalar_value().inverse());
      else inv = p.syntactic_inverse();
      if (inv) break;
    }
    if (!inv) {
      done = false;
      break;
    }
    std::swap(aug[col], aug[piv]);
    for (auto& x : aug[col]) x = *inv * x;
    for (size_t j = 0; j < n; ++j) {
      if (j == col || aug[j][col].is_zero()) continue;
      NCPoly m = aug[j][col];
      for (size_t k = 0; k < 2 * n; ++k) aug[j][k] -= m * aug[col][k];
    }
  }
  if (done) {
    sol.inverse.assign(n, {});
    for (size_t s = 0; s < n; ++s)
      for (size_t i = 0; i < n; ++i) sol.inverse[s].push_back(aug[s][n + i]);
  } else if (is_commutative(A)) {
    Scalar det = commutative_determinant(sol.matrix);
    if (det.is_zero()) {
      sol.failure = "matrix e_s(x_i) is singular";
      return sol;
    }
    std::vector<std::vector<Scalar>> m(n);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) m[i].push_back(to_commutative_scalar(sol.matrix[i][j]));
    // Gauss-Jordan over the fraction field
    std::vector<std::vector<Scalar>> inv(n, std::vector<Scalar>(n));
    for (size_t i = 0; i < n; ++i) inv[i][i] = Scalar(1);
    for (size_t col = 0; col < n; ++col) {
      size_t piv = col;
      while (m[piv][col].is_zero()) ++piv;
      std::swap(m[col], m[piv]);
      std::swap(inv[col], inv[piv]);
      Scalar p = m[col][col].inverse();
      for (size_t k = 0; k < n; ++k) {
        m[col][k] *= p;
        inv[col][k] *= p;
      }
      for (size_t j = 0; j < n; ++j) {
        if (j == col || m[j][col].is_zero()) continue;
        Scalar f = m[j][col];
        for (size_t k = 0; k < n; ++k) {
          m[j][k] -= f * m[col][k];
          inv[j][k] -= f * inv[col][k];
        }
      }
    }
    sol.inverse.assign(n, {});
    for (size_t s = 0; s < n; ++s)
      for (size_t i = 0; i < n; ++i) {
        auto e = from_commutative_scalar(A, inv[s][i]);
        if (!e) {
          sol.failure = "inverse needs division by " + inv[s][i].denominator().to_string() +
                        " (determinant " + det.to_string() + ")";
          sol.inverse.clear();
          return sol;
        }
        sol.inverse[s].push_back(*e);
      }
  } else {
    sol.failure = "no invertible pivot and the algebra is not commutative";
    return sol;
  }
  for (size_t s = 0; s < n; ++s) {
    Form f(A);
    for (size_t i = 0; i < n; ++i) f += sol.inverse[s][i] * c.d(coords[i]);
    if (f != c.theta(s)) {
      sol.failure = "solution does not reproduce " + c.format(c.theta(s));
      return sol;
    }
  }
  sol.ok = true;
  return sol;
}

// ------------------------------------------------------- matrix bimodules

MatrixBimodule::MatrixBimodule(Algebra a, std::vector<std::string> names, std::map<std::string, Matrix> table)
    : alg_(std::move(a)), names_(std::move(names)) {
  size_t n = names_.size();
  for (auto& [g, m] : table) {
    std::string base = g;
    bool inv = base.size() > 3 && base.substr(base.size() - 3) == "^-1";
    if (inv) base = base.substr(0, base.size() - 3);
    auto l = alg_->find_generator(base);
    if (!l) throw InputError("bimodule table for undeclared generator '" + g + "'");
    Letter letter = *l;
    if (inv) {
      auto il = alg_->inverse_letter(letter);
      if (!il) throw InputError("'" + base + "' is not invertible");
      letter = *il;
    }
    if (m.size() != n) throw InputError("bimodule matrix for '" + g + "' has wrong size");
    Matrix mm(n);
    for (size_t i = 0; i < n; ++i) {
      if (m[i].size() != n) throw InputError("bimodule matrix for '" + g + "' has wrong size");
      for (auto& x : m[i]) mm[i].push_back(adopt(alg_, x));
    }
    table_[letter] = mm;
  }
}

MatrixBimodule::Matrix MatrixBimodule::mul(const Matrix& a, const Matrix& b) const {
  size_t n = size();
  Matrix r(n, std::vector<NCPoly>(n, NCPoly(alg_, Scalar())));
  for (size_t i = 0; i < n; ++i)
    for (size_t k = 0; k < n; ++k) {
      if (a[i][k].is_zero()) continue;
      for (size_t j = 0; j < n; ++j) r[i][j] += a[i][k] * b[k][j];
    }
  return r;
}

MatrixBimodule::Matrix MatrixBimodule::rep_word(const Word& w) const {
  size_t n = size();
  Matrix r(n, std::vector<NCPoly>(n, NCPoly(alg_, Scalar())));
  for (size_t i = 0; i < n; ++i) r[i][i] = alg_->one();
  for (Letter l : w) {
    auto it = table_.find(l);
    if (it == table_.end()) throw InputError("bimodule has no table for '" + letter_label(alg_, l) + "'");
    r = mul(r, it->second);
  }
  return r;
}

MatrixBimodule::Matrix MatrixBimodule::rep(const NCPoly& f) const {
  size_t n = size();
  Matrix r(n, std::vector<NCPoly>(n, NCPoly(alg_, Scalar())));
  for (auto& [w, c] : f.terms()) {
    Matrix m = rep_word(w);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) r[i][j] += c * m[i][j];
  }
  return r;
}

MatrixBimodule::Vec MatrixBimodule::basis(size_t i) const {
  Vec v = zero();
  v[i] = alg_->one();
  return v;
}

MatrixBimodule::Vec MatrixBimodule::zero() const { return Vec(size(), NCPoly(alg_, Scalar())); }

MatrixBimodule::Vec MatrixBimodule::right_mul(const Vec& v, const NCPoly& f) const {
  Matrix m = rep(f);
  Vec r = zero();
  for (size_t i = 0; i < size(); ++i) {
    if (v[i].is_zero()) continue;
    for (size_t j = 0; j < size(); ++j) r[j] += v[i] * m[i][j];
  }
  return r;
}

MatrixBimodule::Vec MatrixBimodule::left_mul(const NCPoly& f, const Vec& v) {
  Vec r;
  for (auto& x : v) r.push_back(f * x);
  return r;
}

MatrixBimodule::Vec MatrixBimodule::add(const Vec& a, const Vec& b) {
  Vec r = a;
  for (size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

MatrixBimodule::Vec MatrixBimodule::sub(const Vec& a, const Vec& b) {
  Vec r = a;
  for (size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

bool MatrixBimodule::is_zero(const Vec& v) const {
  return std::all_of(v.begin(), v.end(), [](const NCPoly& x) { return x.is_zero(); });
}

std::string MatrixBimodule::format(const Vec& v) const {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (v[i].is_zero()) continue;
    std::string c = v[i].to_string();
    if (v[i].terms().size() > 1) c = "(" + c + ")";
    if (!s.empty()) s += " + ";
    s += (c == "1" ? "" : c + "*") + names_[i];
  }
  return s.empty() ? "0" : s;
}

CheckReport MatrixBimodule::verify() const {
  CheckReport R;
  R.title = "bimodule";
  for (auto& r : alg_->rules()) {
    bool covered = true;
    for (Letter l : r.lhs) covered = covered && table_.count(l);
    for (auto& [w, c] : r.rhs)
      for (Letter l : w) covered = covered && table_.count(l);
    if (!covered) continue;
    Matrix lhs = rep_word(r.lhs);
    Matrix rhs = rep(NCPoly::from_terms(alg_, r.rhs));
    bool ok = true;
    std::string detail;
    for (size_t i = 0; i < size() && ok; ++i)
      for (size_t j = 0; j < size() && ok; ++j)
        if (lhs[i][j] != rhs[i][j]) {
          ok = false;
          detail = "entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "): " + (lhs[i][j] - rhs[i][j]).to_string();
        }
    R.add("relation " + alg_->word_to_string(r.lhs) + " -> " + NCPoly::from_terms(alg_, r.rhs).to_string(), ok, detail);
  }
  return R;
}

}  // namespace nccalc
