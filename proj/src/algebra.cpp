#include <ostream>
#include "nccalc/algebra.hpp"

#include <algorithm>
#include <sstream>

#include "nccalc/error.hpp"
#include "nccalc/linalg.hpp"

namespace nccalc {

// ------------------------------------------------------------ Presentation

std::optional<Letter> Presentation::inverse_letter(Letter l) const {
  const auto& g = gens_[letter_gen_[l]];
  if (!g.invertible) return std::nullopt;
  return letter_inv_[l] ? g.letter : g.inverse;
}

std::optional<Letter> Presentation::find_generator(const std::string& name) const {
  for (auto& g : gens_)
    if (g.name == name) return g.letter;
  return std::nullopt;
}

std::optional<std::pair<size_t, size_t>> Presentation::find_match(const Word& w) const {
  for (size_t pos = 0; pos < w.size(); ++pos) {
    for (size_t r : rules_by_first_[w[pos]]) {
      const Word& lhs = rules_[r].lhs;
      if (pos + lhs.size() > w.size()) continue;
      if (std::equal(lhs.begin(), lhs.end(), w.begin() + pos)) return std::make_pair(pos, r);
    }
  }
  return std::nullopt;
}

namespace {
void add_into(TermMap& acc, const Word& w, const Scalar& c) {
  if (c.is_zero()) return;
  auto it = acc.find(w);
  if (it == acc.end()) {
    acc.emplace(w, c);
  } else {
    it->second += c;
    if (it->second.is_zero()) acc.erase(it);
  }
}
}  // namespace

TermMap Presentation::apply_at(const Word& w, size_t pos, size_t rule) const {
  const RewriteRule& r = rules_[rule];
  TermMap res;
  for (auto& [u, c] : r.rhs) {
    Word w2(w.begin(), w.begin() + pos);
    w2.insert(w2.end(), u.begin(), u.end());
    w2.insert(w2.end(), w.begin() + pos + r.lhs.size(), w.end());
    const TermMap& nf = normal_form(w2);
    for (auto& [v, d] : nf) add_into(res, v, c * d);
  }
  return res;
}

const TermMap& Presentation::normal_form(const Word& w) const {
  {
    std::lock_guard<std::mutex> lock(cache_mu_);
    auto it = cache_.find(w);
    if (it != cache_.end()) return it->second;
  }
  TermMap res;
  auto m = find_match(w);
  if (!m) {
    res.emplace(w, Scalar(1));
  } else {
    res = apply_at(w, m->first, m->second);
  }
  std::lock_guard<std::mutex> lock(cache_mu_);
  return cache_.emplace(w, std::move(res)).first->second;
}

bool Presentation::is_normal(const Word& w) const { return !find_match(w).has_value(); }

size_t Presentation::cache_size() const {
  std::lock_guard<std::mutex> lock(cache_mu_);
  return cache_.size();
}

std::string Presentation::word_to_string(const Word& w) const {
  if (w.empty()) return "1";
  std::string s;
  size_t i = 0;
  while (i < w.size()) {
    size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    int n = static_cast<int>(j - i);
    if (letter_inv_[w[i]]) n = -n;
    if (!s.empty()) s += '*';
    s += letter_name(w[i]);
    if (n != 1) s += "^" + std::to_string(n);
    i = j;
  }
  return s;
}

std::vector<Word> Presentation::normal_words(size_t max_len) const {
  std::vector<Word> out{Word{}};
  std::vector<Word> layer{Word{}};
  for (size_t len = 1; len <= max_len; ++len) {
    std::vector<Word> next;
    for (auto& w : layer)
      for (Letter l = 0; l < num_letters(); ++l) {
        Word w2 = w;
        w2.push_back(l);
        if (is_normal(w2)) next.push_back(std::move(w2));
      }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

ConfluenceReport Presentation::check_local_confluence(size_t max_overlap_len) const {
  ConfluenceReport rep;
  auto join = [&](const Word& w, size_t p1, size_t r1, size_t p2, size_t r2) {
    ++rep.pairs_checked;
    TermMap a = apply_at(w, p1, r1), b = apply_at(w, p2, r2);
    if (a != b) {
      NCPoly pa = NCPoly::from_terms(shared_from_this(), a), pb = NCPoly::from_terms(shared_from_this(), b);
      rep.failures.push_back({word_to_string(w), pa.to_string(), pb.to_string()});
    }
  };
  for (size_t i = 0; i < rules_.size(); ++i) {
    const Word& l1 = rules_[i].lhs;
    for (size_t j = 0; j < rules_.size(); ++j) {
      const Word& l2 = rules_[j].lhs;
      // proper overlaps: suffix of l1 equals prefix of l2
      for (size_t k = 1; k < l1.size() && k < l2.size(); ++k) {
        if (!std::equal(l1.end() - k, l1.end(), l2.begin())) continue;
        Word w = l1;
        w.insert(w.end(), l2.begin() + k, l2.end());
        if (w.size() > max_overlap_len) continue;
        join(w, 0, i, l1.size() - k, j);
      }
      // inclusion of l2 in l1
      if (l2.size() <= l1.size() && l1.size() <= std::max<size_t>(max_overlap_len, l1.size())) {
        for (size_t pos = 0; pos + l2.size() <= l1.size(); ++pos) {
          if (i == j && pos == 0) continue;
          if (std::equal(l2.begin(), l2.end(), l1.begin() + pos)) join(l1, 0, i, pos, j);
        }
      }
    }
  }
  return rep;
}

NCPoly Presentation::one() const { return NCPoly(shared_from_this(), Scalar(1)); }

NCPoly Presentation::gen(const std::string& name) const {
  auto l = find_generator(name);
  if (!l) throw InputError("undeclared generator '" + name + "'");
  return NCPoly::from_word(shared_from_this(), Word{*l});
}

NCPoly Presentation::parse(std::string_view text, const std::map<std::string, NCPoly>& aliases) const {
  return eval(*parse_expr(text), aliases);
}

NCPoly Presentation::eval(const Expr& e, const std::map<std::string, NCPoly>& aliases) const {
  Algebra self = shared_from_this();
  switch (e.kind) {
    case Expr::Kind::Number:
      return NCPoly(self, Scalar(e.number));
    case Expr::Kind::Ident: {
      if (auto it = aliases.find(e.name); it != aliases.end()) return it->second;
      if (auto l = find_generator(e.name)) return NCPoly::from_word(self, Word{*l});
      if (params_.count(e.name)) return NCPoly(self, Scalar::param(e.name));
      throw InputError("undeclared identifier '" + e.name + "'");
    }
    case Expr::Kind::Neg:
      return -eval(*e.args[0], aliases);
    case Expr::Kind::Add:
      return eval(*e.args[0], aliases) + eval(*e.args[1], aliases);
    case Expr::Kind::Sub:
      return eval(*e.args[0], aliases) - eval(*e.args[1], aliases);
    case Expr::Kind::Mul:
      return eval(*e.args[0], aliases) * eval(*e.args[1], aliases);
    case Expr::Kind::Div: {
      NCPoly a = eval(*e.args[0], aliases), b = eval(*e.args[1], aliases);
      auto inv = b.syntactic_inverse();
      if (!inv) throw InputError("cannot divide by non-invertible element " + b.to_string());
      return a * *inv;
    }
    case Expr::Kind::Pow: {
      NCPoly b = eval(*e.args[0], aliases);
      if (e.exponent >= 0) return b.pow(static_cast<unsigned>(e.exponent));
      auto inv = b.syntactic_inverse();
      if (!inv) {
        if (e.args[0]->kind == Expr::Kind::Ident && find_generator(e.args[0]->name))
          throw InputError("negative power of non-invertible generator '" + e.args[0]->name + "'");
        throw InputError("negative power of non-invertible element " + b.to_string());
      }
      return inv->pow(static_cast<unsigned>(-e.exponent));
    }
    case Expr::Kind::Bracket: {
      NCPoly a = eval(*e.args[0], aliases), b = eval(*e.args[1], aliases);
      return a * b - b * a;
    }
    case Expr::Kind::Call:
      throw InputError("unknown function '" + e.name + "' in algebra expression");
  }
  throw InputError("bad expression");
}

// ------------------------------------------------------------------ NCPoly

NCPoly::NCPoly(Algebra a, const Scalar& c) : alg_(std::move(a)) {
  if (!c.is_zero()) t_.emplace(Word{}, c);
}

NCPoly NCPoly::from_word(Algebra a, const Word& w, const Scalar& c) {
  NCPoly p;
  p.alg_ = a;
  if (c.is_zero()) return p;
  for (auto& [v, d] : a->normal_form(w)) p.add_term(v, c * d);
  return p;
}

NCPoly NCPoly::from_terms(Algebra a, const TermMap& t) {
  NCPoly p;
  p.alg_ = a;
  for (auto& [w, c] : t)
    for (auto& [v, d] : a->normal_form(w)) p.add_term(v, c * d);
  return p;
}

void NCPoly::add_term(const Word& w, const Scalar& c) { add_into(t_, w, c); }

const Algebra& NCPoly::pick(const NCPoly& a, const NCPoly& b) {
  if (a.alg_ && b.alg_ && a.alg_ != b.alg_) throw std::logic_error("mixing elements of different algebras");
  return a.alg_ ? a.alg_ : b.alg_;
}

Scalar NCPoly::scalar_value() const {
  if (!is_scalar()) throw std::logic_error("element is not a scalar: " + to_string());
  return t_.empty() ? Scalar() : t_.begin()->second;
}

Scalar NCPoly::constant_term() const {
  auto it = t_.find(Word{});
  return it == t_.end() ? Scalar() : it->second;
}

NCPoly NCPoly::operator-() const {
  NCPoly r = *this;
  for (auto& [w, c] : r.t_) c = -c;
  return r;
}

NCPoly& NCPoly::operator+=(const NCPoly& o) {
  alg_ = pick(*this, o);
  for (auto& [w, c] : o.t_) add_term(w, c);
  return *this;
}

NCPoly& NCPoly::operator-=(const NCPoly& o) {
  alg_ = pick(*this, o);
  for (auto& [w, c] : o.t_) add_term(w, -c);
  return *this;
}

NCPoly operator*(const NCPoly& a, const NCPoly& b) {
  NCPoly r;
  r.alg_ = NCPoly::pick(a, b);
  if (a.is_zero() || b.is_zero()) return r;
  for (auto& [u, c] : a.t_) {
    for (auto& [v, d] : b.t_) {
      Scalar cd = c * d;
      if (u.empty() || v.empty()) {
        // one side is the unit word: the product of normal words is normal
        r.add_term(u.empty() ? v : u, cd);
        continue;
      }
      Word w = u;
      w.insert(w.end(), v.begin(), v.end());
      for (auto& [x, e] : r.alg_->normal_form(w)) r.add_term(x, cd * e);
    }
  }
  return r;
}

NCPoly operator*(const Scalar& c, const NCPoly& a) {
  NCPoly r;
  r.alg_ = a.alg_;
  if (c.is_zero()) return r;
  for (auto& [w, d] : a.t_) r.t_.emplace(w, c * d);
  return r;
}

NCPoly NCPoly::pow(unsigned n) const {
  NCPoly r(alg_, Scalar(1));
  for (unsigned i = 0; i < n; ++i) r = r * *this;
  return r;
}

std::optional<NCPoly> NCPoly::syntactic_inverse() const {
  if (t_.size() != 1) return std::nullopt;
  auto& [w, c] = *t_.begin();
  Word inv;
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    auto l = alg_->inverse_letter(*it);
    if (!l) return std::nullopt;
    inv.push_back(*l);
  }
  if (inv.empty()) return NCPoly(alg_, c.inverse());
  return from_word(alg_, inv, c.inverse());
}

NCPoly NCPoly::map_coefficients(const std::function<Scalar(const Scalar&)>& f) const {
  NCPoly r;
  r.alg_ = alg_;
  for (auto& [w, c] : t_) {
    Scalar d = f(c);
    if (!d.is_zero()) r.t_.emplace(w, d);
  }
  return r;
}

std::ostream& operator<<(std::ostream& os, const NCPoly& f) { return os << f.to_string(); }

std::string coefficient_prefix(const Scalar& c0, bool& negative) {
  Scalar c = c0;
  negative = !c.numerator().is_zero() && c.numerator().leading().c < 0;
  if (negative) c = -c;
  if (c.is_one()) return "";
  std::string s = c.to_string();
  if (c.denominator().is_one() && c.numerator().terms().size() > 1) s = "(" + s + ")";
  return s + "*";
}

std::string NCPoly::to_string() const {
  if (t_.empty()) return "0";
  std::string s;
  bool first = true;
  for (auto it = t_.rbegin(); it != t_.rend(); ++it) {
    const auto& [w, c] = *it;
    bool neg;
    std::string term;
    if (w.empty()) {
      Scalar v = c;
      neg = !v.numerator().is_zero() && v.numerator().leading().c < 0;
      if (neg) v = -v;
      term = v.to_string();
      if (v.denominator().is_one() && v.numerator().terms().size() > 1) term = "(" + term + ")";
    } else {
      term = coefficient_prefix(c, neg) + alg_->word_to_string(w);
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

// -------------------------------------------------------------- builder

PresentationBuilder& PresentationBuilder::param(const std::string& name) {
  params_.insert(name);
  return *this;
}

PresentationBuilder& PresentationBuilder::generator(const std::string& name, bool invertible) {
  for (auto& g : gens_)
    if (g.name == name) throw InputError("duplicate generator '" + name + "'");
  gens_.push_back({name, invertible});
  return *this;
}

PresentationBuilder& PresentationBuilder::relation(const std::string& lhs, const std::string& rhs,
                                                   bool inverse_variants) {
  relations_.emplace_back(lhs, rhs, inverse_variants);
  return *this;
}

PresentationBuilder& PresentationBuilder::rule(const std::string& lhs_word, const std::string& rhs) {
  rules_.emplace_back(lhs_word, rhs);
  return *this;
}

PresentationBuilder& PresentationBuilder::central(const std::string& name) {
  central_.push_back(name);
  return *this;
}

namespace {

void index_rules(std::vector<RewriteRule>& rules, std::vector<std::vector<size_t>>& by_first, size_t nletters) {
  by_first.assign(nletters, {});
  for (size_t i = 0; i < rules.size(); ++i) by_first[rules[i].lhs.front()].push_back(i);
}

}  // namespace

Algebra PresentationBuilder::build() const {
  auto make = [] { return std::shared_ptr<Presentation>(new Presentation()); };

  auto base = make();
  base->params_ = params_;
  for (auto& g : gens_) {
    if (g.name.empty()) throw InputError("empty generator name");
    Presentation::Generator gen;
    gen.name = g.name;
    gen.invertible = g.invertible;
    gen.letter = static_cast<Letter>(base->letter_gen_.size());
    base->letter_gen_.push_back(base->gens_.size());
    base->letter_inv_.push_back(false);
    if (g.invertible) {
      gen.inverse = static_cast<Letter>(base->letter_gen_.size());
      base->letter_gen_.push_back(base->gens_.size());
      base->letter_inv_.push_back(true);
    }
    base->gens_.push_back(gen);
  }
  for (auto& g : base->gens_) {
    if (!g.invertible) continue;
    base->rules_.push_back({Word{g.letter, g.inverse}, TermMap{{Word{}, Scalar(1)}}});
    base->rules_.push_back({Word{g.inverse, g.letter}, TermMap{{Word{}, Scalar(1)}}});
  }
  std::vector<RewriteRule> extra;
  for (auto& name : central_) {
    auto l = base->find_generator(name);
    if (!l) throw InputError("undeclared central generator '" + name + "'");
    const auto& g = base->gens_[base->letter_gen_[*l]];
    std::vector<Letter> mine{g.letter};
    if (g.invertible) mine.push_back(g.inverse);
    for (Letter other = 0; other < base->num_letters(); ++other) {
      if (base->letter_gen_[other] == base->letter_gen_[*l]) continue;
      for (Letter m : mine) {
        if (other < m) throw InputError("central generator '" + name + "' must precede the others");
        extra.push_back({Word{other, m}, TermMap{{Word{m, other}, Scalar(1)}}});
      }
    }
  }
  index_rules(base->rules_, base->rules_by_first_, base->num_letters());

  // relations are parsed in the free algebra (inverse rules only)
  for (auto& [lhs, rhs, variants] : relations_) {
    NCPoly diff = base->parse(lhs) - base->parse(rhs);
    if (diff.is_zero()) throw InputError("relation " + lhs + " = " + rhs + " is trivial");
    Word lead = diff.leading_word();
    if (lead.empty()) throw InputError("relation " + lhs + " = " + rhs + " forces a scalar to vanish");
    Scalar lc = diff.terms().at(lead);
    RewriteRule r{lead, {}};
    for (auto& [w, c] : diff.terms())
      if (w != lead) r.rhs.emplace(w, -(c / lc));
    extra.push_back(r);
    if (variants && lead.size() == 2 && r.rhs.size() == 1) {
      Letter b = lead[0], a = lead[1];
      auto& [w, lam] = *r.rhs.begin();
      if (w == Word{a, b} && !base->letter_inv_[a] && !base->letter_inv_[b]) {
        auto A = base->inverse_letter(a), B = base->inverse_letter(b);
        if (A) extra.push_back({Word{b, *A}, TermMap{{Word{*A, b}, lam.inverse()}}});
        if (B) extra.push_back({Word{*B, a}, TermMap{{Word{a, *B}, lam.inverse()}}});
        if (A && B) extra.push_back({Word{*B, *A}, TermMap{{Word{*A, *B}, lam}}});
      }
    }
  }
  for (auto& [lhs, rhs] : rules_) {
    NCPoly l = base->parse(lhs);
    if (l.terms().size() != 1 || !l.terms().begin()->second.is_one() || l.terms().begin()->first.empty())
      throw InputError("rule left-hand side must be a single word: " + lhs);
    Word lw = l.terms().begin()->first;
    NCPoly rp = base->parse(rhs);
    for (auto& [w, c] : rp.terms())
      if (!WordLess{}(w, lw))
        throw InputError("rule " + lhs + " -> " + rhs + " does not decrease the word order");
    extra.push_back({lw, rp.terms()});
  }

  auto p = make();
  p->params_ = base->params_;
  p->gens_ = base->gens_;
  p->letter_gen_ = base->letter_gen_;
  p->letter_inv_ = base->letter_inv_;
  p->rules_ = base->rules_;
  p->rules_.insert(p->rules_.end(), extra.begin(), extra.end());
  index_rules(p->rules_, p->rules_by_first_, p->num_letters());
  return p;
}

Algebra tensor_product(const Algebra& p1, const Algebra& p2) {
  PresentationBuilder b;
  std::set<std::string> names;
  for (auto& g : p1->generators()) {
    b.generator(g.name, g.invertible);
    names.insert(g.name);
  }
  std::vector<std::string> renamed;
  for (auto& g : p2->generators()) {
    std::string n = g.name;
    while (names.count(n)) n += "_2";
    names.insert(n);
    renamed.push_back(n);
    b.generator(n, g.invertible);
  }
  for (auto& s : p1->params()) b.param(s);
  for (auto& s : p2->params()) b.param(s);
  Algebra base = b.build();
  // rules: copy (the builder's inverse rules are already present)
  auto letter_map2 = [&](Letter l) -> Letter {
    Letter nl = *base->find_generator(renamed[p2->generator_of(l)]);
    return p2->is_inverse_letter(l) ? *base->inverse_letter(nl) : nl;
  };
  auto letter_map1 = [&](Letter l) -> Letter {
    Letter nl = *base->find_generator(p1->generators()[p1->generator_of(l)].name);
    return p1->is_inverse_letter(l) ? *base->inverse_letter(nl) : nl;
  };
  auto remap = [](const RewriteRule& r, auto&& f) {
    RewriteRule out;
    for (Letter l : r.lhs) out.lhs.push_back(f(l));
    for (auto& [w, c] : r.rhs) {
      Word nw;
      for (Letter l : w) nw.push_back(f(l));
      out.rhs.emplace(nw, c);
    }
    return out;
  };
  auto p = std::shared_ptr<Presentation>(new Presentation());
  auto& P = *p;
  P.params_ = base->params();
  P.gens_ = base->generators();
  P.letter_gen_.resize(base->num_letters());
  P.letter_inv_.resize(base->num_letters());
  for (Letter l = 0; l < base->num_letters(); ++l) {
    P.letter_gen_[l] = base->generator_of(l);
    P.letter_inv_[l] = base->is_inverse_letter(l);
  }
  for (auto& r : p1->rules()) P.rules_.push_back(remap(r, letter_map1));
  for (auto& r : p2->rules()) P.rules_.push_back(remap(r, letter_map2));
  for (Letter b2 = 0; b2 < p2->num_letters(); ++b2)
    for (Letter a1 = 0; a1 < p1->num_letters(); ++a1) {
      Letter a = letter_map1(a1), bb = letter_map2(b2);
      P.rules_.push_back({Word{bb, a}, TermMap{{Word{a, bb}, Scalar(1)}}});
    }
  index_rules(P.rules_, P.rules_by_first_, P.num_letters());
  return p;
}

// --------------------------------------------------------------- morphisms

AlgebraMorphism AlgebraMorphism::verify(const Algebra& src, const Algebra& dst,
                                        const std::map<std::string, NCPoly>& images,
                                        std::vector<MorphismViolation>* violations) {
  AlgebraMorphism m;
  m.src_ = src;
  m.dst_ = dst;
  m.images_.resize(src->num_letters());
  std::vector<MorphismViolation> local;
  for (auto& [name, img] : images) {
    std::string base = name;
    if (base.size() > 3 && base.substr(base.size() - 3) == "^-1") base = base.substr(0, base.size() - 3);
    if (!src->find_generator(base)) throw InputError("image given for undeclared generator '" + name + "'");
    if (img.algebra() && img.algebra() != dst) throw InputError("image of '" + name + "' lives in another algebra");
  }
  for (auto& g : src->generators()) {
    auto it = images.find(g.name);
    if (it == images.end()) throw InputError("missing image for generator '" + g.name + "'");
    NCPoly img = it->second;
    if (!img.algebra()) img = NCPoly(dst, Scalar()) + img;
    m.images_[g.letter] = img;
    if (g.invertible) {
      auto iit = images.find(g.name + "^-1");
      if (iit != images.end()) {
        NCPoly inv = iit->second;
        if (!inv.algebra()) inv = NCPoly(dst, Scalar()) + inv;
        m.images_[g.inverse] = inv;
      } else if (auto inv = img.syntactic_inverse()) {
        m.images_[g.inverse] = *inv;
      } else {
        local.push_back({g.name + " invertible", "image " + img.to_string() + " has no syntactic inverse"});
        m.images_[g.inverse] = NCPoly(dst, Scalar());
      }
    }
  }
  m.verified_ = true;  // provisional, so apply_word works during the check
  for (auto& r : src->rules()) {
    NCPoly lhs = m.apply_word(r.lhs);
    NCPoly rhs(dst, Scalar());
    for (auto& [w, c] : r.rhs) rhs += c * m.apply_word(w);
    NCPoly res = lhs - rhs;
    if (!res.is_zero()) {
      std::string rel = src->word_to_string(r.lhs) + " = " + NCPoly::from_terms(src, r.rhs).to_string();
      local.push_back({rel, res.to_string()});
    }
  }
  m.verified_ = local.empty();
  m.cache_ = std::make_shared<Cache>();
  if (violations) {
    *violations = local;
  } else if (!local.empty()) {
    std::string msg = "morphism violates relation " + local[0].relation + " (residue " + local[0].residue + ")";
    throw InconsistencyError(msg);
  }
  return m;
}

AlgebraMorphism AlgebraMorphism::identity(const Algebra& a) {
  AlgebraMorphism m;
  m.src_ = m.dst_ = a;
  for (Letter l = 0; l < a->num_letters(); ++l) m.images_.push_back(NCPoly::from_word(a, Word{l}));
  m.verified_ = true;
  m.inverse_ = std::make_shared<AlgebraMorphism>();
  *m.inverse_ = m;
  m.inverse_->inverse_.reset();
  return m;
}

AlgebraMorphism AlgebraMorphism::compose(const AlgebraMorphism& a, const AlgebraMorphism& b) {
  if (b.dst_ != a.src_) throw std::logic_error("compose: algebra mismatch");
  AlgebraMorphism m;
  m.src_ = b.src_;
  m.dst_ = a.dst_;
  for (auto& img : b.images_) m.images_.push_back(a.apply(img));
  m.verified_ = a.verified_ && b.verified_;
  if (a.inverse_ && b.inverse_) {
    AlgebraMorphism inv;
    inv.src_ = a.dst_;
    inv.dst_ = b.src_;
    for (auto& img : a.inverse_->images_) inv.images_.push_back(b.inverse_->apply(img));
    inv.verified_ = m.verified_;
    m.inverse_ = std::make_shared<AlgebraMorphism>(std::move(inv));
  }
  return m;
}

NCPoly AlgebraMorphism::apply_word(const Word& w) const {
  if (w.empty()) return NCPoly(dst_, Scalar(1));
  if (w.size() == 1) return images_[w[0]];
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->words.find(w);
    if (it != cache_->words.end()) return it->second;
  }
  Word prefix(w.begin(), w.end() - 1);
  NCPoly r = apply_word(prefix) * images_[w.back()];
  std::lock_guard<std::mutex> lock(cache_->mu);
  cache_->words.emplace(w, r);
  return r;
}

NCPoly AlgebraMorphism::apply(const NCPoly& f) const {
  if (!verified_) throw std::logic_error("apply of an unverified morphism");
  if (f.algebra() && f.algebra() != src_) throw std::logic_error("morphism applied outside its source algebra");
  NCPoly r(dst_, Scalar());
  for (auto& [w, c] : f.terms()) r += c * apply_word(w);
  return r;
}

void AlgebraMorphism::set_inverse(const AlgebraMorphism& inv) {
  if (inv.src_ != dst_ || inv.dst_ != src_) throw InputError("inverse morphism has mismatched algebras");
  for (auto& g : src_->generators()) {
    NCPoly x = NCPoly::from_word(src_, Word{g.letter});
    if (inv.apply(apply(x)) != x || apply(inv.apply(NCPoly::from_word(dst_, Word{g.letter}))) != NCPoly::from_word(dst_, Word{g.letter}))
      throw InconsistencyError("supplied inverse does not invert the morphism on '" + g.name + "'");
  }
  inverse_ = std::make_shared<AlgebraMorphism>(inv);
  inverse_->inverse_.reset();
}

bool AlgebraMorphism::is_scaling() const {
  for (auto& g : src_->generators()) {
    const NCPoly& img = images_[g.letter];
    if (img.terms().size() != 1 || img.terms().begin()->first != Word{g.letter}) return false;
  }
  return true;
}

AlgebraMorphism AlgebraMorphism::scaling_inverse() const {
  std::map<std::string, NCPoly> imgs;
  for (auto& g : src_->generators()) {
    const NCPoly& img = images_[g.letter];
    imgs[g.name] = img.terms().begin()->second.inverse() * NCPoly::from_word(src_, Word{g.letter});
  }
  return verify(dst_, src_, imgs);
}

bool AlgebraMorphism::same_images(const AlgebraMorphism& o) const {
  for (auto& g : src_->generators())
    if (images_[g.letter] != o.images_[g.letter]) return false;
  return true;
}

std::string AlgebraMorphism::describe() const {
  std::string s;
  for (auto& g : src_->generators()) {
    if (!s.empty()) s += ", ";
    s += g.name + " -> " + images_[g.letter].to_string();
  }
  return s;
}

// ---------------------------------------------------------- basis probe

BasisProbeReport basis_independence_probe(const Algebra& a,
                                          const std::vector<std::function<NCPoly(const NCPoly&)>>& derivations,
                                          size_t degree_bound) {
  BasisProbeReport rep;
  std::vector<Word> words = a->normal_words(degree_bound);
  size_t ns = derivations.size(), nw = words.size();
  rep.unknowns = static_cast<int>(ns * nw);
  std::map<Word, SparseRow, WordLess> eqs;
  std::vector<SparseRow> rows;
  for (auto& m : words) {
    NCPoly mono = NCPoly::from_word(a, m);
    std::map<Word, SparseRow, WordLess> local;
    for (size_t s = 0; s < ns; ++s) {
      NCPoly e = derivations[s](mono);
      if (e.is_zero()) continue;
      for (size_t k = 0; k < nw; ++k) {
        NCPoly prod = e * NCPoly::from_word(a, words[k]);
        int col = static_cast<int>(s * nw + k);
        for (auto& [w, c] : prod.terms()) {
          auto& row = local[w];
          auto it = row.find(col);
          if (it == row.end()) {
            row.emplace(col, c);
          } else {
            it->second += c;
            if (it->second.is_zero()) row.erase(it);
          }
        }
      }
    }
    for (auto& [w, row] : local)
      if (!row.empty()) rows.push_back(row);
  }
  rep.equations = static_cast<int>(rows.size());
  auto ker = kernel(rows, rep.unknowns);
  rep.dependency_found = !ker.empty();
  for (auto& v : ker) {
    std::vector<NCPoly> fs(ns, NCPoly(a, Scalar()));
    for (size_t s = 0; s < ns; ++s)
      for (size_t k = 0; k < nw; ++k)
        if (!v[s * nw + k].is_zero()) fs[s] += NCPoly::from_word(a, words[k], v[s * nw + k]);
    rep.witnesses.push_back(fs);
  }
  return rep;
}

}  // namespace nccalc
