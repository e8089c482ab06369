#include "nccalc/io.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "nccalc/error.hpp"

namespace nccalc {

namespace {

std::string strip(std::string_view s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

struct Line {
  int number;
  std::string key, value;  // key empty for raw lines
  std::string raw;
};

struct Section {
  std::string name;
  int number = 0;
  std::vector<Line> lines;
};

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ParseError("line " + std::to_string(line) + ": " + msg);
}

std::pair<std::string, std::string> split_eq(const Line& l) {
  auto eq = l.raw.find('=');
  if (eq == std::string::npos) fail(l.number, "expected 'key = value'");
  return {strip(l.raw.substr(0, eq)), strip(l.raw.substr(eq + 1))};
}

bool parse_bool(const Line& l, const std::string& v) {
  if (v == "true" || v == "yes") return true;
  if (v == "false" || v == "no") return false;
  fail(l.number, "expected true or false, got '" + v + "'");
}

// "label.rest" -> (label, rest)
std::pair<std::string, std::string> split_dot(const Line& l, const std::string& key) {
  auto dot = key.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == key.size()) fail(l.number, "expected '<label>.<name>' key");
  return {key.substr(0, dot), key.substr(dot + 1)};
}

const std::set<std::string> known_sections = {
    "meta",    "params",       "generators", "relations", "rules",   "directions", "automorphisms", "weights",
    "twists",  "derivations",  "theta-images", "two-forms", "aliases", "fixtures",   "connection",    "metric"};

}  // namespace

std::vector<std::string> split_list(const std::string& text) {
  std::string t = strip(text);
  if (t.size() >= 2 && t.front() == '[' && t.back() == ']') t = t.substr(1, t.size() - 2);
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char ch : t) {
    if (ch == '(' || ch == '[') ++depth;
    if (ch == ')' || ch == ']') --depth;
    if (ch == ',' && depth == 0) {
      out.push_back(strip(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!strip(cur).empty() || !out.empty()) out.push_back(strip(cur));
  for (auto& s : out)
    if (s.empty()) throw ParseError("empty list entry in '" + text + "'");
  return out;
}

std::string Fixture::text() const {
  switch (kind) {
    case Kind::Equal: return lhs + " = " + rhs;
    case Kind::Central: return "central: " + lhs;
    case Kind::NotCentral: return "not-central: " + lhs;
    case Kind::Constant: return "constant: " + lhs;
  }
  return lhs;
}

Definition parse_definition(const std::string& text) {
  std::vector<Section> sections;
  {
    std::istringstream in(text);
    std::string raw;
    int n = 0;
    while (std::getline(in, raw)) {
      ++n;
      std::string s = strip(raw);
      if (s.empty() || s[0] == '#') continue;
      if (s.front() == '[' && s.back() == ']' && s.find('=') == std::string::npos &&
          known_sections.count(strip(s.substr(1, s.size() - 2)))) {
        std::string name = strip(s.substr(1, s.size() - 2));
        for (auto& sec : sections)
          if (sec.name == name) fail(n, "duplicate section [" + name + "]");
        sections.push_back({name, n, {}});
        continue;
      }
      if (sections.empty()) fail(n, "content before the first section");
      sections.back().lines.push_back({n, "", "", s});
    }
  }
  auto find = [&](const std::string& name) -> const Section* {
    for (auto& s : sections)
      if (s.name == name) return &s;
    return nullptr;
  };

  Definition def;
  if (auto* s = find("meta"))
    for (auto& l : s->lines) {
      auto [k, v] = split_eq(l);
      if (k == "id") def.id = v;
      else if (k == "title") def.title = v;
      else fail(l.number, "unknown key '" + k + "' in [meta]");
    }

  // presentation
  PresentationBuilder b;
  std::vector<std::string> side;
  if (auto* s = find("params"))
    for (auto& l : s->lines) {
      auto [k, v] = split_eq(l);
      if (k == "names") {
        for (auto& p : split_list(v)) b.param(p);
      } else if (k == "side_conditions") {
        for (auto& c : split_list(v)) side.push_back(c);
      } else {
        fail(l.number, "unknown key '" + k + "' in [params]");
      }
    }
  const Section* gens = find("generators");
  if (!gens) throw ParseError("missing [generators] section");
  {
    std::vector<std::string> names;
    std::set<std::string> inv, central;
    for (auto& l : gens->lines) {
      auto [k, v] = split_eq(l);
      if (k == "names") names = split_list(v);
      else if (k == "invertible") for (auto& g : split_list(v)) inv.insert(g);
      else if (k == "central") for (auto& g : split_list(v)) central.insert(g);
      else fail(l.number, "unknown key '" + k + "' in [generators]");
    }
    if (names.empty()) fail(gens->number, "no generator names");
    std::set<std::string> known(names.begin(), names.end());
    for (auto& g : inv)
      if (!known.count(g)) fail(gens->number, "unknown invertible generator '" + g + "'");
    for (auto& g : central)
      if (!known.count(g)) fail(gens->number, "unknown central generator '" + g + "'");
    for (auto& g : names) b.generator(g, inv.count(g) > 0);
    for (auto& g : names)
      if (central.count(g)) b.central(g);
  }
  if (auto* s = find("relations"))
    for (auto& l : s->lines) {
      auto [lhs, rhs] = split_eq(l);
      b.relation(lhs, rhs);
    }
  if (auto* s = find("rules"))
    for (auto& l : s->lines) {
      auto [lhs, rhs] = split_eq(l);
      b.rule(lhs, rhs);
    }
  def.algebra = b.build();
  const Algebra& A = def.algebra;
  def.spec.algebra = A;
  def.spec.side_conditions = side;

  // calculus
  if (auto* s = find("directions")) {
    def.has_calculus = true;
    CalculusSpec& spec = def.spec;
    std::map<std::string, size_t> idx;
    std::map<std::string, std::string> elements, modes;
    for (auto& l : s->lines) {
      auto [k, v] = split_eq(l);
      if (k == "labels") {
        for (auto& lab : split_list(v)) {
          if (idx.count(lab)) fail(l.number, "duplicate label '" + lab + "'");
          idx[lab] = spec.directions.size();
          DirectionSpec d;
          d.label = lab;
          spec.directions.push_back(d);
        }
      } else if (k == "group") {
        spec.group = Group::parse(v);
      } else if (k == "first_order_only") {
        spec.first_order_only = parse_bool(l, v);
      } else if (k.rfind("element.", 0) == 0) {
        elements[k.substr(8)] = v;
      } else if (k.rfind("mode.", 0) == 0) {
        modes[k.substr(5)] = v;
      } else {
        fail(l.number, "unknown key '" + k + "' in [directions]");
      }
    }
    if (spec.directions.empty()) fail(s->number, "no direction labels");
    auto dir = [&](const Line& l, const std::string& lab) -> DirectionSpec& {
      auto it = idx.find(lab);
      if (it == idx.end()) fail(l.number, "unknown direction label '" + lab + "'");
      return spec.directions[it->second];
    };
    for (auto& [lab, v] : elements) {
      auto it = idx.find(lab);
      if (it == idx.end()) fail(s->number, "element for unknown label '" + lab + "'");
      if (!spec.group) fail(s->number, "group elements given without a group");
      spec.directions[it->second].element = spec.group->parse_element(v);
    }
    for (auto& [lab, v] : modes) {
      auto it = idx.find(lab);
      if (it == idx.end()) fail(s->number, "mode for unknown label '" + lab + "'");
      auto& d = spec.directions[it->second];
      if (v == "weight") d.mode = DirectionMode::Weight;
      else if (v == "twist") d.mode = DirectionMode::Twist;
      else if (v == "derivation") d.mode = DirectionMode::Derivation;
      else fail(s->number, "unknown mode '" + v + "'");
    }
    if (auto* a = find("automorphisms"))
      for (auto& l : a->lines) {
        auto [k, v] = split_eq(l);
        bool inverse = k.rfind("inverse.", 0) == 0;
        auto [lab, g] = split_dot(l, inverse ? k.substr(8) : k);
        auto& d = dir(l, lab);
        (inverse ? d.inverse_images : d.images)[g] = A->parse(v);
      }
    if (auto* a = find("weights"))
      for (auto& l : a->lines) {
        auto [k, v] = split_eq(l);
        bool inverse = k.rfind("inverse.", 0) == 0;
        auto& d = dir(l, inverse ? k.substr(8) : k);
        (inverse ? d.weight_inverse : d.weight) = A->parse(v);
      }
    if (auto* a = find("twists"))
      for (auto& l : a->lines) {
        auto [k, v] = split_eq(l);
        auto& d = dir(l, k);
        d.mode = DirectionMode::Twist;
        d.lambda = A->parse(v);
      }
    if (auto* a = find("derivations"))
      for (auto& l : a->lines) {
        auto [k, v] = split_eq(l);
        auto [lab, g] = split_dot(l, k);
        auto& d = dir(l, lab);
        d.mode = DirectionMode::Derivation;
        d.e_images[g] = A->parse(v);
      }
    if (auto* a = find("theta-images"))
      for (auto& l : a->lines) {
        auto [k, v] = split_eq(l);
        auto [lab, target] = split_dot(l, k);
        dir(l, lab).theta_images[target] = v;
      }
    if (auto* a = find("two-forms")) {
      TwoFormSpec t;
      for (auto& l : a->lines) {
        auto [k, v] = split_eq(l);
        if (k == "relation") t.relations.push_back(v);
        else if (k == "zeta") t.zeta = v;
        else if (k.rfind("delta.", 0) == 0) t.delta[k.substr(6)] = v;
        else if (k.rfind("dtheta.", 0) == 0) t.dtheta[k.substr(7)] = v;
        else fail(l.number, "unknown key '" + k + "' in [two-forms]");
      }
      spec.two_forms = t;
    }
  } else {
    for (const char* n : {"automorphisms", "weights", "twists", "derivations", "theta-images", "two-forms"})
      if (find(n)) throw ParseError(std::string("[") + n + "] needs a [directions] section");
  }

  if (auto* s = find("aliases"))
    for (auto& l : s->lines) def.aliases.push_back(split_eq(l));
  if (auto* s = find("fixtures"))
    for (auto& l : s->lines) {
      Fixture f;
      auto prefixed = [&](const char* p, Fixture::Kind k) {
        std::string_view pv(p);
        if (l.raw.rfind(pv, 0) != 0) return false;
        f.kind = k;
        f.lhs = strip(l.raw.substr(pv.size()));
        return true;
      };
      if (!prefixed("central:", Fixture::Kind::Central) && !prefixed("not-central:", Fixture::Kind::NotCentral) &&
          !prefixed("constant:", Fixture::Kind::Constant)) {
        auto [lhs, rhs] = split_eq(l);
        f.lhs = lhs;
        f.rhs = rhs;
      }
      def.fixtures.push_back(f);
    }
  auto block = [&](const char* name) -> std::optional<std::string> {
    auto* s = find(name);
    if (!s) return std::nullopt;
    std::string out;
    for (auto& l : s->lines) out += l.raw + "\n";
    return out;
  };
  def.connection_text = block("connection");
  def.metric_text = block("metric");
  return def;
}

}  // namespace nccalc
