#include "nccalc/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "nccalc/error.hpp"
#include "nccalc/geometry.hpp"
#include "nccalc/presets.hpp"

namespace nccalc::cli {

namespace {

using json = nlohmann::json;

struct Options {
  std::string preset, file, expr, with, format = "text", connection, metric, coords, grid = "0, 1, -1";
  std::vector<std::string> suites;
  int jobs = 1;
  bool all_presets = false;
  std::string preset_id;  // preset show|run argument
};

struct Result {
  json data = json::object();
  std::vector<std::string> text;
  int status = kPass;

  void line(std::string s) { text.push_back(std::move(s)); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> env_side_conditions() {
  const char* v = std::getenv("NCCALC_SIDE_CONDITIONS");
  if (!v || !*v) return {};
  return split_list(v);
}

json report_json(const CheckReport& r) {
  json items = json::array();
  for (auto& i : r.items) items.push_back({{"what", i.what}, {"ok", i.ok}, {"detail", i.detail}});
  return {{"title", r.title}, {"ok", r.ok()}, {"failures", r.failures()}, {"items", items}};
}

void report_text(Result& res, const CheckReport& r) {
  for (auto& i : r.items) res.line(std::string(i.ok ? "PASS " : "FAIL ") + i.what + (i.ok || i.detail.empty() ? "" : " :: " + i.detail));
  res.line(std::to_string(r.items.size()) + " checks, " + std::to_string(r.failures()) + " failed");
}

void assumptions(Result& res, const PresetBundle& b) {
  const auto& side = b.definition.spec.side_conditions;
  res.data["side_conditions"] = side;
  res.data["assumptions"] = b.assumptions;
  std::string l;
  for (auto& c : side) l += (l.empty() ? "" : ", ") + c;
  if (!l.empty()) res.line("side conditions (nonzero): " + l);
  l.clear();
  for (auto& c : b.assumptions) l += (l.empty() ? "" : ", ") + c;
  if (!l.empty()) res.line("assumed while loading: " + l);
}

// ----------------------------------------------------------------- session

struct Session {
  BundlePtr bundle;

  const Calculus& calc() const {
    if (!bundle->calculus) throw InputError("the definition has no calculus");
    return *bundle->calculus;
  }
  const Algebra& algebra() const { return bundle->definition.algebra; }
};

// returns a check-failure result instead of a session when the definition
// fails its own fixtures
std::optional<Session> load_session(const Options& o, Result& res) {
  if (o.preset.empty() == o.file.empty()) throw InputError("give exactly one of --preset and --file");
  auto extra = env_side_conditions();
  BundlePtr b;
  if (!o.preset.empty()) {
    if (extra.empty()) {
      b = load_preset(o.preset);
    } else {
      b = build_bundle(preset_text(o.preset), extra);
      if (!b->checks.ok()) throw InconsistencyError("preset " + o.preset + " fails its checks under the side conditions");
    }
  } else {
    b = build_bundle(read_file(o.file), extra);
    if (!b->checks.ok()) {
      res.data["load"] = report_json(b->checks);
      res.line("definition fails its checks:");
      report_text(res, b->checks);
      res.status = kCheckFailure;
      return std::nullopt;
    }
  }
  return Session{b};
}

Connection session_connection(const Session& s, const Options& o) {
  if (!o.connection.empty()) return parse_connection(s.calc(), read_file(o.connection));
  if (s.bundle->connection) return *s.bundle->connection;
  throw InputError("no connection: pass --connection");
}

Metric session_metric(const Session& s, const Options& o) {
  if (!o.metric.empty()) return parse_metric(s.calc(), read_file(o.metric));
  if (s.bundle->metric) return *s.bundle->metric;
  throw InputError("no metric: pass --metric");
}

std::string need_expr(const Options& o) {
  if (o.expr.empty()) throw InputError("missing --expr");
  return o.expr;
}

std::vector<std::pair<std::string, NCPoly>> letters(const Algebra& A) {
  std::vector<std::pair<std::string, NCPoly>> out;
  for (auto& g : A->generators()) {
    out.push_back({g.name, A->gen(g.name)});
    if (g.invertible) out.push_back({g.name + "^-1", A->parse(g.name + "^-1")});
  }
  return out;
}

// ----------------------------------------------------------------- commands

void cmd_normalize(const Session& s, const Options& o, Result& res) {
  std::string v;
  if (s.bundle->calculus) v = s.calc().format(s.bundle->form(need_expr(o)));
  else v = s.algebra()->parse(need_expr(o)).to_string();
  res.data["value"] = v;
  res.line(v);
}

void cmd_d(const Session& s, const Options& o, Result& res) {
  const Calculus& c = s.calc();
  Form w = s.bundle->form(need_expr(o));
  Form out(c.algebra());
  if (w.degrees() == std::set<size_t>{0} || w.is_zero()) {
    out = c.d(w.coefficient({}));
  } else {
    if (!c.has_two_forms()) throw InputError("d on forms needs a two-form structure; this calculus is first-order only");
    out = c.d_form(w);
  }
  res.data["value"] = c.format(out);
  res.line(c.format(out));
}

void cmd_commute(const Session& s, const Options& o, Result& res) {
  const Calculus& c = s.calc();
  Form w = s.bundle->form(need_expr(o));
  res.data["value"] = c.format(w);
  res.line(c.format(w));
  if (!o.with.empty()) {
    Form f = s.bundle->form(o.with);
    Form prod = c.wedge(w, f), comm = c.commutator(w, f);
    res.data["product"] = c.format(prod);
    res.data["commutator"] = c.format(comm);
    res.line("(" + o.expr + ")*(" + o.with + ") = " + c.format(prod));
    res.line("[" + o.expr + ", " + o.with + "] = " + c.format(comm));
  }
}

void cmd_relations(const Session& s, const Options&, Result& res) {
  const Calculus& c = s.calc();
  const Algebra& A = c.algebra();
  json theta = json::array(), dif = json::array(), brackets = json::array();
  for (size_t t = 0; t < c.size(); ++t)
    for (auto& [name, f] : letters(A)) {
      std::string lhs = c.format(c.theta(t)) + "*" + name, rhs = c.format(c.right_mul(c.theta(t), f));
      theta.push_back({{"lhs", lhs}, {"rhs", rhs}});
      res.line(lhs + " = " + rhs);
    }
  for (auto& g : A->generators()) {
    std::string rhs = c.format(c.d(A->gen(g.name)));
    dif.push_back({{"lhs", "d(" + g.name + ")"}, {"rhs", rhs}});
    res.line("d(" + g.name + ") = " + rhs);
  }
  for (auto& g : A->generators())
    for (auto& h : A->generators()) {
      std::string lhs = "[d(" + g.name + "), " + h.name + "]";
      std::string rhs = c.format(c.commutator(c.d(A->gen(g.name)), c.scalar_form(A->gen(h.name))));
      brackets.push_back({{"lhs", lhs}, {"rhs", rhs}});
      res.line(lhs + " = " + rhs);
    }
  res.data["theta"] = theta;
  res.data["differentials"] = dif;
  res.data["brackets"] = brackets;
}

void cmd_two_forms(const Session& s, const Options&, Result& res) {
  const Calculus& c = s.calc();
  if (!c.has_two_forms()) {
    res.data["first_order_only"] = true;
    res.line("first-order only: no two-form structure");
    return;
  }
  const TwoFormStructure& t = c.two_forms();
  json basis = json::array(), rules = json::array();
  std::string b;
  for (auto [i, j] : t.basis) {
    std::string w = c.format_word({i, j});
    basis.push_back(w);
    b += (b.empty() ? "" : ", ") + w;
  }
  res.line("basis: " + b);
  for (auto& [pr, f] : t.rules) {
    std::string lhs = c.format_word({pr.first, pr.second});
    rules.push_back({{"lhs", lhs}, {"rhs", c.format(f)}});
    res.line(lhs + " = " + c.format(f));
  }
  res.data["first_order_only"] = false;
  res.data["derived"] = t.derived;
  res.data["basis"] = basis;
  res.data["relations"] = rules;
  json delta = json::object(), dtheta = json::object();
  for (size_t k = 0; k < c.size(); ++k) {
    std::string th = c.format(c.theta(k));
    if (c.is_inner()) {
      delta[c.label(k)] = c.format(c.delta(c.theta(k)));
      res.line("Delta(" + th + ") = " + c.format(c.delta(c.theta(k))));
    }
    dtheta[c.label(k)] = c.format(c.d_form(c.theta(k)));
    res.line("d(" + th + ") = " + c.format(c.d_form(c.theta(k))));
  }
  if (c.is_inner()) {
    res.data["delta"] = delta;
    res.data["zeta"] = c.format(c.zeta());
    res.line("zeta = " + c.format(c.zeta()));
  }
  res.data["dtheta"] = dtheta;
}

// ------------------------------------------------------------------ verify

const std::vector<std::string> kSuites = {"fixtures", "inner", "leibniz", "d2", "differentiability", "twisted-2forms"};

CheckReport leibniz_suite(const Calculus& c) {
  CheckReport R;
  R.title = "leibniz";
  const Algebra& A = c.algebra();
  auto left = A->normal_words(1), right = A->normal_words(2);
  for (auto& wf : left)
    for (auto& wg : right) {
      NCPoly f = NCPoly::from_word(A, wf), g = NCPoly::from_word(A, wg);
      std::string pair = f.to_string() + ", " + g.to_string();
      for (size_t s = 0; s < c.size(); ++s) {
        NCPoly r = c.e(s, f * g) - c.e(s, f) * c.phi(s).apply(g) - f * c.e(s, g);
        if (!r.is_zero()) R.add("e_" + c.label(s) + " twisted Leibniz at " + pair, false, r.to_string());
      }
      Form r = c.d(f * g) - c.right_mul(c.d(f), g) - f * c.d(g);
      if (!r.is_zero()) R.add("d Leibniz at " + pair, false, c.format(r));
    }
  R.add("twisted Leibniz on " + std::to_string(left.size() * right.size()) + " word pairs", R.items.empty());
  return R;
}

struct SuiteResult {
  std::string name;
  std::optional<CheckReport> report;
  std::string skipped;
};

SuiteResult run_suite(const BundlePtr& b, const std::string& suite) {
  const Calculus& c = *b->calculus;
  SuiteResult r{suite, std::nullopt, ""};
  if (suite == "fixtures") {
    r.report = b->checks;
  } else if (suite == "inner") {
    if (!c.is_inner()) {
      r.skipped = "calculus is not inner";
    } else {
      CheckReport rep = verify_inner_first_order(c);
      if (c.has_two_forms()) rep.merge(verify_inner_identities(c));
      r.report = rep;
    }
  } else if (suite == "leibniz") {
    r.report = leibniz_suite(c);
  } else if (suite == "d2") {
    if (!c.has_two_forms()) r.skipped = "first-order only";
    else r.report = verify_d_squared(c);
  } else if (suite == "differentiability") {
    CheckReport rep;
    rep.title = "differentiability";
    for (size_t s = 0; s < c.size(); ++s) {
      std::vector<Form> images;
      for (size_t t = 0; t < c.size(); ++t) images.push_back(c.theta_image(s, t));
      auto d = check_differentiability(c, c.phi(s), images, false);
      for (auto& i : d.report.items) rep.add("phi_" + c.label(s) + ": " + i.what, i.ok, i.detail);
    }
    r.report = rep;
  } else if (suite == "twisted-2forms") {
    if (!c.has_two_forms()) {
      r.skipped = "first-order only";
    } else if (!c.is_inner()) {
      r.skipped = "calculus is not inner";
    } else {
      CheckReport rep = verify_two_forms(c);
      const auto& spec = b->definition.spec;
      bool twisted = std::any_of(spec.directions.begin(), spec.directions.end(),
                                 [](auto& d) { return d.mode == DirectionMode::Twist; });
      if (twisted && spec.two_forms) rep.merge(verify_twisted_two_forms(c, *spec.two_forms));
      r.report = rep;
    }
  } else {
    throw InputError("unknown suite '" + suite + "'");
  }
  return r;
}

json suites_json(const std::vector<SuiteResult>& rs) {
  json j = json::object();
  for (auto& r : rs) j[r.name] = r.report ? report_json(*r.report) : json{{"skipped", r.skipped}};
  return j;
}

bool suites_ok(const std::vector<SuiteResult>& rs) {
  return std::all_of(rs.begin(), rs.end(), [](auto& r) { return !r.report || r.report->ok(); });
}

void suites_text(Result& res, const std::vector<SuiteResult>& rs, bool brief) {
  for (auto& r : rs) {
    if (!r.report) {
      res.line("[" + r.name + "] skipped: " + r.skipped);
    } else if (brief) {
      res.line("[" + r.name + "] " + (r.report->ok() ? "pass" : "FAIL") + " (" + std::to_string(r.report->items.size()) +
               " checks, " + std::to_string(r.report->failures()) + " failed)");
      for (auto& i : r.report->items)
        if (!i.ok) res.line("  FAIL " + i.what + (i.detail.empty() ? "" : " :: " + i.detail));
    } else {
      res.line("[" + r.name + "]");
      report_text(res, *r.report);
    }
  }
}

std::vector<std::string> requested_suites(const Options& o) {
  std::vector<std::string> out;
  for (auto& s : o.suites)
    for (auto& t : split_list(s)) {
      if (std::find(kSuites.begin(), kSuites.end(), t) == kSuites.end()) throw InputError("unknown suite '" + t + "'");
      if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    }
  return out.empty() ? kSuites : out;
}

// Runs jobs on up to n threads; results keep the input order.
template <class T, class F>
std::vector<T> parallel_map(size_t count, int n, F&& f) {
  std::vector<T> out(count);
  if (n <= 1 || count <= 1) {
    for (size_t i = 0; i < count; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<size_t> next{0};
  std::vector<std::future<void>> workers;
  std::vector<std::exception_ptr> errors(count);
  for (int w = 0; w < std::min<int>(n, static_cast<int>(count)); ++w)
    workers.push_back(std::async(std::launch::async, [&] {
      for (size_t i; (i = next++) < count;) {
        try {
          out[i] = f(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    }));
  for (auto& w : workers) w.get();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

void cmd_verify(const Options& o, Result& res) {
  auto suites = requested_suites(o);
  if (o.all_presets) {
    if (!o.preset.empty() || !o.file.empty()) throw InputError("--all-presets takes no --preset or --file");
    auto ids = preset_ids();
    std::sort(ids.begin(), ids.end());
    auto extra = env_side_conditions();
    // bundles are built serially: the catalog cache is shared
    std::vector<BundlePtr> bundles;
    for (auto& id : ids) bundles.push_back(extra.empty() ? load_preset(id) : build_bundle(preset_text(id), extra));
    auto results = parallel_map<std::vector<SuiteResult>>(ids.size(), o.jobs, [&](size_t i) {
      std::vector<SuiteResult> rs;
      for (auto& s : suites) rs.push_back(run_suite(bundles[i], s));
      return rs;
    });
    json all = json::object();
    for (size_t i = 0; i < ids.size(); ++i) {
      all[ids[i]] = suites_json(results[i]);
      bool ok = suites_ok(results[i]);
      res.line(ids[i] + ": " + (ok ? "pass" : "FAIL"));
      Result sub;
      suites_text(sub, results[i], true);
      for (auto& l : sub.text) res.line("  " + l);
      if (!ok) res.status = kCheckFailure;
    }
    res.data["presets"] = all;
    return;
  }
  Session s;
  if (auto loaded = load_session(o, res)) s = *loaded;
  else return;
  s.calc();
  auto results = parallel_map<SuiteResult>(suites.size(), o.jobs, [&](size_t i) { return run_suite(s.bundle, suites[i]); });
  res.data["suites"] = suites_json(results);
  assumptions(res, *s.bundle);
  suites_text(res, results, false);
  if (!suites_ok(results)) res.status = kCheckFailure;
}

// ---------------------------------------------------------------- geometry

void cmd_theta_solve(const Session& s, const Options& o, Result& res) {
  const Calculus& c = s.calc();
  const Algebra& A = c.algebra();
  std::vector<std::string> names;
  if (o.coords.empty()) {
    for (auto& g : A->generators()) names.push_back(g.name);
  } else {
    names = split_list(o.coords);
  }
  std::vector<NCPoly> coords;
  for (auto& n : names) coords.push_back(A->parse(n));
  auto sol = solve_theta_in_differentials(c, coords);
  res.data["ok"] = sol.ok;
  if (!sol.ok) {
    res.data["failure"] = sol.failure;
    res.line("no solution: " + sol.failure);
    res.status = kCheckFailure;
    return;
  }
  json theta = json::object();
  for (size_t t = 0; t < c.size(); ++t) {
    std::string rhs;
    for (size_t i = 0; i < coords.size(); ++i) {
      if (sol.inverse[t][i].is_zero()) continue;
      rhs += (rhs.empty() ? "" : " + ") + std::string("(") + sol.inverse[t][i].to_string() + ")*d(" + names[i] + ")";
    }
    if (rhs.empty()) rhs = "0";
    theta[c.label(t)] = rhs;
    res.line(c.format(c.theta(t)) + " = " + rhs);
  }
  res.data["theta"] = theta;
}

void need_inner(const Calculus& c, const char* what) {
  if (!c.is_inner()) throw InputError(std::string(what) + " needs an inner calculus");
}

void cmd_torsion(const Session& s, const Options& o, Result& res) {
  const Calculus& c = s.calc();
  need_inner(c, "torsion");
  if (!c.has_two_forms()) throw InputError("torsion needs a two-form structure");
  Connection conn = session_connection(s, o);
  json out = json::object();
  if (!o.expr.empty()) {
    Form t = torsion(c, conn, s.bundle->form(o.expr));
    out[o.expr] = c.format(t);
    res.line("Theta(" + o.expr + ") = " + c.format(t));
  } else {
    auto ts = torsion_theta(c, conn);
    for (size_t k = 0; k < ts.size(); ++k) {
      out[c.format(c.theta(k))] = c.format(ts[k]);
      res.line("Theta(" + c.format(c.theta(k)) + ") = " + c.format(ts[k]));
    }
  }
  res.data["torsion"] = out;
}

void cmd_torsion_conditions(const Session& s, const Options& o, Result& res) {
  const Calculus& c = s.calc();
  need_inner(c, "torsion");
  if (!c.has_two_forms()) throw InputError("torsion needs a two-form structure");
  auto conds = torsion_free_conditions(c);
  std::optional<Connection> conn;
  if (!o.connection.empty()) conn = session_connection(s, o);
  json eqs = json::array();
  for (auto& e : conds.equations) {
    json j = {{"equation", e.normalized(c)}, {"kind", pair_kind_name(e.kind)},
              {"pair", c.format_word({e.pair.first, e.pair.second})}};
    std::string l = e.normalized(c) + "  [" + pair_kind_name(e.kind) + "]";
    if (conn) {
      NCPoly r = e.residue(c, *conn);
      j["satisfied"] = r.is_zero();
      l += r.is_zero() ? "  satisfied" : "  residue " + r.to_string();
      if (!r.is_zero()) res.status = kCheckFailure;
    }
    eqs.push_back(j);
    res.line(l);
  }
  if (conds.equations.empty()) res.line("no conditions: every connection is torsion-free");
  res.data["equations"] = eqs;
}

void cmd_curvature(const Session& s, const Options& o, Result& res) {
  const Calculus& c = s.calc();
  need_inner(c, "curvature");
  if (!c.has_two_forms()) throw InputError("curvature needs a two-form structure");
  Connection conn = session_connection(s, o);
  json out = json::object();
  std::vector<std::pair<std::string, Form>> targets;
  if (!o.expr.empty()) targets.push_back({o.expr, s.bundle->form(o.expr)});
  else
    for (size_t k = 0; k < c.size(); ++k) targets.push_back({c.format(c.theta(k)), c.theta(k)});
  for (auto& [name, w] : targets) {
    std::string v = format_tensor(c, curvature(c, conn, w));
    if (v.empty()) v = "0";
    out[name] = v;
    res.line("R(" + name + ") = " + v);
  }
  res.data["curvature"] = out;
}

void cmd_metric_check(const Session& s, const Options& o, Result& res) {
  const Calculus& c = s.calc();
  Metric g = session_metric(s, o);
  CheckReport rep = metric_invariance(c, g).to_check(c);
  std::optional<Connection> conn;
  if (!o.connection.empty() || s.bundle->connection) conn = session_connection(s, o);
  if (conn) rep.merge(metric_compatibility(c, *conn, g).to_check(c));
  res.data["report"] = report_json(rep);
  report_text(res, rep);
  if (!rep.ok()) res.status = kCheckFailure;
}

void cmd_levi_civita(const Session& s, const Options& o, Result& res) {
  const Calculus& c = s.calc();
  Metric g = session_metric(s, o);
  std::vector<NCPoly> grid;
  for (auto& v : split_list(o.grid)) grid.push_back(c.algebra()->parse(v));
  auto found = levi_civita_search(c, g, grid, o.jobs);
  json conns = json::array();
  res.line(found.summary());
  for (auto& conn : found.found) {
    std::string t = format_connection(c, conn);
    conns.push_back(t);
    res.line("--");
    std::istringstream in(t);
    for (std::string l; std::getline(in, l);) res.line(l);
  }
  res.data["bounded"] = true;
  res.data["candidates"] = found.candidates;
  res.data["found"] = conns;
  if (found.found.empty()) res.status = kCheckFailure;
}

// ------------------------------------------------------------------ presets

void cmd_preset_list(Result& res) {
  json list = json::array();
  for (auto& id : preset_ids()) {
    std::string title = parse_definition(preset_text(id)).title;
    list.push_back({{"id", id}, {"title", title}});
    res.line(id + "  " + title);
  }
  res.data["presets"] = list;
}

void cmd_preset_show(const Options& o, Result& res) {
  std::string t = preset_text(o.preset_id);
  res.data["text"] = t;
  std::istringstream in(t);
  for (std::string l; std::getline(in, l);) res.line(l);
}

void cmd_preset_run(const Options& o, Result& res) {
  BundlePtr b = build_bundle(preset_text(o.preset_id), env_side_conditions());
  res.data["report"] = report_json(b->checks);
  assumptions(res, *b);
  report_text(res, b->checks);
  if (!b->checks.ok()) res.status = kCheckFailure;
}

void emit(const Result& res, const Options& o, const std::string& command, std::ostream& out) {
  if (o.format == "structured") {
    json j = res.data;
    j["command"] = command;
    j["status"] = res.status;
    out << j.dump(2) << "\n";
  } else {
    for (auto& l : res.text) out << l << "\n";
  }
}

}  // namespace

int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Differential calculi on finitely presented algebras", "nccalc"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--preset", o.preset, "preset id");
  app.add_option("--file", o.file, "definition file");
  app.add_option("--expr", o.expr, "expression");
  app.add_option("--format", o.format, "text or structured")->check(CLI::IsMember({"text", "structured"}));
  app.add_option("--jobs", o.jobs, "worker threads")->check(CLI::Range(1, 256));
  app.add_option("--connection", o.connection, "connection file");
  app.add_option("--metric", o.metric, "metric file");

  std::map<std::string, CLI::App*> subs;
  auto sub = [&](const std::string& name, const std::string& help) { return subs[name] = app.add_subcommand(name, help); };
  sub("normalize", "normal form of an element or form");
  sub("d", "exterior derivative");
  sub("commute", "move coefficients left")->add_option("--with", o.with, "right factor");
  sub("relations", "theta commutation table");
  sub("two-forms", "two-form structure");
  auto* verify = sub("verify", "run verification suites");
  verify->add_option("--suite", o.suites, "suite name (repeatable)");
  verify->add_flag("--all-presets", o.all_presets, "every preset");
  sub("theta-solve", "express theta in differentials")->add_option("--coords", o.coords, "coordinate list");
  sub("torsion", "torsion of a connection");
  sub("torsion-conditions", "torsion-free conditions");
  sub("curvature", "curvature of a connection");
  sub("metric-check", "metric invariance and compatibility");
  sub("levi-civita", "bounded connection search")->add_option("--grid", o.grid, "coefficient values");
  auto* preset = sub("preset", "preset catalog");
  preset->require_subcommand(1);
  preset->add_subcommand("list", "list presets");
  preset->add_subcommand("show", "print a preset definition")->add_option("id", o.preset_id)->required();
  preset->add_subcommand("run", "load a preset and run its checks")->add_option("id", o.preset_id)->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  std::string command;
  for (auto& [name, s] : subs)
    if (s->parsed()) command = name;
  Result res;
  try {
    if (command == "preset") {
      std::string which;
      for (auto* s : subs["preset"]->get_subcommands()) which = s->get_name();
      command += " " + which;
      if (which == "list") cmd_preset_list(res);
      else if (which == "show") cmd_preset_show(o, res);
      else cmd_preset_run(o, res);
    } else if (command == "verify") {
      cmd_verify(o, res);
    } else if (auto s = load_session(o, res)) {
      if (command == "normalize") cmd_normalize(*s, o, res);
      else if (command == "d") cmd_d(*s, o, res);
      else if (command == "commute") cmd_commute(*s, o, res);
      else if (command == "relations") cmd_relations(*s, o, res);
      else if (command == "two-forms") cmd_two_forms(*s, o, res);
      else if (command == "theta-solve") cmd_theta_solve(*s, o, res);
      else if (command == "torsion") cmd_torsion(*s, o, res);
      else if (command == "torsion-conditions") cmd_torsion_conditions(*s, o, res);
      else if (command == "curvature") cmd_curvature(*s, o, res);
      else if (command == "metric-check") cmd_metric_check(*s, o, res);
      else if (command == "levi-civita") cmd_levi_civita(*s, o, res);
    }
  } catch (const InconsistencyError& e) {
    err << "inconsistency: " << e.what() << "\n";
    return kInconsistency;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const DivisionByZero& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  emit(res, o, command, out);
  return res.status;
}

}  // namespace nccalc::cli
