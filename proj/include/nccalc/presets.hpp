#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nccalc/calculus.hpp"
#include "nccalc/geometry.hpp"
#include "nccalc/io.hpp"

namespace nccalc {

struct PresetBundle {
  std::string id;
  std::string text;  // definition file contents
  Definition definition;
  CalculusPtr calculus;  // null for a bare presentation
  std::map<std::string, Form> aliases;
  std::optional<Connection> connection;
  std::optional<Metric> metric;
  /// Fixtures, two-form verification and preset-specific checks, evaluated
  /// when the bundle is built.
  CheckReport checks;
  /// denominators assumed nonzero while building ("q - 1 != 0")
  std::vector<std::string> assumptions;

  bool first_order_only() const { return calculus && !calculus->has_two_forms(); }
  Form form(const std::string& expr) const;
};

using BundlePtr = std::shared_ptr<const PresetBundle>;

std::vector<std::string> preset_ids();
bool is_preset(const std::string& id);
/// Definition text of a preset; throws InputError for unknown ids.
std::string preset_text(const std::string& id);
/// Cached; throws InputError for unknown ids and InconsistencyError when the
/// bundle fails its own checks.
BundlePtr load_preset(const std::string& id);
/// Build from definition text. Failing fixtures are recorded, not thrown.
BundlePtr build_bundle(const std::string& text, const std::vector<std::string>& extra_side_conditions = {});

/// Functions on a finite group as idempotents e_g, directions R_s^* for s in
/// S; θ-images θ^{s s' s^-1} are declared when S is closed under conjugation.
std::string group_lattice_text(const std::string& id, const Group& g, const std::vector<GroupElement>& S);

/// R_s^* with θ^{s'} -> θ^{s s' s^-1} for every s (fails when some
/// conjugate leaves S).
CheckReport group_lattice_differentiability(const Calculus& c);

// ---------------------------------------------------------------- GL_{p,q}(2)

/// Bimodule of the Maurer-Cartan forms tt1..tt4 (generators a, b, c, d).
MatrixBimodule glpq2_bimodule(const Algebra& a);
/// θ^1..θ^4 of the explicit coframe, as vectors over tt1..tt4.
std::vector<MatrixBimodule::Vec> glpq2_thetas(const MatrixBimodule& m);
/// d of a generator as a vector over tt1..tt4.
MatrixBimodule::Vec glpq2_differential(const MatrixBimodule& m, const std::string& gen);
CheckReport glpq2_checks(const Calculus& c);
/// The four coframe families with exponents in {0..max_exp}.
CheckReport glpq2_exponent_families(const Calculus& c, int max_exp);

struct MetricClass {
  std::pair<int, int> component;
  NCPoly factor;                   // φ_s(g_ab) = factor g_ab for every s
  std::vector<NCPoly> monomials;   // a^i b^j c^k d^l with this behaviour
};

/// Scaling class of each symmetric component and the monomials up to the
/// exponent bound that realize it.
std::vector<MetricClass> glpq2_metric_scan(const Calculus& c, int bound);

}  // namespace nccalc
