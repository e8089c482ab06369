#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "nccalc/calculus.hpp"

namespace nccalc {

/// Coefficients V^{s'}_{s,s''}, keyed (s', s, s''); missing entries are 0.
/// 𝒱_s(θ^{s'}) = Σ φ_s^{-1}(V^{s'}_{s,s''}) θ^{s''}.
struct Connection {
  std::map<std::array<int, 3>, NCPoly> V;
  NCPoly get(const Calculus& c, int upper, int s, int s2) const;
  void set(int upper, int s, int s2, const NCPoly& v);
};

/// Metric components g_{s,s'}; the symmetry flag is enforced when set.
struct Metric {
  std::map<std::pair<int, int>, NCPoly> g;
  bool symmetric = false;
  NCPoly get(const Calculus& c, int s, int s2) const;
};

/// Σ_i ω_i ⊗_A θ^i
using FormTensor = std::map<int, Form>;

std::string format_tensor(const Calculus& c, const FormTensor& t);
bool tensor_is_zero(const FormTensor& t);
FormTensor tensor_sub(const FormTensor& a, const FormTensor& b);
FormTensor tensor_left_mul(const NCPoly& f, const FormTensor& t);

/// 𝒱_s on a 1-form
Form script_v(const Calculus& c, const Connection& conn, int s, const Form& alpha);
/// ∇α = ϑ ⊗ α - Σ θ^s ⊗ 𝒱_s(α)  (inner calculi)
FormTensor nabla(const Calculus& c, const Connection& conn, const Form& alpha);
/// ∇(ω ⊗ θ^i) = dω ⊗ θ^i + (-1)^r ω ∇θ^i
FormTensor nabla_extended(const Calculus& c, const Connection& conn, const FormTensor& t);
/// π: ω ⊗ θ^i -> ω θ^i
Form wedge_projection(const Calculus& c, const FormTensor& t);
Form torsion(const Calculus& c, const Connection& conn, const Form& alpha);
/// Θ(θ^s) for every s
std::vector<Form> torsion_theta(const Calculus& c, const Connection& conn);
FormTensor curvature(const Calculus& c, const Connection& conn, const Form& alpha);

/// Σ_k c_k V[key_k] + constant = 0, coefficients acting from the left.
struct TorsionEquation {
  int upper = 0;
  std::pair<int, int> pair;  // Ξ pair whose coefficient is taken
  PairKind kind = PairKind::Unclassified;
  std::map<std::array<int, 3>, NCPoly> coeffs;
  NCPoly constant;
  /// "V[1,2,1] = V[1,1,2] + 1": solved for the largest unknown with an
  /// invertible coefficient
  std::string normalized(const Calculus& c) const;
  NCPoly residue(const Calculus& c, const Connection& conn) const;
};

struct TorsionConditions {
  std::vector<TorsionEquation> equations;  // biangle, triangle, quadrangle, unclassified
  std::vector<const TorsionEquation*> of_kind(PairKind k) const;
};

TorsionConditions torsion_free_conditions(const Calculus& c);

// ---------------------------------------------------------------- tensors
//
// Tensor words are stored in Form containers. An A-tensor c θ^{w0} ⊗_A θ^{w1} ...
// carries the coefficient left of the plain module product; an L-tensor
// c θ^{w0} ⊗_L θ^{w1} ... uses the semi-left-linear product.

std::string format_tensor_words(const Calculus& c, const Form& t, bool l_product);

Form tensor_a(const Calculus& c, const Form& a, const Form& b);
/// φ_s and φ_s^{-1} acting on A-tensors through the θ-images
Form phi_tensor(const Calculus& c, int s, const Form& t);
Form phi_inverse_tensor(const Calculus& c, int s, const Form& t);
/// Apply an arbitrary automorphism with the given θ-images.
Form apply_to_tensor(const Calculus& c, const AlgebraMorphism& phi, const std::vector<Form>& images, const Form& t);
Form to_l(const Calculus& c, const Form& a_tensor);
Form to_a(const Calculus& c, const Form& l_tensor);
/// θ^s ⊗_L T := θ^s ⊗_A φ_s^{-1} T, extended to A-tensor arguments.
Form tensor_l(const Calculus& c, const Form& a_tensor, const Form& b_tensor);
/// 𝒱_s(α ⊗_L β ...) on L-tensors
Form script_v_tensor(const Calculus& c, const Connection& conn, int s, const Form& l_tensor);

Form metric_tensor(const Calculus& c, const Metric& g);  // L-tensor Σ g_ab θ^a ⊗_L θ^b

// ----------------------------------------------------------------- metrics

struct InvarianceItem {
  int s = 0, a = 0, b = 0;
  std::optional<NCPoly> factor;  // φ_s(g_ab) must equal factor * g_ab (scaling images)
  NCPoly residue;
};

struct InvarianceReport {
  std::vector<InvarianceItem> items;
  bool ok() const;
  CheckReport to_check(const Calculus& c) const;
};

InvarianceReport metric_invariance(const Calculus& c, const Metric& g);

struct CompatibilityReport {
  // per (s, s1, s2)
  std::vector<std::array<int, 3>> index;
  std::vector<NCPoly> component_residue;  // φ_s(g_{s1s2}) - Σ g V V
  std::vector<NCPoly> tensor_residue;     // (𝒱_s(g) - g)_{s1 s2}
  bool component_ok() const;
  bool tensor_ok() const;
  bool agree() const;
  CheckReport to_check(const Calculus& c) const;
};

CompatibilityReport metric_compatibility(const Calculus& c, const Connection& conn, const Metric& g);

CheckReport levi_civita_check(const Calculus& c, const Connection& conn, const Metric& g);

/// Bounded search: per direction s, every scalar matrix V_s with entries
/// from `values` satisfying the compatibility equations for g.
std::vector<std::vector<std::vector<std::vector<NCPoly>>>> compatible_matrices(
    const Calculus& c, const Metric& g, const std::vector<NCPoly>& values, int jobs = 1);

struct LeviCivitaSearch {
  std::vector<Connection> found;
  size_t candidates = 0;
  std::string summary() const;
};

LeviCivitaSearch levi_civita_search(const Calculus& c, const Metric& g, const std::vector<NCPoly>& values,
                                    int jobs = 1);

std::string format_connection(const Calculus& c, const Connection& conn);
std::string format_metric(const Calculus& c, const Metric& g);
/// Lines "V[s',s,s''] = expr" and "g[s,s'] = expr"; other lines are ignored.
Connection parse_connection(const Calculus& c, const std::string& text);
Metric parse_metric(const Calculus& c, const std::string& text);

}  // namespace nccalc
