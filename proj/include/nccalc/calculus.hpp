#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nccalc/algebra.hpp"

namespace nccalc {

// ------------------------------------------------------------------ forms

/// Sequence of direction indices: θ^{w0} θ^{w1} ...
using ThetaWord = std::vector<int>;

struct ThetaWordLess {
  bool operator()(const ThetaWord& a, const ThetaWord& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

/// Finite sum of c_w θ^w with coefficients on the left. The same container
/// holds wedge-reduced forms and unreduced tensor words; which one is meant
/// depends on the operation that produced it.
class Form {
 public:
  using Terms = std::map<ThetaWord, NCPoly, ThetaWordLess>;

  Form() = default;
  explicit Form(Algebra a) : alg_(std::move(a)) {}
  explicit Form(const NCPoly& f);
  static Form word(Algebra a, const ThetaWord& w, const NCPoly& c);

  const Algebra& algebra() const { return alg_; }
  const Terms& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  NCPoly coefficient(const ThetaWord& w) const;
  void add(const ThetaWord& w, const NCPoly& c);
  Form part(size_t degree) const;
  std::set<size_t> degrees() const;
  /// Degree of a homogeneous nonzero form; 0 for zero.
  size_t degree() const;

  Form operator-() const;
  Form& operator+=(const Form& o);
  Form& operator-=(const Form& o);
  friend Form operator+(Form a, const Form& b) { return a += b; }
  friend Form operator-(Form a, const Form& b) { return a -= b; }
  friend Form operator*(const NCPoly& f, const Form& w);
  friend Form operator*(const Scalar& c, const Form& w);
  friend bool operator==(const Form& a, const Form& b) { return a.t_ == b.t_; }
  friend bool operator!=(const Form& a, const Form& b) { return !(a == b); }

  Form map_coefficients(const std::function<NCPoly(const NCPoly&)>& f) const;

 private:
  Algebra alg_;
  Terms t_;
};

/// Debug output with direction indices ("x*[0,1]").
std::ostream& operator<<(std::ostream& os, const Form& f);

// ------------------------------------------------------------ directions

using GroupElement = std::vector<int>;

/// Finitely generated abelian groups (Z^a x Z_m...) and symmetric groups.
class Group {
 public:
  enum class Kind { Abelian, Permutation };
  /// One factor per entry; modulus 0 means Z.
  static Group abelian(std::vector<int> moduli);
  static Group symmetric(int n);
  /// "Z", "Z^2", "Z3", "Z x Z3", "S3"
  static Group parse(const std::string& name);

  Kind kind() const { return kind_; }
  GroupElement identity() const;
  GroupElement mul(const GroupElement& a, const GroupElement& b) const;
  GroupElement inverse(const GroupElement& a) const;
  GroupElement normalize(GroupElement a) const;
  std::string name() const;
  /// "(1,0)" for abelian groups, "perm(1,0,2)" for permutations
  std::string format(const GroupElement& e) const;
  GroupElement parse_element(const std::string& text) const;
  /// every element (finite groups only)
  std::vector<GroupElement> elements() const;

 private:
  Kind kind_ = Kind::Abelian;
  std::vector<int> moduli_;
  int n_ = 0;
};

enum class PairKind { Biangle, Triangle, Quadrangle, Unclassified };
const char* pair_kind_name(PairKind k);

struct PairClass {
  PairKind kind = PairKind::Unclassified;
  int third = -1;      // Triangle: index of s'' = s s'
  int class_id = -1;   // Quadrangle: shared by pairs with equal product
};

enum class DirectionMode { Weight, Twist, Derivation };

struct DirectionSpec {
  std::string label;
  /// φ_s on generators; "g^-1" entries override the syntactic inverse image
  std::map<std::string, NCPoly> images;
  /// φ_s^{-1}; may be omitted for scalings
  std::map<std::string, NCPoly> inverse_images;
  DirectionMode mode = DirectionMode::Weight;
  NCPoly weight;          // Weight: t_s (default 1)
  NCPoly weight_inverse;  // Weight: needed when t_s is not a scalar
  NCPoly lambda;          // Twist
  std::map<std::string, NCPoly> e_images;  // Derivation: e_s on generators
  std::optional<GroupElement> element;
  /// φ_s(θ^{s'}) by label s'; identity when absent
  std::map<std::string, std::string> theta_images;
};

/// Two-form data in the text syntax of forms: relations
/// "theta(2)*theta(1) = -theta(1)*theta(2)" (the left side is a single
/// θ-pair eliminated in favour of the right side), Δ(θ^s) and ζ, and dθ^s
/// for calculi that are not inner.
struct TwoFormSpec {
  std::vector<std::string> relations;
  std::map<std::string, std::string> delta;   // label -> form
  std::optional<std::string> zeta;
  std::map<std::string, std::string> dtheta;  // label -> form
};

struct CalculusSpec {
  Algebra algebra;
  std::vector<DirectionSpec> directions;
  std::optional<Group> group;
  /// explicit classification table [s][s'] (used when no group is given)
  std::vector<std::vector<PairClass>> classification;
  /// user-supplied two-form structure; derived from the group when absent
  std::optional<TwoFormSpec> two_forms;
  bool first_order_only = false;
  /// parameter expressions assumed nonzero; build() rejects identically zero ones
  std::vector<std::string> side_conditions;
};

struct TwoFormStructure {
  std::vector<std::pair<int, int>> basis;           // Ξ
  std::map<std::pair<int, int>, Form> rules;        // eliminated pair -> Ξ combination
  std::vector<Form> delta;                          // Δ(θ^s), inner calculi
  Form zeta;
  std::vector<Form> dtheta;                         // dθ^s
  bool derived = false;                             // from the group product
};

// ---------------------------------------------------------------- reports

struct CheckItem {
  std::string what;
  bool ok = true;
  std::string detail;  // residue or note
};

struct CheckReport {
  std::string title;
  std::vector<CheckItem> items;
  bool ok() const;
  void add(std::string what, bool ok, std::string detail = "");
  void merge(const CheckReport& o);
  size_t failures() const;
};

// --------------------------------------------------------------- calculus

class Calculus;
using CalculusPtr = std::shared_ptr<const Calculus>;

class Calculus {
 public:
  /// Verifies every automorphism, the mode data and (if present) the two-form
  /// structure; throws InconsistencyError / InputError.
  static CalculusPtr build(const CalculusSpec& spec);

  const CalculusSpec& spec() const { return spec_; }
  const Algebra& algebra() const { return spec_.algebra; }
  size_t size() const { return spec_.directions.size(); }
  const std::string& label(int s) const { return spec_.directions[s].label; }
  int index(const std::string& label) const;
  DirectionMode mode(int s) const { return spec_.directions[s].mode; }
  const AlgebraMorphism& phi(int s) const { return phi_[s]; }
  const AlgebraMorphism& phi_inverse(int s) const { return phi_[s].inverse(); }
  /// φ_{w0} ∘ φ_{w1} ∘ ... (f)
  NCPoly phi_word(const ThetaWord& w, const NCPoly& f) const;
  NCPoly phi_inverse_word(const ThetaWord& w, const NCPoly& f) const;
  /// Image of θ^{s2} under the extension of φ_s (identity unless specified).
  const Form& theta_image(int s, int s2) const { return theta_images_[s][s2]; }
  const Form& theta_inverse_image(int s, int s2) const { return theta_inverse_images_[s][s2]; }

  NCPoly zero() const { return NCPoly(algebra(), Scalar()); }
  Form theta(int s) const;
  Form scalar_form(const NCPoly& f) const;

  NCPoly e(int s, const NCPoly& f) const;
  Form d(const NCPoly& f) const;
  bool is_inner() const;
  NCPoly lambda(int s) const;
  Form vartheta() const;

  /// θ^w f = φ_w(f) θ^w applied termwise
  Form right_mul(const Form& w, const NCPoly& f) const;
  /// product without two-form reduction (tensor product over the algebra)
  Form concat(const Form& a, const Form& b) const;
  Form wedge(const Form& a, const Form& b) const;
  Form reduce(const Form& w) const;
  /// reduce always rewriting the rightmost reducible pair (consistency checks)
  Form reduce_rightmost(const Form& w) const;
  /// graded commutator, split into homogeneous parts
  Form commutator(const Form& a, const Form& b) const;

  bool has_two_forms() const { return static_cast<bool>(two_forms_); }
  const TwoFormStructure& two_forms() const;
  PairClass classify(int s, int s2) const;
  bool has_classification() const { return !classes_.empty(); }

  Form delta(const Form& w) const;
  /// d on forms: [ϑ, ω] - Δ(ω) for inner calculi, Leibniz with dθ otherwise
  Form d_form(const Form& w) const;
  Form d_form_leibniz(const Form& w) const;
  Form zeta() const;

  std::string format(const Form& w) const;
  std::string format_word(const ThetaWord& w) const;
  Form parse_form(std::string_view text, const std::map<std::string, Form>& aliases = {}) const;
  Form eval_form(const Expr& e, const std::map<std::string, Form>& aliases = {}) const;
  /// parse with unreduced products (two-form specifications)
  Form parse_raw(std::string_view text) const;
  /// label token from a call argument: theta(1), theta(-1), theta(a)
  int label_arg(const Expr& e) const;

 private:
  Calculus() = default;
  void init_directions();
  void init_classes();
  void init_two_forms();
  TwoFormStructure derive_two_forms() const;
  TwoFormStructure parse_two_forms(const TwoFormSpec& ts) const;
  NCPoly e_derivation(int s, const Word& w) const;
  Form eval(const Expr& e, const std::map<std::string, Form>& aliases, bool raw) const;
  Form reduce_impl(const Form& w, bool rightmost) const;
  const Form& reduce_word(const ThetaWord& w) const;

  CalculusSpec spec_;
  std::vector<AlgebraMorphism> phi_;
  std::vector<std::vector<Form>> theta_images_, theta_inverse_images_;
  std::vector<std::map<Letter, NCPoly>> e_letter_;  // Derivation mode
  std::vector<std::vector<PairClass>> classes_;
  std::unique_ptr<TwoFormStructure> two_forms_;
  std::set<std::pair<int, int>> basis_set_;
  mutable std::mutex memo_mu_;
  mutable std::map<ThetaWord, Form, ThetaWordLess> memo_;
};

// ------------------------------------------------------------ verification

/// Two-form identity for every generator f, ζ = ϑ² - Δ(ϑ), ζ coefficient
/// condition, compatibility of the relations with θ^s f = φ_s(f) θ^s.
CheckReport verify_two_forms(const Calculus& c);

/// The same checks against a candidate structure (inner calculi).
CheckReport verify_twisted_two_forms(const Calculus& c, const TwoFormSpec& candidate);

/// [ζ,f] = 0, Δ²(ω) + [ζ,ω] = 0, Δ(ζ) = 0, dζ = [ϑ,ζ] on generators and θ^s.
CheckReport verify_inner_identities(const Calculus& c);

/// [ϑ, f] = d f and d∘d = 0 on generators and every θ^s.
CheckReport verify_inner_first_order(const Calculus& c);
CheckReport verify_d_squared(const Calculus& c);

/// Degree-3 reduction is independent of the rewriting order.
CheckReport verify_reduction_order(const Calculus& c);

struct DifferentiabilityReport {
  CheckReport report;
  Form vartheta_phi;  // φ(ϑ) - ϑ
};

/// φ: algebra automorphism with inverse; theta_images[s] = φ(θ^s).
DifferentiabilityReport check_differentiability(const Calculus& c, const AlgebraMorphism& phi,
                                                const std::vector<Form>& theta_images, bool simple);

struct CentralityWitness {
  bool central = true;
  int direction = -1;
  std::string generator;
};

CentralityWitness is_central_one_form(const Calculus& c, const Form& alpha);

/// Basis of 1-forms α = α_s θ^s with α_s a combination of normal words up to
/// the bound, commuting with every generator (Lemma-style monomial search).
std::vector<Form> central_one_forms(const Calculus& c, size_t degree_bound);

struct ConstantReport {
  NCPoly candidate;
  bool by_differential = false;
  bool by_criterion = false;
};

std::vector<ConstantReport> constants(const Calculus& c, const std::vector<NCPoly>& candidates);

struct ThetaSolution {
  bool ok = false;
  std::vector<std::vector<NCPoly>> matrix;   // M[i][s] = e_s(coord_i)
  std::vector<std::vector<NCPoly>> inverse;  // θ^s = Σ_i N[s][i] d coord_i
  std::string failure;
};

ThetaSolution solve_theta_in_differentials(const Calculus& c, const std::vector<NCPoly>& coords);

/// True when all letters commute pairwise.
bool is_commutative(const Algebra& a);
/// Image of an element of a commutative algebra in Q(params, generators).
Scalar to_commutative_scalar(const NCPoly& f);
/// Inverse image; fails (nullopt) when a denominator involves generators.
std::optional<NCPoly> from_commutative_scalar(const Algebra& a, const Scalar& s);
/// Determinant of a matrix over a commutative algebra, as a Scalar in
/// Q(params, generators).
Scalar commutative_determinant(const std::vector<std::vector<NCPoly>>& m);

// ------------------------------------------------------- matrix bimodules

/// Free left module on symbols τ^1..τ^n with τ^i f = Σ_j Φ_ij(f) τ^j, Φ an
/// algebra map to matrices given on generators.
class MatrixBimodule {
 public:
  using Vec = std::vector<NCPoly>;
  using Matrix = std::vector<std::vector<NCPoly>>;

  MatrixBimodule(Algebra a, std::vector<std::string> names, std::map<std::string, Matrix> table);

  const Algebra& algebra() const { return alg_; }
  size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  Matrix rep(const NCPoly& f) const;
  Vec basis(size_t i) const;
  Vec zero() const;
  Vec right_mul(const Vec& v, const NCPoly& f) const;
  static Vec left_mul(const NCPoly& f, const Vec& v);
  static Vec add(const Vec& a, const Vec& b);
  static Vec sub(const Vec& a, const Vec& b);
  bool is_zero(const Vec& v) const;
  std::string format(const Vec& v) const;
  /// Φ respects every rewrite rule.
  CheckReport verify() const;

 private:
  Matrix rep_word(const Word& w) const;
  Matrix mul(const Matrix& a, const Matrix& b) const;
  Algebra alg_;
  std::vector<std::string> names_;
  std::map<Letter, Matrix> table_;
};

}  // namespace nccalc
