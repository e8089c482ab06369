#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "nccalc/expr.hpp"
#include "nccalc/scalar.hpp"

namespace nccalc {

/// Letters are numbered by precedence: generator g gets an id, and if g is
/// invertible its inverse letter gets the next id.
using Letter = std::uint16_t;
using Word = std::vector<Letter>;

/// Degree-lexicographic order on words.
struct WordLess {
  bool operator()(const Word& a, const Word& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

struct WordHash {
  size_t operator()(const Word& w) const {
    size_t h = w.size();
    for (Letter l : w) h = h * 1000003u ^ l;
    return h;
  }
};

using TermMap = std::map<Word, Scalar, WordLess>;

class Presentation;
using Algebra = std::shared_ptr<const Presentation>;
class NCPoly;

struct RewriteRule {
  Word lhs;
  TermMap rhs;
};

struct ConfluenceFailure {
  std::string word;
  std::string first;
  std::string second;
};

struct ConfluenceReport {
  int pairs_checked = 0;
  std::vector<ConfluenceFailure> failures;
  bool confluent() const { return failures.empty(); }
};

class Presentation : public std::enable_shared_from_this<Presentation> {
 public:
  struct Generator {
    std::string name;
    bool invertible = false;
    Letter letter = 0;
    Letter inverse = 0;  // valid when invertible
  };

  const std::vector<Generator>& generators() const { return gens_; }
  size_t num_letters() const { return letter_gen_.size(); }
  const std::string& letter_name(Letter l) const { return gens_[letter_gen_[l]].name; }
  bool is_inverse_letter(Letter l) const { return letter_inv_[l]; }
  size_t generator_of(Letter l) const { return letter_gen_[l]; }
  /// inverse letter, if the letter's generator is invertible
  std::optional<Letter> inverse_letter(Letter l) const;
  std::optional<Letter> find_generator(const std::string& name) const;
  const std::vector<RewriteRule>& rules() const { return rules_; }
  const std::set<std::string>& params() const { return params_; }

  /// Normal form of an arbitrary word (memoized).
  const TermMap& normal_form(const Word& w) const;
  bool is_normal(const Word& w) const;

  ConfluenceReport check_local_confluence(size_t max_overlap_len) const;

  std::string word_to_string(const Word& w) const;

  /// Parse an algebra expression. Identifiers resolve to aliases, then
  /// generators, then declared parameters.
  NCPoly parse(std::string_view text, const std::map<std::string, NCPoly>& aliases = {}) const;
  NCPoly eval(const Expr& e, const std::map<std::string, NCPoly>& aliases = {}) const;

  NCPoly one() const;
  NCPoly gen(const std::string& name) const;

  /// Normal words of length <= n (exhaustive; for small finite searches).
  std::vector<Word> normal_words(size_t max_len) const;

  size_t cache_size() const;

 private:
  friend class PresentationBuilder;
  friend Algebra tensor_product(const Algebra& p1, const Algebra& p2);
  Presentation() = default;

  std::optional<std::pair<size_t, size_t>> find_match(const Word& w) const;  // (pos, rule)
  TermMap apply_at(const Word& w, size_t pos, size_t rule) const;

  std::vector<Generator> gens_;
  std::vector<size_t> letter_gen_;
  std::vector<bool> letter_inv_;
  std::vector<RewriteRule> rules_;
  std::vector<std::vector<size_t>> rules_by_first_;
  std::set<std::string> params_;

  mutable std::mutex cache_mu_;
  mutable std::unordered_map<Word, TermMap, WordHash> cache_;
};

/// Canonical noncommutative polynomial: normal words with nonzero Scalars.
class NCPoly {
 public:
  NCPoly() = default;
  NCPoly(Algebra a, const Scalar& c);
  /// normalizes w
  static NCPoly from_word(Algebra a, const Word& w, const Scalar& c = Scalar(1));
  static NCPoly from_terms(Algebra a, const TermMap& t);  // normalizes each word

  const Algebra& algebra() const { return alg_; }
  const TermMap& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  bool is_scalar() const { return t_.empty() || (t_.size() == 1 && t_.begin()->first.empty()); }
  Scalar scalar_value() const;  // requires is_scalar
  /// Coefficient of the empty word.
  Scalar constant_term() const;
  size_t degree() const { return t_.empty() ? 0 : t_.rbegin()->first.size(); }
  /// Leading (largest) word; requires nonzero.
  const Word& leading_word() const { return t_.rbegin()->first; }

  NCPoly operator-() const;
  NCPoly& operator+=(const NCPoly& o);
  NCPoly& operator-=(const NCPoly& o);
  friend NCPoly operator+(NCPoly a, const NCPoly& b) { return a += b; }
  friend NCPoly operator-(NCPoly a, const NCPoly& b) { return a -= b; }
  friend NCPoly operator*(const NCPoly& a, const NCPoly& b);
  friend NCPoly operator*(const Scalar& c, const NCPoly& a);
  NCPoly pow(unsigned n) const;
  /// Two-sided inverse for c·w with w a word of invertible letters.
  std::optional<NCPoly> syntactic_inverse() const;

  friend bool operator==(const NCPoly& a, const NCPoly& b) { return a.t_ == b.t_; }
  friend bool operator!=(const NCPoly& a, const NCPoly& b) { return !(a == b); }

  /// Apply f to every coefficient (e.g. parameter substitution).
  NCPoly map_coefficients(const std::function<Scalar(const Scalar&)>& f) const;

  std::string to_string() const;

 private:
  Algebra alg_;
  TermMap t_;
  void add_term(const Word& w, const Scalar& c);
  static const Algebra& pick(const NCPoly& a, const NCPoly& b);
};

std::ostream& operator<<(std::ostream& os, const NCPoly& f);

/// Format a coefficient for use in front of a word ("2*", "(p - 1)*", "").
std::string coefficient_prefix(const Scalar& c, bool& negative);

class PresentationBuilder {
 public:
  PresentationBuilder& param(const std::string& name);
  PresentationBuilder& generator(const std::string& name, bool invertible = false);
  /// "lhs = rhs"; oriented by the leading word of lhs - rhs. With
  /// inverse_variants, a relation b a = c a b between single letters also
  /// yields the variants with inverse letters.
  PresentationBuilder& relation(const std::string& lhs, const std::string& rhs, bool inverse_variants = true);
  /// Explicit rule; rejected unless lhs exceeds every word of rhs.
  PresentationBuilder& rule(const std::string& lhs_word, const std::string& rhs);
  /// Declare a generator central: every other letter L gets L g -> g L
  /// (g must precede the others).
  PresentationBuilder& central(const std::string& name);

  Algebra build() const;

 private:
  struct Gen {
    std::string name;
    bool invertible;
  };
  std::vector<Gen> gens_;
  std::set<std::string> params_;
  std::vector<std::tuple<std::string, std::string, bool>> relations_;
  std::vector<std::pair<std::string, std::string>> rules_;
  std::vector<std::string> central_;
};

/// Generators of p1 then p2 (clashing names of p2 get a "_2" suffix); cross
/// pairs commute.
Algebra tensor_product(const Algebra& p1, const Algebra& p2);

// ----------------------------------------------------------------- morphisms

struct MorphismViolation {
  std::string relation;
  std::string residue;
};

class AlgebraMorphism {
 public:
  AlgebraMorphism() = default;

  /// Check relation preservation. `images` maps generator names to
  /// expressions in the target; images of inverse letters default to the
  /// syntactic inverse, or may be given under "<name>^-1".
  static AlgebraMorphism verify(const Algebra& src, const Algebra& dst,
                                const std::map<std::string, NCPoly>& images,
                                std::vector<MorphismViolation>* violations = nullptr);
  static AlgebraMorphism identity(const Algebra& a);
  /// a ∘ b (apply b first)
  static AlgebraMorphism compose(const AlgebraMorphism& a, const AlgebraMorphism& b);

  bool verified() const { return verified_; }
  const Algebra& source() const { return src_; }
  const Algebra& target() const { return dst_; }
  const NCPoly& letter_image(Letter l) const { return images_[l]; }
  NCPoly apply(const NCPoly& f) const;
  NCPoly apply_word(const Word& w) const;

  bool has_inverse() const { return static_cast<bool>(inverse_); }
  const AlgebraMorphism& inverse() const { return *inverse_; }
  /// Attach an inverse after checking both compositions fix every generator.
  void set_inverse(const AlgebraMorphism& inv);
  /// True when every generator image is c*g for a scalar c.
  bool is_scaling() const;
  /// Inverse of a scaling morphism.
  AlgebraMorphism scaling_inverse() const;
  bool same_images(const AlgebraMorphism& o) const;

  std::string describe() const;

 private:
  Algebra src_, dst_;
  std::vector<NCPoly> images_;  // per letter of src
  bool verified_ = false;
  std::shared_ptr<AlgebraMorphism> inverse_;
  struct Cache {
    std::mutex mu;
    std::unordered_map<Word, NCPoly, WordHash> words;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

// ----------------------------------------------------------- basis probe

struct BasisProbeReport {
  bool dependency_found = false;
  int unknowns = 0;
  int equations = 0;
  /// kernel vectors: per direction, the coefficient polynomial f_s
  std::vector<std::vector<NCPoly>> witnesses;
};

/// Search for f_s (words up to degree_bound) with sum_s e_s(m) f_s = 0 for
/// every normal monomial m up to degree_bound.
BasisProbeReport basis_independence_probe(const Algebra& a,
                                          const std::vector<std::function<NCPoly(const NCPoly&)>>& derivations,
                                          size_t degree_bound);

}  // namespace nccalc
