#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nccalc/calculus.hpp"

namespace nccalc {

struct Fixture {
  enum class Kind { Equal, Central, NotCentral, Constant };
  Kind kind = Kind::Equal;
  std::string lhs, rhs;  // rhs only for Equal
  std::string text() const;
};

/// Contents of a definition file: presentation, optional calculus, aliases,
/// fixtures, connection and metric blocks.
struct Definition {
  std::string id;
  std::string title;
  Algebra algebra;
  bool has_calculus = false;
  CalculusSpec spec;
  std::vector<std::pair<std::string, std::string>> aliases;  // in file order
  std::vector<Fixture> fixtures;
  std::optional<std::string> connection_text, metric_text;
};

/// Sections: [meta] [params] [generators] [relations] [rules] [directions]
/// [automorphisms] [weights] [twists] [derivations] [theta-images]
/// [two-forms] [aliases] [fixtures] [connection] [metric].
Definition parse_definition(const std::string& text);

/// Top-level comma split ("a, f(b, c)" -> {"a", "f(b, c)"}); brackets around
/// the whole list are dropped.
std::vector<std::string> split_list(const std::string& text);

}  // namespace nccalc
