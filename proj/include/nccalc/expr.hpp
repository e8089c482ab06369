#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "nccalc/poly.hpp"

namespace nccalc {

/// Parsed expression tree shared by the scalar, algebra and form evaluators.
///
///   expr  := term (('+'|'-') term)*
///   term  := unary (('*'|'/') unary)*
///   unary := '-' unary | power
///   power := atom ('^' int | '^(' int ')')?
///   atom  := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
///          | '[' expr ',' expr ']'
///
/// A call requires the '(' to follow the name immediately.
struct Expr {
  enum class Kind { Number, Ident, Call, Neg, Add, Sub, Mul, Div, Pow, Bracket };
  Kind kind;
  Rational number;
  std::string name;  // Ident / Call
  std::vector<std::shared_ptr<const Expr>> args;
  int exponent = 0;   // Pow
  std::string text;   // source slice, used for label arguments
};
using ExprPtr = std::shared_ptr<const Expr>;

ExprPtr parse_expr(std::string_view text);

}  // namespace nccalc
