#include "nccalc/expr.hpp"

#include <cctype>

#include "nccalc/error.hpp"

namespace nccalc {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  ExprPtr parse() {
    auto e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  std::string_view s_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("parse error at offset " + std::to_string(pos_) + " in \"" + std::string(s_) +
                     "\": " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  bool eat(char c) {
    if (peek(c)) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  static std::shared_ptr<Expr> make(Expr::Kind k, std::vector<ExprPtr> args, size_t from, size_t to, std::string_view s) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->args = std::move(args);
    e->text = std::string(s.substr(from, to - from));
    return e;
  }

  ExprPtr expr() {
    skip();
    size_t start = pos_;
    auto lhs = term();
    for (;;) {
      if (eat('+')) {
        auto r = term();
        lhs = make(Expr::Kind::Add, {lhs, r}, start, pos_, s_);
      } else if (eat('-')) {
        auto r = term();
        lhs = make(Expr::Kind::Sub, {lhs, r}, start, pos_, s_);
      } else {
        return lhs;
      }
    }
  }

  ExprPtr term() {
    skip();
    size_t start = pos_;
    auto lhs = unary();
    for (;;) {
      if (eat('*')) {
        auto r = unary();
        lhs = make(Expr::Kind::Mul, {lhs, r}, start, pos_, s_);
      } else if (eat('/')) {
        auto r = unary();
        lhs = make(Expr::Kind::Div, {lhs, r}, start, pos_, s_);
      } else {
        return lhs;
      }
    }
  }

  ExprPtr unary() {
    skip();
    size_t start = pos_;
    if (eat('-')) {
      auto a = unary();
      return make(Expr::Kind::Neg, {a}, start, pos_, s_);
    }
    if (eat('+')) return unary();
    return power();
  }

  int integer() {
    skip();
    bool neg = eat('-');
    skip();
    size_t b = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (b == pos_) fail("expected integer exponent");
    long v = std::stol(std::string(s_.substr(b, pos_ - b)));
    if (v > 100000) fail("exponent too large");
    return neg ? -static_cast<int>(v) : static_cast<int>(v);
  }

  ExprPtr power() {
    skip();
    size_t start = pos_;
    auto base = atom();
    if (eat('^')) {
      int n;
      if (eat('(')) {
        n = integer();
        expect(')');
      } else {
        n = integer();
      }
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Pow;
      e->args = {base};
      e->exponent = n;
      e->text = std::string(s_.substr(start, pos_ - start));
      if (peek('^')) fail("chained exponent");
      return e;
    }
    return base;
  }

  ExprPtr atom() {
    skip();
    size_t start = pos_;
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Number;
      e->text = std::string(s_.substr(start, pos_ - start));
      e->number = Rational(e->text);
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' || s_[pos_] == '\''))
        ++pos_;
      std::string name(s_.substr(start, pos_ - start));
      if (pos_ < s_.size() && s_[pos_] == '(') {
        ++pos_;
        std::vector<ExprPtr> args;
        if (!eat(')')) {
          do {
            args.push_back(expr());
          } while (eat(','));
          expect(')');
        }
        auto e = make(Expr::Kind::Call, std::move(args), start, pos_, s_);
        e->name = name;
        return e;
      }
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Ident;
      e->name = name;
      e->text = name;
      return e;
    }
    if (eat('(')) {
      auto e = expr();
      expect(')');
      return e;
    }
    if (eat('[')) {
      auto a = expr();
      expect(',');
      auto b = expr();
      expect(']');
      return make(Expr::Kind::Bracket, {a, b}, start, pos_, s_);
    }
    fail(std::string("unexpected '") + c + "'");
  }
};

}  // namespace

ExprPtr parse_expr(std::string_view text) { return Parser(text).parse(); }

}  // namespace nccalc
