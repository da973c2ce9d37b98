#pragma once

// Recursive-descent parser for rational arithmetic shared by the
// coefficient grammar and the ODE right-hand-side grammar.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' exponent)?
//   exponent:= ['+' | '-'] integer | '(' ['+' | '-'] integer ')'
//   primary := number | identifier | '(' expr ')'
//
// The semantic actions are supplied by the caller (see `Actions` below), so
// the same grammar builds Coefficients or Expressions.

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>

#include "bsharp/coefficient.hpp"
#include "bsharp/errors.hpp"

namespace bsharp::detail {

// Actions must provide:
//   using Value = ...;
//   Value number(const BigRational&);
//   Value identifier(std::string_view name, std::size_t column);
//   Value add(Value, Value); sub; mul; div(Value, Value, std::size_t column);
//   Value neg(Value); Value pow(Value, long exponent, std::size_t column);
template <class Actions>
class ArithParser {
 public:
  using Value = typename Actions::Value;

  ArithParser(std::string_view text, Actions& actions, std::size_t line = 1,
              std::size_t column_offset = 0)
      : text_(text), actions_(actions), line_(line), offset_(column_offset) {}

  Value parse() {
    skip_space();
    if (pos_ >= text_.size()) fail("empty expression");
    Value v = expr();
    skip_space();
    if (pos_ < text_.size()) {
      fail(std::string("unexpected character '") + text_[pos_] + "'");
    }
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, line_, offset_ + pos_ + 1);
  }
  std::size_t column() const { return offset_ + pos_ + 1; }

  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Value expr() {
    Value lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = actions_.add(std::move(lhs), term());
      } else if (accept('-')) {
        lhs = actions_.sub(std::move(lhs), term());
      } else {
        return lhs;
      }
    }
  }

  Value term() {
    Value lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = actions_.mul(std::move(lhs), unary());
      } else if (accept('/')) {
        const std::size_t col = column();
        lhs = actions_.div(std::move(lhs), unary(), col);
      } else {
        return lhs;
      }
    }
  }

  Value unary() {
    if (accept('-')) return actions_.neg(unary());
    if (accept('+')) return unary();
    return power();
  }

  Value power() {
    Value base = primary();
    if (accept('^')) {
      const std::size_t col = column();
      const bool paren = accept('(');
      long sign = 1;
      if (accept('-')) {
        sign = -1;
      } else {
        accept('+');
      }
      skip_space();
      if (pos_ >= text_.size() ||
          !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        fail("expected integer exponent");
      }
      long value = 0;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        value = value * 10 + (text_[pos_] - '0');
        if (value > 1000000) fail("exponent too large");
        ++pos_;
      }
      if (paren && !accept(')')) fail("expected ')'");
      return actions_.pow(std::move(base), sign * value, col);
    }
    return base;
  }

  Value primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Value v = expr();
      if (!accept(')')) fail("expected ')'");
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '.')) {
        ++pos_;
      }
      try {
        return actions_.number(parse_rational(text_.substr(start, pos_ - start)));
      } catch (const Error&) {
        pos_ = start;
        fail("malformed number");
      }
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_')) {
        ++pos_;
      }
      return actions_.identifier(text_.substr(start, pos_ - start),
                                 offset_ + start + 1);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  Actions& actions_;
  std::size_t line_;
  std::size_t offset_;
  std::size_t pos_ = 0;
};

}  // namespace bsharp::detail
