/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#pragma once

#include <memory>
#include <set>
#include <string>
#include <string_view>

#include "gyp/common/value.hpp"

namespace gyp {

/// Expression mini-language over row columns.
///
///   expr    := or
///   or      := and (("or" | "||") and)*
///   and     := not (("and" | "&&") not)*
///   not     := ("not" | "!") not | cmp
///   cmp     := sum (("<" | "<=" | "=" | "==" | "!=" | "<>" | ">=" | ">") sum)?
///   sum     := product (("+" | "-") product)*
///   product := unary (("*" | "/") unary)*
///   unary   := "-" unary | primary
///   primary := number | string | "true" | "false" | column | "(" expr ")"
///
/// Syntax errors carry the 1-based character position of the offending token
/// (end of input is reported as length + 1).
class Expr {
 public:
  enum class Op { Literal, Column, Neg, Not, And, Or, Add, Sub, Mul, Div, Lt, Le, Eq, Ne, Ge, Gt };

  struct Node {
    Op op = Op::Literal;
    AttrType type = AttrType::Bool;
    Value literal;
    std::string column;
    std::size_t column_index = 0;
    std::unique_ptr<Node> lhs;
    std::unique_ptr<Node> rhs;
  };

  Expr() = default;

  /// Parses without a schema: column references stay unresolved and no type
  /// checking happens. Useful to learn which columns an expression reads.
  static Expr parse_untyped(std::string_view text);
  /// Parses and type-checks against `schema`.
  static Expr parse(std::string_view text, const Schema& schema);
  /// Like parse() and additionally requires a boolean result.
  static Expr parse_predicate(std::string_view text, const Schema& schema);

  bool typed() const { return typed_; }
  AttrType type() const { return root_->type; }
  const Node& root() const { return *root_; }

  /// Columns referenced anywhere in the expression.
  std::set<std::string> columns() const;
  bool is_constant_true() const;

  Value eval(const Row& row) const;
  /// Evaluates a boolean expression.
  bool test(const Row& row) const;

  /// Canonical, fully parenthesised text form.
  std::string str() const;

 private:
  std::shared_ptr<const Node> root_;
  bool typed_ = false;
};

}  // namespace gyp
