/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include "gyp/core/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

#include "gyp/common/error.hpp"

namespace gyp {
namespace {

using Node = Expr::Node;
using Op = Expr::Op;

enum class Tok { Number, String, Ident, Symbol, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;  // 1-based
};

[[noreturn]] void syntax_error(std::size_t pos, const std::string& what) {
  fail(ErrorCode::SyntaxError, "position " + std::to_string(pos) + ": " + what);
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) ++i;
      if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      }
      out.push_back({Tok::Number, std::string(s.substr(start, i - start)), start + 1});
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({Tok::Ident, std::string(s.substr(start, i - start)), start + 1});
    } else if (c == '\'' || c == '"') {
      ++i;
      std::string text;
      while (i < s.size() && s[i] != c) text += s[i++];
      if (i >= s.size()) syntax_error(start + 1, "unterminated string literal");
      ++i;
      out.push_back({Tok::String, std::move(text), start + 1});
    } else {
      static constexpr std::string_view kTwo[] = {"<=", ">=", "==", "!=", "<>", "&&", "||"};
      std::string sym(1, c);
      for (auto two : kTwo) {
        if (s.substr(i, 2) == two) sym = std::string(two);
      }
      if (sym.size() == 1 && std::string_view("<>=+-*/()!").find(c) == std::string_view::npos) {
        syntax_error(start + 1, std::string("unexpected character '") + c + "'");
      }
      i += sym.size();
      out.push_back({Tok::Symbol, std::move(sym), start + 1});
    }
  }
  out.push_back({Tok::End, "", s.size() + 1});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

  std::unique_ptr<Node> parse_all() {
    auto n = parse_or();
    if (peek().kind != Tok::End) syntax_error(peek().pos, "unexpected '" + peek().text + "'");
    return n;
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  bool accept_symbol(std::string_view sym) {
    if (peek().kind == Tok::Symbol && peek().text == sym) {
      ++i_;
      return true;
    }
    return false;
  }
  bool accept_word(std::string_view word) {
    if (peek().kind == Tok::Ident && peek().text == word) {
      ++i_;
      return true;
    }
    return false;
  }

  static std::unique_ptr<Node> binary(Op op, std::unique_ptr<Node> l, std::unique_ptr<Node> r) {
    auto n = std::make_unique<Node>();
    n->op = op;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }

  std::unique_ptr<Node> parse_or() {
    auto l = parse_and();
    while (accept_word("or") || accept_symbol("||")) l = binary(Op::Or, std::move(l), parse_and());
    return l;
  }
  std::unique_ptr<Node> parse_and() {
    auto l = parse_not();
    while (accept_word("and") || accept_symbol("&&")) l = binary(Op::And, std::move(l), parse_not());
    return l;
  }
  std::unique_ptr<Node> parse_not() {
    if (accept_word("not") || accept_symbol("!")) {
      auto n = std::make_unique<Node>();
      n->op = Op::Not;
      n->lhs = parse_not();
      return n;
    }
    return parse_cmp();
  }
  std::unique_ptr<Node> parse_cmp() {
    auto l = parse_sum();
    static const std::pair<std::string_view, Op> kOps[] = {
        {"<=", Op::Le}, {">=", Op::Ge}, {"==", Op::Eq}, {"!=", Op::Ne}, {"<>", Op::Ne},
        {"<", Op::Lt},  {">", Op::Gt},  {"=", Op::Eq}};
    for (auto [sym, op] : kOps) {
      if (accept_symbol(sym)) return binary(op, std::move(l), parse_sum());
    }
    return l;
  }
  std::unique_ptr<Node> parse_sum() {
    auto l = parse_product();
    for (;;) {
      if (accept_symbol("+")) {
        l = binary(Op::Add, std::move(l), parse_product());
      } else if (accept_symbol("-")) {
        l = binary(Op::Sub, std::move(l), parse_product());
      } else {
        return l;
      }
    }
  }
  std::unique_ptr<Node> parse_product() {
    auto l = parse_unary();
    for (;;) {
      if (accept_symbol("*")) {
        l = binary(Op::Mul, std::move(l), parse_unary());
      } else if (accept_symbol("/")) {
        l = binary(Op::Div, std::move(l), parse_unary());
      } else {
        return l;
      }
    }
  }
  std::unique_ptr<Node> parse_unary() {
    if (accept_symbol("-")) {
      auto n = std::make_unique<Node>();
      n->op = Op::Neg;
      n->lhs = parse_unary();
      return n;
    }
    return parse_primary();
  }
  std::unique_ptr<Node> parse_primary() {
    const Token& t = peek();
    auto n = std::make_unique<Node>();
    switch (t.kind) {
      case Tok::Number: {
        bool is_float = t.text.find_first_of(".eE") != std::string::npos;
        n->op = Op::Literal;
        try {
          n->literal = parse_value(t.text, is_float ? AttrType::Float64 : AttrType::Int64);
        } catch (const Error&) {
          syntax_error(t.pos, "malformed number '" + t.text + "'");
        }
        n->type = is_float ? AttrType::Float64 : AttrType::Int64;
        ++i_;
        return n;
      }
      case Tok::String:
        n->op = Op::Literal;
        n->literal = t.text;
        n->type = AttrType::String;
        ++i_;
        return n;
      case Tok::Ident:
        if (t.text == "true" || t.text == "false") {
          n->op = Op::Literal;
          n->literal = t.text == "true";
          n->type = AttrType::Bool;
        } else if (t.text == "and" || t.text == "or" || t.text == "not") {
          syntax_error(t.pos, "unexpected keyword '" + t.text + "'");
        } else {
          n->op = Op::Column;
          n->column = t.text;
        }
        ++i_;
        return n;
      case Tok::Symbol:
        if (t.text == "(") {
          ++i_;
          auto inner = parse_or();
          if (!accept_symbol(")")) syntax_error(peek().pos, "expected ')'");
          return inner;
        }
        syntax_error(t.pos, "unexpected '" + t.text + "'");
      case Tok::End:
        syntax_error(t.pos, "unexpected end of input");
    }
    syntax_error(t.pos, "unexpected token");
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

const char* op_text(Op op) {
  switch (op) {
    case Op::Neg: return "-";
    case Op::Not: return "not ";
    case Op::And: return " and ";
    case Op::Or: return " or ";
    case Op::Add: return " + ";
    case Op::Sub: return " - ";
    case Op::Mul: return " * ";
    case Op::Div: return " / ";
    case Op::Lt: return " < ";
    case Op::Le: return " <= ";
    case Op::Eq: return " = ";
    case Op::Ne: return " != ";
    case Op::Ge: return " >= ";
    case Op::Gt: return " > ";
    default: return "";
  }
}

bool is_comparison(Op op) {
  return op == Op::Lt || op == Op::Le || op == Op::Eq || op == Op::Ne || op == Op::Ge || op == Op::Gt;
}

[[noreturn]] void type_error(const Node& n, const std::string& what) {
  fail(ErrorCode::TypeError, std::string("operator '") + op_text(n.op) + "': " + what);
}

// Coerces a string literal to a timestamp when compared with a timestamp.
void coerce_timestamp_literal(Node& lit) {
  if (lit.op != Op::Literal || lit.type != AttrType::String) return;
  auto ts = parse_iso8601(std::get<std::string>(lit.literal));
  if (!ts) return;
  lit.literal = *ts;
  lit.type = AttrType::Timestamp;
}

void typecheck(Node& n, const Schema& schema) {
  switch (n.op) {
    case Op::Literal:
      return;
    case Op::Column: {
      auto idx = schema.index_of(n.column);
      if (!idx) fail(ErrorCode::UnknownColumn, "column '" + n.column + "' not in schema (" + schema.str() + ")");
      n.column_index = *idx;
      n.type = schema[*idx].type;
      return;
    }
    case Op::Neg:
      typecheck(*n.lhs, schema);
      if (!is_numeric(n.lhs->type)) type_error(n, "operand must be numeric");
      n.type = n.lhs->type;
      return;
    case Op::Not:
      typecheck(*n.lhs, schema);
      if (n.lhs->type != AttrType::Bool) type_error(n, "operand must be bool");
      n.type = AttrType::Bool;
      return;
    default:
      break;
  }
  typecheck(*n.lhs, schema);
  typecheck(*n.rhs, schema);
  AttrType l = n.lhs->type, r = n.rhs->type;
  if (n.op == Op::And || n.op == Op::Or) {
    if (l != AttrType::Bool || r != AttrType::Bool) type_error(n, "operands must be bool");
    n.type = AttrType::Bool;
  } else if (is_comparison(n.op)) {
    if (l == AttrType::Timestamp) coerce_timestamp_literal(*n.rhs);
    if (r == AttrType::Timestamp) coerce_timestamp_literal(*n.lhs);
    l = n.lhs->type;
    r = n.rhs->type;
    bool ok = (is_numeric(l) && is_numeric(r)) || l == r;
    if (!ok) {
      type_error(n, std::string("cannot compare ") + std::string(type_name(l)) + " with " +
                        std::string(type_name(r)));
    }
    n.type = AttrType::Bool;
  } else {
    if (!is_numeric(l) || !is_numeric(r)) type_error(n, "operands must be numeric");
    if (n.op == Op::Div) {
      n.type = AttrType::Float64;
    } else {
      n.type = (l == AttrType::Int64 && r == AttrType::Int64) ? AttrType::Int64 : AttrType::Float64;
    }
  }
}

void collect_columns(const Node& n, std::set<std::string>& out) {
  if (n.op == Op::Column) out.insert(n.column);
  if (n.lhs) collect_columns(*n.lhs, out);
  if (n.rhs) collect_columns(*n.rhs, out);
}

std::int64_t wrap(std::uint64_t v) { return static_cast<std::int64_t>(v); }

Value eval_node(const Node& n, const Row& row) {
  switch (n.op) {
    case Op::Literal: return n.literal;
    case Op::Column: return row[n.column_index];
    case Op::Neg: {
      Value v = eval_node(*n.lhs, row);
      if (n.type == AttrType::Int64) return wrap(0 - static_cast<std::uint64_t>(std::get<std::int64_t>(v)));
      return -std::get<double>(v);
    }
    case Op::Not: return !std::get<bool>(eval_node(*n.lhs, row));
    case Op::And:
      return std::get<bool>(eval_node(*n.lhs, row)) && std::get<bool>(eval_node(*n.rhs, row));
    case Op::Or:
      return std::get<bool>(eval_node(*n.lhs, row)) || std::get<bool>(eval_node(*n.rhs, row));
    default:
      break;
  }
  Value l = eval_node(*n.lhs, row);
  Value r = eval_node(*n.rhs, row);
  if (is_comparison(n.op)) {
    int c;
    if (l.index() != r.index() && is_numeric(type_of(l)) && is_numeric(type_of(r))) {
      double a = as_double(l), b = as_double(r);
      if (std::isnan(a) || std::isnan(b)) return n.op == Op::Ne;
      c = a < b ? -1 : (a > b ? 1 : 0);
    } else {
      if (l.index() == 1 && (std::isnan(std::get<double>(l)) || std::isnan(std::get<double>(r)))) {
        return n.op == Op::Ne;
      }
      c = compare_values(l, r);
    }
    switch (n.op) {
      case Op::Lt: return c < 0;
      case Op::Le: return c <= 0;
      case Op::Eq: return c == 0;
      case Op::Ne: return c != 0;
      case Op::Ge: return c >= 0;
      default: return c > 0;
    }
  }
  if (n.type == AttrType::Int64) {
    auto a = static_cast<std::uint64_t>(std::get<std::int64_t>(l));
    auto b = static_cast<std::uint64_t>(std::get<std::int64_t>(r));
    switch (n.op) {
      case Op::Add: return wrap(a + b);
      case Op::Sub: return wrap(a - b);
      default: return wrap(a * b);
    }
  }
  double a = as_double(l), b = as_double(r);
  switch (n.op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    default: return a / b;
  }
}

void print(const Node& n, std::string& out) {
  switch (n.op) {
    case Op::Literal:
      if (n.literal.index() == 2) {
        out += '\'' + std::get<std::string>(n.literal) + '\'';
      } else if (n.literal.index() == 4) {
        out += '\'' + format_value(n.literal) + '\'';
      } else if (n.literal.index() == 1) {
        std::string t = format_value(n.literal);
        if (t.find_first_of(".eEn") == std::string::npos) t += ".0";
        out += t;
      } else {
        out += format_value(n.literal);
      }
      return;
    case Op::Column:
      out += n.column;
      return;
    case Op::Neg:
    case Op::Not:
      out += '(';
      out += op_text(n.op);
      print(*n.lhs, out);
      out += ')';
      return;
    default:
      out += '(';
      print(*n.lhs, out);
      out += op_text(n.op);
      print(*n.rhs, out);
      out += ')';
  }
}

}  // namespace

Expr Expr::parse_untyped(std::string_view text) {
  Expr e;
  e.root_ = Parser(text).parse_all();
  return e;
}

Expr Expr::parse(std::string_view text, const Schema& schema) {
  auto root = Parser(text).parse_all();
  typecheck(*root, schema);
  Expr e;
  e.root_ = std::move(root);
  e.typed_ = true;
  return e;
}

Expr Expr::parse_predicate(std::string_view text, const Schema& schema) {
  Expr e = parse(text, schema);
  if (e.type() != AttrType::Bool) {
    fail(ErrorCode::TypeError, "predicate '" + std::string(text) + "' has type " +
                                   std::string(type_name(e.type())) + ", expected bool");
  }
  return e;
}

std::set<std::string> Expr::columns() const {
  std::set<std::string> out;
  if (root_) collect_columns(*root_, out);
  return out;
}

bool Expr::is_constant_true() const {
  return root_ && root_->op == Op::Literal && root_->literal.index() == 3 && std::get<bool>(root_->literal);
}

Value Expr::eval(const Row& row) const { return eval_node(*root_, row); }

bool Expr::test(const Row& row) const { return std::get<bool>(eval_node(*root_, row)); }

std::string Expr::str() const {
  std::string out;
  if (root_) print(*root_, out);
  return out;
}

}  // namespace gyp
