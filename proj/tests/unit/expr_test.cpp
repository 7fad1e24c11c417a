/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include <random>

#include "doctest.h"
#include "gyp/common/error.hpp"
#include "gyp/core/expr.hpp"

using namespace gyp;

namespace {

// Random integer expression with its value computed independently.
struct Gen {
  std::mt19937_64 rng;
  std::int64_t a = 0, b = 0;

  std::pair<std::string, std::int64_t> arith(int depth) {
    int k = std::uniform_int_distribution<int>(0, depth <= 0 ? 2 : 6)(rng);
    switch (k) {
      case 0: {
        std::int64_t v = std::uniform_int_distribution<int>(0, 50)(rng);
        return {std::to_string(v), v};
      }
      case 1: return {"a", a};
      case 2: return {"b", b};
      case 3: {
        auto [t, v] = arith(depth - 1);
        return {"-(" + t + ")", static_cast<std::int64_t>(0 - static_cast<std::uint64_t>(v))};
      }
      default: {
        auto [lt, lv] = arith(depth - 1);
        auto [rt, rv] = arith(depth - 1);
        static const char* ops[] = {"+", "-", "*"};
        int o = std::uniform_int_distribution<int>(0, 2)(rng);
        // two's-complement wrap, as int64 arithmetic is defined to wrap
        auto x = static_cast<std::uint64_t>(lv), y = static_cast<std::uint64_t>(rv);
        auto v = static_cast<std::int64_t>(o == 0 ? x + y : o == 1 ? x - y : x * y);
        return {"(" + lt + " " + ops[o] + " " + rt + ")", v};
      }
    }
  }

  std::pair<std::string, bool> boolean(int depth) {
    int k = std::uniform_int_distribution<int>(0, depth <= 0 ? 0 : 3)(rng);
    if (k == 0) {
      auto [lt, lv] = arith(2);
      auto [rt, rv] = arith(2);
      static const char* ops[] = {"<", "<=", "=", "!=", ">=", ">"};
      int o = std::uniform_int_distribution<int>(0, 5)(rng);
      bool v = o == 0 ? lv < rv : o == 1 ? lv <= rv : o == 2 ? lv == rv : o == 3 ? lv != rv : o == 4 ? lv >= rv : lv > rv;
      return {lt + " " + ops[o] + " " + rt, v};
    }
    if (k == 1) {
      auto [t, v] = boolean(depth - 1);
      return {"not (" + t + ")", !v};
    }
    auto [lt, lv] = boolean(depth - 1);
    auto [rt, rv] = boolean(depth - 1);
    if (k == 2) return {"(" + lt + ") and (" + rt + ")", lv && rv};
    return {"(" + lt + ") or (" + rt + ")", lv || rv};
  }
};

const Schema kSchema = Schema::parse("a:int64,b:int64,x:float64,s:string");

}  // namespace

TEST_CASE("random integer expressions evaluate like the reference arithmetic") {
  Gen g{std::mt19937_64(17)};
  for (int i = 0; i < 500; ++i) {
    g.a = std::uniform_int_distribution<int>(-20, 20)(g.rng);
    g.b = std::uniform_int_distribution<int>(-20, 20)(g.rng);
    Row row{g.a, g.b, 0.5, std::string("q")};
    auto [text, want] = g.arith(4);
    Expr e = Expr::parse(text, kSchema);
    CHECK(e.type() == AttrType::Int64);
    CHECK(std::get<std::int64_t>(e.eval(row)) == want);
    // canonical text re-parses to the same tree
    CHECK(Expr::parse(e.str(), kSchema).str() == e.str());
    auto [ptext, pwant] = g.boolean(3);
    Expr p = Expr::parse_predicate(ptext, kSchema);
    CHECK(p.test(row) == pwant);
  }
}

TEST_CASE("precedence and associativity") {
  Row row{std::int64_t{3}, std::int64_t{4}, 1.5, std::string("v1")};
  auto ev = [&](const char* t) { return Expr::parse(t, kSchema).eval(row); };
  CHECK(std::get<std::int64_t>(ev("1 + 2 * 3")) == 7);
  CHECK(std::get<std::int64_t>(ev("10 - 3 - 2")) == 5);
  CHECK(std::get<std::int64_t>(ev("-a * b")) == -12);
  CHECK(std::get<double>(ev("a / b")) == doctest::Approx(0.75));
  CHECK(std::get<double>(ev("x * 2")) == 3.0);
  CHECK(std::get<bool>(ev("a < b and not b < a || false")));
  CHECK(std::get<bool>(ev("s = 'v1'")));
  CHECK(std::get<bool>(ev("s <> \"v2\"")));
  CHECK(std::get<bool>(ev("a + 0.5 > 3")));
}

TEST_CASE("columns are collected and constant truth is detected") {
  Expr e = Expr::parse_untyped("a + b > x or s = 'z'");
  CHECK(e.columns() == std::set<std::string>{"a", "b", "s", "x"});
  CHECK_FALSE(e.typed());
  CHECK(Expr::parse("true", kSchema).is_constant_true());
  CHECK_FALSE(Expr::parse("a > 1", kSchema).is_constant_true());
}

TEST_CASE("errors carry codes and positions") {
  auto code_of = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::BadArgument;
  };
  CHECK(code_of([] { Expr::parse("a + ", kSchema); }) == ErrorCode::SyntaxError);
  CHECK(code_of([] { Expr::parse("nope > 1", kSchema); }) == ErrorCode::UnknownColumn);
  CHECK(code_of([] { Expr::parse("s + 1", kSchema); }) == ErrorCode::TypeError);
  CHECK(code_of([] { Expr::parse_predicate("a + 1", kSchema); }) == ErrorCode::TypeError);
  try {
    Expr::parse("a + * b", kSchema);
    FAIL("expected a syntax error");
  } catch (const Error& e) {
    CHECK(e.detail().find("position 5") != std::string::npos);
  }
  try {
    Expr::parse("(a + b", kSchema);
    FAIL("expected a syntax error");
  } catch (const Error& e) {
    CHECK(e.detail().find("position 7") != std::string::npos);
  }
}
