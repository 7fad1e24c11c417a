/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include <random>
#include <set>

#include "doctest.h"
#include "gyp/common/error.hpp"
#include "gyp/common/gid.hpp"
#include "gyp/common/value.hpp"

using namespace gyp;

TEST_CASE("gid text form round-trips and rejects malformed input") {
  GidGenerator gen(7);
  std::set<Gid> seen;
  for (int i = 0; i < 1000; ++i) {
    Gid g = gen.next();
    CHECK(g.str().size() == 32);
    CHECK(Gid::parse(g.str()) == g);
    CHECK(seen.insert(g).second);
  }
  CHECK_FALSE(Gid::parse("xyz").has_value());
  CHECK_FALSE(Gid::parse(std::string(31, 'a')).has_value());
  CHECK_FALSE(Gid::parse(std::string(32, 'g')).has_value());
  CHECK_THROWS_AS(Gid::from_string("nope"), Error);
}

TEST_CASE("seeded generators repeat") {
  GidGenerator a(11), b(11);
  for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
}

TEST_CASE("format and parse are inverse for every type") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    double x = d(rng);
    Value v = x;
    Value back = parse_value(format_value(v), AttrType::Float64);
    CHECK(std::get<double>(back) == x);
    std::int64_t n = static_cast<std::int64_t>(rng());
    CHECK(std::get<std::int64_t>(parse_value(format_value(Value(n)), AttrType::Int64)) == n);
  }
  CHECK(format_value(Value(0.1)) == "0.1");
  CHECK(format_value(Value(true)) == "true");
  auto ts = parse_iso8601("2024-02-29T12:34:56Z");
  REQUIRE(ts.has_value());
  CHECK(format_iso8601(*ts) == "2024-02-29T12:34:56Z");
  CHECK(ts->seconds == 1709210096);
}

TEST_CASE("strict parsing raises CastError") {
  for (auto [text, type] : std::vector<std::pair<std::string, AttrType>>{
           {"12x", AttrType::Int64}, {"", AttrType::Int64}, {"1.5.2", AttrType::Float64}, {"yes", AttrType::Bool}}) {
    try {
      parse_value(text, type);
      FAIL("expected CastError for " << text);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CastError);
    }
  }
}

TEST_CASE("value comparison is a total order") {
  std::mt19937_64 rng(5);
  std::vector<Value> pool = {Value(std::int64_t{1}), Value(2.5), Value(std::string("a")), Value(false),
                             Value(Timestamp{5}), Value(std::numeric_limits<double>::quiet_NaN()),
                             Value(std::int64_t{-4}), Value(-0.5), Value(std::string("b"))};
  for (const auto& a : pool) {
    CHECK(compare_values(a, a) == 0);
    for (const auto& b : pool) {
      CHECK(compare_values(a, b) == -compare_values(b, a));
      for (const auto& c : pool) {
        if (compare_values(a, b) <= 0 && compare_values(b, c) <= 0) CHECK(compare_values(a, c) <= 0);
      }
    }
  }
}

TEST_CASE("schemas parse, print and reject duplicates") {
  Schema s = Schema::parse("a:int64,b:float64,c:string");
  CHECK(s.size() == 3);
  CHECK(Schema::parse(s.str()) == s);
  CHECK(s.index_of("b") == 1u);
  CHECK(s.row_width() == doctest::Approx(8 + 8 + 16));
  CHECK_THROWS_AS(Schema::parse("a:int64,a:string"), Error);
  CHECK_THROWS_AS(Schema::parse("a:decimal"), Error);
}

TEST_CASE("user errors and internal errors are told apart") {
  CHECK(is_user_error(ErrorCode::SyntaxError));
  CHECK(is_user_error(ErrorCode::MissingBinding));
  CHECK_FALSE(is_user_error(ErrorCode::CatalogIo));
  CHECK_FALSE(is_user_error(ErrorCode::FunctionFailure));
  CHECK_FALSE(is_user_error(ErrorCode::SingularSystem));
  CHECK(error_code_name(ErrorCode::NoFeasiblePlatform) == "NoFeasiblePlatform");
}
