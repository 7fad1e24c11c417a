/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include <algorithm>
#include <map>
#include <random>

#include "doctest.h"
#include "gyp/common/error.hpp"
#include "gyp/executor/engine.hpp"
#include "gyp/executor/ols.hpp"
#include "gyp/executor/table.hpp"
#include "support/fixtures.hpp"
#include "support/random_dataflow.hpp"

using namespace gyp;
using gyp::testing::same_rows;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::BadArgument;
}

DataflowGraph graph_of(const std::string& body) {
  return parse_dataflow("[{\"GID\": \"t\", \"description\": \"\"}, " + body + "]");
}

std::int64_t I(const Value& v) { return std::get<std::int64_t>(v); }
double F(const Value& v) { return std::get<double>(v); }

const Schema kAbc = Schema::parse("k:int64,a:int64,b:float64,s:string");

ExecResult run(const DataflowGraph& g, const Table& t, ExecutorKind backend, int workers = 4,
               const FunctionLibrary* lib = nullptr) {
  ExecOptions o;
  o.backend = backend;
  o.workers = workers;
  o.library = lib;
  return execute(g, {{"src", t}}, o);
}

}  // namespace

TEST_CASE("csv records follow the quoting rules") {
  auto r = parse_csv_records("a,b\n\"x,1\",\"he said \"\"hi\"\"\"\n\"two\nlines\",\r\n");
  REQUIRE(r.size() == 3);
  CHECK(r[1] == std::vector<std::string>{"x,1", "he said \"hi\""});
  CHECK(r[2] == std::vector<std::string>{"two\nlines", ""});
  CHECK(code_of([] { parse_csv_records("a\n\"open"); }) == ErrorCode::SchemaViolation);
}

TEST_CASE("formatting then parsing reproduces random tables") {
  std::mt19937_64 rng(8);
  Schema s = Schema::parse("i:int64,f:float64,t:string,b:bool");
  const char* pieces[] = {"a", ",", "\"", "\n", " ", "z"};
  for (int n = 0; n < 100; ++n) {
    Table t{s, {}};
    for (int r = 0; r < 20; ++r) {
      std::string text;
      for (int k = std::uniform_int_distribution<int>(0, 5)(rng); k > 0; --k) {
        text += pieces[std::uniform_int_distribution<int>(0, 5)(rng)];
      }
      t.rows.push_back({static_cast<std::int64_t>(rng() % 1000), std::uniform_real_distribution<double>(-5, 5)(rng),
                        text, (rng() & 1) != 0});
    }
    Table back = parse_csv(format_csv(t), s);
    CHECK(same_rows(back, t));
  }
}

TEST_CASE("csv parsing rejects mismatched headers and bad fields") {
  Schema s = Schema::parse("x:int64,y:float64");
  CHECK(code_of([&] { parse_csv("x,z\n1,2\n", s); }) == ErrorCode::SchemaViolation);
  CHECK(code_of([&] { parse_csv("x,y\n1\n", s); }) == ErrorCode::SchemaViolation);
  try {
    parse_csv("x,y\n1,2\nq,3\n", s, "obs.csv");
    FAIL("expected CastError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CastError);
    CHECK(e.detail().find("obs.csv") != std::string::npos);
  }
  gyp::testing::TempDir dir;
  CHECK(code_of([&] { dataset_files(dir / "missing"); }) == ErrorCode::MissingInput);
  write_csv(dir / "parts/b.csv", Table{s, {{std::int64_t{2}, 2.0}}});
  write_csv(dir / "parts/a.csv", Table{s, {{std::int64_t{1}, 1.0}}});
  auto files = dataset_files(dir / "parts");
  REQUIRE(files.size() == 2);
  CHECK(files[0].filename() == "a.csv");
}

TEST_CASE("filter, map and groupby match a direct computation") {
  std::mt19937_64 rng(21);
  Table t = gyp::testing::random_table(rng, kAbc, 3000, 17);
  DataflowGraph g = graph_of(R"(
    {"node_id": "read", "operator": "source", "input": ["in"], "output": ["src"], "params": {"schema": "k:int64,a:int64,b:float64,s:string"}},
    {"node_id": "f", "operator": "filter", "input": ["src"], "output": ["f"], "params": {"predicate": "a < 60 and s != 'v2'"}},
    {"node_id": "m", "operator": "map", "input": ["f"], "output": ["m"], "params": {"assign": "c = a * 3 + 1; b = b * 2"}},
    {"node_id": "g", "operator": "groupby", "input": ["m"], "output": ["g"], "params": {"keys": "k", "aggs": "count:*,sum:c,min:a,max:b"}},
    {"node_id": "out", "operator": "sink", "input": ["g", "res"]})");

  struct Acc {
    std::int64_t count = 0, sum = 0, min = 1 << 30;
    double max = -1;
  };
  std::map<std::int64_t, Acc> want;
  for (const auto& r : t.rows) {
    if (!(I(r[1]) < 60 && std::get<std::string>(r[3]) != "v2")) continue;
    Acc& a = want[I(r[0])];
    a.count += 1;
    a.sum += I(r[1]) * 3 + 1;
    a.min = std::min(a.min, I(r[1]));
    a.max = std::max(a.max, F(r[2]) * 2);
  }
  for (auto backend : {ExecutorKind::Single, ExecutorKind::Partitioned}) {
    ExecResult res = run(g, t, backend);
    const Table& out = res.sinks.at("out");
    CHECK(out.schema == Schema::parse("k:int64,count:int64,sum_c:int64,min_a:int64,max_b:float64"));
    REQUIRE(out.rows.size() == want.size());
    for (const auto& r : out.rows) {
      const Acc& a = want.at(I(r[0]));
      CHECK(I(r[1]) == a.count);
      CHECK(I(r[2]) == a.sum);
      CHECK(I(r[3]) == a.min);
      CHECK(F(r[4]) == a.max);
    }
    std::int64_t kept = 0;
    for (const auto& [k, a] : want) kept += a.count;
    CHECK(res.nodes[1].node_id == "f");
    CHECK(res.nodes[1].input_cardinalities == std::vector<std::int64_t>{3000});
    CHECK(res.nodes[1].output_cardinality == kept);
    CHECK(res.connector_rows.at("g") == static_cast<std::int64_t>(want.size()));
  }
}

TEST_CASE("joins equal a nested-loop join on both backends") {
  std::mt19937_64 rng(5);
  Schema left = Schema::parse("k:int64,a:int64"), right = Schema::parse("k:int64,x:float64,t:string");
  Table l = gyp::testing::random_table(rng, left, 400, 30);
  Table r = gyp::testing::random_table(rng, right, 300, 30);
  DataflowGraph g = graph_of(R"(
    {"node_id": "rl", "operator": "source", "input": ["il"], "output": ["l"], "params": {"schema": "k:int64,a:int64"}},
    {"node_id": "rr", "operator": "source", "input": ["ir"], "output": ["r"], "params": {"schema": "k:int64,x:float64,t:string"}},
    {"node_id": "j", "operator": "join", "input": ["l", "r"], "output": ["j"], "params": {"keys": "k"}},
    {"node_id": "out", "operator": "sink", "input": ["j", "res"]})");
  Table want{Schema::parse("k:int64,a:int64,x:float64,t:string"), {}};
  for (const auto& a : l.rows) {
    for (const auto& b : r.rows) {
      if (I(a[0]) == I(b[0])) want.rows.push_back({a[0], a[1], b[1], b[2]});
    }
  }
  for (auto backend : {ExecutorKind::Single, ExecutorKind::Partitioned}) {
    for (int workers : {1, 3, 8}) {
      ExecOptions o{backend, workers, nullptr};
      ExecResult res = execute(g, {{"l", l}, {"r", r}}, o);
      CHECK(same_rows(res.sinks.at("out"), want));
    }
  }
}

TEST_CASE("dedup keeps the smallest row of each key") {
  std::mt19937_64 rng(6);
  Table t = gyp::testing::random_table(rng, kAbc, 2000, 40);
  DataflowGraph g = graph_of(R"(
    {"node_id": "read", "operator": "source", "input": ["in"], "output": ["src"], "params": {"schema": "k:int64,a:int64,b:float64,s:string"}},
    {"node_id": "d", "operator": "dedup", "input": ["src"], "output": ["d"], "params": {"keys": "k, s"}},
    {"node_id": "out", "operator": "sink", "input": ["d", "res"]})");
  std::map<std::pair<std::int64_t, std::string>, Row> best;
  for (const auto& r : t.rows) {
    auto key = std::make_pair(I(r[0]), std::get<std::string>(r[3]));
    auto it = best.find(key);
    if (it == best.end() || compare_rows(r, it->second) < 0) best[key] = r;
  }
  Table want{kAbc, {}};
  for (auto& [k, r] : best) want.rows.push_back(r);
  CHECK(same_rows(run(g, t, ExecutorKind::Single).sinks.at("out"), want));
  CHECK(same_rows(run(g, t, ExecutorKind::Partitioned, 5).sinks.at("out"), want));
}

TEST_CASE("randomized dataflows agree across backends") {
  std::mt19937_64 rng(1234);
  gyp::testing::RandomDataflowOptions opts;
  opts.max_rows = 2000;
  for (int i = 0; i < 40; ++i) {
    auto rd = gyp::testing::random_dataflow(rng, opts);
    ExecResult a = execute(rd.graph, rd.inputs, {ExecutorKind::Single, 1, nullptr});
    ExecResult b = execute(rd.graph, rd.inputs, {ExecutorKind::Partitioned, 4, nullptr});
    INFO(serialize_dataflow(rd.graph));
    REQUIRE(a.sinks.size() == rd.sinks);
    for (const auto& [id, t] : a.sinks) CHECK(same_rows(t, b.sinks.at(id)));
    REQUIRE(a.nodes.size() == b.nodes.size());
    for (std::size_t k = 0; k < a.nodes.size(); ++k) {
      CHECK(a.nodes[k].node_id == b.nodes[k].node_id);
      CHECK(a.nodes[k].input_cardinalities == b.nodes[k].input_cardinalities);
      CHECK(a.nodes[k].output_cardinality == b.nodes[k].output_cardinality);
    }
    CHECK(a.peak_live_tuples == b.peak_live_tuples);
  }
}

TEST_CASE("casts convert values and name the failing node") {
  Schema s = Schema::parse("k:int64,v:string");
  DataflowGraph g = graph_of(R"(
    {"node_id": "read", "operator": "source", "input": ["in"], "output": ["src"], "params": {"schema": "k:int64,v:string"}},
    {"node_id": "c", "operator": "cast", "input": ["src"], "output": ["c"], "params": {"columns": "v:float64"}},
    {"node_id": "out", "operator": "sink", "input": ["c", "res"]})");
  Table good{s, {{std::int64_t{1}, std::string("2.5")}, {std::int64_t{2}, std::string("-1")}}};
  auto res = run(g, good, ExecutorKind::Single);
  CHECK(res.sinks.at("out").rows[0][1] == Value(2.5));
  Table bad{s, {{std::int64_t{1}, std::string("2.5")}, {std::int64_t{2}, std::string("oops")}}};
  for (auto backend : {ExecutorKind::Single, ExecutorKind::Partitioned}) {
    try {
      run(g, bad, backend);
      FAIL("expected CastError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CastError);
      CHECK(e.detail().rfind("node 'c'", 0) == 0);
    }
  }
  CHECK(code_of([&] { execute(g, {}, {}); }) == ErrorCode::MissingInput);
}

TEST_CASE("native functions replace builtin semantics and are checked") {
  DataflowGraph g = graph_of(R"(
    {"node_id": "read", "operator": "source", "input": ["in"], "output": ["src"], "params": {"schema": "k:int64,a:int64,b:float64,s:string"}},
    {"node_id": "u", "operator": "map", "function_alias": "upper", "input": ["src"], "output": ["u"], "params": {"assign": "s = s"}},
    {"node_id": "out", "operator": "sink", "input": ["u", "res"]})");
  Table t{kAbc, {{std::int64_t{1}, std::int64_t{2}, 0.5, std::string("ab")}}};
  FunctionLibrary lib;
  lib.add("upper", [](const OperatorNode&, const Schema&, const Schema&, const std::vector<Row>& rows) {
    std::vector<Row> out = rows;
    for (auto& r : out) {
      auto& s = std::get<std::string>(r[3]);
      std::transform(s.begin(), s.end(), s.begin(), ::toupper);
    }
    return out;
  });
  CHECK(run(g, t, ExecutorKind::Single, 1, &lib).sinks.at("out").rows[0][3] == Value(std::string("AB")));
  FunctionLibrary broken;
  broken.add("upper", [](const OperatorNode&, const Schema&, const Schema&, const std::vector<Row>& rows) {
    std::vector<Row> out = rows;
    for (auto& r : out) r.pop_back();
    return out;
  });
  CHECK(code_of([&] { run(g, t, ExecutorKind::Single, 1, &broken); }) == ErrorCode::SchemaViolation);
  FunctionLibrary throwing;
  throwing.add("upper", [](const OperatorNode&, const Schema&, const Schema&, const std::vector<Row>&) -> std::vector<Row> {
    throw std::runtime_error("boom");
  });
  CHECK(code_of([&] { run(g, t, ExecutorKind::Partitioned, 2, &throwing); }) == ErrorCode::FunctionFailure);
}

TEST_CASE("live tuples follow producer and last consumer") {
  DataflowGraph g = graph_of(R"(
    {"node_id": "read", "operator": "source", "input": ["in"], "output": ["a"]},
    {"node_id": "x", "operator": "filter", "input": ["a"], "output": ["b"], "params": {"predicate": "true"}},
    {"node_id": "y", "operator": "filter", "input": ["a"], "output": ["c"], "params": {"predicate": "true"}},
    {"node_id": "s1", "operator": "sink", "input": ["b", "o1"]},
    {"node_id": "s2", "operator": "sink", "input": ["c", "o2"]})");
  std::map<std::string, std::int64_t> rows{{"a", 100}, {"b", 30}, {"c", 50}};
  // a=100 → +b 130 → a still needed by y: +c 180, a released → s1 releases b → s2
  auto p = live_tuple_profile(g, {"read", "x", "y", "s1", "s2"}, rows);
  CHECK(p.per_node.at("read") == 100);
  CHECK(p.per_node.at("x") == 130);
  CHECK(p.per_node.at("y") == 180);
  CHECK(p.per_node.at("s1") == 80);
  CHECK(p.per_node.at("s2") == 50);
  CHECK(p.peak == 180);
}

TEST_CASE("least squares recovers exact lines and is order independent") {
  Schema s = Schema::parse("x:float64,z:int64,y:float64");
  Table t{s, {}};
  for (int i = 0; i < 100; ++i) {
    double x = i * 0.37 - 5;
    std::int64_t z = (i * 7) % 13;
    t.rows.push_back({x, z, 3.0 * x - 0.5 * static_cast<double>(z) + 4.0});
  }
  LinearModel m = fit_ols(t, {"x", "z"}, "y", {0.0});
  CHECK(m.coefficients[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(m.coefficients[1] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(m.intercept == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(m.rmse < 1e-9);
  CHECK(m.n_rows == 100);

  std::mt19937_64 rng(2);
  Table shuffled = t;
  std::shuffle(shuffled.rows.begin(), shuffled.rows.end(), rng);
  LinearModel m2 = fit_ols(shuffled, {"x", "z"}, "y");
  LinearModel m1 = fit_ols(t, {"x", "z"}, "y");
  CHECK(m1.coefficients == m2.coefficients);
  CHECK(m1.intercept == m2.intercept);

  LinearModel back = model_from_json(model_to_json(m));
  CHECK(back.coefficients == m.coefficients);
  CHECK(back.intercept == m.intercept);
  CHECK(model_rmse(m, t) == doctest::Approx(m.rmse).epsilon(1e-6));

  Table dup{Schema::parse("x:float64,w:float64,y:float64"), {}};
  for (int i = 0; i < 10; ++i) dup.rows.push_back({double(i), double(2 * i), double(i)});
  CHECK(code_of([&] { fit_ols(dup, {"x", "w"}, "y", {0.0}); }) == ErrorCode::SingularSystem);
  CHECK(code_of([&] { fit_ols(t, {"x"}, "nope"); }) == ErrorCode::UnknownColumn);
}

TEST_CASE("pairwise sums stay close to the exact sum") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(-1, 1);
  std::vector<double> v(100000);
  long double exact = 0;
  for (auto& x : v) {
    x = d(rng) * 1e6;
    exact += x;
  }
  CHECK(std::abs(pairwise_sum(v.data(), v.size()) - static_cast<double>(exact)) < 1e-3);
  CHECK(pairwise_sum(nullptr, 0) == 0.0);
}

TEST_CASE("train and predict run inside a graph") {
  Schema s = Schema::parse("x:float64,y:float64");
  Table t{s, {}};
  for (int i = 0; i < 50; ++i) t.rows.push_back({double(i), 2.0 * i + 1});
  DataflowGraph g = graph_of(R"(
    {"node_id": "read", "operator": "source", "input": ["in"], "output": ["src"], "params": {"schema": "x:float64,y:float64"}},
    {"node_id": "fit", "operator": "train", "input": ["src"], "output": ["model", "metrics"], "params": {"features": "x", "target": "y"}},
    {"node_id": "apply", "operator": "predict", "input": ["src", "model"], "output": ["scored"]},
    {"node_id": "o1", "operator": "sink", "input": ["scored", "r1"]},
    {"node_id": "o2", "operator": "sink", "input": ["metrics", "r2"]})");
  for (auto backend : {ExecutorKind::Single, ExecutorKind::Partitioned}) {
    ExecResult res = run(g, t, backend);
    const Table& scored = res.sinks.at("o1");
    CHECK(scored.schema.names() == std::vector<std::string>{"x", "y", "prediction"});
    for (const auto& r : scored.rows) CHECK(F(r[2]) == doctest::Approx(F(r[1])).epsilon(1e-9));
    CHECK(res.sinks.at("o2").rows.size() == 1);
    CHECK(res.models.count("model") == 1);
  }
}
