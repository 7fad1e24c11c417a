/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include <cmath>
#include <random>

#include "doctest.h"
#include "gyp/common/error.hpp"
#include "gyp/executor/engine.hpp"
#include "gyp/optimizer/optimizer.hpp"
#include "support/fixtures.hpp"
#include "support/random_dataflow.hpp"

using namespace gyp;
using gyp::testing::same_rows;

namespace {

DataflowGraph graph_of(const std::string& body) {
  return parse_dataflow("[{\"GID\": \"t\", \"description\": \"\"}, " + body + "]");
}

const FunctionRegistry& registry() {
  static const FunctionRegistry r = FunctionRegistry::with_builtins();
  return r;
}

Annotations with(const DataflowGraph& g, std::map<std::string, std::pair<double, double>> per_node) {
  Annotations a = annotate(g, FixedStats{}, registry());
  for (auto& [id, sc] : per_node) {
    a[id].selectivity = sc.first;
    a[id].cost_per_tuple = sc.second;
    a[id].rank = operator_rank(sc.first, sc.second);
  }
  return a;
}

std::vector<std::string> chain_from(const DataflowGraph& g, const std::string& connector) {
  std::vector<std::string> ids;
  for (auto c = g.consumers_of(connector); c.size() == 1 && c[0]->op != OperatorKind::Sink;
       c = g.consumers_of(c[0]->outputs[0])) {
    ids.push_back(c[0]->node_id);
  }
  return ids;
}

const char* kChain = R"(
    {"node_id": "read", "operator": "source", "input": ["in"], "output": ["src"], "params": {"schema": "k:int64,a:int64,b:float64,s:string"}},
    {"node_id": "m", "operator": "map", "input": ["src"], "output": ["c1"], "params": {"assign": "c = a + 1"}},
    {"node_id": "cs", "operator": "cast", "input": ["c1"], "output": ["c2"], "params": {"columns": "b:string"}},
    {"node_id": "fa", "operator": "filter", "input": ["c2"], "output": ["c3"], "params": {"predicate": "a > 10"}},
    {"node_id": "fc", "operator": "filter", "input": ["c3"], "output": ["c4"], "params": {"predicate": "c < 50"}},
    {"node_id": "out", "operator": "sink", "input": ["c4", "res"]})";

}  // namespace

TEST_CASE("rank is the selectivity gain per unit cost") {
  CHECK(operator_rank(0.5, 0.25) == -2.0);
  CHECK(operator_rank(2.0, 0.5) == 2.0);
  CHECK(operator_rank(1.0, 0.0) == 0.0);
  CHECK(std::isinf(operator_rank(0.2, 0.0)));
  CHECK(operator_rank(0.2, 0.0) < 0);
}

TEST_CASE("only builtin element-wise operators are movable") {
  DataflowGraph g = graph_of(R"(
    {"node_id": "read", "operator": "source", "input": ["in"], "output": ["a"]},
    {"node_id": "f", "operator": "filter", "input": ["a"], "output": ["b"], "params": {"predicate": "x > 1"}},
    {"node_id": "u", "operator": "map", "function_alias": "udf", "input": ["b"], "output": ["c"]},
    {"node_id": "d", "operator": "dedup", "input": ["c"], "output": ["d"]},
    {"node_id": "out", "operator": "sink", "input": ["d", "res"]})");
  FixedStats stats(0.5, 2e-6);
  stats.set("filter", 0.25, 1e-6);
  Annotations a = annotate(g, stats, registry());
  CHECK(a.at("f").movable);
  CHECK_FALSE(a.at("u").movable);
  CHECK_FALSE(a.at("d").movable);
  CHECK_FALSE(a.at("read").movable);
  CHECK(a.at("f").selectivity == 0.25);
  CHECK(a.at("f").rank == doctest::Approx(-0.75 / 1e-6));
  CHECK(a.at("u").selectivity == 0.5);
}

TEST_CASE("estimates propagate selectivities and join sizes") {
  DataflowGraph g = graph_of(R"(
    {"node_id": "r1", "operator": "source", "input": ["i1"], "output": ["a"]},
    {"node_id": "r2", "operator": "source", "input": ["i2"], "output": ["b"]},
    {"node_id": "f", "operator": "filter", "input": ["a"], "output": ["fa"], "params": {"predicate": "x > 1"}},
    {"node_id": "j", "operator": "join", "input": ["fa", "b"], "output": ["j"], "params": {"keys": "k"}},
    {"node_id": "out", "operator": "sink", "input": ["j", "res"]})");
  Annotations a = with(g, {{"f", {0.2, 1e-6}}, {"j", {0.01, 1e-6}}});
  auto e = estimate_cardinalities(g, a, {{"a", 1000.0}, {"i2", 300.0}});
  CHECK(e.node_out.at("r1") == 1000.0);
  CHECK(e.node_out.at("r2") == 300.0);
  CHECK(e.connector.at("fa") == doctest::Approx(200.0));
  // 200 × 300 pairs at selectivity 0.01, normalized by the larger side
  CHECK(e.node_in.at("j") == doctest::Approx(500.0));
  CHECK(e.connector.at("j") == doctest::Approx(0.01 * 200 * 300 / 300));
  CHECK(e.intermediate_total(g) == doctest::Approx(200.0 + 2.0));
  try {
    estimate_cardinalities(g, a, {{"a", 1.0}});
    FAIL("expected MissingSourceSize");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::MissingSourceSize);
  }
}

TEST_CASE("chains are ordered by rank within dependencies") {
  DataflowGraph g = graph_of(kChain);
  CHECK(movable_chains(g, annotate(g, FixedStats{}, registry())) ==
        std::vector<std::vector<std::string>>{{"m", "cs", "fa", "fc"}});
  Annotations a = with(g, {{"m", {1.0, 1e-6}}, {"cs", {1.0, 1e-6}}, {"fa", {0.5, 1e-6}}, {"fc", {0.1, 1e-6}}});
  RewriteResult r = rewrite(g, a, registry());
  // fc reads c written by m, so it waits for m; fa reads only a and leads.
  CHECK(chain_from(r.graph, "src") == std::vector<std::string>{"fa", "m", "fc", "cs"});
  REQUIRE(r.trace.steps.size() == 1);
  CHECK(r.trace.steps[0].rule == "reorder_chain");
  CHECK(validate(r.graph, registry()).ok());

  RewriteResult again = rewrite(r.graph, a, registry());
  CHECK(again.trace.steps.empty());

  RewriteTrace back = rewrite_trace_from_json(rewrite_trace_to_json(r.trace));
  DataflowGraph replayed = replay(g, back, registry());
  CHECK(chain_from(replayed, "src") == chain_from(r.graph, "src"));

  RewriteResult off = rewrite(g, a, registry(), {false, false});
  CHECK(off.trace.steps.empty());
  CHECK(chain_from(off.graph, "src") == chain_from(g, "src"));
}

TEST_CASE("filters move below joins onto the side holding their columns") {
  DataflowGraph g = graph_of(R"(
    {"node_id": "r1", "operator": "source", "input": ["i1"], "output": ["l"], "params": {"schema": "k:int64,a:int64"}},
    {"node_id": "r2", "operator": "source", "input": ["i2"], "output": ["r"], "params": {"schema": "k:int64,x:float64"}},
    {"node_id": "j", "operator": "join", "input": ["l", "r"], "output": ["j"], "params": {"keys": "k"}},
    {"node_id": "f", "operator": "filter", "input": ["j"], "output": ["f"], "params": {"predicate": "x > 0.5"}},
    {"node_id": "out", "operator": "sink", "input": ["f", "res"]})");
  Annotations a = with(g, {{"f", {0.5, 1e-6}}});
  RewriteResult r = rewrite(g, a, registry());
  REQUIRE(r.trace.steps.size() == 1);
  CHECK(r.trace.steps[0].rule == "filter_pushdown");
  const OperatorNode* f = r.graph.find("f");
  CHECK(f->inputs == std::vector<std::string>{"r"});
  CHECK(r.graph.producer_of(r.graph.find("out")->inputs[0])->node_id == "j");

  std::mt19937_64 rng(3);
  Table l = gyp::testing::random_table(rng, Schema::parse("k:int64,a:int64"), 200, 20);
  Table rt = gyp::testing::random_table(rng, Schema::parse("k:int64,x:float64"), 200, 20);
  for (auto& row : rt.rows) row[1] = static_cast<double>(rng() % 100) / 100.0;
  ExecResult before = execute(g, {{"l", l}, {"r", rt}}, {});
  ExecResult after = execute(r.graph, {{"l", l}, {"r", rt}}, {});
  CHECK(same_rows(before.sinks.at("out"), after.sinks.at("out")));
  CHECK(after.nodes.size() == before.nodes.size());
}

TEST_CASE("opaque functions block reordering") {
  DataflowGraph g = graph_of(R"(
    {"node_id": "read", "operator": "source", "input": ["in"], "output": ["src"], "params": {"schema": "k:int64,a:int64"}},
    {"node_id": "u", "operator": "map", "function_alias": "udf", "input": ["src"], "output": ["c1"], "params": {"assign": "a = a"}},
    {"node_id": "f", "operator": "filter", "input": ["c1"], "output": ["c2"], "params": {"predicate": "k > 3"}},
    {"node_id": "out", "operator": "sink", "input": ["c2", "res"]})");
  Annotations a = with(g, {{"f", {0.01, 1e-6}}});
  CHECK(rewrite(g, a, registry()).trace.steps.empty());
}

TEST_CASE("rewritten random dataflows produce the same outputs") {
  std::mt19937_64 rng(77);
  gyp::testing::RandomDataflowOptions opts;
  opts.max_rows = 1500;
  int rewritten = 0;
  for (int i = 0; i < 60; ++i) {
    auto rd = gyp::testing::random_dataflow(rng, opts);
    Annotations a = gyp::testing::random_annotations(rng, rd.graph);
    RewriteResult r = rewrite(rd.graph, a, registry());
    INFO(serialize_dataflow(rd.graph));
    CHECK(validate(r.graph, registry()).ok());
    if (!r.trace.steps.empty()) ++rewritten;
    ExecResult before = execute(rd.graph, rd.inputs, {});
    ExecResult after = execute(r.graph, rd.inputs, {});
    for (const auto& [id, t] : before.sinks) {
      bool same = same_rows(t, after.sinks.at(id));
      if (!same) MESSAGE(serialize_dataflow(r.graph));
      CHECK(same);
    }
    CHECK(rewrite(r.graph, a, registry()).trace.steps.empty());
  }
  CHECK(rewritten > 5);
}
