/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include <random>

#include "doctest.h"
#include "gyp/catalog/catalog.hpp"
#include "gyp/common/error.hpp"
#include "gyp/core/dataflow.hpp"
#include "support/random_dataflow.hpp"

using namespace gyp;

namespace {

const char* kDoc = R"([
  {"GID": "demo", "description": "filter and fit"},
  {"node_id": "read", "operator": "source", "input": ["obs"], "output": ["raw"]},
  {"node_id": "keep", "operator": "filter", "input": ["raw"], "output": ["kept"],
   "params": {"predicate": "x >= ${lo}"}},
  {"node_id": "fit", "operator": "Train", "input": ["kept"], "output": ["model"],
   "params": {"features": "x", "target": "y"}},
  {"node_id": "save", "operator": "sink", "input": ["kept", "result"]}
])";

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::BadArgument;
}

}  // namespace

TEST_CASE("documents parse and serialize losslessly") {
  DataflowGraph g = parse_dataflow(kDoc);
  CHECK(g.header_gid == "demo");
  CHECK(g.nodes.size() == 4);
  CHECK(g.find("fit")->op == OperatorKind::Train);
  CHECK(g.placeholders() == std::set<std::string>{"obs", "result"});
  CHECK(g.sink_target(*g.find("save")) == std::optional<std::string>("result"));
  CHECK(g.data_inputs(*g.find("save")) == std::vector<std::string>{"kept"});
  DataflowGraph again = parse_dataflow(serialize_dataflow(g));
  CHECK(again.nodes == g.nodes);
  CHECK(again.edges == g.edges);
}

TEST_CASE("malformed documents are rejected with specific codes") {
  CHECK(code_of([] { parse_dataflow("{"); }) == ErrorCode::MalformedJson);
  CHECK(code_of([] { parse_dataflow("[]"); }) == ErrorCode::MalformedJson);
  CHECK(code_of([] {
          parse_dataflow(R"([{"GID": "x", "description": ""}, {"node_id": "a", "operator": "explode", "input": ["i"], "output": ["o"]}])");
        }) == ErrorCode::UnknownOperator);
  CHECK(code_of([] {
          parse_dataflow(R"([{"GID": "x", "description": ""},
            {"node_id": "a", "operator": "source", "input": ["i"], "output": ["o"]},
            {"node_id": "a", "operator": "sink", "input": ["o", "p"]}])");
        }) == ErrorCode::DuplicateNodeId);
  CHECK(code_of([] {
          parse_dataflow(R"([{"GID": "x", "description": ""},
            {"node_id": "a", "operator": "source", "input": ["i"], "output": ["o"]},
            {"node_id": "b", "operator": "source", "input": ["j"], "output": ["o"]}])");
        }) == ErrorCode::DanglingConnector);
}

TEST_CASE("validation reports cycles, arity and schema violations") {
  auto reg = FunctionRegistry::with_builtins();
  DataflowGraph cyc = parse_dataflow(R"([{"GID": "c", "description": ""},
    {"node_id": "a", "operator": "map", "input": ["y"], "output": ["x"], "params": {"assign": "q = 1"}},
    {"node_id": "b", "operator": "map", "input": ["x"], "output": ["y"], "params": {"assign": "r = 1"}}])");
  CHECK(validate(cyc, reg).contains(ViolationKind::Cycle));
  CHECK(code_of([&] { topological_order(cyc); }) == ErrorCode::InvalidGraph);

  DataflowGraph bad = parse_dataflow(R"([{"GID": "v", "description": ""},
    {"node_id": "read", "operator": "source", "input": ["in"], "output": ["raw"], "params": {"schema": "a:int64,s:string"}},
    {"node_id": "f", "operator": "filter", "input": ["raw"], "output": ["f1"], "params": {"predicate": "nope > 1"}},
    {"node_id": "g", "operator": "filter", "input": ["raw"], "output": ["f2"], "params": {"predicate": "s + 1 > 2"}},
    {"node_id": "j", "operator": "join", "input": ["f1"], "output": ["f3"], "params": {"keys": "a"}},
    {"node_id": "out", "operator": "sink", "input": ["f2", "res"]}])");
  ValidationReport r = validate(bad, reg);
  CHECK(r.contains(ViolationKind::UnknownColumn));
  CHECK(r.contains(ViolationKind::TypeError));
  CHECK(r.contains(ViolationKind::ArityMismatch));
  CHECK(r.contains(ViolationKind::UnconsumedOutput));
  CHECK_FALSE(r.ok());
}

TEST_CASE("random dataflows validate and sort topologically") {
  std::mt19937_64 rng(99);
  auto reg = FunctionRegistry::with_builtins();
  for (int i = 0; i < 200; ++i) {
    auto rd = testing::random_dataflow(rng);
    ValidationReport r = validate(rd.graph, reg);
    INFO(serialize_dataflow(rd.graph));
    INFO(r.str());
    CHECK(r.ok());
    CHECK(rd.graph.nodes.size() <= 12);
    auto order = topological_order(rd.graph);
    std::map<std::string, std::size_t> pos;
    for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = k;
    CHECK(order.size() == rd.graph.nodes.size());
    for (const auto& e : rd.graph.edges) CHECK(pos[e.producer] < pos[e.consumer]);
  }
}

TEST_CASE("binding resolves placeholders, parameters and connector types") {
  Catalog catalog;
  catalog.register_platform({"p", 1, 0, 1.0, "/tmp/gyp-unused", ExecutorKind::Single});
  ArtifactRecord d;
  d.kind = ArtifactKind::Dataset;
  d.name = "obs";
  d.dataset = DatasetInfo{Schema::parse("x:int64,y:float64"), "csv", Bucket::Landing, "p", "obs.csv"};
  Gid obs = catalog.register_artifact(d);
  auto reg = FunctionRegistry::with_builtins();
  DataflowGraph g = parse_dataflow(kDoc);

  DataflowGraph c = bind(g, {{"obs", obs.str()}, {"result", "kept"}}, {{"lo", std::int64_t{10}}}, catalog, reg);
  CHECK(c.is_concrete());
  CHECK(c.find("keep")->param_string("predicate") == std::optional<std::string>("x >= 10"));
  CHECK(c.connector_types.at("kept").schema == Schema::parse("x:int64,y:float64"));
  CHECK(c.connector_types.at("model").is_model);
  CHECK(c.connector_types.at("model").target == "y");

  CHECK(code_of([&] { bind(g, {{"result", "kept"}}, {{"lo", std::int64_t{1}}}, catalog, reg); }) ==
        ErrorCode::MissingBinding);
  CHECK(code_of([&] { bind(g, {{"obs", obs.str()}, {"result", "k"}}, {}, catalog, reg); }) == ErrorCode::MissingParam);
  CHECK(code_of([&] {
          bind(g, {{"obs", GidGenerator(1).next().str()}, {"result", "k"}}, {{"lo", std::int64_t{1}}}, catalog, reg);
        }) == ErrorCode::UnknownGid);
}
