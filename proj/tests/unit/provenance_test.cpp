/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include <set>

#include "doctest.h"
#include "gyp/common/error.hpp"
#include "gyp/provenance/provenance.hpp"
#include "support/fixtures.hpp"

using namespace gyp;
using gyp::testing::Workspace;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::BadArgument;
}

const char* kPrepare = R"([{"GID": "prepare", "description": "join, filter, train"},
  {"node_id": "ra", "operator": "source", "input": ["A"], "output": ["a"]},
  {"node_id": "rb", "operator": "source", "input": ["B"], "output": ["b"]},
  {"node_id": "j", "operator": "join", "input": ["a", "b"], "output": ["ab"], "params": {"keys": "k"}},
  {"node_id": "f", "operator": "filter", "input": ["ab"], "output": ["kept"], "params": {"predicate": "a > 2"}},
  {"node_id": "s", "operator": "sink", "input": ["kept", "res"]},
  {"node_id": "t", "operator": "train", "input": ["kept"], "output": ["model"], "params": {"features": "a, x", "target": "b", "gpus": 0}}])";

const char* kScore = R"([{"GID": "score", "description": "apply model"},
  {"node_id": "rd", "operator": "source", "input": ["D"], "output": ["d"]},
  {"node_id": "rm", "operator": "source", "input": ["M"], "output": ["m"]},
  {"node_id": "p", "operator": "predict", "input": ["d", "m"], "output": ["scored"]},
  {"node_id": "s", "operator": "sink", "input": ["scored", "out"]}])";

struct Scenario {
  Workspace ws;
  Gid a, b, joined, model, scored;
  RunResult first, second;

  Scenario() {
    auto p = ws.add_platform("p1", 0, 2.0);
    Table ta{Schema::parse("k:int64,a:int64,b:float64"), {}};
    Table tb{Schema::parse("k:int64,x:float64"), {}};
    for (int k = 0; k < 200; ++k) {
      ta.rows.push_back({std::int64_t{k}, std::int64_t{k % 7}, 2.0 * (k % 7) + 0.25 * k});
      if (k % 2 == 0) tb.rows.push_back({std::int64_t{k}, 0.5 * k});
    }
    a = gyp::testing::store_dataset(ws.catalog(), p, "A", "a.csv", ta);
    b = gyp::testing::store_dataset(ws.catalog(), p, "B", "b.csv", tb);
    first = ws.run(ws.bind(kPrepare, {{"A", a.str()}, {"B", b.str()}, {"res", "joined"}}));
    joined = first.outputs.at("joined");
    model = first.models.at("t");
    second = ws.run(ws.bind(kScore, {{"D", joined.str()}, {"M", model.str()}, {"out", "scored"}}));
    scored = second.outputs.at("scored");
  }
};

}  // namespace

TEST_CASE("every persisted output links back to its dataflow, node and inputs") {
  Scenario sc;
  ProvenanceStore& prov = sc.ws.provenance();

  auto l = prov.link(sc.joined);
  REQUIRE(l);
  CHECK(l->node_id == "s");
  CHECK(l->run == sc.first.run_id);
  CHECK(l->dataflow == sc.first.dataflow);
  CHECK(l->function_alias == "csv_sink");
  CHECK(std::set<Gid>(l->inputs.begin(), l->inputs.end()) == std::set<Gid>{sc.a, sc.b});
  CHECK(l->path_functions == std::vector<std::string>{"join", "filter"});
  CHECK(l->activity_kind == "trans_run");
  CHECK(l->platform_id == "p1");

  auto m = prov.link(sc.model);
  REQUIRE(m);
  CHECK(m->node_id == "t");
  CHECK(m->activity_kind == "model_training");
  CHECK(m->function_alias == "ols_train");
  CHECK(std::set<Gid>(m->inputs.begin(), m->inputs.end()) == std::set<Gid>{sc.a, sc.b});

  auto s = prov.link(sc.scored);
  REQUIRE(s);
  CHECK(s->activity_kind == "model_run");
  CHECK(std::set<Gid>(s->inputs.begin(), s->inputs.end()) == std::set<Gid>{sc.joined, sc.model});

  CHECK(prov.lineage(sc.scored) == std::set<Gid>{sc.joined, sc.model, sc.a, sc.b});
  CHECK(prov.lineage(sc.a).empty());
  CHECK(code_of([&] { prov.lineage(GidGenerator(123456).next()); }) == ErrorCode::UnknownGid);

  auto run = prov.run(sc.first.run_id);
  REQUIRE(run);
  CHECK(run->status == RunStatus::Success);
  CHECK(run->ended_at >= run->started_at);
  CHECK(prov.traces(sc.first.run_id).size() == 6);
}

TEST_CASE("exported provenance has the topology of the runs") {
  Scenario sc;
  nlohmann::json doc = sc.ws.provenance().export_prov(sc.scored);
  std::set<std::string> entities;
  for (const auto& [k, v] : doc["entity"].items()) entities.insert(k);
  CHECK(entities == std::set<std::string>{sc.a.str(), sc.b.str(), sc.joined.str(), sc.model.str(), sc.scored.str()});
  CHECK(doc["activity"].size() == 3);

  std::set<std::pair<std::string, std::string>> derived;
  for (const auto& [k, v] : doc["wasDerivedFrom"].items()) {
    derived.insert({v["prov:usedEntity"].get<std::string>(), v["prov:generatedEntity"].get<std::string>()});
  }
  std::set<std::pair<std::string, std::string>> want{
      {sc.a.str(), sc.joined.str()},      {sc.b.str(), sc.joined.str()},     {sc.a.str(), sc.model.str()},
      {sc.b.str(), sc.model.str()},       {sc.joined.str(), sc.scored.str()}, {sc.model.str(), sc.scored.str()}};
  CHECK(derived == want);
  CHECK(doc["wasGeneratedBy"].size() == 3);
  CHECK(doc["used"].size() == 6);
}

TEST_CASE("statistics aggregate traces at reference speed") {
  Scenario sc;
  // The filter saw the 100 joined rows and kept those with k % 7 > 2.
  std::int64_t kept = 0;
  for (int k = 0; k < 200; k += 2) kept += k % 7 > 2;
  OperatorStats st = sc.ws.provenance().derive_stats("filter");
  CHECK(st.sample_count == 1);
  CHECK(st.mean_selectivity == doctest::Approx(static_cast<double>(kept) / 100.0));
  double wall = 0;
  for (const auto& t : sc.first.traces) {
    if (t.node_id == "f") wall = t.wall_time;
  }
  CHECK(st.mean_cost_per_tuple == doctest::Approx(wall * 2.0 / 100.0));

  OperatorStats unseen = sc.ws.provenance().derive_stats("never_ran");
  CHECK(unseen.sample_count == 0);
  CHECK(unseen.mean_selectivity == 1.0);
}

TEST_CASE("recorded runs are validated and aggregated") {
  Workspace ws;
  ws.add_platform("fast", 0, 2.0);
  ws.add_platform("slow", 0, 1.0);
  ArtifactRecord df;
  df.kind = ArtifactKind::Dataflow;
  df.name = "manual";
  df.definition = nlohmann::json::parse(R"([{"GID": "m", "description": ""},
    {"node_id": "x", "operator": "filter", "function_alias": "sel", "input": ["i"], "output": ["o"], "params": {"predicate": "true"}}])");
  Gid flow = ws.catalog().register_artifact(df);

  RunRecord run;
  run.dataflow = flow;
  run.started_at = 10;
  run.ended_at = 20;
  OperatorTrace t1;
  t1.node_id = "x";
  t1.function_alias = "sel";
  t1.platform_id = "fast";
  t1.input_cardinalities = {100};
  t1.output_cardinality = 10;
  t1.wall_time = 1.0;
  OperatorTrace t2 = t1;
  t2.platform_id = "slow";
  t2.input_cardinalities = {300};
  t2.output_cardinality = 90;
  t2.wall_time = 0.5;
  Gid id = ws.provenance().record_run(run, {t1}, {});
  CHECK_FALSE(id.is_nil());
  ws.provenance().record_run(run, {t2}, {});

  OperatorStats st = ws.provenance().derive_stats("sel");
  CHECK(st.sample_count == 2);
  CHECK(st.mean_selectivity == doctest::Approx(100.0 / 400.0));
  CHECK(st.mean_cost_per_tuple == doctest::Approx((1.0 * 2.0 + 0.5 * 1.0) / 400.0));
  CHECK(st.per_platform.at("fast") == doctest::Approx(0.02));
  CHECK(st.per_platform.at("slow") == doctest::Approx(0.5 / 300.0));
  CHECK(ws.provenance().runs().size() == 2);

  RunRecord bad = run;
  bad.dataflow = GidGenerator(5).next();
  CHECK(code_of([&] { ws.provenance().record_run(bad, {}, {}); }) == ErrorCode::UnknownDataflow);
  OperatorTrace stray = t1;
  stray.node_id = "nope";
  CHECK(code_of([&] { ws.provenance().record_run(run, {stray}, {}); }) == ErrorCode::UnknownNode);
  RunRecord backwards = run;
  backwards.ended_at = 5;
  CHECK(code_of([&] { ws.provenance().record_run(backwards, {}, {}); }) == ErrorCode::BadArgument);

  // A reopened catalog sees the same records.
  Catalog again(ws.dir() / "catalog.ndjson");
  ProvenanceStore prov2(again);
  CHECK(prov2.runs().size() == 2);
  CHECK(prov2.derive_stats("sel").mean_selectivity == doctest::Approx(0.25));
}

TEST_CASE("records survive a json round trip") {
  OperatorTrace t;
  t.run_id = GidGenerator(1).next();
  t.node_id = "n";
  t.function_alias = "f";
  t.platform_id = "p";
  t.input_cardinalities = {1, 2};
  t.output_cardinality = 3;
  t.wall_time = 0.125;
  t.produced_gid = GidGenerator(2).next();
  t.extras["hist"] = 4;
  OperatorTrace back = trace_from_json(trace_to_json(t));
  CHECK(back.node_id == t.node_id);
  CHECK(back.input_cardinalities == t.input_cardinalities);
  CHECK(back.produced_gid == t.produced_gid);
  CHECK(back.extras == t.extras);

  TrainingTrace tt;
  tt.node_id = "t";
  tt.per_epoch = {{1, "rmse", 0.5}};
  tt.final_metrics["rmse"] = 0.5;
  TrainingTrace tb = training_from_json(training_to_json(tt));
  CHECK(tb.per_epoch.size() == 1);
  CHECK(tb.final_metrics == tt.final_metrics);
}
