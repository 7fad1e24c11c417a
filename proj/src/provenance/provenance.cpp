/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include "gyp/provenance/provenance.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "gyp/common/error.hpp"
#include "gyp/core/dataflow.hpp"

namespace gyp {

using nlohmann::json;

namespace {

constexpr const char* kRun = "run";
constexpr const char* kTrace = "trace";
constexpr const char* kTraining = "training";
constexpr const char* kLink = "link";

std::string trace_key(const Gid& run, const std::string& node) { return run.str() + "/" + node; }

json gid_list(const std::vector<Gid>& gids) {
  json a = json::array();
  for (const auto& g : gids) a.push_back(g.str());
  return a;
}

std::vector<Gid> gid_list_from(const json& a) {
  std::vector<Gid> out;
  for (const auto& g : a) out.push_back(Gid::from_string(g.get<std::string>()));
  return out;
}

// Order-independent sum: adds the values in sorted order.
double stable_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return std::accumulate(v.begin(), v.end(), 0.0);
}

}  // namespace

void FixedStats::set(const std::string& alias, double selectivity, double cost_per_tuple) {
  OperatorStats s;
  s.function_alias = alias;
  s.mean_selectivity = selectivity;
  s.mean_cost_per_tuple = cost_per_tuple;
  s.sample_count = 1;
  overrides_[alias] = s;
}

OperatorStats FixedStats::stats(const std::string& function_alias) const {
  auto it = overrides_.find(function_alias);
  if (it != overrides_.end()) return it->second;
  OperatorStats s;
  s.function_alias = function_alias;
  s.mean_selectivity = selectivity_;
  s.mean_cost_per_tuple = cost_;
  return s;
}

std::string_view run_status_name(RunStatus s) { return s == RunStatus::Success ? "success" : "failed"; }

json run_to_json(const RunRecord& r) {
  return {{"run_id", r.run_id.str()},
          {"dataflow", r.dataflow.str()},
          {"platform_assignment", r.platform_assignment},
          {"started_at", r.started_at},
          {"ended_at", r.ended_at},
          {"status", std::string(run_status_name(r.status))}};
}

RunRecord run_from_json(const json& j) {
  RunRecord r;
  r.run_id = Gid::from_string(j.at("run_id").get<std::string>());
  r.dataflow = Gid::from_string(j.at("dataflow").get<std::string>());
  r.platform_assignment = j.value("platform_assignment", std::map<std::string, std::string>{});
  r.started_at = j.value("started_at", std::int64_t{0});
  r.ended_at = j.value("ended_at", std::int64_t{0});
  r.status = j.value("status", "success") == "success" ? RunStatus::Success : RunStatus::Failed;
  return r;
}

json trace_to_json(const OperatorTrace& t) {
  json j = {{"run_id", t.run_id.str()},
            {"node_id", t.node_id},
            {"function_alias", t.function_alias},
            {"platform_id", t.platform_id},
            {"input_cardinalities", t.input_cardinalities},
            {"output_cardinality", t.output_cardinality},
            {"wall_time", t.wall_time},
            {"peak_live_tuples", t.peak_live_tuples},
            {"extras", t.extras}};
  if (t.produced_gid) j["produced_gid"] = t.produced_gid->str();
  return j;
}

OperatorTrace trace_from_json(const json& j) {
  OperatorTrace t;
  t.run_id = Gid::from_string(j.at("run_id").get<std::string>());
  t.node_id = j.at("node_id").get<std::string>();
  t.function_alias = j.value("function_alias", "");
  t.platform_id = j.value("platform_id", "");
  t.input_cardinalities = j.value("input_cardinalities", std::vector<std::int64_t>{});
  t.output_cardinality = j.value("output_cardinality", std::int64_t{0});
  t.wall_time = j.value("wall_time", 0.0);
  t.peak_live_tuples = j.value("peak_live_tuples", std::int64_t{0});
  if (j.contains("produced_gid")) t.produced_gid = Gid::from_string(j["produced_gid"].get<std::string>());
  t.extras = j.value("extras", std::map<std::string, double>{});
  return t;
}

json training_to_json(const TrainingTrace& t) {
  json epochs = json::array();
  for (const auto& e : t.per_epoch) epochs.push_back({{"epoch", e.epoch}, {"metric", e.metric}, {"value", e.value}});
  return {{"run_id", t.run_id.str()}, {"node_id", t.node_id}, {"per_epoch", epochs}, {"final_metrics", t.final_metrics}};
}

TrainingTrace training_from_json(const json& j) {
  TrainingTrace t;
  t.run_id = Gid::from_string(j.at("run_id").get<std::string>());
  t.node_id = j.at("node_id").get<std::string>();
  for (const auto& e : j.value("per_epoch", json::array())) {
    t.per_epoch.push_back({e.at("epoch").get<int>(), e.at("metric").get<std::string>(), e.at("value").get<double>()});
  }
  t.final_metrics = j.value("final_metrics", std::map<std::string, double>{});
  return t;
}

json link_to_json(const ProvenanceLink& l) {
  return {{"produced", l.produced.str()},   {"run", l.run.str()},
          {"dataflow", l.dataflow.str()},   {"node_id", l.node_id},
          {"function_alias", l.function_alias}, {"inputs", gid_list(l.inputs)},
          {"path_functions", l.path_functions}, {"platform_id", l.platform_id},
          {"activity_kind", l.activity_kind}};
}

ProvenanceLink link_from_json(const json& j) {
  ProvenanceLink l;
  l.produced = Gid::from_string(j.at("produced").get<std::string>());
  l.run = Gid::from_string(j.at("run").get<std::string>());
  l.dataflow = Gid::from_string(j.at("dataflow").get<std::string>());
  l.node_id = j.at("node_id").get<std::string>();
  l.function_alias = j.value("function_alias", "");
  l.inputs = gid_list_from(j.value("inputs", json::array()));
  l.path_functions = j.value("path_functions", std::vector<std::string>{});
  l.platform_id = j.value("platform_id", "");
  l.activity_kind = j.value("activity_kind", "trans_run");
  return l;
}

ProvenanceStore::ProvenanceStore(Catalog& catalog) : ProvenanceStore(catalog, Defaults{}) {}

ProvenanceStore::ProvenanceStore(Catalog& catalog, Defaults defaults) : catalog_(catalog), defaults_(defaults) {}

namespace {

// Walks upstream from `node` to the nearest persisted artifacts.
ProvenanceLink derive_link(const DataflowGraph& g, const OperatorNode& node, const std::map<std::string, Gid>& produced,
                           const std::vector<std::string>& topo) {
  ProvenanceLink link;
  link.node_id = node.node_id;
  link.function_alias = node.function_alias;
  std::set<Gid> inputs;
  std::set<std::string> on_path;
  std::set<std::string> seen;
  std::deque<std::string> work;
  for (const auto& c : g.data_inputs(node)) work.push_back(c);
  while (!work.empty()) {
    std::string connector = work.front();
    work.pop_front();
    if (!seen.insert(connector).second) continue;
    const OperatorNode* p = g.producer_of(connector);
    if (!p) continue;
    if (p->op == OperatorKind::Source) {
      auto pos = std::find(p->outputs.begin(), p->outputs.end(), connector) - p->outputs.begin();
      if (pos < static_cast<long>(p->inputs.size()) && g.binding) {
        auto it = g.binding->find(p->inputs[pos]);
        if (it != g.binding->end()) {
          if (auto gid = Gid::parse(it->second)) inputs.insert(*gid);
        }
      }
      continue;
    }
    if (auto it = produced.find(p->node_id); it != produced.end()) {
      inputs.insert(it->second);
      continue;
    }
    if (p->op != OperatorKind::Sink) on_path.insert(p->node_id);
    for (const auto& c : g.data_inputs(*p)) work.push_back(c);
  }
  if (node.op != OperatorKind::Sink && node.op != OperatorKind::Source) on_path.insert(node.node_id);
  link.activity_kind = "trans_run";
  for (const auto& id : topo) {
    if (!on_path.count(id)) continue;
    const OperatorNode* n = g.find(id);
    link.path_functions.push_back(n->function_alias);
    if (n->op == OperatorKind::Predict) link.activity_kind = "model_run";
  }
  if (node.op == OperatorKind::Train) link.activity_kind = "model_training";
  link.inputs.assign(inputs.begin(), inputs.end());
  return link;
}

}  // namespace

Gid ProvenanceStore::record_run(RunRecord run, std::vector<OperatorTrace> traces, std::vector<TrainingTrace> training) {
  auto df = catalog_.find(run.dataflow);
  if (!df || df->kind != ArtifactKind::Dataflow) fail(ErrorCode::UnknownDataflow, run.dataflow.str());
  DataflowGraph graph = dataflow_from_json(df->definition);
  for (const auto& t : traces) {
    if (!graph.find(t.node_id)) fail(ErrorCode::UnknownNode, t.node_id + " in dataflow " + run.dataflow.str());
  }
  for (const auto& t : training) {
    if (!graph.find(t.node_id)) fail(ErrorCode::UnknownNode, t.node_id + " in dataflow " + run.dataflow.str());
  }
  if (run.ended_at < run.started_at) fail(ErrorCode::BadArgument, "run ends before it starts");

  std::map<std::string, Gid> produced;
  for (const auto& t : traces) {
    if (t.produced_gid) produced[t.node_id] = *t.produced_gid;
  }
  std::vector<std::string> topo = topological_order(graph);

  return catalog_.store().write([&](RecordStore::Batch& batch) {
    if (run.run_id.is_nil()) run.run_id = catalog_.fresh_gid(batch);
    batch.put(kRun, run.run_id.str(), run_to_json(run));
    for (auto& t : traces) {
      t.run_id = run.run_id;
      batch.put(kTrace, trace_key(run.run_id, t.node_id), trace_to_json(t));
      if (!t.produced_gid) continue;
      ProvenanceLink link = derive_link(graph, *graph.find(t.node_id), produced, topo);
      link.produced = *t.produced_gid;
      link.run = run.run_id;
      link.dataflow = run.dataflow;
      link.platform_id = t.platform_id;
      batch.put(kLink, link.produced.str(), link_to_json(link));
    }
    for (auto& t : training) {
      t.run_id = run.run_id;
      batch.put(kTraining, trace_key(run.run_id, t.node_id), training_to_json(t));
    }
    return run.run_id;
  });
}

OperatorStats ProvenanceStore::derive_stats(const std::string& function_alias) const {
  OperatorStats s;
  s.function_alias = function_alias;
  s.mean_selectivity = defaults_.selectivity;
  s.mean_cost_per_tuple = defaults_.cost_per_tuple;

  std::map<std::string, double> speeds;
  for (const auto& p : catalog_.platforms()) speeds[p.platform_id] = p.relative_speed;
  auto speed_of = [&](const std::string& id) {
    auto it = speeds.find(id);
    return it == speeds.end() ? 1.0 : it->second;
  };

  std::vector<double> ins, outs, times;
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> per_platform;
  for (const auto& j : catalog_.store().list(kTrace)) {
    if (j.value("function_alias", "") != function_alias) continue;
    OperatorTrace t = trace_from_json(j);
    double in = 0;
    for (auto c : t.input_cardinalities) in += static_cast<double>(c);
    double out = static_cast<double>(t.output_cardinality);
    // Scale the observed time to a reference-speed platform.
    double ref_time = t.wall_time * speed_of(t.platform_id);
    ins.push_back(in);
    outs.push_back(out);
    times.push_back(ref_time);
    auto& pp = per_platform[t.platform_id];
    pp.first.push_back(ref_time);
    pp.second.push_back(in > 0 ? in : out);
  }
  s.sample_count = static_cast<int>(ins.size());
  if (ins.empty()) return s;
  double sum_in = stable_sum(ins);
  double sum_out = stable_sum(outs);
  double sum_time = stable_sum(times);
  if (sum_in > 0) s.mean_selectivity = sum_out / sum_in;
  double tuples = sum_in > 0 ? sum_in : sum_out;
  if (tuples > 0) s.mean_cost_per_tuple = sum_time / tuples;
  for (auto& [platform, pp] : per_platform) {
    double n = stable_sum(pp.second);
    if (n > 0) s.per_platform[platform] = stable_sum(pp.first) / n;
  }
  return s;
}

std::optional<RunRecord> ProvenanceStore::run(const Gid& run_id) const {
  auto j = catalog_.store().get(kRun, run_id.str());
  if (!j) return std::nullopt;
  return run_from_json(*j);
}

std::vector<RunRecord> ProvenanceStore::runs() const {
  std::vector<RunRecord> out;
  for (const auto& j : catalog_.store().list(kRun)) out.push_back(run_from_json(j));
  return out;
}

std::vector<OperatorTrace> ProvenanceStore::traces(const Gid& run_id) const {
  std::vector<OperatorTrace> out;
  std::string prefix = run_id.str() + "/";
  for (const auto& j : catalog_.store().list(kTrace)) {
    if (j.value("key", "").rfind(prefix, 0) == 0) out.push_back(trace_from_json(j));
  }
  return out;
}

std::vector<OperatorTrace> ProvenanceStore::all_traces() const {
  std::vector<OperatorTrace> out;
  for (const auto& j : catalog_.store().list(kTrace)) out.push_back(trace_from_json(j));
  return out;
}

std::vector<TrainingTrace> ProvenanceStore::training(const Gid& run_id) const {
  std::vector<TrainingTrace> out;
  std::string prefix = run_id.str() + "/";
  for (const auto& j : catalog_.store().list(kTraining)) {
    if (j.value("key", "").rfind(prefix, 0) == 0) out.push_back(training_from_json(j));
  }
  return out;
}

std::optional<ProvenanceLink> ProvenanceStore::link(const Gid& produced) const {
  auto j = catalog_.store().get(kLink, produced.str());
  if (!j) return std::nullopt;
  return link_from_json(*j);
}

std::vector<ProvenanceLink> ProvenanceStore::links() const {
  std::vector<ProvenanceLink> out;
  for (const auto& j : catalog_.store().list(kLink)) out.push_back(link_from_json(j));
  return out;
}

std::set<Gid> ProvenanceStore::lineage(const Gid& gid) const {
  if (!catalog_.find(gid)) fail(ErrorCode::UnknownGid, gid.str());
  std::set<Gid> out;
  std::deque<Gid> work{gid};
  while (!work.empty()) {
    Gid g = work.front();
    work.pop_front();
    auto l = link(g);
    if (!l) continue;
    for (const auto& in : l->inputs) {
      if (in != gid && out.insert(in).second) work.push_back(in);
    }
  }
  return out;
}

json ProvenanceStore::export_prov(const Gid& gid) const {
  std::set<Gid> closure = lineage(gid);
  closure.insert(gid);

  json doc = {{"prefix", {{"gyp", "urn:gyp:"}}},
              {"entity", json::object()},
              {"activity", json::object()},
              {"agent", {{"engine", {{"prov:type", "prov:SoftwareAgent"}}}}},
              {"used", json::object()},
              {"wasGeneratedBy", json::object()},
              {"wasDerivedFrom", json::object()},
              {"wasAssociatedWith", json::object()}};
  int used = 0, gen = 0, der = 0, assoc = 0;
  auto id = [](const char* prefix, int n) { return std::string("_:") + prefix + std::to_string(n); };

  for (const auto& g : closure) {
    json e = json::object();
    if (auto rec = catalog_.find(g)) {
      e["prov:type"] = std::string(artifact_kind_name(rec->kind));
      e["prov:label"] = rec->name;
    }
    doc["entity"][g.str()] = e;
  }
  for (const auto& g : closure) {
    auto l = link(g);
    if (!l) continue;
    std::string act = l->run.str() + "/" + l->node_id;
    json a = {{"gyp:dataflow", l->dataflow.str()},
              {"gyp:node", l->node_id},
              {"gyp:function_alias", l->function_alias},
              {"gyp:platform", l->platform_id}};
    if (auto r = run(l->run)) {
      a["prov:startTime"] = r->started_at;
      a["prov:endTime"] = r->ended_at;
    }
    doc["activity"][act] = a;
    doc["wasGeneratedBy"][id("g", gen++)] = {{"prov:entity", g.str()}, {"prov:activity", act}};
    doc["wasAssociatedWith"][id("a", assoc++)] = {{"prov:activity", act}, {"prov:agent", "engine"}};
    for (const auto& in : l->inputs) {
      doc["used"][id("u", used++)] = {{"prov:activity", act}, {"prov:entity", in.str()}};
      doc["wasDerivedFrom"][id("d", der++)] = {
          {"prov:generatedEntity", g.str()}, {"prov:usedEntity", in.str()}, {"prov:activity", act}};
    }
  }
  return doc;
}

}  // namespace gyp
