/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include "gyp/executor/runner.hpp"

#include <chrono>
#include <deque>

#include "gyp/common/error.hpp"

namespace gyp {

namespace fs = std::filesystem;

std::vector<Gid> upstream_datasets(const DataflowGraph& graph, const std::string& node_id, const Catalog& catalog) {
  std::vector<Gid> out;
  std::set<std::string> seen{node_id};
  std::deque<const OperatorNode*> queue{graph.find(node_id)};
  while (!queue.empty()) {
    const OperatorNode* n = queue.front();
    queue.pop_front();
    if (n->op == OperatorKind::Source && graph.binding) {
      for (const auto& in : n->inputs) {
        auto b = graph.binding->find(in);
        if (b == graph.binding->end()) continue;
        auto gid = Gid::parse(b->second);
        if (!gid) continue;
        auto rec = catalog.find(*gid);
        if (rec && rec->kind == ArtifactKind::Dataset && std::find(out.begin(), out.end(), *gid) == out.end()) {
          out.push_back(*gid);
        }
      }
    }
    for (const auto& c : graph.data_inputs(*n)) {
      const OperatorNode* p = graph.producer_of(c);
      if (p && seen.insert(p->node_id).second) queue.push_back(p);
    }
  }
  return out;
}

namespace {

Gid dataflow_artifact(const DataflowGraph& graph, Catalog& catalog) {
  if (graph.gid) {
    auto rec = catalog.find(*graph.gid);
    if (rec && rec->kind == ArtifactKind::Dataflow) {
      DataflowGraph stored = dataflow_from_json(rec->definition);
      if (stored.binding == graph.binding && stored.nodes == graph.nodes) return rec->gid;
    }
  }
  ArtifactRecord r;
  r.kind = ArtifactKind::Dataflow;
  r.name = graph.description.empty() ? "dataflow" : graph.description;
  r.definition = dataflow_to_json(graph);
  r.metadata["form"] = std::string("concrete");
  if (!graph.header_gid.empty()) r.metadata["abstract"] = graph.header_gid;
  return catalog.register_artifact(r);
}

std::string domain_of(const std::vector<Gid>& upstream, const Catalog& catalog) {
  for (const auto& g : upstream) {
    auto rec = catalog.find(g);
    if (rec && !rec->domain.empty()) return rec->domain;
  }
  return "";
}

std::int64_t micros_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

fs::path model_file(const PlatformDescriptor& platform, const Gid& model) {
  return fs::path(platform.storage_root) / "models" / (model.str() + ".json");
}

RunResult run_plan(const ScheduledPlan& plan, Catalog& catalog, ProvenanceStore& provenance,
                   const RunOptions& options) {
  if (!plan.assignment.feasible) fail(ErrorCode::InfeasibleAssignment, "plan has no feasible assignment");
  const DataflowGraph& g = plan.graph;
  if (!g.is_concrete()) fail(ErrorCode::MissingBinding, "plan dataflow is not bound");

  for (const auto& p : plan.platforms) {
    if (!catalog.platform(p.platform_id)) catalog.register_platform(p);
  }
  auto platform = [&](const std::string& id) {
    auto p = catalog.platform(id);
    if (!p) fail(ErrorCode::UnknownPlatform, id);
    return *p;
  };

  RunResult result;
  result.dataflow = dataflow_artifact(g, catalog);
  RunRecord run;
  run.dataflow = result.dataflow;
  for (const auto& [f, p] : plan.assignment.placement) run.platform_assignment[f] = p;
  run.started_at = now_micros();
  auto t0 = std::chrono::steady_clock::now();

  std::vector<OperatorTrace> traces;
  std::vector<TrainingTrace> training;
  std::vector<std::string> order;
  std::map<std::string, std::int64_t> rows;

  auto record = [&](RunStatus status) {
    LiveProfile live = live_tuple_profile(g, order, rows);
    for (auto& t : traces) t.peak_live_tuples = live.per_node[t.node_id];
    result.peak_live_tuples = live.peak;
    run.status = status;
    run.ended_at = std::max(run.started_at, run.started_at + micros_since(t0));
    result.wall_time = static_cast<double>(micros_since(t0)) / 1e6;
    result.status = status;
    result.run_id = provenance.record_run(run, traces, training);
    result.traces = traces;
    for (auto& t : result.traces) t.run_id = result.run_id;
  };

  try {
    // Source inputs: stored datasets, stored models, or literal paths.
    std::map<std::string, ExecInput> inputs;
    for (const auto& n : g.nodes) {
      if (n.op != OperatorKind::Source) continue;
      for (std::size_t i = 0; i < n.inputs.size() && i < n.outputs.size(); ++i) {
        auto b = g.binding->find(n.inputs[i]);
        std::string value = b == g.binding->end() ? n.inputs[i] : b->second;
        const std::string& out = n.outputs[i];
        auto gid = Gid::parse(value);
        if (!gid) {
          auto t = g.connector_types.find(out);
          if (t == g.connector_types.end()) fail(ErrorCode::MissingInput, "no schema for '" + value + "'");
          inputs[out] = DatasetLocation{t->second.schema, dataset_files(value)};
          continue;
        }
        auto rec = catalog.find(*gid);
        if (!rec) fail(ErrorCode::UnknownGid, value);
        if (rec->kind == ArtifactKind::Dataset) {
          inputs[out] = DatasetLocation{rec->dataset->schema, dataset_files(catalog.dataset_path(*rec))};
        } else if (rec->kind == ArtifactKind::Model) {
          auto site = rec->meta_string("platform");
          if (!site) fail(ErrorCode::MissingInput, "model " + value + " has no stored file");
          auto m = std::make_shared<LinearModel>(read_model(model_file(platform(*site), *gid)));
          inputs[out] = ModelPtr(m);
        } else {
          fail(ErrorCode::MissingInput, value + " is a " + std::string(artifact_kind_name(rec->kind)));
        }
      }
    }

    for (const auto& job : plan.jobs) {
      for (const auto& s : job.staging) catalog.record_access(Gid::from_string(s.dataset), s.to);
      if (job.kind == FragmentKind::Transfer) continue;  // data stays in process
      PlatformDescriptor where = platform(job.platform);
      ExecOptions eo;
      eo.backend = options.backend.value_or(job.backend);
      eo.workers = options.workers;
      eo.library = options.library;
      ExecResult r = execute(g, inputs, eo, job.node_ids);
      for (auto& [c, t] : r.tables) inputs[c] = std::move(t);
      for (auto& [c, m] : r.models) inputs[c] = m;
      for (const auto& [c, n] : r.connector_rows) rows[c] = n;

      for (const auto& s : r.nodes) {
        const OperatorNode& n = *g.find(s.node_id);
        order.push_back(s.node_id);
        OperatorTrace t;
        t.node_id = s.node_id;
        t.function_alias = n.function_alias;
        t.platform_id = where.platform_id;
        t.input_cardinalities = s.input_cardinalities;
        t.output_cardinality = s.output_cardinality;
        t.wall_time = s.wall_time;

        if (n.op == OperatorKind::Sink) {
          std::string name = g.sink_target(n).value_or(n.node_id);
          auto b = g.binding->find(name);
          if (b != g.binding->end()) name = b->second;
          const Table& table = r.sinks.at(n.node_id);
          bool literal = name.find('/') != std::string::npos;
          fs::path rel = literal ? fs::path(name) : fs::path(name + ".csv");
          fs::path file = literal ? fs::absolute(rel) : fs::path(where.storage_root) / rel;
          write_csv(file, table);
          auto upstream = upstream_datasets(g, n.node_id, catalog);
          ArtifactRecord a;
          a.kind = ArtifactKind::Dataset;
          a.name = fs::path(name).stem().string();
          a.domain = domain_of(upstream, catalog);
          a.dataset = DatasetInfo{table.schema, "csv", Bucket::Staging, where.platform_id,
                                  literal ? file.string() : rel.string()};
          Gid gid = catalog.register_artifact(a);
          t.produced_gid = gid;
          result.outputs[name] = gid;
          result.sink_tables[n.node_id] = table;
        } else if (n.op == OperatorKind::Train) {
          const ModelPtr& m = r.models.at(n.outputs.at(0));
          auto upstream = upstream_datasets(g, n.node_id, catalog);
          ArtifactRecord a;
          a.kind = ArtifactKind::Model;
          a.name = n.param_string("name").value_or(n.node_id);
          a.domain = domain_of(upstream, catalog);
          a.metadata["task"] = n.param_string("task").value_or("regression");
          a.metadata["learning_scope"] = n.param_string("learning_scope").value_or("global");
          a.metadata["algorithm"] = std::string("least-squares-linear");
          a.metadata["features"] = n.param_string("features").value_or("");
          a.metadata["target"] = m->target;
          a.metadata["rmse"] = m->rmse;
          if (!upstream.empty()) a.metadata["training_dataset"] = upstream.front().str();
          a.metadata["platform"] = where.platform_id;
          Gid gid = catalog.register_artifact(a);
          LinearModel stored = *m;
          stored.gid = gid;
          write_model(model_file(where, gid), stored);
          t.produced_gid = gid;
          result.models[n.node_id] = gid;
          TrainingTrace tt;
          tt.node_id = n.node_id;
          tt.per_epoch.push_back({1, "rmse", m->rmse});
          tt.final_metrics = {{"rmse", m->rmse}, {"n_rows", static_cast<double>(m->n_rows)}};
          training.push_back(tt);
        }
        traces.push_back(std::move(t));
      }
    }
  } catch (const Error&) {
    record(RunStatus::Failed);
    throw;
  }
  record(RunStatus::Success);
  return result;
}

}  // namespace gyp
