/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gyp/catalog/catalog.hpp"
#include "gyp/executor/engine.hpp"
#include "gyp/provenance/provenance.hpp"
#include "gyp/scheduler/scheduler.hpp"

namespace gyp {

struct RunOptions {
  /// Overrides the backend chosen per job from the platform's executor kind.
  std::optional<ExecutorKind> backend;
  /// Partitioned backend workers; 0 means one per hardware thread.
  int workers = 0;
  const FunctionLibrary* library = nullptr;
};

struct RunResult {
  Gid run_id;
  Gid dataflow;
  RunStatus status = RunStatus::Success;
  /// Sink output name → registered dataset.
  std::map<std::string, Gid> outputs;
  /// Train node → registered model.
  std::map<std::string, Gid> models;
  std::vector<OperatorTrace> traces;
  /// Sink node → written rows, sorted.
  std::map<std::string, Table> sink_tables;
  double wall_time = 0.0;
  std::int64_t peak_live_tuples = 0;
};

/// Executes the plan's jobs in dependency order. Sink outputs are written
/// under the assigned platform's storage root and registered; trained models
/// are stored as JSON and registered; the run, its traces and provenance
/// links are recorded. A failing run is recorded with status "failed" before
/// the error propagates.
RunResult run_plan(const ScheduledPlan& plan, Catalog& catalog, ProvenanceStore& provenance,
                   const RunOptions& options = {});

/// Where a trained model's JSON file lives.
std::filesystem::path model_file(const PlatformDescriptor& platform, const Gid& model);

/// Bound dataset GIDs upstream of `node_id`, nearest sources first.
std::vector<Gid> upstream_datasets(const DataflowGraph& graph, const std::string& node_id, const Catalog& catalog);

}  // namespace gyp
