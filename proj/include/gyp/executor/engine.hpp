/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "gyp/catalog/catalog.hpp"
#include "gyp/core/dataflow.hpp"
#include "gyp/executor/ols.hpp"
#include "gyp/executor/table.hpp"

namespace gyp {

using ModelPtr = std::shared_ptr<const LinearModel>;

/// CSV files backing a source, read when the source runs.
struct DatasetLocation {
  Schema schema;
  std::vector<std::filesystem::path> files;
};

/// What a source output (or a connector produced elsewhere) starts from.
using ExecInput = std::variant<DatasetLocation, Table, ModelPtr>;

/// Native implementation of an element-at-a-time function: maps one
/// partition of rows conforming to `in` to rows conforming to `out`.
using NativeFunction = std::function<std::vector<Row>(const OperatorNode& node, const Schema& in, const Schema& out,
                                                      const std::vector<Row>& rows)>;

/// Native implementations by alias. Aliases without one run with the
/// builtin semantics of their operator class.
class FunctionLibrary {
 public:
  void add(std::string alias, NativeFunction fn) { functions_[std::move(alias)] = std::move(fn); }
  const NativeFunction* find(const std::string& alias) const {
    auto it = functions_.find(alias);
    return it == functions_.end() ? nullptr : &it->second;
  }

 private:
  std::map<std::string, NativeFunction> functions_;
};

struct ExecOptions {
  ExecutorKind backend = ExecutorKind::Single;
  /// Partitioned backend only; 0 means one per hardware thread.
  int workers = 0;
  const FunctionLibrary* library = nullptr;
};

struct NodeStats {
  std::string node_id;
  std::vector<std::int64_t> input_cardinalities;
  std::int64_t output_cardinality = 0;
  double wall_time = 0.0;
  /// Σ rows of materialized connectors alive while the node ran.
  std::int64_t live_tuples = 0;
};

struct ExecResult {
  /// Table connectors consumed outside the executed nodes.
  std::map<std::string, Table> tables;
  /// Every model connector produced.
  std::map<std::string, ModelPtr> models;
  /// Sink node → rows it writes, sorted by all columns.
  std::map<std::string, Table> sinks;
  /// Rows of every table connector produced.
  std::map<std::string, std::int64_t> connector_rows;
  /// In execution order.
  std::vector<NodeStats> nodes;
  std::int64_t peak_live_tuples = 0;
};

/// Runs `nodes` (all nodes when empty) of a typed graph in topological
/// order. `inputs` is keyed by connector: source outputs and connectors
/// produced by nodes outside the executed set. Both backends share the row
/// kernels; the partitioned one hash-repartitions on the first key column
/// before join, groupby and dedup and runs element-at-a-time operators
/// partition-local on worker threads.
/// Throws MissingInput, FunctionFailure, SchemaViolation and per-builtin
/// errors, each naming the failing node.
ExecResult execute(const DataflowGraph& graph, const std::map<std::string, ExecInput>& inputs,
                   const ExecOptions& options, const std::vector<std::string>& nodes = {});

struct LiveProfile {
  std::map<std::string, std::int64_t> per_node;
  std::int64_t peak = 0;
};

/// Live-tuple accounting over `order`: a node's table outputs become live
/// when it runs and are released after their last consumer ran.
LiveProfile live_tuple_profile(const DataflowGraph& graph, const std::vector<std::string>& order,
                               const std::map<std::string, std::int64_t>& connector_rows);

/// Worker count used when ExecOptions::workers is 0.
int default_workers();

}  // namespace gyp
