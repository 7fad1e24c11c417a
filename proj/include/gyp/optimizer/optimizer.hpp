/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#pragma once

#include <map>
#include <string>
#include <vector>

#include "gyp/core/dataflow.hpp"
#include "gyp/core/function.hpp"
#include "gyp/provenance/provenance.hpp"
#include "json.hpp"

namespace gyp {

struct RewriteAnnotation {
  std::string node_id;
  double selectivity = 1.0;
  double cost_per_tuple = 1e-6;
  double rank = 0.0;
  bool movable = false;
};

using Annotations = std::map<std::string, RewriteAnnotation>;

/// (selectivity - 1) / cost_per_tuple. A zero cost yields ±infinity, or 0
/// for a neutral selectivity.
double operator_rank(double selectivity, double cost_per_tuple);

/// Annotates every node from `stats`. Only builtin (non-opaque) map, filter
/// and cast operators are movable.
Annotations annotate(const DataflowGraph& graph, const StatsProvider& stats, const FunctionRegistry& registry);

struct RewriteStep {
  std::string rule;  // "reorder_chain" or "filter_pushdown"
  std::vector<std::string> before;
  std::vector<std::string> after;
};

struct RewriteTrace {
  std::vector<RewriteStep> steps;
};

nlohmann::json rewrite_trace_to_json(const RewriteTrace& trace);
RewriteTrace rewrite_trace_from_json(const nlohmann::json& j);

struct RewriteOptions {
  bool reorder = true;
  bool pushdown = true;
};

struct RewriteResult {
  DataflowGraph graph;
  RewriteTrace trace;
};

/// Rank-orders movable chains and pushes filters below joins until nothing
/// changes. Connector types of concrete graphs are re-propagated.
RewriteResult rewrite(const DataflowGraph& graph, const Annotations& annotations, const FunctionRegistry& registry,
                      RewriteOptions options = {});

/// Re-applies recorded steps to `graph`. Throws InvalidGraph when a step does
/// not match the graph.
DataflowGraph replay(const DataflowGraph& graph, const RewriteTrace& trace, const FunctionRegistry& registry);

/// Maximal runs of movable operators linked one-to-one, in flow order.
std::vector<std::vector<std::string>> movable_chains(const DataflowGraph& graph, const Annotations& annotations);

struct CardinalityEstimate {
  std::map<std::string, double> node_in;   // Σ data input rows (rows read, for sources)
  std::map<std::string, double> node_out;  // output rows
  std::map<std::string, double> connector;

  /// Σ rows over connectors produced by non-source operators.
  double intermediate_total(const DataflowGraph& graph) const;
};

/// Forward propagation of row estimates. `input_sizes` may be keyed by the
/// source output connector, the bound placeholder name, the bound GID, or the
/// source node id. Throws MissingSourceSize.
CardinalityEstimate estimate_cardinalities(const DataflowGraph& graph, const Annotations& annotations,
                                           const std::map<std::string, double>& input_sizes);

/// Recomputes connector types of a concrete graph from its source types.
void retype(DataflowGraph& graph, const FunctionRegistry& registry);

}  // namespace gyp
