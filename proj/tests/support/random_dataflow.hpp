/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "gyp/core/dataflow.hpp"
#include "gyp/executor/engine.hpp"
#include "gyp/optimizer/optimizer.hpp"
#include "gyp/scheduler/scheduler.hpp"

namespace gyp::testing {

struct RandomDataflowOptions {
  int max_nodes = 12;
  int max_rows = 10000;
  /// Row cap per source when the graph joins two sources.
  int max_join_rows = 600;
};

/// A valid dataflow plus in-memory tables for its source outputs.
struct RandomDataflow {
  DataflowGraph graph;
  std::map<std::string, ExecInput> inputs;
  std::size_t sinks = 0;
};

/// Rows with a small key domain so joins, groupings and dedups collide.
Table random_table(std::mt19937_64& rng, const Schema& schema, int rows, int key_range);

/// Grows a DAG from one or two sources by attaching filter, map, cast,
/// dedup, groupby and join nodes to open streams, then sinks every stream
/// left unconsumed. Streams may fan out.
RandomDataflow random_dataflow(std::mt19937_64& rng, const RandomDataflowOptions& options = {});

/// Annotations with random selectivities and costs so chain reordering has
/// something to do.
Annotations random_annotations(std::mt19937_64& rng, const DataflowGraph& graph);

/// Random DAG over `n` node names "n0".."n{n-1}"; edges only go from lower
/// to higher index.
std::vector<std::pair<int, int>> random_dag_edges(std::mt19937_64& rng, int n, double density);

/// Placement problem: a bound graph whose sources read stored datasets with
/// random homes, plus platforms and bandwidths.
struct SchedulingInstance {
  DataflowGraph graph;
  std::vector<PlatformDescriptor> platforms;
  BandwidthMatrix bandwidth;
  Placements placements;
  Annotations annotations;
  std::map<std::string, double> dataset_rows;

  /// Cost model pointing at `graph`; the instance must outlive it.
  CostModel cost_model() const;
};

/// Up to four sources on up to `max_platforms` platforms, short unary
/// chains, joins combining them and one sink per remaining stream.
SchedulingInstance random_scheduling_instance(std::mt19937_64& rng, int max_platforms);

}  // namespace gyp::testing
