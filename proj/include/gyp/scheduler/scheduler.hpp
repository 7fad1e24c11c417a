/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gyp/catalog/catalog.hpp"
#include "gyp/core/dataflow.hpp"
#include "gyp/optimizer/optimizer.hpp"
#include "json.hpp"

namespace gyp {

enum class FragmentKind { Compute, Transfer };

struct Fragment {
  std::string fragment_id;
  FragmentKind kind = FragmentKind::Compute;
  /// Dataflow nodes in topological order. Transfer fragments hold the
  /// synthetic pair "<id>.send" and "<id>.recv".
  std::vector<std::string> node_ids;
  /// Bound dataset GIDs read by sources and connectors arriving from other
  /// fragments.
  std::vector<std::string> entry;
  /// Connectors leaving the fragment and sink outputs.
  std::vector<std::string> exit;
  /// Platform the traversal attributed the fragment to, if any.
  std::optional<std::string> home;
  int gpus_required = 0;
  /// Transfer fragments only.
  std::string connector;
  std::string from_fragment;
  std::string to_fragment;
};

/// Where stored datasets live: GID → home platform, plus replica sites.
struct Placements {
  std::map<std::string, std::string> home;
  std::map<std::string, std::set<std::string>> replicas;

  /// Reads homes and replica records for every dataset bound in `graph`.
  static Placements from_catalog(const Catalog& catalog, const DataflowGraph& graph);
};

struct FragmentOptions {
  /// GPUs a train node needs when it has no "gpus" parameter.
  int gpu_required = 1;
  /// Home for sources reading literal paths.
  std::string default_platform;
};

/// Splits a concrete graph into compute fragments and inserts a transfer
/// fragment on each cut connector whose endpoints have different homes.
/// Throws UnplacedInput for a bound dataset without a placement.
std::vector<Fragment> fragment(const DataflowGraph& graph, const Placements& placements,
                               const std::vector<PlatformDescriptor>& platforms, FragmentOptions options = {});

/// Everything the cost model needs.
struct CostModel {
  const DataflowGraph* graph = nullptr;
  std::vector<PlatformDescriptor> platforms;
  BandwidthMatrix bandwidth;
  Annotations annotations;
  CardinalityEstimate estimates;
  Placements placements;
  /// Rows of each bound dataset, by GID.
  std::map<std::string, double> dataset_rows;
  /// Bytes per string value.
  double string_width = 16.0;

  const PlatformDescriptor& platform(const std::string& id) const;
  double row_bytes(const std::string& connector) const;
  double connector_bytes(const std::string& connector) const;
  double dataset_bytes(const std::string& gid) const;
};

struct CostBreakdown {
  std::map<std::string, double> execution;  // fragment → seconds
  std::map<std::string, double> transfer;   // edge label → seconds
  double total = 0.0;

  /// Σ execution + Σ transfer, summed independently of `total`.
  double resum() const;
};

struct PlatformAssignment {
  /// Compute fragment → platform.
  std::map<std::string, std::string> placement;
  double total_cost = 0.0;
  bool feasible = true;
  std::vector<std::string> diagnostics;
  CostBreakdown breakdown;
};

/// Cost of a complete placement of the compute fragments. Transfer
/// fragments are charged on cut connectors whose endpoints sit on different
/// platforms, and stored inputs read away from their home or replicas.
CostBreakdown evaluate_cost(const std::vector<Fragment>& fragments, const std::map<std::string, std::string>& placement,
                            const CostModel& model);

/// Platforms a fragment may run on (GPU constraint).
std::vector<std::string> feasible_platforms(const Fragment& f, const CostModel& model);

/// Locality-first greedy placement refined by single and pairwise moves.
PlatformAssignment assign(const std::vector<Fragment>& fragments, const CostModel& model);
/// Minimum over every feasible placement; ties broken lexicographically.
PlatformAssignment assign_exhaustive(const std::vector<Fragment>& fragments, const CostModel& model);

struct StagingDirective {
  std::string dataset;  // GID
  std::string from;
  std::string to;
};

struct PlanJob {
  std::string job_id;
  FragmentKind kind = FragmentKind::Compute;
  std::string platform;
  ExecutorKind backend = ExecutorKind::Single;
  std::vector<std::string> node_ids;
  std::vector<StagingDirective> staging;
  std::vector<std::string> depends_on;
  /// Transfer jobs only.
  std::string connector;
  std::string from_platform;
};

struct ScheduledPlan {
  DataflowGraph graph;
  std::vector<Fragment> fragments;
  std::vector<PlanJob> jobs;
  PlatformAssignment assignment;
  /// Descriptors of the platforms the plan was made for.
  std::vector<PlatformDescriptor> platforms;
  /// node → job that runs it
  std::map<std::string, std::string> node_job;
};

/// Builds the executable plan. Throws InfeasibleAssignment.
ScheduledPlan materialize(const DataflowGraph& graph, const std::vector<Fragment>& fragments,
                          const PlatformAssignment& assignment, const CostModel& model);

nlohmann::json plan_to_json(const ScheduledPlan& plan);
ScheduledPlan plan_from_json(const nlohmann::json& j);

std::string_view fragment_kind_name(FragmentKind k);

}  // namespace gyp
