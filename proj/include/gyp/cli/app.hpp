/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gyp/catalog/catalog.hpp"
#include "gyp/provenance/provenance.hpp"
#include "gyp/scheduler/scheduler.hpp"

namespace gyp {

struct Config {
  std::string catalog = "gyp-catalog.ndjson";
  std::string default_platform;
  double selectivity = 1.0;
  double cost_per_tuple = 1e-6;
  int replication_threshold = 3;
  bool reorder = true;
  bool pushdown = true;
  /// Partitioned backend workers; 0 means one per hardware thread.
  int workers = 0;
};

/// Settings given on the command line; unset fields leave lower layers alone.
struct ConfigFlags {
  std::optional<std::string> catalog;
  std::optional<std::string> default_platform;
  std::optional<int> workers;
};

/// Defaults, then the JSON file, then flags, then GYP_* environment
/// variables (GYP_CATALOG, GYP_WORKERS, GYP_DEFAULT_PLATFORM,
/// GYP_REPLICATION_THRESHOLD). Throws BadArgument on invalid values.
Config load_config(const std::optional<std::filesystem::path>& file, const ConfigFlags& flags);

/// Platforms and bandwidths as read from a registry file or the catalog.
struct Registry {
  std::vector<PlatformDescriptor> platforms;
  BandwidthMatrix bandwidth;
};

/// {"platforms": [...], "bandwidth": [{"from", "to", "mbps"}]}
Registry read_registry(const std::filesystem::path& file);
Registry catalog_registry(const Catalog& catalog);

/// Data records across the files of a dataset location.
std::int64_t count_dataset_rows(const std::filesystem::path& location);

struct PlanRequest {
  Registry registry;
  bool exhaustive = false;
  FragmentOptions fragment_options;
};

/// Fragments, assigns and materializes a concrete graph using catalog
/// placements, stored dataset sizes and provenance statistics. Throws
/// NoFeasiblePlatform with the assignment diagnostics when infeasible.
ScheduledPlan plan_dataflow(const DataflowGraph& graph, const Catalog& catalog, const StatsProvider& stats,
                            const PlanRequest& request);

/// Entry point of the command-line tool. Returns the process exit code:
/// 0 on success, 1 for user errors, 2 for internal failures.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace gyp
