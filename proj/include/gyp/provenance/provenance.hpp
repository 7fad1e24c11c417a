/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gyp/catalog/catalog.hpp"
#include "gyp/common/gid.hpp"
#include "json.hpp"

namespace gyp {

enum class RunStatus { Success, Failed };

struct RunRecord {
  Gid run_id;
  Gid dataflow;
  std::map<std::string, std::string> platform_assignment;
  std::int64_t started_at = 0;  // microseconds since the epoch
  std::int64_t ended_at = 0;
  RunStatus status = RunStatus::Success;
};

struct OperatorTrace {
  Gid run_id;
  std::string node_id;
  std::string function_alias;
  std::string platform_id;
  std::vector<std::int64_t> input_cardinalities;
  std::int64_t output_cardinality = 0;
  double wall_time = 0.0;  // seconds
  std::int64_t peak_live_tuples = 0;
  std::optional<Gid> produced_gid;
  /// Values emitted by per-node statistics hooks.
  std::map<std::string, double> extras;
};

struct EpochMetric {
  int epoch = 1;
  std::string metric;
  double value = 0.0;
};

struct TrainingTrace {
  Gid run_id;
  std::string node_id;
  std::vector<EpochMetric> per_epoch;
  std::map<std::string, double> final_metrics;
};

/// Links a produced artifact to what generated it.
struct ProvenanceLink {
  Gid produced;
  Gid run;
  Gid dataflow;
  std::string node_id;
  std::string function_alias;
  /// Nearest persisted upstream artifacts: bound inputs and artifacts
  /// produced earlier in the same run.
  std::vector<Gid> inputs;
  /// Aliases of the transformation operators between the inputs and the node.
  std::vector<std::string> path_functions;
  std::string platform_id;
  /// "model_training" for learner outputs, "model_run" when a predict
  /// operator lies on the path, "trans_run" otherwise.
  std::string activity_kind;
};

struct OperatorStats {
  std::string function_alias;
  double mean_selectivity = 1.0;
  /// Seconds per input tuple on a reference-speed platform.
  double mean_cost_per_tuple = 1e-6;
  int sample_count = 0;
  std::map<std::string, double> per_platform;
};

/// Source of operator statistics for the optimizer and scheduler.
class StatsProvider {
 public:
  virtual ~StatsProvider() = default;
  virtual OperatorStats stats(const std::string& function_alias) const = 0;
};

/// Fixed statistics, optionally overridden per alias.
class FixedStats : public StatsProvider {
 public:
  FixedStats(double selectivity = 1.0, double cost_per_tuple = 1e-6)
      : selectivity_(selectivity), cost_(cost_per_tuple) {}
  void set(const std::string& alias, double selectivity, double cost_per_tuple);
  OperatorStats stats(const std::string& function_alias) const override;

 private:
  double selectivity_;
  double cost_;
  std::map<std::string, OperatorStats> overrides_;
};

std::string_view run_status_name(RunStatus s);

nlohmann::json run_to_json(const RunRecord& r);
RunRecord run_from_json(const nlohmann::json& j);
nlohmann::json trace_to_json(const OperatorTrace& t);
OperatorTrace trace_from_json(const nlohmann::json& j);
nlohmann::json training_to_json(const TrainingTrace& t);
TrainingTrace training_from_json(const nlohmann::json& j);
nlohmann::json link_to_json(const ProvenanceLink& l);
ProvenanceLink link_from_json(const nlohmann::json& j);

/// Provenance records kept in the catalog's store.
class ProvenanceStore : public StatsProvider {
 public:
  struct Defaults {
    double selectivity = 1.0;
    double cost_per_tuple = 1e-6;
  };

  explicit ProvenanceStore(Catalog& catalog);
  ProvenanceStore(Catalog& catalog, Defaults defaults);

  /// Validates and stores a run. A nil run_id is replaced by a fresh GID.
  /// Every trace with a produced GID gains a provenance link.
  Gid record_run(RunRecord run, std::vector<OperatorTrace> traces, std::vector<TrainingTrace> training);

  OperatorStats derive_stats(const std::string& function_alias) const;
  OperatorStats stats(const std::string& function_alias) const override { return derive_stats(function_alias); }

  std::optional<RunRecord> run(const Gid& run_id) const;
  std::vector<RunRecord> runs() const;
  std::vector<OperatorTrace> traces(const Gid& run_id) const;
  std::vector<OperatorTrace> all_traces() const;
  std::vector<TrainingTrace> training(const Gid& run_id) const;
  std::optional<ProvenanceLink> link(const Gid& produced) const;
  std::vector<ProvenanceLink> links() const;

  /// Transitive upstream artifacts of `gid` (excluding itself).
  std::set<Gid> lineage(const Gid& gid) const;

  /// PROV-JSON document over `gid` and its upstream closure.
  nlohmann::json export_prov(const Gid& gid) const;

 private:
  Catalog& catalog_;
  Defaults defaults_;
};

}  // namespace gyp
