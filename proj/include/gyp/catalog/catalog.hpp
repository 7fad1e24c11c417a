/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gyp/catalog/store.hpp"
#include "gyp/common/gid.hpp"
#include "gyp/common/value.hpp"
#include "gyp/core/dataflow.hpp"
#include "json.hpp"

namespace gyp {

enum class Bucket { Landing, Staging, Curated };

std::string_view bucket_name(Bucket b);
std::optional<Bucket> parse_bucket(std::string_view name);

enum class ExecutorKind { Single, Partitioned };

std::string_view executor_kind_name(ExecutorKind k);
std::optional<ExecutorKind> parse_executor_kind(std::string_view name);

struct DatasetInfo {
  Schema schema;
  std::string format = "csv";
  Bucket bucket = Bucket::Landing;
  std::string platform;
  /// File or directory of CSV parts, relative to the platform's storage root
  /// unless absolute.
  std::string path;
};

struct ArtifactRecord {
  Gid gid;
  ArtifactKind kind = ArtifactKind::Dataset;
  std::string domain;
  std::string name;
  int version = 1;
  std::optional<Gid> version_of;
  /// Microseconds since the epoch; strictly increasing within a catalog.
  std::int64_t created_at = 0;
  /// Free-form metadata. Models use "task", "learning_scope",
  /// "training_dataset", "features" and "target".
  Params metadata;
  std::optional<DatasetInfo> dataset;
  /// Dataflow document for dataflow artifacts.
  nlohmann::json definition;

  std::optional<std::string> meta_string(std::string_view key) const;
};

nlohmann::json artifact_to_json(const ArtifactRecord& r);
ArtifactRecord artifact_from_json(const nlohmann::json& j);

struct PlatformDescriptor {
  std::string platform_id;
  int cpu_cores = 1;
  int gpus = 0;
  double relative_speed = 1.0;
  std::string storage_root;
  ExecutorKind executor_kind = ExecutorKind::Single;

  friend bool operator==(const PlatformDescriptor&, const PlatformDescriptor&) = default;
};

nlohmann::json platform_to_json(const PlatformDescriptor& p);
PlatformDescriptor platform_from_json(const nlohmann::json& j);

/// MB/s between ordered platform pairs. The diagonal is infinite.
class BandwidthMatrix {
 public:
  void set(const std::string& from, const std::string& to, double mbps);
  /// Throws IncompleteBandwidthMatrix for an undefined off-diagonal pair.
  double get(const std::string& from, const std::string& to) const;
  std::optional<double> find(const std::string& from, const std::string& to) const;
  /// Off-diagonal pairs over `platforms` lacking an entry.
  std::vector<std::pair<std::string, std::string>> missing(const std::vector<std::string>& platforms) const;
  void require_complete(const std::vector<std::string>& platforms) const;
  const std::map<std::pair<std::string, std::string>, double>& entries() const { return entries_; }

 private:
  std::map<std::pair<std::string, std::string>, double> entries_;
};

enum class ChangeFlag : unsigned {
  HyperparametersChanged = 1u << 0,
  TrainingDataChanged = 1u << 1,
  TrainingProcessChanged = 1u << 2,
  MinorRefactor = 1u << 3,
  AlgorithmChanged = 1u << 4,
  ArchitectureChanged = 1u << 5,
  ProblemDefinitionChanged = 1u << 6,
  DomainChanged = 1u << 7,
};

inline constexpr ChangeFlag kAllChangeFlags[] = {
    ChangeFlag::HyperparametersChanged, ChangeFlag::TrainingDataChanged, ChangeFlag::TrainingProcessChanged,
    ChangeFlag::MinorRefactor,          ChangeFlag::AlgorithmChanged,    ChangeFlag::ArchitectureChanged,
    ChangeFlag::ProblemDefinitionChanged, ChangeFlag::DomainChanged,
};

std::string_view change_flag_name(ChangeFlag f);
std::optional<ChangeFlag> parse_change_flag(std::string_view name);

struct ChangeSet {
  unsigned bits = 0;

  ChangeSet& set(ChangeFlag f) {
    bits |= static_cast<unsigned>(f);
    return *this;
  }
  bool has(ChangeFlag f) const { return (bits & static_cast<unsigned>(f)) != 0; }
  bool empty() const { return bits == 0; }
  /// "a,b" → flags; throws BadArgument on unknown names.
  static ChangeSet parse(std::string_view text);
};

enum class ChangeClass { NewVersion, NewModel };

std::string_view change_class_name(ChangeClass c);

/// Model-level flags dominate. Throws EmptyChangeSet.
ChangeClass classify_flags(const ChangeSet& change);

struct ModelQuery {
  std::string task;
  std::string domain;
  Schema input_schema;
};

struct ScoredModel {
  Gid gid;
  double score = 0.0;
};

class Catalog;

/// Score in [0, 1] of `model` for `query`.
using ModelScorer = std::function<double(const ArtifactRecord& model, const ModelQuery& query, const Catalog& catalog)>;

/// Mean of domain match, task match and Jaccard overlap between the query
/// schema's attribute names and the training dataset's.
double metadata_similarity(const ArtifactRecord& model, const ModelQuery& query, const Catalog& catalog);

struct ReplicaRecord {
  Gid dataset;
  std::string platform;
  std::int64_t created_at = 0;
};

class Catalog : public ArtifactResolver {
 public:
  struct Options {
    bool fsync = true;
    std::optional<std::uint64_t> seed;
    /// Remote accesses from one platform needed before a replica appears.
    int replication_threshold = 3;
  };

  /// In-memory catalog.
  Catalog();
  explicit Catalog(std::filesystem::path file);
  Catalog(std::filesystem::path file, Options options);

  RecordStore& store() { return store_; }
  const RecordStore& store() const { return store_; }
  const Options& options() const { return options_; }

  /// Assigns a fresh GID, validates kind-specific metadata and appends the
  /// record. `record.gid`, `version` and `created_at` are ignored.
  Gid register_artifact(ArtifactRecord record);
  std::optional<ArtifactRecord> find(const Gid& gid) const;
  ArtifactRecord get(const Gid& gid) const;
  std::vector<ArtifactRecord> artifacts(std::optional<ArtifactKind> kind = std::nullopt) const;
  /// Retires the artifact. Its GID is never issued again.
  void remove_artifact(const Gid& gid);

  ChangeClass classify_change(const Gid& model, const ChangeSet& change) const;
  ArtifactRecord promote_dataset(const Gid& gid, Bucket to);

  std::vector<ScoredModel> select_models(const ModelQuery& query, int k, const ModelScorer& scorer = {}) const;

  void register_platform(const PlatformDescriptor& platform);
  std::optional<PlatformDescriptor> platform(const std::string& id) const;
  std::vector<PlatformDescriptor> platforms() const;
  void set_bandwidth(const std::string& from, const std::string& to, double mbps);
  BandwidthMatrix bandwidth() const;

  /// Counts an access of `dataset` from `platform`. Returns the replica
  /// created when the count passes the threshold.
  std::optional<ReplicaRecord> record_access(const Gid& dataset, const std::string& platform);
  /// Ages every access counter by one window; replicas whose counter reaches
  /// zero are evicted. Returns evicted (dataset, platform) pairs.
  std::vector<std::pair<Gid, std::string>> decay_access();
  std::vector<ReplicaRecord> replicas(const Gid& dataset) const;
  int access_count(const Gid& dataset, const std::string& platform) const;

  std::optional<ResolvedArtifact> resolve_artifact(const Gid& gid) const override;

  /// Absolute location of a dataset's data.
  std::filesystem::path dataset_path(const ArtifactRecord& dataset) const;

  std::int64_t next_timestamp();
  Gid fresh_gid(RecordStore::Batch& batch);

  void refresh() { store_.refresh(); }
  void compact() { store_.compact(); }
  std::string dump() const { return store_.dump(); }

 private:
  std::int64_t stamp_locked();

  Options options_;
  RecordStore store_;
  GidGenerator gids_;
  std::mutex gen_mutex_;
  std::int64_t last_stamp_ = 0;
};

/// Current time in microseconds since the epoch.
std::int64_t now_micros();

}  // namespace gyp
