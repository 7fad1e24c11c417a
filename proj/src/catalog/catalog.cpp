/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include "gyp/catalog/catalog.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>

#include "gyp/common/error.hpp"

namespace gyp {

using nlohmann::json;

namespace {

constexpr const char* kArtifact = "artifact";
constexpr const char* kPlatform = "platform";
constexpr const char* kBandwidth = "bandwidth";
constexpr const char* kClock = "clock";
constexpr const char* kAccess = "access";
constexpr const char* kReplica = "replica";
constexpr const char* kEvent = "event";
constexpr const char* kProspective = "prospective";

std::string pair_key(const std::string& a, const std::string& b) { return a + "\x1f" + b; }

}  // namespace

std::int64_t now_micros() {
  return std::chrono::duration_cast<std::chrono::microseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string_view bucket_name(Bucket b) {
  switch (b) {
    case Bucket::Landing: return "landing";
    case Bucket::Staging: return "staging";
    case Bucket::Curated: return "curated";
  }
  return "?";
}

std::optional<Bucket> parse_bucket(std::string_view name) {
  if (name == "landing") return Bucket::Landing;
  if (name == "staging") return Bucket::Staging;
  if (name == "curated") return Bucket::Curated;
  return std::nullopt;
}

std::string_view executor_kind_name(ExecutorKind k) {
  return k == ExecutorKind::Single ? "single" : "partitioned";
}

std::optional<ExecutorKind> parse_executor_kind(std::string_view name) {
  if (name == "single") return ExecutorKind::Single;
  if (name == "partitioned") return ExecutorKind::Partitioned;
  return std::nullopt;
}

std::optional<std::string> ArtifactRecord::meta_string(std::string_view key) const {
  auto it = metadata.find(std::string(key));
  if (it == metadata.end()) return std::nullopt;
  if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
  return format_value(it->second);
}

json artifact_to_json(const ArtifactRecord& r) {
  json j = {{"gid", r.gid.str()},
            {"kind", std::string(artifact_kind_name(r.kind))},
            {"domain", r.domain},
            {"name", r.name},
            {"version", r.version},
            {"created_at", r.created_at}};
  if (r.version_of) j["version_of"] = r.version_of->str();
  json meta = json::object();
  for (const auto& [k, v] : r.metadata) meta[k] = value_to_json(v);
  j["metadata"] = meta;
  if (r.dataset) {
    j["dataset"] = {{"schema", r.dataset->schema.str()},
                    {"format", r.dataset->format},
                    {"bucket", std::string(bucket_name(r.dataset->bucket))},
                    {"location", {{"platform", r.dataset->platform}, {"path", r.dataset->path}}}};
  }
  if (!r.definition.is_null()) j["definition"] = r.definition;
  return j;
}

ArtifactRecord artifact_from_json(const json& j) {
  ArtifactRecord r;
  try {
    r.gid = Gid::from_string(j.at("gid").get<std::string>());
    auto kind = parse_artifact_kind(j.at("kind").get<std::string>());
    if (!kind) fail(ErrorCode::InvalidMetadata, "kind");
    r.kind = *kind;
    r.domain = j.value("domain", "");
    r.name = j.value("name", "");
    r.version = j.value("version", 1);
    r.created_at = j.value("created_at", std::int64_t{0});
    if (j.contains("version_of")) r.version_of = Gid::from_string(j["version_of"].get<std::string>());
    if (j.contains("metadata")) {
      for (const auto& [k, v] : j["metadata"].items()) r.metadata[k] = value_from_json(v);
    }
    if (j.contains("dataset")) {
      const json& d = j["dataset"];
      DatasetInfo info;
      info.schema = Schema::parse(d.at("schema").get<std::string>());
      info.format = d.value("format", "csv");
      auto b = parse_bucket(d.value("bucket", "landing"));
      if (!b) fail(ErrorCode::InvalidMetadata, "bucket");
      info.bucket = *b;
      info.platform = d.at("location").at("platform").get<std::string>();
      info.path = d.at("location").at("path").get<std::string>();
      r.dataset = std::move(info);
    }
    if (j.contains("definition")) r.definition = j["definition"];
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidMetadata, e.what());
  }
  return r;
}

json platform_to_json(const PlatformDescriptor& p) {
  return {{"platform_id", p.platform_id},
          {"cpu_cores", p.cpu_cores},
          {"gpus", p.gpus},
          {"relative_speed", p.relative_speed},
          {"storage_root", p.storage_root},
          {"executor_kind", std::string(executor_kind_name(p.executor_kind))}};
}

PlatformDescriptor platform_from_json(const json& j) {
  PlatformDescriptor p;
  try {
    p.platform_id = j.at("platform_id").get<std::string>();
    p.cpu_cores = j.value("cpu_cores", 1);
    p.gpus = j.value("gpus", 0);
    p.relative_speed = j.value("relative_speed", 1.0);
    p.storage_root = j.value("storage_root", "");
    auto k = parse_executor_kind(j.value("executor_kind", "single"));
    if (!k) fail(ErrorCode::InvalidMetadata, "executor_kind");
    p.executor_kind = *k;
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidMetadata, std::string("platform: ") + e.what());
  }
  return p;
}

void BandwidthMatrix::set(const std::string& from, const std::string& to, double mbps) {
  entries_[{from, to}] = mbps;
}

std::optional<double> BandwidthMatrix::find(const std::string& from, const std::string& to) const {
  if (from == to) return std::numeric_limits<double>::infinity();
  auto it = entries_.find({from, to});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

double BandwidthMatrix::get(const std::string& from, const std::string& to) const {
  auto v = find(from, to);
  if (!v) fail(ErrorCode::IncompleteBandwidthMatrix, from + " -> " + to);
  return *v;
}

std::vector<std::pair<std::string, std::string>> BandwidthMatrix::missing(
    const std::vector<std::string>& platforms) const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& a : platforms) {
    for (const auto& b : platforms) {
      if (a != b && !entries_.count({a, b})) out.emplace_back(a, b);
    }
  }
  return out;
}

void BandwidthMatrix::require_complete(const std::vector<std::string>& platforms) const {
  auto miss = missing(platforms);
  if (miss.empty()) return;
  std::string detail;
  for (const auto& [a, b] : miss) detail += (detail.empty() ? "" : ", ") + a + " -> " + b;
  fail(ErrorCode::IncompleteBandwidthMatrix, "no bandwidth for " + detail);
}

std::string_view change_flag_name(ChangeFlag f) {
  switch (f) {
    case ChangeFlag::HyperparametersChanged: return "hyperparameters_changed";
    case ChangeFlag::TrainingDataChanged: return "training_data_changed";
    case ChangeFlag::TrainingProcessChanged: return "training_process_changed";
    case ChangeFlag::MinorRefactor: return "minor_refactor";
    case ChangeFlag::AlgorithmChanged: return "algorithm_changed";
    case ChangeFlag::ArchitectureChanged: return "architecture_changed";
    case ChangeFlag::ProblemDefinitionChanged: return "problem_definition_changed";
    case ChangeFlag::DomainChanged: return "domain_changed";
  }
  return "?";
}

std::optional<ChangeFlag> parse_change_flag(std::string_view name) {
  for (auto f : kAllChangeFlags) {
    if (change_flag_name(f) == name) return f;
  }
  return std::nullopt;
}

ChangeSet ChangeSet::parse(std::string_view text) {
  ChangeSet cs;
  for (const auto& name : parse_name_list(text)) {
    auto f = parse_change_flag(name);
    if (!f) fail(ErrorCode::BadArgument, "unknown change flag '" + name + "'");
    cs.set(*f);
  }
  return cs;
}

std::string_view change_class_name(ChangeClass c) { return c == ChangeClass::NewModel ? "NewModel" : "NewVersion"; }

ChangeClass classify_flags(const ChangeSet& change) {
  if (change.empty()) fail(ErrorCode::EmptyChangeSet, "no change flag set");
  for (auto f : {ChangeFlag::AlgorithmChanged, ChangeFlag::ArchitectureChanged, ChangeFlag::ProblemDefinitionChanged,
                 ChangeFlag::DomainChanged}) {
    if (change.has(f)) return ChangeClass::NewModel;
  }
  return ChangeClass::NewVersion;
}

double metadata_similarity(const ArtifactRecord& model, const ModelQuery& query, const Catalog& catalog) {
  double domain = model.domain == query.domain ? 1.0 : 0.0;
  double task = model.meta_string("task").value_or("") == query.task ? 1.0 : 0.0;
  double overlap = 0.0;
  if (auto td = model.meta_string("training_dataset")) {
    auto gid = Gid::parse(*td);
    auto rec = gid ? catalog.find(*gid) : std::nullopt;
    if (rec && rec->dataset) {
      auto a = rec->dataset->schema.names();
      auto b = query.input_schema.names();
      std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end());
      std::size_t inter = 0;
      for (const auto& n : sa) inter += sb.count(n);
      std::size_t uni = sa.size() + sb.size() - inter;
      overlap = uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
    }
  }
  return (domain + task + overlap) / 3.0;
}

Catalog::Catalog() : Catalog(std::filesystem::path(), Options{}) {}

Catalog::Catalog(std::filesystem::path file) : Catalog(std::move(file), Options{}) {}

Catalog::Catalog(std::filesystem::path file, Options options)
    : options_(options),
      store_(std::move(file), RecordStore::Options{options.fsync}),
      gids_(options.seed ? GidGenerator(*options.seed) : GidGenerator()) {}

std::int64_t Catalog::stamp_locked() {
  std::int64_t t = std::max(now_micros(), last_stamp_ + 1);
  last_stamp_ = t;
  return t;
}

std::int64_t Catalog::next_timestamp() {
  std::lock_guard lock(gen_mutex_);
  return stamp_locked();
}

Gid Catalog::fresh_gid(RecordStore::Batch& batch) {
  std::lock_guard lock(gen_mutex_);
  while (true) {
    Gid g = gids_.next();
    std::string s = g.str();
    bool taken = batch.get(kArtifact, s) || batch.retired(kArtifact, s) || batch.get("run", s);
    if (!taken) return g;
  }
}

Gid Catalog::register_artifact(ArtifactRecord record) {
  return store_.write([&](RecordStore::Batch& batch) {
    // Validation runs under the writer lock so checks see other writers.
    if (record.dataset) {
      const DatasetInfo& d = *record.dataset;
      if (record.kind != ArtifactKind::Dataset) fail(ErrorCode::InvalidMetadata, "dataset info on a non-dataset");
      if (d.schema.empty()) fail(ErrorCode::InvalidMetadata, "schema");
      if (d.format != "csv") fail(ErrorCode::InvalidMetadata, "format '" + d.format + "'");
      if (d.path.empty()) fail(ErrorCode::InvalidMetadata, "location.path");
      if (!batch.get(kPlatform, d.platform)) fail(ErrorCode::UnknownPlatform, d.platform);
    }
    switch (record.kind) {
      case ArtifactKind::Dataset:
        if (!record.dataset) fail(ErrorCode::InvalidMetadata, "schema, format and location are required");
        break;
      case ArtifactKind::Model: {
        for (const char* field : {"task", "learning_scope"}) {
          if (!record.metadata.count(field)) fail(ErrorCode::InvalidMetadata, field);
        }
        if (auto td = record.meta_string("training_dataset")) {
          const json* t = batch.get(kArtifact, *td);
          if (!t || t->value("kind", "") != "dataset") {
            fail(ErrorCode::InvalidMetadata, "training_dataset " + *td + " is not a registered dataset");
          }
        }
        break;
      }
      case ArtifactKind::Function:
        if (!record.domain.empty()) fail(ErrorCode::InvalidMetadata, "domain (functions are shared across domains)");
        break;
      case ArtifactKind::Dataflow:
        try {
          (void)dataflow_from_json(record.definition);
        } catch (const Error& e) {
          fail(ErrorCode::InvalidMetadata, std::string("definition: ") + e.what());
        }
        break;
    }
    record.version = 1;
    if (record.version_of) {
      const json* prev = batch.get(kArtifact, record.version_of->str());
      if (!prev) fail(ErrorCode::UnknownGid, record.version_of->str());
      if (prev->value("kind", "") != artifact_kind_name(record.kind)) {
        fail(ErrorCode::InvalidMetadata, "version_of must reference an artifact of the same kind");
      }
      record.version = prev->value("version", 1) + 1;
    }
    if (const json* clock = batch.get(kClock, "created_at")) {
      std::lock_guard lock(gen_mutex_);
      last_stamp_ = std::max(last_stamp_, clock->value("last", std::int64_t{0}));
    }
    record.gid = fresh_gid(batch);
    record.created_at = next_timestamp();
    std::string key = record.gid.str();
    batch.put(kArtifact, key, artifact_to_json(record));
    batch.put(kClock, "created_at", json{{"last", record.created_at}});
    batch.put(kProspective, key,
              json{{"gid", key}, {"kind", std::string(artifact_kind_name(record.kind))}, {"at", record.created_at}});
    return record.gid;
  });
}

std::optional<ArtifactRecord> Catalog::find(const Gid& gid) const {
  auto j = store_.get(kArtifact, gid.str());
  if (!j) return std::nullopt;
  return artifact_from_json(*j);
}

ArtifactRecord Catalog::get(const Gid& gid) const {
  auto r = find(gid);
  if (!r) fail(ErrorCode::UnknownGid, gid.str());
  return *r;
}

std::vector<ArtifactRecord> Catalog::artifacts(std::optional<ArtifactKind> kind) const {
  std::vector<ArtifactRecord> out;
  for (const auto& j : store_.list(kArtifact)) {
    if (kind && j.value("kind", "") != artifact_kind_name(*kind)) continue;
    out.push_back(artifact_from_json(j));
  }
  return out;
}

void Catalog::remove_artifact(const Gid& gid) {
  store_.write([&](RecordStore::Batch& batch) {
    if (!batch.get(kArtifact, gid.str())) fail(ErrorCode::UnknownGid, gid.str());
    batch.remove(kArtifact, gid.str());
  });
}

ChangeClass Catalog::classify_change(const Gid& model, const ChangeSet& change) const {
  auto rec = find(model);
  if (!rec) fail(ErrorCode::UnknownGid, model.str());
  if (rec->kind != ArtifactKind::Model) fail(ErrorCode::NotAModel, model.str());
  return classify_flags(change);
}

ArtifactRecord Catalog::promote_dataset(const Gid& gid, Bucket to) {
  return store_.write([&](RecordStore::Batch& batch) {
    const json* j = batch.get(kArtifact, gid.str());
    if (!j) fail(ErrorCode::UnknownGid, gid.str());
    ArtifactRecord rec = artifact_from_json(*j);
    if (rec.kind != ArtifactKind::Dataset || !rec.dataset) fail(ErrorCode::NotADataset, gid.str());
    Bucket from = rec.dataset->bucket;
    if (static_cast<int>(to) != static_cast<int>(from) + 1) {
      fail(ErrorCode::IllegalTransition,
           std::string(bucket_name(from)) + " -> " + std::string(bucket_name(to)) + " for " + gid.str());
    }
    rec.dataset->bucket = to;
    batch.put(kArtifact, gid.str(), artifact_to_json(rec));
    std::int64_t at = next_timestamp();
    batch.put(kEvent, gid.str() + "/" + std::to_string(at),
              json{{"event", "promotion"},
                   {"gid", gid.str()},
                   {"from", std::string(bucket_name(from))},
                   {"to", std::string(bucket_name(to))},
                   {"at", at}});
    return rec;
  });
}

std::vector<ScoredModel> Catalog::select_models(const ModelQuery& query, int k, const ModelScorer& scorer) const {
  if (k < 1) fail(ErrorCode::BadArgument, "k must be at least 1");
  struct Candidate {
    ScoredModel scored;
    std::int64_t created_at;
  };
  std::vector<Candidate> all;
  for (const auto& m : artifacts(ArtifactKind::Model)) {
    double s = scorer ? scorer(m, query, *this) : metadata_similarity(m, query, *this);
    all.push_back({{m.gid, std::clamp(s, 0.0, 1.0)}, m.created_at});
  }
  std::sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
    if (a.scored.score != b.scored.score) return a.scored.score > b.scored.score;
    if (a.created_at != b.created_at) return a.created_at > b.created_at;
    return a.scored.gid < b.scored.gid;
  });
  std::vector<ScoredModel> out;
  for (std::size_t i = 0; i < all.size() && i < static_cast<std::size_t>(k); ++i) out.push_back(all[i].scored);
  return out;
}

void Catalog::register_platform(const PlatformDescriptor& p) {
  if (p.platform_id.empty()) fail(ErrorCode::InvalidMetadata, "platform_id");
  if (!(p.relative_speed > 0.0) || !std::isfinite(p.relative_speed)) {
    fail(ErrorCode::InvalidMetadata, "relative_speed must be positive");
  }
  if (p.cpu_cores < 1) fail(ErrorCode::InvalidMetadata, "cpu_cores must be at least 1");
  if (p.gpus < 0) fail(ErrorCode::InvalidMetadata, "gpus must be non-negative");
  store_.write([&](RecordStore::Batch& batch) {
    if (batch.get(kPlatform, p.platform_id)) fail(ErrorCode::DuplicateId, p.platform_id);
    batch.put(kPlatform, p.platform_id, platform_to_json(p));
  });
}

std::optional<PlatformDescriptor> Catalog::platform(const std::string& id) const {
  auto j = store_.get(kPlatform, id);
  if (!j) return std::nullopt;
  return platform_from_json(*j);
}

std::vector<PlatformDescriptor> Catalog::platforms() const {
  std::vector<PlatformDescriptor> out;
  for (const auto& j : store_.list(kPlatform)) out.push_back(platform_from_json(j));
  return out;
}

void Catalog::set_bandwidth(const std::string& from, const std::string& to, double mbps) {
  if (!(mbps > 0.0)) fail(ErrorCode::InvalidMetadata, "bandwidth must be positive");
  store_.write([&](RecordStore::Batch& batch) {
    for (const auto& id : {from, to}) {
      if (!batch.get(kPlatform, id)) fail(ErrorCode::UnknownPlatform, id);
    }
    batch.put(kBandwidth, pair_key(from, to), json{{"from", from}, {"to", to}, {"mbps", mbps}});
  });
}

BandwidthMatrix Catalog::bandwidth() const {
  BandwidthMatrix m;
  for (const auto& j : store_.list(kBandwidth)) {
    m.set(j.at("from").get<std::string>(), j.at("to").get<std::string>(), j.at("mbps").get<double>());
  }
  return m;
}

std::optional<ReplicaRecord> Catalog::record_access(const Gid& dataset, const std::string& platform) {
  return store_.write([&](RecordStore::Batch& batch) -> std::optional<ReplicaRecord> {
    const json* j = batch.get(kArtifact, dataset.str());
    if (!j) fail(ErrorCode::UnknownGid, dataset.str());
    if (!batch.get(kPlatform, platform)) fail(ErrorCode::UnknownPlatform, platform);
    ArtifactRecord rec = artifact_from_json(*j);
    if (!rec.dataset) fail(ErrorCode::NotADataset, dataset.str());
    if (rec.dataset->platform == platform) return std::nullopt;
    std::string key = pair_key(dataset.str(), platform);
    int count = 1;
    if (const json* a = batch.get(kAccess, key)) count = a->value("count", 0) + 1;
    batch.put(kAccess, key, json{{"dataset", dataset.str()}, {"platform", platform}, {"count", count}});
    if (count > options_.replication_threshold && !batch.get(kReplica, key)) {
      ReplicaRecord r{dataset, platform, next_timestamp()};
      batch.put(kReplica, key, json{{"dataset", dataset.str()}, {"platform", platform}, {"created_at", r.created_at}});
      return r;
    }
    return std::nullopt;
  });
}

std::vector<std::pair<Gid, std::string>> Catalog::decay_access() {
  return store_.write([&](RecordStore::Batch& batch) {
    std::vector<std::pair<Gid, std::string>> evicted;
    for (const auto& a : batch.list(kAccess)) {
      std::string key = a.at("key").get<std::string>();
      int count = a.value("count", 0) - 1;
      if (count > 0) {
        json next = a;
        next["count"] = count;
        batch.put(kAccess, key, next);
        continue;
      }
      batch.remove(kAccess, key);
      if (batch.get(kReplica, key)) {
        batch.remove(kReplica, key);
        evicted.emplace_back(Gid::from_string(a.at("dataset").get<std::string>()), a.at("platform").get<std::string>());
      }
    }
    return evicted;
  });
}

std::vector<ReplicaRecord> Catalog::replicas(const Gid& dataset) const {
  std::vector<ReplicaRecord> out;
  for (const auto& j : store_.list(kReplica)) {
    if (j.value("dataset", "") != dataset.str()) continue;
    out.push_back({dataset, j.at("platform").get<std::string>(), j.value("created_at", std::int64_t{0})});
  }
  return out;
}

int Catalog::access_count(const Gid& dataset, const std::string& platform) const {
  auto j = store_.get(kAccess, pair_key(dataset.str(), platform));
  return j ? j->value("count", 0) : 0;
}

std::optional<ResolvedArtifact> Catalog::resolve_artifact(const Gid& gid) const {
  auto rec = find(gid);
  if (!rec) return std::nullopt;
  ResolvedArtifact out;
  out.kind = rec->kind;
  if (rec->dataset) out.schema = rec->dataset->schema;
  if (rec->kind == ArtifactKind::Model) {
    if (auto f = rec->meta_string("features")) out.features = parse_name_list(*f);
    out.target = rec->meta_string("target").value_or("");
  }
  return out;
}

std::filesystem::path Catalog::dataset_path(const ArtifactRecord& dataset) const {
  if (!dataset.dataset) fail(ErrorCode::NotADataset, dataset.gid.str());
  std::filesystem::path p(dataset.dataset->path);
  if (p.is_absolute()) return p;
  auto plat = platform(dataset.dataset->platform);
  if (!plat) fail(ErrorCode::UnknownPlatform, dataset.dataset->platform);
  return std::filesystem::path(plat->storage_root) / p;
}

}  // namespace gyp
