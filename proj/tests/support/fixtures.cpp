/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include "support/fixtures.hpp"

#include <atomic>
#include <fstream>
#include <random>
#include <sstream>
#include <unistd.h>

#include "gyp/cli/app.hpp"

namespace gyp::testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" + std::to_string(rd()));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

PlatformDescriptor make_platform(const std::string& id, const fs::path& root, int gpus, double speed,
                                 ExecutorKind executor) {
  PlatformDescriptor p;
  p.platform_id = id;
  p.cpu_cores = 4;
  p.gpus = gpus;
  p.relative_speed = speed;
  p.storage_root = root.string();
  p.executor_kind = executor;
  fs::create_directories(root);
  return p;
}

Gid store_dataset(Catalog& catalog, const PlatformDescriptor& platform, const std::string& name,
                  const std::string& rel, const Table& table, const std::string& domain) {
  write_csv(fs::path(platform.storage_root) / rel, table);
  ArtifactRecord r;
  r.kind = ArtifactKind::Dataset;
  r.name = name;
  r.domain = domain;
  r.dataset = DatasetInfo{table.schema, "csv", Bucket::Landing, platform.platform_id, rel};
  return catalog.register_artifact(r);
}

bool same_rows(const Table& a, const Table& b) {
  if (a.schema != b.schema || a.rows.size() != b.rows.size()) return false;
  Table x = a.sorted(), y = b.sorted();
  for (std::size_t i = 0; i < x.rows.size(); ++i) {
    if (compare_rows(x.rows[i], y.rows[i]) != 0) return false;
  }
  return true;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

Catalog::Options quick() {
  Catalog::Options o;
  o.fsync = false;
  o.seed = 11;
  return o;
}

}  // namespace

Workspace::Workspace() : dir_("gyp-ws"), catalog_(dir_ / "catalog.ndjson", quick()), provenance_(catalog_) {}

PlatformDescriptor Workspace::add_platform(const std::string& id, int gpus, double speed, double mbps) {
  PlatformDescriptor p = make_platform(id, dir_ / id, gpus, speed);
  auto existing = catalog_.platforms();
  catalog_.register_platform(p);
  for (const auto& q : existing) {
    catalog_.set_bandwidth(q.platform_id, id, mbps);
    catalog_.set_bandwidth(id, q.platform_id, mbps);
  }
  return p;
}

DataflowGraph Workspace::bind(const std::string& document, const std::map<std::string, std::string>& bindings,
                              const Params& params) {
  return gyp::bind(parse_dataflow(document), bindings, params, catalog_, FunctionRegistry::with_builtins());
}

RunResult Workspace::run(const DataflowGraph& graph, const RunOptions& options, bool exhaustive) {
  PlanRequest req;
  req.registry = catalog_registry(catalog_);
  req.exhaustive = exhaustive;
  ScheduledPlan plan = plan_dataflow(graph, catalog_, provenance_, req);
  return run_plan(plan, catalog_, provenance_, options);
}

}  // namespace gyp::testing
