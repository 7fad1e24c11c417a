/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#pragma once

#include <filesystem>
#include <string>

#include "gyp/catalog/catalog.hpp"
#include "gyp/executor/runner.hpp"
#include "gyp/executor/table.hpp"
#include "gyp/provenance/provenance.hpp"

namespace gyp::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "gyp-test");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

PlatformDescriptor make_platform(const std::string& id, const std::filesystem::path& root, int gpus = 0,
                                 double speed = 1.0, ExecutorKind executor = ExecutorKind::Single);

/// Writes `table` to <platform root>/<rel> and registers it as a dataset
/// homed on that platform.
Gid store_dataset(Catalog& catalog, const PlatformDescriptor& platform, const std::string& name,
                  const std::string& rel, const Table& table, const std::string& domain = "test");

/// Multiset equality after sorting both tables; schemas must match.
bool same_rows(const Table& a, const Table& b);

std::string read_file(const std::filesystem::path& path);

/// File-backed catalog with provenance in a temporary directory, plus the
/// bind → plan → run sequence the command-line tool performs.
class Workspace {
 public:
  Workspace();

  const TempDir& dir() const { return dir_; }
  Catalog& catalog() { return catalog_; }
  ProvenanceStore& provenance() { return provenance_; }

  /// Registers a platform rooted at <dir>/<id>; bandwidth to every existing
  /// platform is set to `mbps` both ways.
  PlatformDescriptor add_platform(const std::string& id, int gpus = 0, double speed = 1.0, double mbps = 100.0);

  /// Parses and binds a dataflow document (no rewriting).
  DataflowGraph bind(const std::string& document, const std::map<std::string, std::string>& bindings,
                     const Params& params = {});

  /// Plans with the catalog's platforms and provenance statistics, then runs.
  RunResult run(const DataflowGraph& graph, const RunOptions& options = {}, bool exhaustive = false);

 private:
  TempDir dir_;
  Catalog catalog_;
  ProvenanceStore provenance_;
};

}  // namespace gyp::testing
