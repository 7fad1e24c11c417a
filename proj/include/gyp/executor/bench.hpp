/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gyp/catalog/catalog.hpp"
#include "gyp/core/dataflow.hpp"
#include "json.hpp"

namespace gyp {

/// Columns of the synthetic radar files. velocity and range_km arrive as
/// text and are cast by the pipeline; dbz is uniform on [-16, 24), so a
/// "dbz >= 20" filter keeps about a tenth of the rows.
Schema radar_raw_schema();

/// Writes radar_000.csv ... into `dir`; the same seed gives identical files.
std::vector<std::filesystem::path> generate_radar_files(const std::filesystem::path& dir, int n_files,
                                                        int rows_per_file, std::uint64_t seed);

/// source → cast → filter(dbz >= 20) → dedup → sink, with the cast exposed
/// as its own node ahead of the filter. The source connector is "raw".
DataflowGraph radar_pipeline();

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least-squares line through (x, y). R² is 1 when y is constant.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

struct BenchOptions {
  std::vector<int> files = {10, 20, 30, 40, 50, 60, 70};
  int rows_per_file = 10000;
  int repetitions = 5;
  int workers = 8;
  std::uint64_t seed = 42;
  /// Where the synthetic files are written; a temporary directory when empty.
  std::filesystem::path work_dir;
};

struct BenchMeasurement {
  ExecutorKind backend = ExecutorKind::Single;
  int n_files = 0;
  std::vector<double> seconds;
  double mean = 0.0;
  /// Sample standard deviation; 0 for a single repetition.
  double stddev = 0.0;
  std::int64_t peak_live_tuples = 0;
};

struct BenchReport {
  std::vector<BenchMeasurement> measurements;
  std::map<std::string, LinearFit> fits;  // backend name → mean seconds vs files
  int workers = 0;
  int hardware_threads = 0;
};

BenchReport run_benchmark(const BenchOptions& options);

/// backend,n_files,mean_seconds,stddev_seconds,peak_live_tuples
std::string bench_csv(const BenchReport& report);
nlohmann::json bench_summary(const BenchReport& report);

}  // namespace gyp
