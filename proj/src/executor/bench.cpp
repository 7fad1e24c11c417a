/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include "gyp/executor/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>
#include <unistd.h>

#include "gyp/common/error.hpp"
#include "gyp/executor/engine.hpp"

namespace gyp {

namespace fs = std::filesystem;
using nlohmann::json;

Schema radar_raw_schema() {
  return Schema::parse("station:string,cell:int64,dbz:float64,velocity:string,range_km:string");
}

std::vector<fs::path> generate_radar_files(const fs::path& dir, int n_files, int rows_per_file, std::uint64_t seed) {
  fs::create_directories(dir);
  std::vector<fs::path> out;
  for (int f = 0; f < n_files; ++f) {
    char name[32];
    std::snprintf(name, sizeof name, "radar_%03d.csv", f);
    fs::path p = dir / name;
    std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(f));
    std::uniform_real_distribution<double> dbz(-16.0, 24.0);
    std::uniform_real_distribution<double> vel(-30.0, 30.0);
    std::uniform_int_distribution<int> range(1, 250);
    std::ostringstream ss;
    ss << "station,cell,dbz,velocity,range_km\n";
    char buf[128];
    for (int i = 0; i < rows_per_file; ++i) {
      long long cell = static_cast<long long>(f) * rows_per_file + i;
      double z = std::round(dbz(rng) * 100.0) / 100.0;
      double v = std::round(vel(rng) * 100.0) / 100.0;
      std::snprintf(buf, sizeof buf, "R%02d,%lld,%s,%s,%d\n", f % 16, cell, format_value(z).c_str(),
                    format_value(v).c_str(), range(rng));
      ss << buf;
    }
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    os << ss.str();
    if (!os) fail(ErrorCode::CatalogIo, "cannot write " + p.string());
    out.push_back(p);
  }
  return out;
}

DataflowGraph radar_pipeline() {
  json doc = json::array();
  doc.push_back({{"GID", "radar-pipeline"}, {"description", "radar reflectivity cleanup"}});
  doc.push_back({{"node_id", "read"},
                 {"operator", "source"},
                 {"input", {"radar"}},
                 {"output", {"raw"}},
                 {"params", {{"schema", radar_raw_schema().str()}}}});
  doc.push_back({{"node_id", "cast"},
                 {"operator", "cast"},
                 {"input", {"raw"}},
                 {"output", {"typed"}},
                 {"params", {{"columns", "velocity:float64,range_km:int64"}}}});
  doc.push_back({{"node_id", "filter"},
                 {"operator", "filter"},
                 {"input", {"typed"}},
                 {"output", {"strong"}},
                 {"params", {{"predicate", "dbz >= 20"}}}});
  doc.push_back({{"node_id", "dedup"},
                 {"operator", "dedup"},
                 {"input", {"strong"}},
                 {"output", {"unique"}},
                 {"params", {{"keys", "station, cell"}}}});
  doc.push_back({{"node_id", "store"}, {"operator", "sink"}, {"input", {"unique", "out"}}, {"output", nullptr}});
  return dataflow_from_json(doc);
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit f;
  std::size_t n = x.size();
  if (n == 0) return f;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double e = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += e * e;
  }
  f.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

BenchReport run_benchmark(const BenchOptions& options) {
  if (options.repetitions < 1) fail(ErrorCode::BadArgument, "repetitions must be at least 1");
  if (options.rows_per_file < 0) fail(ErrorCode::BadArgument, "rows per file must be non-negative");
  int max_files = 0;
  for (int n : options.files) {
    if (n < 1) fail(ErrorCode::BadArgument, "file counts must be positive");
    max_files = std::max(max_files, n);
  }
  bool temp = options.work_dir.empty();
  fs::path dir = temp ? fs::temp_directory_path() / ("gyp-bench-" + std::to_string(::getpid())) : options.work_dir;
  auto files = generate_radar_files(dir, max_files, options.rows_per_file, options.seed);
  DataflowGraph graph = radar_pipeline();

  BenchReport report;
  report.workers = options.workers;
  report.hardware_threads = default_workers();
  for (ExecutorKind backend : {ExecutorKind::Single, ExecutorKind::Partitioned}) {
    std::vector<double> xs, ys;
    for (int n : options.files) {
      std::map<std::string, ExecInput> inputs;
      inputs["raw"] = DatasetLocation{radar_raw_schema(), {files.begin(), files.begin() + n}};
      ExecOptions eo;
      eo.backend = backend;
      eo.workers = options.workers;
      BenchMeasurement m;
      m.backend = backend;
      m.n_files = n;
      for (int r = 0; r < options.repetitions; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        ExecResult res = execute(graph, inputs, eo);
        m.seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        m.peak_live_tuples = res.peak_live_tuples;
      }
      double sum = 0;
      for (double s : m.seconds) sum += s;
      m.mean = sum / m.seconds.size();
      double var = 0;
      for (double s : m.seconds) var += (s - m.mean) * (s - m.mean);
      m.stddev = m.seconds.size() > 1 ? std::sqrt(var / (m.seconds.size() - 1)) : 0.0;
      xs.push_back(n);
      ys.push_back(m.mean);
      report.measurements.push_back(std::move(m));
    }
    report.fits[std::string(executor_kind_name(backend))] = linear_fit(xs, ys);
  }
  if (temp) fs::remove_all(dir);
  return report;
}

std::string bench_csv(const BenchReport& report) {
  std::ostringstream ss;
  ss << "backend,n_files,mean_seconds,stddev_seconds,peak_live_tuples\n";
  for (const auto& m : report.measurements) {
    ss << executor_kind_name(m.backend) << ',' << m.n_files << ',' << format_value(m.mean) << ','
       << format_value(m.stddev) << ',' << m.peak_live_tuples << '\n';
  }
  return ss.str();
}

json bench_summary(const BenchReport& report) {
  json fits = json::object();
  for (const auto& [k, f] : report.fits) fits[k] = {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}};
  json rows = json::array();
  for (const auto& m : report.measurements) {
    rows.push_back({{"backend", executor_kind_name(m.backend)},
                    {"n_files", m.n_files},
                    {"mean_seconds", m.mean},
                    {"stddev_seconds", m.stddev},
                    {"peak_live_tuples", m.peak_live_tuples}});
  }
  return {{"measurements", rows},
          {"fits", fits},
          {"workers", report.workers},
          {"hardware_threads", report.hardware_threads},
          {"notes", "in-process backends have no environment setup cost, so no first-run overhead is measured"}};
}

}  // namespace gyp
