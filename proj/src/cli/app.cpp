/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include "gyp/cli/app.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gyp/common/error.hpp"
#include "gyp/executor/bench.hpp"
#include "gyp/executor/runner.hpp"
#include "gyp/kgraph/facts.hpp"
#include "gyp/optimizer/optimizer.hpp"

namespace gyp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::BadArgument, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  json j = json::parse(ss.str(), nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::MalformedJson, path.string());
  return j;
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::BadArgument, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::BadArgument, "cannot write " + path.string());
  out << text;
}

int parse_int(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    int v = std::stoi(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::BadArgument, what + " must be an integer, got '" + text + "'");
}

std::map<std::string, std::string> parse_pairs(const std::vector<std::string>& items, const std::string& flag) {
  std::map<std::string, std::string> out;
  for (const auto& item : items) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) fail(ErrorCode::BadArgument, flag + " expects key=value, got '" + item + "'");
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

// Numbers and booleans keep their type; everything else is a string.
Value parse_scalar(const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  try {
    std::size_t used = 0;
    long long i = std::stoll(text, &used);
    if (used == text.size()) return static_cast<std::int64_t>(i);
    double d = std::stod(text, &used);
    if (used == text.size()) return d;
  } catch (const std::exception&) {
  }
  return text;
}

std::string table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  std::ostringstream ss;
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      ss << r[c];
      if (c + 1 < r.size()) ss << std::string(width[c] - r[c].size() + 2, ' ');
    }
    ss << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return ss.str();
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

}  // namespace

Config load_config(const std::optional<fs::path>& file, const ConfigFlags& flags) {
  Config c;
  if (file) {
    json j = read_json_file(*file);
    try {
      if (j.contains("catalog")) c.catalog = j["catalog"].get<std::string>();
      if (j.contains("default_platform")) c.default_platform = j["default_platform"].get<std::string>();
      if (j.contains("stats")) {
        c.selectivity = j["stats"].value("selectivity", c.selectivity);
        c.cost_per_tuple = j["stats"].value("cost_per_tuple", c.cost_per_tuple);
      }
      if (j.contains("replication_threshold")) c.replication_threshold = j["replication_threshold"].get<int>();
      if (j.contains("rewrite")) {
        c.reorder = j["rewrite"].value("reorder", c.reorder);
        c.pushdown = j["rewrite"].value("pushdown", c.pushdown);
      }
      if (j.contains("workers")) c.workers = j["workers"].get<int>();
    } catch (const json::exception& e) {
      fail(ErrorCode::BadArgument, "config " + file->string() + ": " + e.what());
    }
  }
  if (flags.catalog) c.catalog = *flags.catalog;
  if (flags.default_platform) c.default_platform = *flags.default_platform;
  if (flags.workers) c.workers = *flags.workers;
  if (const char* v = std::getenv("GYP_CATALOG"); v && *v) c.catalog = v;
  if (const char* v = std::getenv("GYP_DEFAULT_PLATFORM"); v && *v) c.default_platform = v;
  if (const char* v = std::getenv("GYP_WORKERS"); v && *v) c.workers = parse_int(v, "GYP_WORKERS");
  if (const char* v = std::getenv("GYP_REPLICATION_THRESHOLD"); v && *v) {
    c.replication_threshold = parse_int(v, "GYP_REPLICATION_THRESHOLD");
  }
  if (c.catalog.empty()) fail(ErrorCode::BadArgument, "catalog path is empty");
  if (!(c.selectivity > 0.0) || !(c.cost_per_tuple > 0.0)) {
    fail(ErrorCode::BadArgument, "stats defaults must be positive");
  }
  if (c.replication_threshold < 1) fail(ErrorCode::BadArgument, "replication threshold must be positive");
  if (c.workers < 0) fail(ErrorCode::BadArgument, "workers must be non-negative");
  return c;
}

Registry read_registry(const fs::path& file) {
  json j = read_json_file(file);
  Registry r;
  try {
    for (const auto& p : j.at("platforms")) r.platforms.push_back(platform_from_json(p));
    if (j.contains("bandwidth")) {
      for (const auto& b : j["bandwidth"]) {
        r.bandwidth.set(b.at("from").get<std::string>(), b.at("to").get<std::string>(), b.at("mbps").get<double>());
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::MalformedJson, "registry " + file.string() + ": " + e.what());
  }
  return r;
}

Registry catalog_registry(const Catalog& catalog) { return {catalog.platforms(), catalog.bandwidth()}; }

std::int64_t count_dataset_rows(const fs::path& location) {
  std::int64_t total = 0;
  for (const auto& f : dataset_files(location)) {
    auto records = parse_csv_records(read_text_file(f));
    if (!records.empty()) total += static_cast<std::int64_t>(records.size()) - 1;
  }
  return total;
}

ScheduledPlan plan_dataflow(const DataflowGraph& graph, const Catalog& catalog, const StatsProvider& stats,
                            const PlanRequest& request) {
  if (!graph.is_concrete()) fail(ErrorCode::MissingBinding, "schedule needs a bound dataflow");
  FunctionRegistry registry = FunctionRegistry::with_builtins();
  CostModel model;
  model.graph = &graph;
  model.platforms = request.registry.platforms;
  model.bandwidth = request.registry.bandwidth;
  model.annotations = annotate(graph, stats, registry);
  model.placements = Placements::from_catalog(catalog, graph);

  std::map<std::string, double> sizes;
  for (const auto& n : graph.nodes) {
    if (n.op != OperatorKind::Source) continue;
    for (std::size_t i = 0; i < n.inputs.size() && i < n.outputs.size(); ++i) {
      auto b = graph.binding->find(n.inputs[i]);
      std::string value = b == graph.binding->end() ? n.inputs[i] : b->second;
      auto gid = Gid::parse(value);
      if (!gid) {
        sizes[n.outputs[i]] = static_cast<double>(count_dataset_rows(value));
        continue;
      }
      auto rec = catalog.find(*gid);
      if (!rec) fail(ErrorCode::UnknownGid, value);
      if (rec->kind == ArtifactKind::Dataset) {
        double rows = static_cast<double>(count_dataset_rows(catalog.dataset_path(*rec)));
        sizes[value] = rows;
        model.dataset_rows[value] = rows;
      } else {
        sizes[n.outputs[i]] = 1.0;
      }
    }
  }
  model.estimates = estimate_cardinalities(graph, model.annotations, sizes);
  std::vector<Fragment> fragments = fragment(graph, model.placements, model.platforms, request.fragment_options);
  PlatformAssignment a = request.exhaustive ? assign_exhaustive(fragments, model) : assign(fragments, model);
  if (!a.feasible) {
    std::string why;
    for (const auto& d : a.diagnostics) why += (why.empty() ? "" : "; ") + d;
    fail(ErrorCode::NoFeasiblePlatform, why);
  }
  return materialize(graph, fragments, a, model);
}

namespace {

struct Cli {
  std::ostream& out;
  std::ostream& err;
  bool as_json = false;
  Config config;

  void emit(const json& j, const std::string& human) {
    if (as_json) out << j.dump(2) << '\n';
    else out << human;
  }

  Catalog open_catalog() {
    Catalog::Options o;
    o.replication_threshold = config.replication_threshold;
    return Catalog(config.catalog, o);
  }

  ProvenanceStore::Defaults defaults() const { return {config.selectivity, config.cost_per_tuple}; }
};

json plan_summary(const ScheduledPlan& plan) {
  json frags = json::array();
  for (const auto& f : plan.fragments) {
    std::string platform;
    if (f.kind == FragmentKind::Compute) platform = plan.assignment.placement.at(f.fragment_id);
    else
      for (const auto& j : plan.jobs) {
        if (j.job_id == f.fragment_id) platform = j.from_platform + "->" + j.platform;
      }
    frags.push_back({{"fragment_id", f.fragment_id},
                     {"kind", fragment_kind_name(f.kind)},
                     {"platform", platform},
                     {"node_ids", f.node_ids}});
  }
  return {{"fragments", frags}, {"total_cost", plan.assignment.total_cost}};
}

std::string plan_text(const ScheduledPlan& plan) {
  json s = plan_summary(plan);
  std::vector<std::vector<std::string>> rows;
  for (const auto& f : s["fragments"]) {
    std::string nodes;
    for (const auto& n : f["node_ids"]) nodes += (nodes.empty() ? "" : ",") + n.get<std::string>();
    rows.push_back({f["fragment_id"].get<std::string>(), f["kind"].get<std::string>(),
                    f["platform"].get<std::string>(), nodes});
  }
  return table({"FRAGMENT", "KIND", "PLATFORM", "NODES"}, rows) +
         "total cost: " + fmt(plan.assignment.total_cost) + " s\n";
}

json run_json(const RunResult& r) {
  json outputs = json::object();
  for (const auto& [k, v] : r.outputs) outputs[k] = v.str();
  json models = json::object();
  for (const auto& [k, v] : r.models) models[k] = v.str();
  return {{"run_id", r.run_id.str()},
          {"dataflow", r.dataflow.str()},
          {"status", run_status_name(r.status)},
          {"outputs", outputs},
          {"models", models},
          {"wall_time", r.wall_time},
          {"peak_live_tuples", r.peak_live_tuples}};
}

std::string run_text(const RunResult& r) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& [k, v] : r.outputs) rows.push_back({"dataset", k, v.str()});
  for (const auto& [k, v] : r.models) rows.push_back({"model", k, v.str()});
  return "run " + r.run_id.str() + " " + std::string(run_status_name(r.status)) + "\n" +
         table({"KIND", "NAME", "GID"}, rows);
}

DataflowGraph load_graph(const std::string& file) { return parse_dataflow(read_text_file(file)); }

DataflowGraph bind_if_needed(const DataflowGraph& g, const std::vector<std::string>& binds,
                             const std::vector<std::string>& params, const Catalog& catalog) {
  if (binds.empty() && params.empty()) return g;
  Params p;
  for (const auto& [k, v] : parse_pairs(params, "--param")) p[k] = parse_scalar(v);
  std::map<std::string, std::string> b = g.binding.value_or(std::map<std::string, std::string>{});
  for (const auto& [k, v] : parse_pairs(binds, "--bind")) b[k] = v;
  return gyp::bind(g, b, p, catalog, FunctionRegistry::with_builtins());
}

std::vector<int> parse_files_spec(const std::string& spec) {
  std::vector<int> out;
  auto c1 = spec.find(':');
  if (c1 == std::string::npos) {
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_int(item, "--files"));
  } else {
    auto c2 = spec.find(':', c1 + 1);
    int lo = parse_int(spec.substr(0, c1), "--files");
    int hi = parse_int(spec.substr(c1 + 1, c2 == std::string::npos ? std::string::npos : c2 - c1 - 1), "--files");
    int step = c2 == std::string::npos ? 1 : parse_int(spec.substr(c2 + 1), "--files");
    if (step < 1 || lo < 1 || hi < lo) fail(ErrorCode::BadArgument, "--files expects lo:hi:step, got '" + spec + "'");
    for (int n = lo; n <= hi; n += step) out.push_back(n);
  }
  if (out.empty()) fail(ErrorCode::BadArgument, "--files is empty");
  return out;
}

ExecutorKind parse_backend(const std::string& s) {
  auto k = parse_executor_kind(s);
  if (!k) fail(ErrorCode::BadArgument, "backend must be single or partitioned, got '" + s + "'");
  return *k;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dataflow management engine: catalog, optimize, schedule, run and query."};
  app.require_subcommand(1);
  std::optional<std::string> config_file, catalog_flag, default_platform_flag;
  bool as_json = false;
  app.add_option("--config", config_file, "JSON configuration file");
  app.add_option("--catalog", catalog_flag, "Catalog file (GYP_CATALOG)");
  app.add_option("--default-platform", default_platform_flag, "Home platform for literal paths");
  app.add_flag("--json", as_json, "Machine-readable output");

  // register / show / list
  auto* reg = app.add_subcommand("register", "Register an artifact and print its GID");
  std::string kind, name, domain, schema, platform, path, bucket = "landing", definition, version_of;
  std::vector<std::string> metas;
  reg->add_option("--kind", kind, "dataset, model, function or dataflow")->required();
  reg->add_option("--name", name, "Artifact name")->required();
  reg->add_option("--domain", domain, "Application domain");
  reg->add_option("--meta", metas, "Metadata entry key=value (repeatable)");
  reg->add_option("--schema", schema, "Dataset schema name:type,...");
  reg->add_option("--platform", platform, "Platform holding the dataset");
  reg->add_option("--path", path, "Dataset location under the platform storage root");
  reg->add_option("--bucket", bucket, "landing, staging or curated");
  reg->add_option("--definition", definition, "Dataflow document");
  reg->add_option("--version-of", version_of, "Previous version GID");

  auto* show = app.add_subcommand("show", "Print an artifact record");
  std::string show_gid;
  show->add_option("gid", show_gid)->required();

  auto* list = app.add_subcommand("list", "List artifacts");
  std::string list_kind;
  list->add_option("--kind", list_kind, "Only this kind");

  // platforms
  auto* plats = app.add_subcommand("platforms", "Manage the platform registry");
  plats->require_subcommand(1);
  auto* padd = plats->add_subcommand("add", "Register a platform");
  PlatformDescriptor pd;
  std::string executor = "single";
  padd->add_option("--id", pd.platform_id)->required();
  padd->add_option("--cores", pd.cpu_cores);
  padd->add_option("--gpus", pd.gpus);
  padd->add_option("--speed", pd.relative_speed);
  padd->add_option("--root", pd.storage_root)->required();
  padd->add_option("--executor", executor, "single or partitioned");
  auto* plist = plats->add_subcommand("list", "List platforms and bandwidths");
  auto* pbw = plats->add_subcommand("bandwidth", "Set the bandwidth between two platforms");
  std::string bw_from, bw_to;
  double bw_mbps = 0;
  pbw->add_option("from", bw_from)->required();
  pbw->add_option("to", bw_to)->required();
  pbw->add_option("mbps", bw_mbps)->required();
  auto* pload = plats->add_subcommand("load", "Register platforms and bandwidths from a registry file");
  std::string registry_file;
  pload->add_option("file", registry_file)->required();

  auto* promote = app.add_subcommand("promote", "Move a dataset to the next bucket");
  std::string promote_gid, promote_bucket;
  promote->add_option("gid", promote_gid)->required();
  promote->add_option("bucket", promote_bucket)->required();

  // optimize
  auto* opt = app.add_subcommand("optimize", "Rewrite a dataflow");
  std::string opt_in, opt_out, opt_trace;
  std::vector<std::string> binds, params;
  bool stats_from_prov = false, no_reorder = false, no_pushdown = false;
  opt->add_option("file", opt_in)->required();
  opt->add_option("-o,--output", opt_out, "Rewritten dataflow");
  opt->add_option("--trace", opt_trace, "Rewrite trace file");
  opt->add_option("--bind", binds, "placeholder=GID (repeatable)");
  opt->add_option("--param", params, "name=value (repeatable)");
  opt->add_flag("--stats-from-provenance", stats_from_prov, "Derive statistics from recorded runs");
  opt->add_flag("--no-reorder", no_reorder);
  opt->add_flag("--no-pushdown", no_pushdown);

  // schedule
  auto* sched = app.add_subcommand("schedule", "Fragment and assign a bound dataflow");
  std::string sched_in, sched_out, sched_registry;
  bool exhaustive = false;
  int gpus = 1;
  sched->add_option("file", sched_in)->required();
  sched->add_option("-o,--output", sched_out, "Plan file");
  sched->add_option("--platforms", sched_registry, "Registry file (default: catalog platforms)");
  sched->add_flag("--exhaustive", exhaustive, "Enumerate every placement");
  sched->add_option("--gpus", gpus, "GPUs a train node needs by default");

  // run
  auto* run = app.add_subcommand("run", "Execute a scheduled plan");
  std::string run_in, backend;
  std::optional<int> workers_flag;
  run->add_option("file", run_in)->required();
  run->add_option("--backend", backend, "single or partitioned (default: per platform)");
  run->add_option("--workers", workers_flag, "Partitioned backend workers (GYP_WORKERS)");

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "Bind, optimize, schedule and run a dataflow");
  std::string pipe_in;
  pipe->add_option("file", pipe_in)->required();
  pipe->add_option("--bind", binds, "placeholder=GID (repeatable)");
  pipe->add_option("--param", params, "name=value (repeatable)");
  pipe->add_option("--platforms", sched_registry, "Registry file (default: catalog platforms)");
  pipe->add_flag("--exhaustive", exhaustive);
  pipe->add_option("--gpus", gpus);
  pipe->add_option("--backend", backend);
  pipe->add_option("--workers", workers_flag);
  pipe->add_flag("--no-reorder", no_reorder);
  pipe->add_flag("--no-pushdown", no_pushdown);

  // knowledge graph
  auto* kg = app.add_subcommand("kg", "Knowledge graph");
  kg->require_subcommand(1);
  auto* kg_eval = kg->add_subcommand("eval", "Evaluate rules over the catalog and provenance");
  std::string rules_file, query_text;
  bool dump = false;
  kg_eval->add_option("rules", rules_file, "Extra rules");
  kg_eval->add_flag("--dump", dump, "Print every fact");
  auto* kg_query = kg->add_subcommand("query", "Answer a query");
  kg_query->add_option("query", query_text)->required();
  kg_query->add_option("--rules", rules_file, "Extra rules");

  // provenance
  auto* prov = app.add_subcommand("prov", "Provenance");
  prov->require_subcommand(1);
  auto* prov_export = prov->add_subcommand("export", "PROV-JSON document for an artifact");
  std::string prov_gid, prov_out, prov_alias;
  prov_export->add_option("gid", prov_gid)->required();
  prov_export->add_option("-o,--output", prov_out);
  auto* prov_stats = prov->add_subcommand("stats", "Operator statistics of a function alias");
  prov_stats->add_option("alias", prov_alias)->required();
  auto* prov_lineage = prov->add_subcommand("lineage", "Upstream artifacts");
  prov_lineage->add_option("gid", prov_gid)->required();

  // models
  auto* models = app.add_subcommand("models", "Model registry");
  models->require_subcommand(1);
  auto* msel = models->add_subcommand("select", "Rank models by metadata similarity");
  std::string task, mdomain, mschema;
  int top_k = 3;
  msel->add_option("--task", task)->required();
  msel->add_option("--domain", mdomain);
  msel->add_option("--schema", mschema);
  msel->add_option("-k", top_k);

  auto* classify = app.add_subcommand("classify-change", "Classify a change to a model");
  std::string classify_gid, flags_text;
  classify->add_option("gid", classify_gid)->required();
  classify->add_option("--flags", flags_text)->required();

  auto* bench = app.add_subcommand("bench", "Scaling benchmark on synthetic radar files");
  std::string files_spec = "10:70:10", bench_out, bench_summary_file, bench_dir;
  int bench_rows = 10000, reps = 5;
  std::uint64_t seed = 42;
  bench->add_option("--files", files_spec, "lo:hi:step or a,b,c");
  bench->add_option("--rows", bench_rows);
  bench->add_option("--reps", reps);
  bench->add_option("--workers", workers_flag);
  bench->add_option("--seed", seed);
  bench->add_option("--dir", bench_dir, "Where synthetic files go");
  bench->add_option("-o,--output", bench_out, "Measurements CSV");
  bench->add_option("--summary", bench_summary_file, "Summary JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  Cli cli{out, err, as_json, {}};
  try {
    cli.config = load_config(config_file ? std::optional<fs::path>(*config_file) : std::nullopt,
                             {catalog_flag, default_platform_flag, workers_flag});
    const Config& cfg = cli.config;
    RewriteOptions rewrite_options{cfg.reorder && !no_reorder, cfg.pushdown && !no_pushdown};

    if (reg->parsed()) {
      auto k = parse_artifact_kind(kind);
      if (!k) fail(ErrorCode::BadArgument, "unknown kind '" + kind + "'");
      ArtifactRecord r;
      r.kind = *k;
      r.name = name;
      r.domain = domain;
      for (const auto& [key, v] : parse_pairs(metas, "--meta")) r.metadata[key] = parse_scalar(v);
      if (!schema.empty() || !path.empty() || !platform.empty()) {
        auto b = parse_bucket(bucket);
        if (!b) fail(ErrorCode::BadArgument, "unknown bucket '" + bucket + "'");
        r.dataset = DatasetInfo{schema.empty() ? Schema() : Schema::parse(schema), "csv", *b, platform, path};
      }
      if (!definition.empty()) r.definition = json::parse(read_text_file(definition), nullptr, false);
      if (!definition.empty() && r.definition.is_discarded()) fail(ErrorCode::MalformedJson, definition);
      if (!version_of.empty()) r.version_of = Gid::from_string(version_of);
      Catalog catalog = cli.open_catalog();
      Gid gid = catalog.register_artifact(r);
      auto rec = catalog.get(gid);
      cli.emit({{"gid", gid.str()}, {"version", rec.version}}, gid.str() + "\n");
    } else if (show->parsed()) {
      Catalog catalog = cli.open_catalog();
      json j = artifact_to_json(catalog.get(Gid::from_string(show_gid)));
      out << j.dump(2) << '\n';
    } else if (list->parsed()) {
      Catalog catalog = cli.open_catalog();
      std::optional<ArtifactKind> k;
      if (!list_kind.empty()) {
        k = parse_artifact_kind(list_kind);
        if (!k) fail(ErrorCode::BadArgument, "unknown kind '" + list_kind + "'");
      }
      json arr = json::array();
      std::vector<std::vector<std::string>> rows;
      for (const auto& a : catalog.artifacts(k)) {
        arr.push_back(artifact_to_json(a));
        rows.push_back({a.gid.str(), std::string(artifact_kind_name(a.kind)), a.name, std::to_string(a.version),
                        a.domain});
      }
      cli.emit(arr, table({"GID", "KIND", "NAME", "VERSION", "DOMAIN"}, rows));
    } else if (padd->parsed()) {
      auto e = parse_executor_kind(executor);
      if (!e) fail(ErrorCode::BadArgument, "executor must be single or partitioned");
      pd.executor_kind = *e;
      Catalog catalog = cli.open_catalog();
      catalog.register_platform(pd);
      cli.emit(platform_to_json(pd), pd.platform_id + "\n");
    } else if (plist->parsed()) {
      Catalog catalog = cli.open_catalog();
      json arr = json::array();
      std::vector<std::vector<std::string>> rows;
      for (const auto& p : catalog.platforms()) {
        arr.push_back(platform_to_json(p));
        rows.push_back({p.platform_id, std::to_string(p.cpu_cores), std::to_string(p.gpus), fmt(p.relative_speed),
                        std::string(executor_kind_name(p.executor_kind)), p.storage_root});
      }
      json bw = json::array();
      std::vector<std::vector<std::string>> bw_rows;
      BandwidthMatrix matrix = catalog.bandwidth();
      for (const auto& [k, v] : matrix.entries()) {
        bw.push_back({{"from", k.first}, {"to", k.second}, {"mbps", v}});
        bw_rows.push_back({k.first, k.second, fmt(v)});
      }
      cli.emit({{"platforms", arr}, {"bandwidth", bw}},
               table({"PLATFORM", "CORES", "GPUS", "SPEED", "EXECUTOR", "ROOT"}, rows) +
                   (bw_rows.empty() ? "" : "\n" + table({"FROM", "TO", "MBPS"}, bw_rows)));
    } else if (pbw->parsed()) {
      Catalog catalog = cli.open_catalog();
      catalog.set_bandwidth(bw_from, bw_to, bw_mbps);
      cli.emit({{"from", bw_from}, {"to", bw_to}, {"mbps", bw_mbps}}, "ok\n");
    } else if (pload->parsed()) {
      Registry r = read_registry(registry_file);
      Catalog catalog = cli.open_catalog();
      int added = 0;
      for (const auto& p : r.platforms) {
        auto existing = catalog.platform(p.platform_id);
        if (existing && *existing == p) continue;
        catalog.register_platform(p);
        ++added;
      }
      for (const auto& [k, v] : r.bandwidth.entries()) catalog.set_bandwidth(k.first, k.second, v);
      cli.emit({{"platforms_added", added}, {"bandwidth_entries", r.bandwidth.entries().size()}},
               std::to_string(added) + " platform(s), " + std::to_string(r.bandwidth.entries().size()) +
                   " bandwidth entr" + (r.bandwidth.entries().size() == 1 ? "y" : "ies") + "\n");
    } else if (promote->parsed()) {
      auto b = parse_bucket(promote_bucket);
      if (!b) fail(ErrorCode::BadArgument, "unknown bucket '" + promote_bucket + "'");
      Catalog catalog = cli.open_catalog();
      auto rec = catalog.promote_dataset(Gid::from_string(promote_gid), *b);
      cli.emit({{"gid", rec.gid.str()}, {"bucket", bucket_name(rec.dataset->bucket)}},
               rec.gid.str() + " " + std::string(bucket_name(rec.dataset->bucket)) + "\n");
    } else if (opt->parsed()) {
      Catalog catalog = cli.open_catalog();
      DataflowGraph g = bind_if_needed(load_graph(opt_in), binds, params, catalog);
      FunctionRegistry registry = FunctionRegistry::with_builtins();
      ProvenanceStore store(catalog, cli.defaults());
      FixedStats fixed(cfg.selectivity, cfg.cost_per_tuple);
      const StatsProvider& stats = stats_from_prov ? static_cast<const StatsProvider&>(store) : fixed;
      RewriteResult r = rewrite(g, annotate(g, stats, registry), registry, rewrite_options);
      std::string doc = serialize_dataflow(r.graph);
      if (!opt_trace.empty()) write_text_file(opt_trace, rewrite_trace_to_json(r.trace).dump(2) + "\n");
      if (!opt_out.empty()) write_text_file(opt_out, doc + "\n");
      if (as_json) {
        out << json{{"steps", rewrite_trace_to_json(r.trace)}, {"output", opt_out}}.dump(2) << '\n';
      } else if (opt_out.empty()) {
        out << doc << '\n';
      } else {
        out << r.trace.steps.size() << " rewrite(s); wrote " << opt_out << '\n';
      }
    } else if (sched->parsed()) {
      Catalog catalog = cli.open_catalog();
      DataflowGraph g = load_graph(sched_in);
      ProvenanceStore store(catalog, cli.defaults());
      PlanRequest req;
      req.registry = sched_registry.empty() ? catalog_registry(catalog) : read_registry(sched_registry);
      req.exhaustive = exhaustive;
      req.fragment_options.gpu_required = gpus;
      req.fragment_options.default_platform = cfg.default_platform;
      ScheduledPlan plan = plan_dataflow(g, catalog, store, req);
      json j = plan_to_json(plan);
      if (!sched_out.empty()) write_text_file(sched_out, j.dump(2) + "\n");
      if (as_json) out << (sched_out.empty() ? j : plan_summary(plan)).dump(2) << '\n';
      else out << plan_text(plan);
    } else if (run->parsed()) {
      Catalog catalog = cli.open_catalog();
      ProvenanceStore store(catalog, cli.defaults());
      ScheduledPlan plan = plan_from_json(read_json_file(run_in));
      RunOptions ro;
      if (!backend.empty()) ro.backend = parse_backend(backend);
      ro.workers = cfg.workers;
      RunResult r = run_plan(plan, catalog, store, ro);
      cli.emit(run_json(r), run_text(r));
    } else if (pipe->parsed()) {
      Catalog catalog = cli.open_catalog();
      ProvenanceStore store(catalog, cli.defaults());
      FunctionRegistry registry = FunctionRegistry::with_builtins();
      DataflowGraph g = bind_if_needed(load_graph(pipe_in), binds, params, catalog);
      RewriteResult rw = rewrite(g, annotate(g, store, registry), registry, rewrite_options);
      PlanRequest req;
      req.registry = sched_registry.empty() ? catalog_registry(catalog) : read_registry(sched_registry);
      req.exhaustive = exhaustive;
      req.fragment_options.gpu_required = gpus;
      req.fragment_options.default_platform = cfg.default_platform;
      ScheduledPlan plan = plan_dataflow(rw.graph, catalog, store, req);
      RunOptions ro;
      if (!backend.empty()) ro.backend = parse_backend(backend);
      ro.workers = cfg.workers;
      RunResult r = run_plan(plan, catalog, store, ro);
      json j = run_json(r);
      j["plan"] = plan_summary(plan);
      j["rewrites"] = rewrite_trace_to_json(rw.trace);
      cli.emit(j, plan_text(plan) + run_text(r));
    } else if (kg_eval->parsed() || kg_query->parsed()) {
      Catalog catalog = cli.open_catalog();
      ProvenanceStore store(catalog, cli.defaults());
      FactBase base = build_facts(catalog, store);
      Program program = parse_program(default_rules());
      if (!rules_file.empty()) {
        Program extra = parse_program(read_text_file(rules_file));
        program.rules.insert(program.rules.end(), extra.rules.begin(), extra.rules.end());
        for (const auto& f : extra.facts) {
          std::vector<std::string> args;
          for (const auto& t : f.terms) args.push_back(t.text);
          base.declare(f.predicate, args.size());
          base.add(f.predicate, args);
        }
      }
      FactBase closed = evaluate(base, program.rules);
      if (kg_eval->parsed()) {
        json counts = json::object();
        for (const auto& p : closed.predicates()) counts[p] = closed.facts(p).size();
        json j = {{"facts", closed.size()}, {"derived", closed.derived_count()}, {"predicates", counts}};
        std::string human = std::to_string(closed.size()) + " facts (" + std::to_string(closed.derived_count()) +
                            " derived)\n";
        if (dump) {
          j["text"] = closed.str();
          human += closed.str();
        }
        cli.emit(j, human);
      } else {
        QueryResult q = query(closed, parse_query(query_text));
        json rows = json::array();
        for (const auto& r : q.rows) {
          json o = json::object();
          for (std::size_t i = 0; i < q.variables.size(); ++i) o[q.variables[i]] = r[i];
          rows.push_back(o);
        }
        std::string human = q.variables.empty() ? (q.rows.empty() ? "false\n" : "true\n")
                                                : table(q.variables, q.rows);
        cli.emit({{"variables", q.variables}, {"rows", rows}}, human);
      }
    } else if (prov_export->parsed()) {
      Catalog catalog = cli.open_catalog();
      ProvenanceStore store(catalog, cli.defaults());
      json doc = store.export_prov(Gid::from_string(prov_gid));
      if (!prov_out.empty()) {
        write_text_file(prov_out, doc.dump(2) + "\n");
        cli.emit({{"output", prov_out}}, "wrote " + prov_out + "\n");
      } else {
        out << doc.dump(2) << '\n';
      }
    } else if (prov_stats->parsed()) {
      Catalog catalog = cli.open_catalog();
      ProvenanceStore store(catalog, cli.defaults());
      OperatorStats s = store.derive_stats(prov_alias);
      json per = s.per_platform;
      cli.emit({{"function_alias", s.function_alias},
                {"mean_selectivity", s.mean_selectivity},
                {"mean_cost_per_tuple", s.mean_cost_per_tuple},
                {"sample_count", s.sample_count},
                {"per_platform", per}},
               table({"ALIAS", "SELECTIVITY", "COST/TUPLE", "SAMPLES"},
                     {{s.function_alias, fmt(s.mean_selectivity), fmt(s.mean_cost_per_tuple),
                       std::to_string(s.sample_count)}}));
    } else if (prov_lineage->parsed()) {
      Catalog catalog = cli.open_catalog();
      ProvenanceStore store(catalog, cli.defaults());
      json arr = json::array();
      std::string human;
      for (const auto& g : store.lineage(Gid::from_string(prov_gid))) {
        arr.push_back(g.str());
        human += g.str() + "\n";
      }
      cli.emit(arr, human);
    } else if (msel->parsed()) {
      Catalog catalog = cli.open_catalog();
      ModelQuery q{task, mdomain, mschema.empty() ? Schema() : Schema::parse(mschema)};
      json arr = json::array();
      std::vector<std::vector<std::string>> rows;
      for (const auto& m : catalog.select_models(q, top_k)) {
        arr.push_back({{"gid", m.gid.str()}, {"score", m.score}});
        rows.push_back({m.gid.str(), fmt(m.score)});
      }
      cli.emit(arr, table({"MODEL", "SCORE"}, rows));
    } else if (classify->parsed()) {
      Catalog catalog = cli.open_catalog();
      ChangeClass c = catalog.classify_change(Gid::from_string(classify_gid), ChangeSet::parse(flags_text));
      cli.emit({{"gid", classify_gid}, {"class", change_class_name(c)}}, std::string(change_class_name(c)) + "\n");
    } else if (bench->parsed()) {
      BenchOptions bo;
      bo.files = parse_files_spec(files_spec);
      bo.rows_per_file = bench_rows;
      bo.repetitions = reps;
      bo.workers = workers_flag ? cfg.workers : (cfg.workers > 0 ? cfg.workers : 8);
      bo.seed = seed;
      if (!bench_dir.empty()) bo.work_dir = bench_dir;
      BenchReport report = run_benchmark(bo);
      std::string csv = bench_csv(report);
      json summary = bench_summary(report);
      if (!bench_out.empty()) write_text_file(bench_out, csv);
      if (!bench_summary_file.empty()) write_text_file(bench_summary_file, summary.dump(2) + "\n");
      std::string human = csv;
      for (const auto& [k, f] : report.fits) {
        human += k + ": slope " + fmt(f.slope) + " s/file, r2 " + fmt(f.r2) + "\n";
      }
      cli.emit(summary, human);
    }
  } catch (const Error& e) {
    err << "error: " << error_code_name(e.code()) << ": " << e.detail() << '\n';
    return is_user_error(e.code()) ? 1 : 2;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace gyp
