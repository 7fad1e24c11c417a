/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include "support/random_dataflow.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gyp/common/error.hpp"
#include "json.hpp"

namespace gyp::testing {

using nlohmann::json;

namespace {

struct Stream {
  std::string connector;
  std::vector<Attribute> attrs;
  unsigned origin = 0;  // bit per source
};

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(v.size()) - 1))];
}

std::vector<const Attribute*> columns_of(const Stream& s, std::initializer_list<AttrType> types, bool with_key) {
  std::vector<const Attribute*> out;
  for (const auto& a : s.attrs) {
    if (!with_key && a.name == "k") continue;
    if (std::find(types.begin(), types.end(), a.type) != types.end()) out.push_back(&a);
  }
  return out;
}

std::string predicate_on(std::mt19937_64& rng, const Attribute& a) {
  switch (a.type) {
    case AttrType::Int64: {
      static const char* ops[] = {"<", ">=", "!=", "<="};
      return a.name + " " + ops[uniform(rng, 0, 3)] + " " + std::to_string(uniform(rng, 0, 99));
    }
    case AttrType::Float64: {
      static const char* ops[] = {">", "<"};
      return a.name + " " + ops[uniform(rng, 0, 1)] + " " + format_value(uniform(rng, 0, 20) / 10.0);
    }
    default: {
      static const char* ops[] = {"!=", "="};
      return a.name + " " + ops[uniform(rng, 0, 1)] + " 'v" + std::to_string(uniform(rng, 0, 5)) + "'";
    }
  }
}

}  // namespace

Table random_table(std::mt19937_64& rng, const Schema& schema, int rows, int key_range) {
  Table t{schema, {}};
  t.rows.reserve(static_cast<std::size_t>(rows));
  for (int r = 0; r < rows; ++r) {
    Row row;
    for (const auto& a : schema.attributes()) {
      switch (a.type) {
        case AttrType::Int64:
          row.push_back(static_cast<std::int64_t>(a.name == "k" ? uniform(rng, 0, key_range - 1) : uniform(rng, 0, 99)));
          break;
        case AttrType::Float64: row.push_back(uniform(rng, 0, 999) / 1000.0); break;
        case AttrType::Bool: row.push_back(chance(rng, 0.5)); break;
        case AttrType::Timestamp: row.push_back(Timestamp{uniform(rng, 0, 1 << 30)}); break;
        case AttrType::String: row.push_back("v" + std::to_string(uniform(rng, 0, 5))); break;
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

RandomDataflow random_dataflow(std::mt19937_64& rng, const RandomDataflowOptions& options) {
  RandomDataflow out;
  json doc = json::array();
  doc.push_back({{"GID", "random"}, {"description", "random dataflow"}});
  int nodes = 0;
  int next_name = 0;
  auto fresh = [&](const std::string& prefix) { return prefix + std::to_string(++next_name); };

  int n_sources = chance(rng, 0.4) ? 2 : 1;
  int key_range = n_sources == 2 ? 50 : uniform(rng, 5, 200);
  int row_cap = n_sources == 2 ? options.max_join_rows : options.max_rows;
  std::vector<Stream> open;
  const Schema source_schemas[2] = {Schema::parse("k:int64,a:int64,b:float64,s:string"),
                                    Schema::parse("k:int64,x:int64,y:float64,t:string")};
  for (int i = 0; i < n_sources; ++i) {
    std::string c = "src" + std::to_string(i + 1);
    doc.push_back({{"node_id", "read" + std::to_string(i + 1)},
                   {"operator", "source"},
                   {"input", {"in" + std::to_string(i + 1)}},
                   {"output", {c}},
                   {"params", {{"schema", source_schemas[i].str()}}}});
    ++nodes;
    out.inputs[c] = random_table(rng, source_schemas[i], uniform(rng, 0, row_cap), key_range);
    open.push_back({c, source_schemas[i].attributes(), 1u << i});
  }

  int target = uniform(rng, nodes + 2, options.max_nodes);
  for (int attempt = 0; attempt < 64 && nodes + static_cast<int>(open.size()) < target; ++attempt) {
    std::size_t si = static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(open.size()) - 1));
    Stream in = open[si];
    bool fan_out = chance(rng, 0.15);
    int budget_after = nodes + 1 + static_cast<int>(open.size()) + (fan_out ? 1 : 0);
    if (budget_after > options.max_nodes) fan_out = false;
    if (nodes + 1 + static_cast<int>(open.size()) > options.max_nodes) break;

    std::string id = fresh("n");
    std::string c = fresh("c");
    json node = {{"node_id", id}, {"input", {in.connector}}, {"output", {c}}};
    Stream result{c, in.attrs, in.origin};
    int kind = uniform(rng, 0, 9);

    // join needs a partner stream from another source with disjoint columns
    if (kind == 9) {
      std::vector<std::size_t> partners;
      for (std::size_t j = 0; j < open.size(); ++j) {
        if (j == si || (open[j].origin & in.origin) != 0) continue;
        std::set<std::string> names;
        for (const auto& a : in.attrs) names.insert(a.name);
        bool clash = false;
        for (const auto& a : open[j].attrs) clash |= a.name != "k" && names.count(a.name) > 0;
        if (!clash) partners.push_back(j);
      }
      if (partners.empty()) {
        kind = 0;
      } else {
        std::size_t pj = pick(rng, partners);
        const Stream& other = open[pj];
        node["operator"] = "join";
        node["input"] = {in.connector, other.connector};
        node["params"] = {{"keys", "k"}};
        for (const auto& a : other.attrs) {
          if (a.name != "k") result.attrs.push_back(a);
        }
        result.origin |= other.origin;
        std::string pc = other.connector;
        open.erase(std::remove_if(open.begin(), open.end(),
                                  [&](const Stream& s) { return s.connector == pc || s.connector == in.connector; }),
                   open.end());
        open.push_back(result);
        doc.push_back(node);
        ++nodes;
        continue;
      }
    }

    if (kind <= 3) {
      auto cols = columns_of(in, {AttrType::Int64, AttrType::Float64, AttrType::String}, true);
      std::string p = predicate_on(rng, *pick(rng, cols));
      if (chance(rng, 0.25)) p += (chance(rng, 0.5) ? " and " : " or ") + predicate_on(rng, *pick(rng, cols));
      node["operator"] = "filter";
      node["params"] = {{"predicate", p}};
    } else if (kind <= 5) {
      auto cols = columns_of(in, {AttrType::Int64, AttrType::Float64}, true);
      const Attribute& a = *pick(rng, cols);
      std::string name = fresh("m");
      std::string expr = chance(rng, 0.5) ? a.name + " + " + std::to_string(uniform(rng, 1, 9))
                                          : a.name + " * " + std::to_string(uniform(rng, 2, 3));
      node["operator"] = "map";
      node["params"] = {{"assign", name + " = " + expr}};
      result.attrs.push_back({name, a.type});
    } else if (kind == 6) {
      auto cols = columns_of(in, {AttrType::Int64}, false);
      if (cols.empty()) {
        node["operator"] = "dedup";
        node["params"] = {{"keys", "k"}};
      } else {
        const Attribute* a = pick(rng, cols);
        AttrType to = chance(rng, 0.5) ? AttrType::Float64 : AttrType::String;
        node["operator"] = "cast";
        node["params"] = {{"columns", a->name + ":" + std::string(type_name(to))}};
        for (auto& r : result.attrs) {
          if (r.name == a->name) r.type = to;
        }
      }
    } else if (kind == 7) {
      std::vector<std::string> keys{"k"};
      for (const auto& a : in.attrs) {
        if (a.name != "k" && chance(rng, 0.3)) keys.push_back(a.name);
      }
      std::string text;
      for (const auto& k : keys) text += (text.empty() ? "" : ", ") + k;
      node["operator"] = "dedup";
      node["params"] = {{"keys", text}};
    } else {
      std::vector<Attribute> attrs;
      std::string keys = "k";
      attrs.push_back({"k", AttrType::Int64});
      // A key may not share a name with an aggregate output.
      auto strings = columns_of(in, {AttrType::String}, false);
      std::erase_if(strings, [](const Attribute* a) { return a->name == "count" || a->name.find('_') != std::string::npos; });
      if (!strings.empty() && chance(rng, 0.3)) {
        keys += ", " + strings.front()->name;
        attrs.push_back(*strings.front());
      }
      std::string aggs = "count:*";
      attrs.push_back({"count", AttrType::Int64});
      std::set<std::string> used{"count"};
      for (const Attribute* a : columns_of(in, {AttrType::Int64, AttrType::Float64}, false)) {
        if (!chance(rng, 0.6)) continue;
        static const AggFn fns[] = {AggFn::Sum, AggFn::Mean, AggFn::Min, AggFn::Max};
        AggFn fn = fns[uniform(rng, 0, 3)];
        std::string output = std::string(agg_name(fn)) + "_" + a->name;
        if (!used.insert(output).second) continue;
        aggs += "," + std::string(agg_name(fn)) + ":" + a->name;
        attrs.push_back({output, fn == AggFn::Mean ? AttrType::Float64 : a->type});
      }
      node["operator"] = "groupby";
      node["params"] = {{"keys", keys}, {"aggs", aggs}};
      result.attrs = attrs;
    }
    if (!fan_out) open.erase(open.begin() + static_cast<std::ptrdiff_t>(si));
    open.push_back(result);
    doc.push_back(node);
    ++nodes;
  }

  int sink = 0;
  for (const auto& s : open) {
    ++sink;
    doc.push_back({{"node_id", "sink" + std::to_string(sink)},
                   {"operator", "sink"},
                   {"input", {s.connector, "out" + std::to_string(sink)}},
                   {"output", nullptr}});
  }
  out.sinks = static_cast<std::size_t>(sink);
  out.graph = dataflow_from_json(doc);
  ValidationReport report = validate(out.graph, FunctionRegistry::with_builtins());
  if (!report.ok()) fail(ErrorCode::InvalidGraph, "generator produced an invalid dataflow:\n" + report.str());
  return out;
}

Annotations random_annotations(std::mt19937_64& rng, const DataflowGraph& graph) {
  FixedStats fixed;
  Annotations a = annotate(graph, fixed, FunctionRegistry::with_builtins());
  std::uniform_real_distribution<double> sel(0.05, 1.5);
  std::uniform_real_distribution<double> cost(-7.0, -5.0);
  for (auto& [id, ann] : a) {
    ann.selectivity = sel(rng);
    ann.cost_per_tuple = std::pow(10.0, cost(rng));
    ann.rank = operator_rank(ann.selectivity, ann.cost_per_tuple);
  }
  return a;
}

std::vector<std::pair<int, int>> random_dag_edges(std::mt19937_64& rng, int n, double density) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (chance(rng, density)) edges.emplace_back(i, j);
    }
  }
  return edges;
}

}  // namespace gyp::testing

namespace gyp::testing {

CostModel SchedulingInstance::cost_model() const {
  CostModel m;
  m.graph = &graph;
  m.platforms = platforms;
  m.bandwidth = bandwidth;
  m.annotations = annotations;
  m.placements = placements;
  m.dataset_rows = dataset_rows;
  m.estimates = estimate_cardinalities(graph, annotations, dataset_rows);
  return m;
}

SchedulingInstance random_scheduling_instance(std::mt19937_64& rng, int max_platforms) {
  SchedulingInstance inst;
  int n_platforms = uniform(rng, 2, std::max(2, max_platforms));
  std::uniform_real_distribution<double> speed(0.5, 4.0);
  std::uniform_real_distribution<double> log_mbps(1.0, 3.0);
  for (int i = 0; i < n_platforms; ++i) {
    PlatformDescriptor p;
    p.platform_id = "p" + std::to_string(i + 1);
    p.cpu_cores = uniform(rng, 1, 32);
    p.gpus = i + 1 == n_platforms ? 1 : uniform(rng, 0, 1);
    p.relative_speed = speed(rng);
    p.storage_root = "/tmp/" + p.platform_id;
    inst.platforms.push_back(p);
  }
  for (const auto& a : inst.platforms) {
    for (const auto& b : inst.platforms) {
      if (a.platform_id != b.platform_id) inst.bandwidth.set(a.platform_id, b.platform_id, std::pow(10.0, log_mbps(rng)));
    }
  }

  json doc = json::array();
  doc.push_back({{"GID", "placement"}, {"description", "random placement instance"}});
  std::map<std::string, std::string> binding;
  struct Open {
    std::string connector;
    std::vector<std::string> ints;
    std::vector<std::string> floats;
  };
  std::vector<Open> open;
  int n_sources = uniform(rng, 1, 4);
  int next = 0;
  GidGenerator gids(rng());
  auto add_unary = [&](Open& s) {
    std::string id = "u" + std::to_string(++next);
    std::string c = "c" + std::to_string(next);
    if (chance(rng, 0.5)) {
      doc.push_back({{"node_id", id}, {"operator", "filter"}, {"input", {s.connector}}, {"output", {c}},
                     {"params", {{"predicate", s.ints.front() + " < " + std::to_string(uniform(rng, 1, 99))}}}});
    } else {
      std::string m = "m" + std::to_string(next);
      doc.push_back({{"node_id", id}, {"operator", "map"}, {"input", {s.connector}}, {"output", {c}},
                     {"params", {{"assign", m + " = " + s.floats.front() + " * 2"}}}});
      s.floats.push_back(m);
    }
    s.connector = c;
  };
  for (int i = 1; i <= n_sources; ++i) {
    std::string in = "in" + std::to_string(i);
    std::string c = "s" + std::to_string(i);
    std::string a = "a" + std::to_string(i), b = "b" + std::to_string(i);
    doc.push_back({{"node_id", "read" + std::to_string(i)}, {"operator", "source"}, {"input", {in}},
                   {"output", {c}}, {"params", {{"schema", "k:int64," + a + ":int64," + b + ":float64"}}}});
    std::string gid = gids.next().str();
    binding[in] = gid;
    inst.placements.home[gid] = pick(rng, inst.platforms).platform_id;
    if (chance(rng, 0.2)) inst.placements.replicas[gid].insert(pick(rng, inst.platforms).platform_id);
    inst.dataset_rows[gid] = std::pow(10.0, std::uniform_real_distribution<double>(3.0, 6.0)(rng));
    Open s{c, {a}, {b}};
    for (int u = uniform(rng, 0, 2); u > 0; --u) add_unary(s);
    open.push_back(s);
  }
  while (open.size() > 1 && chance(rng, 0.8)) {
    std::shuffle(open.begin(), open.end(), rng);
    Open l = open.back();
    open.pop_back();
    Open r = open.back();
    open.pop_back();
    std::string id = "j" + std::to_string(++next);
    std::string c = "c" + std::to_string(next);
    doc.push_back({{"node_id", id}, {"operator", "join"}, {"input", {l.connector, r.connector}}, {"output", {c}},
                   {"params", {{"keys", "k"}}}});
    Open j{c, l.ints, l.floats};
    j.ints.insert(j.ints.end(), r.ints.begin(), r.ints.end());
    j.floats.insert(j.floats.end(), r.floats.begin(), r.floats.end());
    if (chance(rng, 0.5)) add_unary(j);
    open.push_back(j);
  }
  int sink = 0;
  for (const auto& s : open) {
    std::string out = "out" + std::to_string(++sink);
    binding[out] = out;
    if (chance(rng, 0.3)) {
      std::string model = "model" + std::to_string(sink);
      doc.push_back({{"node_id", "train" + std::to_string(sink)}, {"operator", "train"}, {"input", {s.connector}},
                     {"output", {model}},
                     {"params", {{"features", s.ints.front()}, {"target", s.floats.front()}, {"gpus", uniform(rng, 0, 1)}}}});
      continue;
    }
    doc.push_back({{"node_id", "sink" + std::to_string(sink)}, {"operator", "sink"}, {"input", {s.connector, out}},
                   {"output", nullptr}});
  }
  inst.graph = dataflow_from_json(doc);
  inst.graph.binding = binding;
  inst.graph.connector_types =
      propagate_schemas(inst.graph, FunctionRegistry::with_builtins(), {}).connectors;
  inst.annotations = random_annotations(rng, inst.graph);
  return inst;
}

}  // namespace gyp::testing
