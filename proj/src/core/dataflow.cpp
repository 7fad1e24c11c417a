/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include "gyp/core/dataflow.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <sstream>

#include "gyp/common/error.hpp"
#include "gyp/core/expr.hpp"

namespace gyp {

using nlohmann::json;

std::string_view artifact_kind_name(ArtifactKind kind) {
  switch (kind) {
    case ArtifactKind::Dataset: return "dataset";
    case ArtifactKind::Model: return "model";
    case ArtifactKind::Function: return "function";
    case ArtifactKind::Dataflow: return "dataflow";
  }
  return "?";
}

std::optional<ArtifactKind> parse_artifact_kind(std::string_view name) {
  if (name == "dataset") return ArtifactKind::Dataset;
  if (name == "model") return ArtifactKind::Model;
  if (name == "function") return ArtifactKind::Function;
  if (name == "dataflow") return ArtifactKind::Dataflow;
  return std::nullopt;
}

Schema training_metrics_schema() {
  return Schema({{"rmse", AttrType::Float64}, {"n_rows", AttrType::Int64}});
}

std::optional<std::string> OperatorNode::param_string(std::string_view name) const {
  auto it = params.find(std::string(name));
  if (it == params.end()) return std::nullopt;
  if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
  return format_value(it->second);
}

const OperatorNode* DataflowGraph::find(std::string_view node_id) const {
  for (const auto& n : nodes) {
    if (n.node_id == node_id) return &n;
  }
  return nullptr;
}

OperatorNode* DataflowGraph::find(std::string_view node_id) {
  for (auto& n : nodes) {
    if (n.node_id == node_id) return &n;
  }
  return nullptr;
}

const OperatorNode* DataflowGraph::producer_of(std::string_view connector) const {
  for (const auto& n : nodes) {
    if (std::find(n.outputs.begin(), n.outputs.end(), connector) != n.outputs.end()) return &n;
  }
  return nullptr;
}

std::vector<const OperatorNode*> DataflowGraph::consumers_of(std::string_view connector) const {
  std::vector<const OperatorNode*> out;
  for (const auto& n : nodes) {
    if (std::find(n.inputs.begin(), n.inputs.end(), connector) != n.inputs.end()) out.push_back(&n);
  }
  return out;
}

std::set<std::string> DataflowGraph::placeholders() const {
  std::set<std::string> out;
  for (const auto& n : nodes) {
    if (n.op == OperatorKind::Source) {
      for (const auto& in : n.inputs) {
        if (!producer_of(in)) out.insert(in);
      }
    } else if (n.op == OperatorKind::Sink) {
      if (auto t = sink_target(n)) out.insert(*t);
    }
  }
  return out;
}

std::vector<std::string> DataflowGraph::data_inputs(const OperatorNode& node) const {
  if (node.op == OperatorKind::Source) return {};
  if (node.op != OperatorKind::Sink) return node.inputs;
  std::vector<std::string> out;
  for (const auto& in : node.inputs) {
    if (producer_of(in)) out.push_back(in);
  }
  return out;
}

std::optional<std::string> DataflowGraph::sink_target(const OperatorNode& node) const {
  if (node.op != OperatorKind::Sink) return std::nullopt;
  for (const auto& in : node.inputs) {
    if (!producer_of(in)) return in;
  }
  return std::nullopt;
}

void DataflowGraph::rebuild_edges() {
  std::map<std::string, std::string> producer;
  for (const auto& n : nodes) {
    for (const auto& out : n.outputs) {
      auto [it, inserted] = producer.emplace(out, n.node_id);
      if (!inserted) {
        fail(ErrorCode::DanglingConnector,
             "connector '" + out + "' is produced by both '" + it->second + "' and '" + n.node_id + "'");
      }
    }
  }
  edges.clear();
  for (const auto& n : nodes) {
    for (const auto& in : n.inputs) {
      auto it = producer.find(in);
      if (it != producer.end()) edges.push_back({it->second, n.node_id, in});
    }
  }
}

json value_to_json(const Value& v) {
  switch (v.index()) {
    case 0: return std::get<std::int64_t>(v);
    case 1: return std::get<double>(v);
    case 2: return std::get<std::string>(v);
    case 3: return std::get<bool>(v);
    default: return format_iso8601(std::get<Timestamp>(v));
  }
}

Value value_from_json(const json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  fail(ErrorCode::MalformedJson, "expected a literal, found " + j.dump());
}

namespace {

std::vector<std::string> string_array(const json& j, const std::string& field, const std::string& where) {
  std::vector<std::string> out;
  if (j.is_null()) return out;
  if (!j.is_array()) fail(ErrorCode::MalformedJson, where + ": '" + field + "' must be an array or null");
  for (const auto& e : j) {
    if (!e.is_string()) fail(ErrorCode::MalformedJson, where + ": '" + field + "' entries must be strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

json port_to_json(const PortType& p) {
  if (p.is_model) return json{{"model", {{"features", p.features}, {"target", p.target}}}};
  return p.schema.str();
}

PortType port_from_json(const json& j) {
  PortType p;
  if (j.is_string()) {
    p.schema = Schema::parse(j.get<std::string>());
  } else if (j.is_object() && j.contains("model")) {
    p.is_model = true;
    p.features = j["model"].at("features").get<std::vector<std::string>>();
    p.target = j["model"].at("target").get<std::string>();
  } else {
    fail(ErrorCode::MalformedJson, "bad connector type " + j.dump());
  }
  return p;
}

}  // namespace

DataflowGraph dataflow_from_json(const json& doc) {
  if (!doc.is_array() || doc.empty()) fail(ErrorCode::MalformedJson, "dataflow must be a nonempty array");
  const json& header = doc[0];
  if (!header.is_object() || !header.contains("GID") || !header.contains("description")) {
    fail(ErrorCode::MalformedJson, "first element must be the {\"GID\", \"description\"} header");
  }
  DataflowGraph g;
  try {
    g.header_gid = header["GID"].get<std::string>();
    g.description = header["description"].get<std::string>();
    g.gid = Gid::parse(g.header_gid);
    if (header.contains("binding")) {
      g.binding = header["binding"].get<std::map<std::string, std::string>>();
    }
    if (header.contains("params")) {
      Params p;
      for (const auto& [k, v] : header["params"].items()) p[k] = value_from_json(v);
      g.param_values = std::move(p);
    }
    if (header.contains("types")) {
      for (const auto& [k, v] : header["types"].items()) g.connector_types[k] = port_from_json(v);
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::MalformedJson, std::string("header: ") + e.what());
  }

  std::set<std::string> ids;
  for (std::size_t i = 1; i < doc.size(); ++i) {
    const json& j = doc[i];
    std::string where = "node " + std::to_string(i);
    if (!j.is_object()) fail(ErrorCode::MalformedJson, where + " is not an object");
    OperatorNode n;
    if (!j.contains("node_id") || !j["node_id"].is_string()) {
      fail(ErrorCode::MalformedJson, where + " lacks a string 'node_id'");
    }
    n.node_id = j["node_id"].get<std::string>();
    if (n.node_id.empty()) fail(ErrorCode::MalformedJson, where + " has an empty 'node_id'");
    if (!j.contains("operator") || !j["operator"].is_string()) {
      fail(ErrorCode::MalformedJson, where + " lacks a string 'operator'");
    }
    auto op = parse_operator_name(j["operator"].get<std::string>());
    if (!op) fail(ErrorCode::UnknownOperator, j["operator"].get<std::string>());
    n.op = *op;
    if (j.contains("function_alias")) {
      if (!j["function_alias"].is_string()) fail(ErrorCode::MalformedJson, where + ": 'function_alias' must be a string");
      n.function_alias = j["function_alias"].get<std::string>();
    } else {
      n.function_alias = std::string(builtin_alias(n.op));
    }
    n.inputs = string_array(j.value("input", json()), "input", where);
    n.outputs = string_array(j.value("output", json()), "output", where);
    if (j.contains("params") && !j["params"].is_null()) {
      if (!j["params"].is_object()) fail(ErrorCode::MalformedJson, where + ": 'params' must be an object");
      for (const auto& [k, v] : j["params"].items()) n.params[k] = value_from_json(v);
    }
    if (!ids.insert(n.node_id).second) fail(ErrorCode::DuplicateNodeId, n.node_id);
    g.nodes.push_back(std::move(n));
  }
  g.rebuild_edges();
  return g;
}

DataflowGraph parse_dataflow(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::MalformedJson, e.what());
  }
  return dataflow_from_json(doc);
}

json dataflow_to_json(const DataflowGraph& g) {
  json doc = json::array();
  json header = {{"GID", g.gid ? g.gid->str() : g.header_gid}, {"description", g.description}};
  if (g.binding) header["binding"] = *g.binding;
  if (g.param_values) {
    json p = json::object();
    for (const auto& [k, v] : *g.param_values) p[k] = value_to_json(v);
    header["params"] = p;
  }
  if (!g.connector_types.empty()) {
    json t = json::object();
    for (const auto& [k, v] : g.connector_types) t[k] = port_to_json(v);
    header["types"] = t;
  }
  doc.push_back(header);
  for (const auto& n : g.nodes) {
    json j = {{"node_id", n.node_id},
              {"operator", std::string(operator_name(n.op))},
              {"function_alias", n.function_alias},
              {"input", n.inputs}};
    j["output"] = n.op == OperatorKind::Sink && n.outputs.empty() ? json() : json(n.outputs);
    if (!n.params.empty()) {
      json p = json::object();
      for (const auto& [k, v] : n.params) p[k] = value_to_json(v);
      j["params"] = p;
    }
    doc.push_back(j);
  }
  return doc;
}

std::string serialize_dataflow(const DataflowGraph& graph, int indent) {
  return dataflow_to_json(graph).dump(indent);
}

namespace {

struct Adjacency {
  std::map<std::string, std::set<std::string>> succ;
  std::map<std::string, int> indegree;
};

Adjacency adjacency(const DataflowGraph& g) {
  Adjacency a;
  for (const auto& n : g.nodes) {
    a.succ[n.node_id];
    a.indegree[n.node_id];
  }
  for (const auto& e : g.edges) {
    if (a.succ[e.producer].insert(e.consumer).second) ++a.indegree[e.consumer];
  }
  return a;
}

// Tarjan's SCC; returns components with a cycle, members sorted.
std::vector<std::vector<std::string>> cyclic_components(const DataflowGraph& g) {
  Adjacency a = adjacency(g);
  std::map<std::string, int> index, low;
  std::set<std::string> on_stack;
  std::vector<std::string> stack;
  std::vector<std::vector<std::string>> out;
  int counter = 0;
  std::function<void(const std::string&)> visit = [&](const std::string& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    for (const auto& w : a.succ[v]) {
      if (!index.count(w)) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack.count(w)) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::string> comp;
      std::string w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack.erase(w);
        comp.push_back(w);
      } while (w != v);
      bool self_loop = a.succ[v].count(v) > 0;
      if (comp.size() > 1 || self_loop) {
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
      }
    }
  };
  for (const auto& [v, _] : a.succ) {
    if (!index.count(v)) visit(v);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<std::string> topological_order(const DataflowGraph& g) {
  Adjacency a = adjacency(g);
  std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
  for (const auto& [v, d] : a.indegree) {
    if (d == 0) ready.push(v);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    std::string v = ready.top();
    ready.pop();
    order.push_back(v);
    for (const auto& w : a.succ[v]) {
      if (--a.indegree[w] == 0) ready.push(w);
    }
  }
  if (order.size() != g.nodes.size()) fail(ErrorCode::InvalidGraph, "dataflow contains a cycle");
  return order;
}

std::string_view violation_kind_name(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::Cycle: return "Cycle";
    case ViolationKind::ArityMismatch: return "ArityMismatch";
    case ViolationKind::KindMismatch: return "KindMismatch";
    case ViolationKind::UnknownColumn: return "UnknownColumn";
    case ViolationKind::TypeError: return "TypeError";
    case ViolationKind::SchemaMismatch: return "SchemaMismatch";
    case ViolationKind::UnproducedInput: return "UnproducedInput";
    case ViolationKind::UnconsumedOutput: return "UnconsumedOutput";
    case ViolationKind::BadParam: return "BadParam";
  }
  return "?";
}

bool ValidationReport::contains(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::str() const {
  std::ostringstream os;
  for (const auto& v : violations) {
    os << violation_kind_name(v.kind) << "([";
    for (std::size_t i = 0; i < v.nodes.size(); ++i) os << (i ? "," : "") << v.nodes[i];
    os << "]): " << v.message << "\n";
  }
  return os.str();
}

namespace {

class SchemaStep {
 public:
  SchemaStep(const OperatorNode& node, std::vector<Violation>& out) : node_(node), out_(out) {}

  void report(ViolationKind kind, const std::string& message) { out_.push_back({kind, {node_.node_id}, message}); }

  // Runs `fn`, converting module errors into violations. Returns false on error.
  template <typename Fn>
  bool guard(Fn&& fn) {
    try {
      fn();
      return true;
    } catch (const Error& e) {
      switch (e.code()) {
        case ErrorCode::UnknownColumn: report(ViolationKind::UnknownColumn, e.detail()); break;
        case ErrorCode::TypeError: report(ViolationKind::TypeError, e.detail()); break;
        case ErrorCode::SchemaMismatch: report(ViolationKind::SchemaMismatch, e.detail()); break;
        default: report(ViolationKind::BadParam, e.what()); break;
      }
      return false;
    }
  }

  const Schema* require_table(const PortType& p) {
    if (p.is_model) {
      report(ViolationKind::SchemaMismatch, "expected a dataset input, found a model");
      return nullptr;
    }
    return &p.schema;
  }

  const Attribute& require_column(const Schema& s, const std::string& name) {
    auto idx = s.index_of(name);
    if (!idx) fail(ErrorCode::UnknownColumn, "column '" + name + "' not in schema (" + s.str() + ")");
    return s[*idx];
  }

  void require_numeric(const Schema& s, const std::string& name) {
    if (!is_numeric(require_column(s, name).type)) {
      fail(ErrorCode::TypeError, "column '" + name + "' must be numeric");
    }
  }

 private:
  const OperatorNode& node_;
  std::vector<Violation>& out_;
};

// Output port types of `node` given fully known input types. Returns nullopt
// (after recording violations) when the node cannot be typed.
std::optional<std::vector<PortType>> type_node(const OperatorNode& node, const std::vector<PortType>& in,
                                               std::vector<Violation>& out) {
  SchemaStep step(node, out);
  std::vector<PortType> result;
  auto param = [&](const char* name) { return node.param_string(name); };

  switch (node.op) {
    case OperatorKind::Source:
    case OperatorKind::Sink:
      if (node.op == OperatorKind::Sink && !in.empty()) step.require_table(in[0]);
      return result;
    case OperatorKind::Filter: {
      const Schema* s = step.require_table(in[0]);
      if (!s) return std::nullopt;
      auto pred = param("predicate");
      if (pred && !step.guard([&] { Expr::parse_predicate(*pred, *s); })) return std::nullopt;
      result.push_back({false, *s, {}, {}});
      return result;
    }
    case OperatorKind::Map: {
      const Schema* s = step.require_table(in[0]);
      if (!s) return std::nullopt;
      auto assign = param("assign");
      std::vector<Attribute> attrs = s->attributes();
      bool ok = step.guard([&] {
        if (!assign) return;
        for (const auto& a : parse_assignments(*assign)) {
          Expr e = Expr::parse(a.expression, *s);
          auto it = std::find_if(attrs.begin(), attrs.end(), [&](const Attribute& x) { return x.name == a.target; });
          if (it != attrs.end()) {
            it->type = e.type();
          } else {
            attrs.push_back({a.target, e.type()});
          }
        }
      });
      if (!ok) return std::nullopt;
      result.push_back({false, Schema(std::move(attrs)), {}, {}});
      return result;
    }
    case OperatorKind::Cast: {
      const Schema* s = step.require_table(in[0]);
      if (!s) return std::nullopt;
      std::vector<Attribute> attrs = s->attributes();
      bool ok = step.guard([&] {
        auto cols = param("columns");
        if (!cols) return;
        Schema targets = Schema::parse(*cols);
        for (const auto& c : targets.attributes()) {
          step.require_column(*s, c.name);
          attrs[*s->index_of(c.name)].type = c.type;
        }
      });
      if (!ok) return std::nullopt;
      result.push_back({false, Schema(std::move(attrs)), {}, {}});
      return result;
    }
    case OperatorKind::Join: {
      std::vector<const Schema*> sides;
      for (const auto& p : in) {
        const Schema* s = step.require_table(p);
        if (!s) return std::nullopt;
        sides.push_back(s);
      }
      auto keys_text = param("keys");
      if (!keys_text) return std::nullopt;
      std::vector<Attribute> attrs;
      bool ok = step.guard([&] {
        auto keys = parse_name_list(*keys_text);
        for (const auto& k : keys) {
          AttrType t = AttrType::Int64;
          for (std::size_t i = 0; i < sides.size(); ++i) {
            if (!sides[i]->contains(k)) {
              fail(ErrorCode::SchemaMismatch, "join key '" + k + "' expected in input " + std::to_string(i) +
                                                  ", found schema (" + sides[i]->str() + ")");
            }
            AttrType ti = (*sides[i])[*sides[i]->index_of(k)].type;
            if (i == 0) {
              t = ti;
            } else if (ti != t) {
              fail(ErrorCode::SchemaMismatch, "join key '" + k + "' has type " + std::string(type_name(t)) +
                                                  " and " + std::string(type_name(ti)));
            }
          }
        }
        attrs = sides[0]->attributes();
        for (std::size_t i = 1; i < sides.size(); ++i) {
          for (const auto& a : sides[i]->attributes()) {
            if (std::find(keys.begin(), keys.end(), a.name) == keys.end()) attrs.push_back(a);
          }
        }
        Schema check(attrs);
      });
      if (!ok) return std::nullopt;
      result.push_back({false, Schema(std::move(attrs)), {}, {}});
      return result;
    }
    case OperatorKind::GroupBy: {
      const Schema* s = step.require_table(in[0]);
      if (!s) return std::nullopt;
      auto keys_text = param("keys");
      if (!keys_text) return std::nullopt;
      std::vector<Attribute> attrs;
      bool ok = step.guard([&] {
        for (const auto& k : parse_name_list(*keys_text)) attrs.push_back(step.require_column(*s, k));
        for (const auto& agg : parse_aggregates(param("aggs").value_or(""))) {
          if (agg.fn == AggFn::Count) {
            if (agg.column != "*") step.require_column(*s, agg.column);
            attrs.push_back({agg.output, AttrType::Int64});
            continue;
          }
          const Attribute& col = step.require_column(*s, agg.column);
          if (agg.fn == AggFn::Sum || agg.fn == AggFn::Mean) step.require_numeric(*s, agg.column);
          AttrType t = col.type;
          if (agg.fn == AggFn::Mean) t = AttrType::Float64;
          attrs.push_back({agg.output, t});
        }
        Schema check(attrs);
      });
      if (!ok) return std::nullopt;
      result.push_back({false, Schema(std::move(attrs)), {}, {}});
      return result;
    }
    case OperatorKind::Dedup: {
      const Schema* s = step.require_table(in[0]);
      if (!s) return std::nullopt;
      auto keys_text = param("keys");
      if (keys_text && !step.guard([&] {
            for (const auto& k : parse_name_list(*keys_text)) step.require_column(*s, k);
          })) {
        return std::nullopt;
      }
      result.push_back({false, *s, {}, {}});
      return result;
    }
    case OperatorKind::Train: {
      const Schema* s = step.require_table(in[0]);
      if (!s) return std::nullopt;
      auto features = param("features");
      auto target = param("target");
      if (!features || !target) return std::nullopt;
      PortType model{true, {}, {}, *target};
      bool ok = step.guard([&] {
        model.features = parse_name_list(*features);
        for (const auto& f : model.features) step.require_numeric(*s, f);
        step.require_numeric(*s, *target);
      });
      if (!ok) return std::nullopt;
      result.push_back(model);
      if (node.outputs.size() > 1) result.push_back({false, training_metrics_schema(), {}, {}});
      return result;
    }
    case OperatorKind::Predict: {
      const PortType* model = nullptr;
      const PortType* data = nullptr;
      for (const auto& p : in) (p.is_model ? model : data) = &p;
      if (!model || !data) {
        step.report(ViolationKind::SchemaMismatch, "predict expects one dataset and one model input");
        return std::nullopt;
      }
      std::vector<Attribute> attrs = data->schema.attributes();
      bool ok = step.guard([&] {
        for (const auto& f : model->features) step.require_numeric(data->schema, f);
        if (data->schema.contains("prediction")) {
          fail(ErrorCode::SchemaMismatch, "input already has a 'prediction' column");
        }
      });
      if (!ok) return std::nullopt;
      attrs.push_back({"prediction", AttrType::Float64});
      result.push_back({false, Schema(std::move(attrs)), {}, {}});
      return result;
    }
  }
  return std::nullopt;
}

}  // namespace

Propagation propagate_schemas(const DataflowGraph& graph, const FunctionRegistry& registry, const PortMap& inputs) {
  (void)registry;
  Propagation prop;
  std::vector<std::string> order;
  try {
    order = topological_order(graph);
  } catch (const Error&) {
    return prop;
  }
  for (const auto& id : order) {
    const OperatorNode& node = *graph.find(id);
    if (node.op == OperatorKind::Source) {
      for (std::size_t i = 0; i < node.inputs.size() && i < node.outputs.size(); ++i) {
        auto it = inputs.find(node.inputs[i]);
        if (it != inputs.end()) {
          prop.connectors[node.outputs[i]] = it->second;
          continue;
        }
        auto declared = node.param_string("schema." + node.outputs[i]);
        if (!declared && node.outputs.size() == 1) declared = node.param_string("schema");
        if (declared) {
          try {
            prop.connectors[node.outputs[i]] = PortType{false, Schema::parse(*declared), {}, {}};
          } catch (const Error& e) {
            prop.violations.push_back({ViolationKind::BadParam, {node.node_id}, e.what()});
          }
        }
      }
      continue;
    }
    std::vector<PortType> in;
    bool known = true;
    for (const auto& c : graph.data_inputs(node)) {
      auto it = prop.connectors.find(c);
      if (it == prop.connectors.end()) {
        known = false;
        break;
      }
      in.push_back(it->second);
    }
    if (!known || in.empty()) continue;
    auto outs = type_node(node, in, prop.violations);
    if (!outs) continue;
    for (std::size_t i = 0; i < outs->size() && i < node.outputs.size(); ++i) {
      prop.connectors[node.outputs[i]] = (*outs)[i];
    }
  }
  return prop;
}

ValidationReport validate(const DataflowGraph& graph, const FunctionRegistry& registry, const PortMap& inputs) {
  ValidationReport report;
  auto cycles = cyclic_components(graph);
  for (auto& c : cycles) {
    std::string msg = "cycle through";
    for (const auto& n : c) msg += " " + n;
    report.violations.push_back({ViolationKind::Cycle, c, msg});
  }

  for (const auto& node : graph.nodes) {
    FunctionDescriptor d = registry.resolve(node.function_alias, node.op);
    if (d.kind != expected_function_kind(node.op)) {
      report.violations.push_back(
          {ViolationKind::KindMismatch,
           {node.node_id},
           "operator '" + std::string(operator_name(node.op)) + "' requires a " +
               std::string(function_kind_name(expected_function_kind(node.op))) + " function, '" +
               node.function_alias + "' is " + std::string(function_kind_name(d.kind))});
    }
    auto data_in = graph.data_inputs(node);
    std::size_t in_count = node.op == OperatorKind::Source ? node.inputs.size() : data_in.size();
    bool arity_ok = d.arity_in.admits(in_count) && d.arity_out.admits(node.outputs.size());
    if (node.op == OperatorKind::Source && node.inputs.size() != node.outputs.size()) arity_ok = false;
    if (node.op == OperatorKind::Sink && node.inputs.size() > data_in.size() + 1) arity_ok = false;
    if (!arity_ok) {
      report.violations.push_back({ViolationKind::ArityMismatch,
                                   {node.node_id},
                                   "has " + std::to_string(in_count) + " inputs and " +
                                       std::to_string(node.outputs.size()) + " outputs; '" + d.alias +
                                       "' expects " + d.arity_in.str() + " → " + d.arity_out.str()});
    }
    if (node.op != OperatorKind::Source && node.op != OperatorKind::Sink) {
      for (const auto& in : node.inputs) {
        if (!graph.producer_of(in)) {
          report.violations.push_back(
              {ViolationKind::UnproducedInput, {node.node_id}, "input '" + in + "' has no producer"});
        }
      }
    }
    if (node.op != OperatorKind::Sink && node.op != OperatorKind::Train) {
      for (const auto& out : node.outputs) {
        if (graph.consumers_of(out).empty()) {
          report.violations.push_back(
              {ViolationKind::UnconsumedOutput, {node.node_id}, "output '" + out + "' has no consumer"});
        }
      }
    }
  }
  if (cycles.empty()) {
    auto prop = propagate_schemas(graph, registry, inputs);
    for (auto& v : prop.violations) report.violations.push_back(std::move(v));
  }
  return report;
}

namespace {

// Replaces "${name}" references. A parameter that is exactly one reference
// takes the referenced value with its type.
Value substitute(const Value& v, const Params& params, const std::string& where) {
  const auto* s = std::get_if<std::string>(&v);
  if (!s || s->find("${") == std::string::npos) return v;
  std::string out;
  std::size_t pos = 0;
  while (pos < s->size()) {
    auto start = s->find("${", pos);
    if (start == std::string::npos) {
      out += s->substr(pos);
      break;
    }
    auto end = s->find('}', start);
    if (end == std::string::npos) fail(ErrorCode::MissingParam, where + ": unterminated '${'");
    std::string name = s->substr(start + 2, end - start - 2);
    auto it = params.find(name);
    if (it == params.end()) fail(ErrorCode::MissingParam, name + " (referenced by " + where + ")");
    if (start == 0 && end + 1 == s->size()) return it->second;
    out += s->substr(pos, start - pos);
    out += format_value(it->second);
    pos = end + 1;
  }
  return out;
}

}  // namespace

DataflowGraph bind(const DataflowGraph& graph, const std::map<std::string, std::string>& bindings,
                   const Params& params, const ArtifactResolver& resolver, const FunctionRegistry& registry) {
  ValidationReport structural = validate(graph, registry);
  for (const auto& v : structural.violations) {
    if (v.kind == ViolationKind::Cycle || v.kind == ViolationKind::ArityMismatch ||
        v.kind == ViolationKind::KindMismatch || v.kind == ViolationKind::UnproducedInput) {
      fail(ErrorCode::InvalidGraph, structural.str());
    }
  }

  DataflowGraph out = graph;
  out.connector_types.clear();
  std::map<std::string, std::string> bound;
  PortMap inputs;

  std::set<std::string> sink_targets;
  for (const auto& n : graph.nodes) {
    if (auto t = graph.sink_target(n)) sink_targets.insert(*t);
  }

  for (const auto& name : graph.placeholders()) {
    auto it = bindings.find(name);
    if (sink_targets.count(name)) {
      bound[name] = it != bindings.end() ? it->second : name;
      if (it == bindings.end() && name.find('/') == std::string::npos) fail(ErrorCode::MissingBinding, name);
      continue;
    }
    if (it == bindings.end()) {
      if (name.find('/') == std::string::npos) fail(ErrorCode::MissingBinding, name);
      bound[name] = name;  // literal path; type comes from the declared schema
      continue;
    }
    auto gid = Gid::parse(it->second);
    if (!gid) fail(ErrorCode::UnknownGid, "'" + it->second + "' bound to " + name + " is not a GID");
    auto art = resolver.resolve_artifact(*gid);
    if (!art) fail(ErrorCode::UnknownGid, it->second + " (bound to " + name + ")");
    if (art->kind == ArtifactKind::Dataset) {
      inputs[name] = PortType{false, art->schema, {}, {}};
    } else if (art->kind == ArtifactKind::Model) {
      inputs[name] = PortType{true, {}, art->features, art->target};
    } else {
      fail(ErrorCode::SchemaMismatch, name + " is bound to a " + std::string(artifact_kind_name(art->kind)) +
                                          ", expected a dataset or model");
    }
    bound[name] = gid->str();
  }

  for (auto& node : out.nodes) {
    for (auto& [key, value] : node.params) value = substitute(value, params, node.node_id + "." + key);
    FunctionDescriptor d = registry.resolve(node.function_alias, node.op);
    if (!d.opaque) {
      for (const auto& req : d.required_params) {
        if (!node.params.count(req)) fail(ErrorCode::MissingParam, node.node_id + "." + req);
      }
    }
    if (node.op == OperatorKind::Source) {
      for (std::size_t i = 0; i < node.inputs.size() && i < node.outputs.size(); ++i) {
        auto declared = node.param_string("schema." + node.outputs[i]);
        if (!declared && node.outputs.size() == 1) declared = node.param_string("schema");
        auto it = inputs.find(node.inputs[i]);
        if (declared && it != inputs.end() && !it->second.is_model) {
          Schema want = Schema::parse(*declared);
          if (!(want == it->second.schema)) {
            fail(ErrorCode::SchemaMismatch, "node '" + node.node_id + "': expected (" + want.str() + "), found (" +
                                                it->second.schema.str() + ")");
          }
        }
        if (it == inputs.end() && !declared) {
          fail(ErrorCode::SchemaMismatch,
               "node '" + node.node_id + "': literal input '" + node.inputs[i] + "' needs a declared schema");
        }
      }
    }
  }

  auto prop = propagate_schemas(out, registry, inputs);
  if (!prop.violations.empty()) {
    const auto& v = prop.violations.front();
    fail(ErrorCode::SchemaMismatch, "node '" + (v.nodes.empty() ? std::string() : v.nodes.front()) + "': " + v.message);
  }
  out.connector_types = std::move(prop.connectors);
  out.binding = std::move(bound);
  out.param_values = params;
  return out;
}

NodeEffects node_effects(const OperatorNode& node, const FunctionDescriptor& descriptor) {
  NodeEffects fx;
  if (descriptor.opaque) {
    fx.reads = descriptor.reads;
    fx.writes = descriptor.writes;
    return fx;
  }
  try {
    switch (node.op) {
      case OperatorKind::Filter:
        if (auto p = node.param_string("predicate")) fx.reads = Expr::parse_untyped(*p).columns();
        break;
      case OperatorKind::Map:
        if (auto a = node.param_string("assign")) {
          for (const auto& as : parse_assignments(*a)) {
            auto cols = Expr::parse_untyped(as.expression).columns();
            fx.reads.insert(cols.begin(), cols.end());
            fx.writes.insert(as.target);
          }
        }
        break;
      case OperatorKind::Cast:
        if (auto c = node.param_string("columns")) {
          Schema targets = Schema::parse(*c);
          for (const auto& a : targets.attributes()) {
            fx.reads.insert(a.name);
            fx.writes.insert(a.name);
          }
        }
        break;
      case OperatorKind::Predict:
        fx.writes.insert("prediction");
        break;
      default:
        break;
    }
  } catch (const Error&) {
    // Unparseable parameters surface through validation.
  }
  return fx;
}

}  // namespace gyp
