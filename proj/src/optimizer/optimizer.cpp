/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include "gyp/optimizer/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gyp/common/error.hpp"
#include "gyp/core/expr.hpp"

namespace gyp {

using nlohmann::json;

double operator_rank(double selectivity, double cost_per_tuple) {
  double gain = selectivity - 1.0;
  if (cost_per_tuple > 0.0) return gain / cost_per_tuple;
  if (gain == 0.0) return 0.0;
  return gain < 0.0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
}

Annotations annotate(const DataflowGraph& graph, const StatsProvider& stats, const FunctionRegistry& registry) {
  Annotations out;
  for (const auto& node : graph.nodes) {
    OperatorStats s = stats.stats(node.function_alias);
    FunctionDescriptor d = registry.resolve(node.function_alias, node.op);
    RewriteAnnotation a;
    a.node_id = node.node_id;
    a.selectivity = s.mean_selectivity;
    a.cost_per_tuple = s.mean_cost_per_tuple;
    a.rank = operator_rank(a.selectivity, a.cost_per_tuple);
    a.movable = !d.opaque && (node.op == OperatorKind::Map || node.op == OperatorKind::Filter ||
                              node.op == OperatorKind::Cast);
    out[node.node_id] = a;
  }
  return out;
}

json rewrite_trace_to_json(const RewriteTrace& trace) {
  json a = json::array();
  for (const auto& s : trace.steps) a.push_back({{"rule", s.rule}, {"before", s.before}, {"after", s.after}});
  return a;
}

RewriteTrace rewrite_trace_from_json(const json& j) {
  RewriteTrace t;
  try {
    for (const auto& s : j) {
      t.steps.push_back({s.at("rule").get<std::string>(), s.at("before").get<std::vector<std::string>>(),
                         s.at("after").get<std::vector<std::string>>()});
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::MalformedJson, std::string("rewrite trace: ") + e.what());
  }
  return t;
}

void retype(DataflowGraph& graph, const FunctionRegistry& registry) {
  if (graph.connector_types.empty()) return;
  PortMap inputs;
  for (const auto& n : graph.nodes) {
    if (n.op != OperatorKind::Source) continue;
    for (std::size_t i = 0; i < n.inputs.size() && i < n.outputs.size(); ++i) {
      auto it = graph.connector_types.find(n.outputs[i]);
      if (it != graph.connector_types.end()) inputs[n.inputs[i]] = it->second;
    }
  }
  Propagation prop = propagate_schemas(graph, registry, inputs);
  if (!prop.violations.empty()) {
    fail(ErrorCode::InvalidGraph, "rewritten graph does not type-check: " + prop.violations.front().message);
  }
  graph.connector_types = std::move(prop.connectors);
}

namespace {

bool chain_member(const OperatorNode& n, const Annotations& ann) {
  auto it = ann.find(n.node_id);
  return it != ann.end() && it->second.movable && n.inputs.size() == 1 && n.outputs.size() == 1;
}

// The chain member directly downstream of `n`, if `n`'s output feeds only it.
const OperatorNode* chain_next(const DataflowGraph& g, const OperatorNode& n, const Annotations& ann) {
  auto consumers = g.consumers_of(n.outputs[0]);
  if (consumers.size() != 1 || !chain_member(*consumers[0], ann)) return nullptr;
  return consumers[0];
}

bool intersects(const std::set<std::string>& a, const std::set<std::string>& b) {
  return std::any_of(a.begin(), a.end(), [&](const std::string& x) { return b.count(x) > 0; });
}

// Whether swapping the relative order of two element-wise operators could
// change results.
bool conflicts(const NodeEffects& a, const NodeEffects& b) {
  return intersects(a.writes, b.reads) || intersects(b.writes, a.reads) || intersects(a.writes, b.writes);
}

// Rewires the chain's connectors so nodes run in `order`.
void apply_order(DataflowGraph& g, const std::vector<std::string>& chain, const std::vector<std::string>& order) {
  std::vector<std::string> connectors;
  connectors.push_back(g.find(chain.front())->inputs[0]);
  for (const auto& id : chain) connectors.push_back(g.find(id)->outputs[0]);
  for (std::size_t i = 0; i < order.size(); ++i) {
    OperatorNode* n = g.find(order[i]);
    n->inputs = {connectors[i]};
    n->outputs = {connectors[i + 1]};
  }
  g.rebuild_edges();
}

std::vector<std::string> ranked_order(const DataflowGraph& g, const std::vector<std::string>& chain,
                                      const Annotations& ann, const FunctionRegistry& registry) {
  std::vector<NodeEffects> fx;
  std::vector<bool> is_map;
  for (const auto& id : chain) {
    const OperatorNode* n = g.find(id);
    fx.push_back(node_effects(*n, registry.resolve(n->function_alias, n->op)));
    is_map.push_back(n->op == OperatorKind::Map);
  }
  std::size_t k = chain.size();
  std::vector<bool> placed(k, false);
  std::vector<std::string> order;
  for (std::size_t step = 0; step < k; ++step) {
    std::size_t best = k;
    for (std::size_t j = 0; j < k; ++j) {
      if (placed[j]) continue;
      bool ready = true;
      for (std::size_t i = 0; i < j && ready; ++i) {
        // Maps append new columns, so their relative order fixes the output schema.
        if (!placed[i] && (conflicts(fx[i], fx[j]) || (is_map[i] && is_map[j]))) ready = false;
      }
      if (!ready) continue;
      if (best == k || ann.at(chain[j]).rank < ann.at(chain[best]).rank) best = j;
    }
    placed[best] = true;
    order.push_back(chain[best]);
  }
  return order;
}

// Input index of `join` that a filter reading `columns` can move to.
// Connector types of a concrete graph, or those propagated from declared
// source schemas otherwise.
PortMap port_types(const DataflowGraph& g, const FunctionRegistry& registry) {
  if (!g.connector_types.empty()) return g.connector_types;
  return propagate_schemas(g, registry, {}).connectors;
}

std::optional<std::size_t> pushdown_side(const PortMap& types, const OperatorNode& join,
                                         const std::set<std::string>& columns) {
  for (std::size_t i = 0; i < join.inputs.size(); ++i) {
    auto it = types.find(join.inputs[i]);
    if (it == types.end() || it->second.is_model) return std::nullopt;
    const Schema& s = it->second.schema;
    if (std::all_of(columns.begin(), columns.end(), [&](const std::string& c) { return s.contains(c); })) return i;
  }
  return std::nullopt;
}

void apply_pushdown(DataflowGraph& g, const std::string& join_id, const std::string& filter_id, std::size_t side) {
  OperatorNode* j = g.find(join_id);
  OperatorNode* f = g.find(filter_id);
  std::string side_in = j->inputs[side];
  std::string join_out = j->outputs[0];
  std::string filter_out = f->outputs[0];
  f->inputs = {side_in};
  f->outputs = {join_out};
  j->inputs[side] = join_out;
  j->outputs = {filter_out};
  g.rebuild_edges();
}

struct Pushdown {
  std::string join;
  std::string filter;
  std::size_t side;
};

std::optional<Pushdown> find_pushdown(const DataflowGraph& g, const Annotations& ann,
                                      const FunctionRegistry& registry) {
  std::vector<const OperatorNode*> filters;
  for (const auto& n : g.nodes) {
    if (n.op == OperatorKind::Filter && chain_member(n, ann)) filters.push_back(&n);
  }
  PortMap types = port_types(g, registry);
  std::sort(filters.begin(), filters.end(),
            [](const OperatorNode* a, const OperatorNode* b) { return a->node_id < b->node_id; });
  for (const OperatorNode* f : filters) {
    const OperatorNode* j = g.producer_of(f->inputs[0]);
    if (!j || j->op != OperatorKind::Join || j->outputs.size() != 1) continue;
    if (registry.resolve(j->function_alias, j->op).opaque) continue;
    if (g.consumers_of(j->outputs[0]).size() != 1) continue;
    auto side = pushdown_side(types, *j, node_effects(*f, registry.resolve(f->function_alias, f->op)).reads);
    if (side) return Pushdown{j->node_id, f->node_id, *side};
  }
  return std::nullopt;
}

}  // namespace

std::vector<std::vector<std::string>> movable_chains(const DataflowGraph& graph, const Annotations& annotations) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> order;
  try {
    order = topological_order(graph);
  } catch (const Error&) {
    return out;
  }
  std::set<std::string> used;
  for (const auto& id : order) {
    const OperatorNode* n = graph.find(id);
    if (used.count(id) || !chain_member(*n, annotations)) continue;
    // Start only at chain heads: nodes not fed one-to-one by a chain member.
    const OperatorNode* prev = graph.producer_of(n->inputs[0]);
    if (prev && chain_member(*prev, annotations) && chain_next(graph, *prev, annotations) == n) continue;
    std::vector<std::string> chain;
    for (const OperatorNode* cur = n; cur; cur = chain_next(graph, *cur, annotations)) {
      chain.push_back(cur->node_id);
      used.insert(cur->node_id);
    }
    out.push_back(std::move(chain));
  }
  return out;
}

RewriteResult rewrite(const DataflowGraph& graph, const Annotations& annotations, const FunctionRegistry& registry,
                      RewriteOptions options) {
  RewriteResult result{graph, {}};
  DataflowGraph& g = result.graph;
  (void)topological_order(g);
  while (true) {
    bool changed = false;
    if (options.pushdown) {
      while (auto p = find_pushdown(g, annotations, registry)) {
        apply_pushdown(g, p->join, p->filter, p->side);
        retype(g, registry);
        result.trace.steps.push_back({"filter_pushdown", {p->join, p->filter}, {p->filter, p->join}});
        changed = true;
      }
    }
    if (options.reorder) {
      for (const auto& chain : movable_chains(g, annotations)) {
        if (chain.size() < 2) continue;
        auto order = ranked_order(g, chain, annotations, registry);
        if (order == chain) continue;
        apply_order(g, chain, order);
        retype(g, registry);
        result.trace.steps.push_back({"reorder_chain", chain, order});
        changed = true;
      }
    }
    if (!changed) break;
  }
  ValidationReport report = validate(g, registry);
  if (!report.ok()) fail(ErrorCode::InvalidGraph, "rewrite produced an invalid graph:\n" + report.str());
  return result;
}

DataflowGraph replay(const DataflowGraph& graph, const RewriteTrace& trace, const FunctionRegistry& registry) {
  DataflowGraph g = graph;
  for (const auto& step : trace.steps) {
    for (const auto& id : step.before) {
      if (!g.find(id)) fail(ErrorCode::InvalidGraph, "replay: unknown node " + id);
    }
    if (step.rule == "filter_pushdown") {
      if (step.before.size() != 2) fail(ErrorCode::InvalidGraph, "replay: malformed pushdown step");
      const OperatorNode* j = g.find(step.before[0]);
      const OperatorNode* f = g.find(step.before[1]);
      if (j->outputs.size() != 1 || f->inputs.size() != 1 || f->inputs[0] != j->outputs[0]) {
        fail(ErrorCode::InvalidGraph, "replay: " + f->node_id + " does not follow " + j->node_id);
      }
      auto cols = node_effects(*f, registry.resolve(f->function_alias, f->op)).reads;
      auto side = pushdown_side(port_types(g, registry), *j, cols);
      if (!side) fail(ErrorCode::InvalidGraph, "replay: no join side for " + f->node_id);
      apply_pushdown(g, j->node_id, f->node_id, *side);
    } else if (step.rule == "reorder_chain") {
      for (std::size_t i = 0; i + 1 < step.before.size(); ++i) {
        const OperatorNode* a = g.find(step.before[i]);
        const OperatorNode* b = g.find(step.before[i + 1]);
        if (a->outputs.size() != 1 || b->inputs.size() != 1 || a->outputs[0] != b->inputs[0]) {
          fail(ErrorCode::InvalidGraph, "replay: " + a->node_id + " does not feed " + b->node_id);
        }
      }
      apply_order(g, step.before, step.after);
    } else {
      fail(ErrorCode::InvalidGraph, "replay: unknown rule " + step.rule);
    }
    retype(g, registry);
  }
  return g;
}

double CardinalityEstimate::intermediate_total(const DataflowGraph& graph) const {
  double total = 0;
  for (const auto& n : graph.nodes) {
    if (n.op == OperatorKind::Source) continue;
    for (const auto& c : n.outputs) {
      auto it = connector.find(c);
      if (it != connector.end()) total += it->second;
    }
  }
  return total;
}

CardinalityEstimate estimate_cardinalities(const DataflowGraph& graph, const Annotations& annotations,
                                           const std::map<std::string, double>& input_sizes) {
  CardinalityEstimate est;
  auto sel = [&](const std::string& id) {
    auto it = annotations.find(id);
    return it == annotations.end() ? 1.0 : it->second.selectivity;
  };
  for (const auto& id : topological_order(graph)) {
    const OperatorNode& n = *graph.find(id);
    if (n.op == OperatorKind::Source) {
      double total = 0;
      for (std::size_t i = 0; i < n.outputs.size(); ++i) {
        std::vector<std::string> keys{n.outputs[i]};
        if (i < n.inputs.size()) {
          keys.push_back(n.inputs[i]);
          if (graph.binding) {
            auto b = graph.binding->find(n.inputs[i]);
            if (b != graph.binding->end()) keys.push_back(b->second);
          }
        }
        if (n.outputs.size() == 1) keys.push_back(n.node_id);
        std::optional<double> rows;
        for (const auto& k : keys) {
          auto it = input_sizes.find(k);
          if (it != input_sizes.end()) {
            rows = it->second;
            break;
          }
        }
        if (!rows) fail(ErrorCode::MissingSourceSize, n.node_id + " output " + n.outputs[i]);
        est.connector[n.outputs[i]] = *rows;
        total += *rows;
      }
      est.node_in[id] = total;
      est.node_out[id] = total;
      continue;
    }
    std::vector<double> ins;
    for (const auto& c : graph.data_inputs(n)) {
      // A model port carries no rows.
      auto t = graph.connector_types.find(c);
      if (t != graph.connector_types.end() && t->second.is_model) continue;
      if (n.op == OperatorKind::Predict) {
        const OperatorNode* p = graph.producer_of(c);
        if (p && p->op == OperatorKind::Train) continue;
      }
      auto it = est.connector.find(c);
      ins.push_back(it == est.connector.end() ? 0.0 : it->second);
    }
    double in = 0;
    for (double v : ins) in += v;
    double out;
    switch (n.op) {
      case OperatorKind::Join: {
        double prod = 1, mx = 0;
        for (double v : ins) {
          prod *= v;
          mx = std::max(mx, v);
        }
        out = mx > 0 ? sel(id) * prod / mx : 0.0;
        break;
      }
      case OperatorKind::Train: out = 1; break;
      case OperatorKind::Sink: out = in; break;
      default: out = sel(id) * in; break;
    }
    est.node_in[id] = in;
    est.node_out[id] = out;
    for (std::size_t i = 0; i < n.outputs.size(); ++i) {
      // A learner's second output is its one-row metrics tuple.
      est.connector[n.outputs[i]] = n.op == OperatorKind::Train ? 1.0 : out;
    }
  }
  return est;
}

}  // namespace gyp
