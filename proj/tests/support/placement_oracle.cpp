/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include "support/placement_oracle.hpp"

#include <cmath>
#include <limits>
#include <set>

namespace gyp::testing {

namespace {

double width(const Schema& s) {
  double w = 0;
  for (const auto& a : s.attributes()) {
    w += a.type == AttrType::String ? 16.0 : a.type == AttrType::Bool ? 1.0 : 8.0;
  }
  return w;
}

double table_width(const DataflowGraph& g, const std::string& connector) {
  auto it = g.connector_types.find(connector);
  return it == g.connector_types.end() || it->second.is_model ? 0.0 : width(it->second.schema);
}

double at_or_zero(const std::map<std::string, double>& m, const std::string& k) {
  auto it = m.find(k);
  return it == m.end() ? 0.0 : it->second;
}

double speed_of(const SchedulingInstance& inst, const std::string& platform) {
  for (const auto& p : inst.platforms) {
    if (p.platform_id == platform) return p.relative_speed;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

int gpus_of(const SchedulingInstance& inst, const std::string& platform) {
  for (const auto& p : inst.platforms) {
    if (p.platform_id == platform) return p.gpus;
  }
  return 0;
}

double seconds(const SchedulingInstance& inst, double bytes, const std::string& from, const std::string& to) {
  if (from == to || bytes <= 0) return 0.0;
  return bytes / (inst.bandwidth.get(from, to) * 1e6);
}

}  // namespace

double oracle_cost(const SchedulingInstance& inst, const std::vector<Fragment>& fragments,
                   const Placement& placement, const CardinalityEstimate& estimates) {
  const DataflowGraph& g = inst.graph;
  std::map<std::string, std::string> frag_of;
  for (const auto& f : fragments) {
    if (f.kind != FragmentKind::Compute) continue;
    for (const auto& id : f.node_ids) frag_of[id] = f.fragment_id;
  }
  auto site = [&](const std::string& node) { return placement.at(frag_of.at(node)); };

  double total = 0.0;
  std::set<std::pair<std::string, std::string>> moved, staged;
  for (const auto& n : g.nodes) {
    const std::string here = site(n.node_id);
    auto a = inst.annotations.find(n.node_id);
    double cost = a == inst.annotations.end() ? 0.0 : a->second.cost_per_tuple;
    total += cost * at_or_zero(estimates.node_in, n.node_id) / speed_of(inst, here);

    if (n.op == OperatorKind::Source) {
      for (std::size_t i = 0; i < n.inputs.size() && i < n.outputs.size(); ++i) {
        const std::string& gid = g.binding->at(n.inputs[i]);
        const std::string& home = inst.placements.home.at(gid);
        auto r = inst.placements.replicas.find(gid);
        bool local = home == here || (r != inst.placements.replicas.end() && r->second.count(here));
        if (local || !staged.insert({gid, frag_of.at(n.node_id)}).second) continue;
        double bytes = inst.dataset_rows.at(gid) * table_width(g, n.outputs[i]);
        total += seconds(inst, bytes, home, here);
      }
      continue;
    }
    for (const auto& c : n.inputs) {
      const OperatorNode* p = g.producer_of(c);
      if (!p || frag_of.at(p->node_id) == frag_of.at(n.node_id)) continue;
      if (!moved.insert({c, frag_of.at(n.node_id)}).second) continue;
      double bytes = at_or_zero(estimates.connector, c) * table_width(g, c);
      total += seconds(inst, bytes, site(p->node_id), here);
    }
  }
  return total;
}

BruteForce brute_force(const SchedulingInstance& inst, const std::vector<Fragment>& fragments,
                       const CardinalityEstimate& estimates) {
  std::vector<std::string> ids;
  std::vector<int> need;
  for (const auto& f : fragments) {
    if (f.kind != FragmentKind::Compute) continue;
    ids.push_back(f.fragment_id);
    int gpus = 0;
    for (const auto& id : f.node_ids) {
      const OperatorNode* n = inst.graph.find(id);
      if (n->op != OperatorKind::Train) continue;
      auto it = n->params.find("gpus");
      gpus = std::max<int>(gpus, it == n->params.end() ? 1 : static_cast<int>(std::get<std::int64_t>(it->second)));
    }
    need.push_back(gpus);
  }
  std::vector<std::size_t> digit(ids.size(), 0);
  std::vector<std::pair<double, Placement>> all;
  while (true) {
    Placement pl;
    bool ok = true;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      const std::string& p = inst.platforms[digit[k]].platform_id;
      if (gpus_of(inst, p) < need[k]) ok = false;
      pl[ids[k]] = p;
    }
    if (ok) all.push_back({oracle_cost(inst, fragments, pl, estimates), pl});
    std::size_t k = 0;
    while (k < ids.size() && ++digit[k] == inst.platforms.size()) digit[k++] = 0;
    if (k == ids.size()) break;
  }
  BruteForce out;
  if (all.empty()) return out;
  out.feasible = true;
  out.cost = std::numeric_limits<double>::infinity();
  for (const auto& [c, pl] : all) out.cost = std::min(out.cost, c);
  for (const auto& [c, pl] : all) {
    if (c <= out.cost + 1e-12 * std::abs(out.cost)) out.argmin.push_back(pl);
  }
  return out;
}

}  // namespace gyp::testing
