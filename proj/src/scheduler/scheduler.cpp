/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include "gyp/scheduler/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>

#include "gyp/common/error.hpp"

namespace gyp {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Bound dataset GIDs read by a source node, in input order.
std::vector<std::string> source_datasets(const DataflowGraph& g, const OperatorNode& n) {
  std::vector<std::string> out;
  if (n.op != OperatorKind::Source || !g.binding) return out;
  for (std::size_t i = 0; i < n.inputs.size(); ++i) {
    auto b = g.binding->find(n.inputs[i]);
    if (b == g.binding->end() || !Gid::parse(b->second)) continue;
    if (i < n.outputs.size()) {
      auto t = g.connector_types.find(n.outputs[i]);
      if (t != g.connector_types.end() && t->second.is_model) continue;
    }
    out.push_back(b->second);
  }
  return out;
}

// Whether the source reads a literal path rather than a stored artifact.
bool reads_literal(const DataflowGraph& g, const OperatorNode& n) {
  if (n.op != OperatorKind::Source) return false;
  for (const auto& in : n.inputs) {
    std::string value = in;
    if (g.binding) {
      auto b = g.binding->find(in);
      if (b != g.binding->end()) value = b->second;
    }
    if (!Gid::parse(value)) return true;
  }
  return false;
}

int gpus_for(const OperatorNode& n, int fallback) {
  if (n.op != OperatorKind::Train) return 0;
  auto it = n.params.find("gpus");
  if (it == n.params.end()) return fallback;
  if (const auto* i = std::get_if<std::int64_t>(&it->second)) return static_cast<int>(*i);
  if (const auto* d = std::get_if<double>(&it->second)) return static_cast<int>(*d);
  if (const auto* s = std::get_if<std::string>(&it->second)) {
    try {
      return std::stoi(*s);
    } catch (const std::exception&) {
      fail(ErrorCode::BadArgument, "node '" + n.node_id + "': gpus must be an integer");
    }
  }
  return fallback;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
};

template <class T>
void push_unique(std::vector<T>& v, const T& x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

}  // namespace

std::string_view fragment_kind_name(FragmentKind k) { return k == FragmentKind::Compute ? "compute" : "transfer"; }

Placements Placements::from_catalog(const Catalog& catalog, const DataflowGraph& graph) {
  Placements out;
  if (!graph.binding) return out;
  for (const auto& [name, value] : *graph.binding) {
    auto gid = Gid::parse(value);
    if (!gid) continue;
    auto rec = catalog.find(*gid);
    if (!rec || rec->kind != ArtifactKind::Dataset || !rec->dataset) continue;
    out.home[value] = rec->dataset->platform;
    for (const auto& r : catalog.replicas(*gid)) out.replicas[value].insert(r.platform);
  }
  return out;
}

std::vector<Fragment> fragment(const DataflowGraph& graph, const Placements& placements,
                               const std::vector<PlatformDescriptor>& platforms, FragmentOptions options) {
  std::vector<std::string> topo = topological_order(graph);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < topo.size(); ++i) index[topo[i]] = i;
  std::map<std::string, int> gpus_of;
  for (const auto& p : platforms) gpus_of[p.platform_id] = p.gpus;

  UnionFind uf(topo.size());
  std::vector<std::optional<std::string>> home(topo.size());  // valid at roots
  std::vector<int> gpus(topo.size(), 0);
  std::vector<bool> floating(topo.size(), false);

  // Distinct fragment roots feeding a node, in input order.
  auto pred_roots = [&](const OperatorNode& n, std::vector<std::size_t>& floaters) {
    std::vector<std::size_t> roots;
    for (const auto& c : graph.data_inputs(n)) {
      const OperatorNode* p = graph.producer_of(c);
      if (!p) continue;
      std::size_t pi = index.at(p->node_id);
      if (floating[pi]) {
        push_unique(floaters, pi);
        continue;
      }
      push_unique(roots, uf.find(pi));
    }
    return roots;
  };

  // Would merging `roots` create a cycle between fragments? True when some
  // path leaves the merged set and re-enters it.
  auto merge_creates_cycle = [&](const std::vector<std::size_t>& roots, std::size_t upto) {
    if (roots.size() < 2) return false;
    std::map<std::size_t, std::set<std::size_t>> succ;
    for (std::size_t i = 0; i < upto; ++i) {
      const OperatorNode* n = graph.find(topo[i]);
      for (const auto& c : graph.data_inputs(*n)) {
        const OperatorNode* p = graph.producer_of(c);
        if (!p) continue;
        std::size_t a = uf.find(index.at(p->node_id)), b = uf.find(i);
        if (a != b) succ[a].insert(b);
      }
    }
    std::set<std::size_t> in(roots.begin(), roots.end());
    std::set<std::size_t> seen;
    std::vector<std::size_t> stack;
    for (std::size_t r : roots) {
      for (std::size_t s : succ[r]) {
        if (!in.count(s) && seen.insert(s).second) stack.push_back(s);
      }
    }
    while (!stack.empty()) {
      std::size_t x = stack.back();
      stack.pop_back();
      for (std::size_t s : succ[x]) {
        if (in.count(s)) return true;
        if (seen.insert(s).second) stack.push_back(s);
      }
    }
    return false;
  };

  auto gpu_site = [&](int required) -> std::optional<std::string> {
    std::optional<std::string> best;
    int best_gpus = 0;
    for (const auto& p : platforms) {
      if (p.gpus < required) continue;
      if (!best || p.gpus < best_gpus || (p.gpus == best_gpus && p.platform_id < *best)) {
        best = p.platform_id;
        best_gpus = p.gpus;
      }
    }
    return best;
  };

  auto has_gpus = [&](const std::optional<std::string>& h, int required) {
    if (required <= 0) return true;
    if (!h) return false;
    auto it = gpus_of.find(*h);
    return it != gpus_of.end() && it->second >= required;
  };

  for (std::size_t i = 0; i < topo.size(); ++i) {
    const OperatorNode& n = *graph.find(topo[i]);
    int need = gpus_for(n, options.gpu_required);
    gpus[i] = need;
    if (n.op == OperatorKind::Source) {
      std::map<std::string, int> votes;
      for (const auto& gid : source_datasets(graph, n)) {
        auto h = placements.home.find(gid);
        if (h == placements.home.end()) fail(ErrorCode::UnplacedInput, gid);
        ++votes[h->second];
      }
      if (reads_literal(graph, n) && !options.default_platform.empty()) ++votes[options.default_platform];
      if (votes.empty()) {
        floating[i] = true;
        continue;
      }
      // Majority by count; std::map iteration gives lexicographic ties.
      auto best = votes.begin();
      for (auto it = votes.begin(); it != votes.end(); ++it) {
        if (it->second > best->second) best = it;
      }
      home[i] = best->first;
      continue;
    }

    std::vector<std::size_t> floaters;
    std::vector<std::size_t> roots = pred_roots(n, floaters);
    std::optional<std::string> h;
    bool same = !roots.empty();
    for (std::size_t r : roots) {
      if (r == roots.front()) continue;
      if (home[r] != home[roots.front()]) same = false;
    }
    if (!roots.empty()) h = home[roots.front()];
    else if (!options.default_platform.empty()) h = options.default_platform;

    bool merge = same && !merge_creates_cycle(roots, i);
    if (merge && need > 0) {
      int fragment_need = need;
      for (std::size_t r : roots) fragment_need = std::max(fragment_need, gpus[r]);
      if (!has_gpus(h, fragment_need)) merge = false;
    }
    if (!merge && need > 0 && !has_gpus(h, need)) h = gpu_site(need);

    if (merge) {
      std::size_t root = roots.front();
      int g = need;
      for (std::size_t r : roots) {
        g = std::max(g, gpus[r]);
        uf.parent[r] = root;
      }
      uf.parent[i] = root;
      gpus[root] = g;
      home[root] = h;
    } else {
      home[i] = h;
    }
    for (std::size_t f : floaters) {
      floating[f] = false;
      uf.parent[f] = uf.find(i);
    }
  }

  // Floating sources nobody consumed form their own fragments.
  for (std::size_t i = 0; i < topo.size(); ++i) {
    if (floating[i] && !options.default_platform.empty()) home[i] = options.default_platform;
  }

  // Group nodes by fragment.
  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < topo.size(); ++i) members[uf.find(i)].push_back(i);

  // Fragment DAG over roots.
  std::map<std::size_t, std::set<std::size_t>> succ, pred;
  struct Cut {
    std::string connector;
    std::size_t from, to;
  };
  std::vector<Cut> cuts;
  for (std::size_t i = 0; i < topo.size(); ++i) {
    const OperatorNode& n = *graph.find(topo[i]);
    for (const auto& c : graph.data_inputs(n)) {
      const OperatorNode* p = graph.producer_of(c);
      if (!p) continue;
      std::size_t a = uf.find(index.at(p->node_id)), b = uf.find(i);
      if (a == b) continue;
      succ[a].insert(b);
      pred[b].insert(a);
      bool dup = std::any_of(cuts.begin(), cuts.end(),
                             [&](const Cut& x) { return x.connector == c && x.to == b; });
      if (!dup) cuts.push_back({c, a, b});
    }
  }

  // Order fragments topologically, ties by first node.
  std::vector<std::size_t> order;
  {
    std::map<std::size_t, std::size_t> indeg;
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (const auto& [r, m] : members) {
      indeg[r] = pred[r].size();
      if (indeg[r] == 0) ready.push(m.front());
    }
    while (!ready.empty()) {
      std::size_t first = ready.top();
      ready.pop();
      std::size_t r = uf.find(first);
      order.push_back(r);
      for (std::size_t s : succ[r]) {
        if (--indeg[s] == 0) ready.push(members[s].front());
      }
    }
    if (order.size() != members.size()) fail(ErrorCode::InvalidGraph, "fragment graph has a cycle");
  }

  std::map<std::size_t, std::string> fid;
  for (std::size_t k = 0; k < order.size(); ++k) fid[order[k]] = "f" + std::to_string(k + 1);

  std::map<std::size_t, Fragment> compute;
  for (std::size_t r : order) {
    Fragment f;
    f.fragment_id = fid[r];
    f.home = home[r];
    f.gpus_required = 0;
    for (std::size_t i : members[r]) {
      const OperatorNode& n = *graph.find(topo[i]);
      f.node_ids.push_back(n.node_id);
      f.gpus_required = std::max(f.gpus_required, gpus[i]);
      for (const auto& gid : source_datasets(graph, n)) push_unique(f.entry, gid);
      if (auto t = graph.sink_target(n)) {
        std::string out = *t;
        if (graph.binding) {
          auto b = graph.binding->find(*t);
          if (b != graph.binding->end()) out = b->second;
        }
        push_unique(f.exit, out);
      }
    }
    compute[r] = std::move(f);
  }
  for (const auto& c : cuts) {
    push_unique(compute[c.to].entry, c.connector);
    push_unique(compute[c.from].exit, c.connector);
  }

  // Transfer fragments on cuts whose endpoints have different homes, ordered
  // by producing fragment then connector.
  std::vector<Cut> moving;
  for (const auto& c : cuts) {
    if (home[c.from] != home[c.to]) moving.push_back(c);
  }
  std::map<std::size_t, std::size_t> pos;
  for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = k;
  std::stable_sort(moving.begin(), moving.end(), [&](const Cut& a, const Cut& b) {
    if (pos[a.from] != pos[b.from]) return pos[a.from] < pos[b.from];
    if (a.connector != b.connector) return a.connector < b.connector;
    return pos[a.to] < pos[b.to];
  });

  std::map<std::size_t, std::vector<Fragment>> arriving;
  for (std::size_t k = 0; k < moving.size(); ++k) {
    const Cut& c = moving[k];
    Fragment t;
    t.fragment_id = "t" + std::to_string(k + 1);
    t.kind = FragmentKind::Transfer;
    t.node_ids = {t.fragment_id + ".send", t.fragment_id + ".recv"};
    t.entry = {c.connector};
    t.exit = {c.connector};
    t.home = home[c.from];
    t.connector = c.connector;
    t.from_fragment = fid[c.from];
    t.to_fragment = fid[c.to];
    arriving[c.to].push_back(std::move(t));
  }

  std::vector<Fragment> out;
  for (std::size_t r : order) {
    for (auto& t : arriving[r]) out.push_back(std::move(t));
    out.push_back(std::move(compute[r]));
  }
  return out;
}

const PlatformDescriptor& CostModel::platform(const std::string& id) const {
  for (const auto& p : platforms) {
    if (p.platform_id == id) return p;
  }
  fail(ErrorCode::UnknownPlatform, id);
}

double CostModel::row_bytes(const std::string& connector) const {
  auto it = graph->connector_types.find(connector);
  if (it == graph->connector_types.end() || it->second.is_model) return 0.0;
  return it->second.schema.row_width(string_width);
}

double CostModel::connector_bytes(const std::string& connector) const {
  auto it = estimates.connector.find(connector);
  double rows = it == estimates.connector.end() ? 0.0 : it->second;
  return rows * row_bytes(connector);
}

double CostModel::dataset_bytes(const std::string& gid) const {
  auto r = dataset_rows.find(gid);
  if (r == dataset_rows.end()) return 0.0;
  for (const auto& n : graph->nodes) {
    if (n.op != OperatorKind::Source || !graph->binding) continue;
    for (std::size_t i = 0; i < n.inputs.size() && i < n.outputs.size(); ++i) {
      auto b = graph->binding->find(n.inputs[i]);
      if (b != graph->binding->end() && b->second == gid) return r->second * row_bytes(n.outputs[i]);
    }
  }
  return 0.0;
}

double CostBreakdown::resum() const {
  double s = 0.0;
  for (const auto& [k, v] : execution) s += v;
  for (const auto& [k, v] : transfer) s += v;
  return s;
}

namespace {

double link_seconds(const CostModel& m, double bytes, const std::string& from, const std::string& to) {
  if (from == to || bytes <= 0.0) return 0.0;
  return bytes / (m.bandwidth.get(from, to) * 1e6);
}

double exec_seconds(const Fragment& f, const std::string& p, const CostModel& m) {
  double speed = m.platform(p).relative_speed;
  double s = 0.0;
  for (const auto& id : f.node_ids) {
    auto a = m.annotations.find(id);
    double cost = a == m.annotations.end() ? 0.0 : a->second.cost_per_tuple;
    auto e = m.estimates.node_in.find(id);
    double rows = e == m.estimates.node_in.end() ? 0.0 : e->second;
    s += cost / speed * rows;
  }
  return s;
}

// Cut connectors between compute fragments: (connector, from, to).
struct Link {
  std::string connector;
  std::string from;
  std::string to;
};

std::vector<Link> compute_links(const std::vector<Fragment>& fragments, const DataflowGraph& g) {
  std::map<std::string, std::string> owner;
  for (const auto& f : fragments) {
    if (f.kind != FragmentKind::Compute) continue;
    for (const auto& id : f.node_ids) owner[id] = f.fragment_id;
  }
  std::vector<Link> out;
  for (const auto& f : fragments) {
    if (f.kind != FragmentKind::Compute) continue;
    for (const auto& id : f.node_ids) {
      const OperatorNode* n = g.find(id);
      for (const auto& c : g.data_inputs(*n)) {
        const OperatorNode* p = g.producer_of(c);
        if (!p) continue;
        const std::string& from = owner.at(p->node_id);
        if (from == f.fragment_id) continue;
        bool dup = std::any_of(out.begin(), out.end(),
                               [&](const Link& l) { return l.connector == c && l.to == f.fragment_id; });
        if (!dup) out.push_back({c, from, f.fragment_id});
      }
    }
  }
  return out;
}

bool stored_locally(const CostModel& m, const std::string& gid, const std::string& p) {
  auto h = m.placements.home.find(gid);
  if (h != m.placements.home.end() && h->second == p) return true;
  auto r = m.placements.replicas.find(gid);
  return r != m.placements.replicas.end() && r->second.count(p) > 0;
}

// Seconds to bring the fragment's stored inputs to `p`; the replica at `p`
// is used when present, the home copy otherwise.
double staging_seconds(const Fragment& f, const std::string& p, const CostModel& m,
                       std::map<std::string, double>* labels = nullptr) {
  double s = 0.0;
  for (const auto& e : f.entry) {
    auto h = m.placements.home.find(e);
    if (h == m.placements.home.end() || stored_locally(m, e, p)) continue;
    double t = link_seconds(m, m.dataset_bytes(e), h->second, p);
    s += t;
    if (labels) (*labels)["dataset:" + e + "->" + f.fragment_id] = t;
  }
  return s;
}

}  // namespace

CostBreakdown evaluate_cost(const std::vector<Fragment>& fragments, const std::map<std::string, std::string>& placement,
                            const CostModel& model) {
  CostBreakdown out;
  for (const auto& f : fragments) {
    if (f.kind != FragmentKind::Compute) continue;
    const std::string& p = placement.at(f.fragment_id);
    out.execution[f.fragment_id] = exec_seconds(f, p, model);
    staging_seconds(f, p, model, &out.transfer);
  }
  for (const auto& l : compute_links(fragments, *model.graph)) {
    const std::string& a = placement.at(l.from);
    const std::string& b = placement.at(l.to);
    if (a == b) continue;
    out.transfer["connector:" + l.connector + "->" + l.to] = link_seconds(model, model.connector_bytes(l.connector), a, b);
  }
  out.total = out.resum();
  return out;
}

std::vector<std::string> feasible_platforms(const Fragment& f, const CostModel& model) {
  std::vector<std::string> out;
  for (const auto& p : model.platforms) {
    if (p.gpus >= f.gpus_required) out.push_back(p.platform_id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::vector<std::string> platform_ids(const CostModel& m) {
  std::vector<std::string> ids;
  for (const auto& p : m.platforms) ids.push_back(p.platform_id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

// Fills diagnostics; returns false when some compute fragment has no
// feasible platform.
bool check_feasible(const std::vector<Fragment>& fragments, const CostModel& m, PlatformAssignment& a,
                    std::map<std::string, std::vector<std::string>>& candidates) {
  bool ok = true;
  for (const auto& f : fragments) {
    if (f.kind != FragmentKind::Compute) continue;
    candidates[f.fragment_id] = feasible_platforms(f, m);
    if (candidates[f.fragment_id].empty()) {
      ok = false;
      a.diagnostics.push_back(std::string(error_code_name(ErrorCode::NoFeasiblePlatform)) + "(" + f.fragment_id +
                              "): needs " + std::to_string(f.gpus_required) + " GPU(s)");
    }
  }
  if (!ok) {
    a.feasible = false;
    a.total_cost = kInf;
  }
  return ok;
}

void finish(PlatformAssignment& a, const std::vector<Fragment>& fragments, const CostModel& m) {
  a.breakdown = evaluate_cost(fragments, a.placement, m);
  a.total_cost = a.breakdown.total;
  a.feasible = true;
}

}  // namespace

PlatformAssignment assign(const std::vector<Fragment>& fragments, const CostModel& model) {
  model.bandwidth.require_complete(platform_ids(model));
  PlatformAssignment a;
  std::map<std::string, std::vector<std::string>> candidates;
  if (!check_feasible(fragments, model, a, candidates)) return a;

  std::vector<const Fragment*> compute;
  for (const auto& f : fragments) {
    if (f.kind == FragmentKind::Compute) compute.push_back(&f);
  }
  std::vector<Link> links = compute_links(fragments, *model.graph);

  auto incoming = [&](const Fragment& f, const std::string& p) {
    double s = 0.0;
    for (const auto& l : links) {
      if (l.to != f.fragment_id) continue;
      auto it = a.placement.find(l.from);
      if (it != a.placement.end()) s += link_seconds(model, model.connector_bytes(l.connector), it->second, p);
    }
    return s;
  };
  auto local_cost = [&](const Fragment& f, const std::string& p) {
    return exec_seconds(f, p, model) + incoming(f, p) + staging_seconds(f, p, model);
  };
  auto pick_min = [&](const Fragment& f, const std::vector<std::string>& sites) {
    std::string best;
    double best_cost = kInf;
    for (const auto& p : sites) {
      double c = local_cost(f, p);
      if (best.empty() || c < best_cost) {
        best = p;
        best_cost = c;
      }
    }
    return best;
  };

  // Greedy pass in fragment order.
  for (const Fragment* f : compute) {
    const auto& feas = candidates[f->fragment_id];
    bool has_incoming = std::any_of(links.begin(), links.end(), [&](const Link& l) { return l.to == f->fragment_id; });
    std::string choice;
    if (f->gpus_required > 0) {
      choice = pick_min(*f, feas);
    } else if (!has_incoming) {
      // Locality: the platform holding most entry bytes.
      std::map<std::string, double> bytes;
      for (const auto& e : f->entry) {
        auto h = model.placements.home.find(e);
        if (h != model.placements.home.end()) bytes[h->second] += model.dataset_bytes(e);
      }
      double best = -1.0;
      for (const auto& [p, b] : bytes) {
        if (b > best && std::find(feas.begin(), feas.end(), p) != feas.end()) {
          choice = p;
          best = b;
        }
      }
      if (choice.empty()) choice = pick_min(*f, feas);
    } else {
      // Binary operator sites: an input fragment's site, the next
      // downstream site, or the training site.
      std::set<std::string> sites;
      for (const auto& l : links) {
        if (l.to == f->fragment_id) sites.insert(a.placement.at(l.from));
      }
      for (const auto& l : links) {
        if (l.from != f->fragment_id) continue;
        for (const auto& g : fragments) {
          if (g.fragment_id == l.to && g.home) sites.insert(*g.home);
        }
      }
      for (const auto& g : fragments) {
        if (g.kind == FragmentKind::Compute && g.gpus_required > 0 && g.home) sites.insert(*g.home);
      }
      if (f->home) sites.insert(*f->home);
      std::vector<std::string> site_list;
      for (const auto& s : sites) {
        if (std::find(feas.begin(), feas.end(), s) != feas.end()) site_list.push_back(s);
      }
      choice = pick_min(*f, site_list.empty() ? feas : site_list);
    }
    a.placement[f->fragment_id] = choice;
  }

  // Local search: best single move, then best pairwise move, until neither
  // improves the total.
  auto total = [&](const std::map<std::string, std::string>& pl) { return evaluate_cost(fragments, pl, model).total; };
  double current = total(a.placement);
  auto improves = [](double c, double cur) { return c < cur - 1e-12 * std::max(1.0, std::abs(cur)); };
  for (;;) {
    double best = current;
    std::map<std::string, std::string> best_pl;
    for (const Fragment* f : compute) {
      for (const auto& p : candidates[f->fragment_id]) {
        if (p == a.placement[f->fragment_id]) continue;
        auto pl = a.placement;
        pl[f->fragment_id] = p;
        double c = total(pl);
        if (improves(c, best)) {
          best = c;
          best_pl = std::move(pl);
        }
      }
    }
    if (best_pl.empty()) {
      for (std::size_t i = 0; i < compute.size(); ++i) {
        for (std::size_t j = i + 1; j < compute.size(); ++j) {
          for (const auto& p : candidates[compute[i]->fragment_id]) {
            for (const auto& q : candidates[compute[j]->fragment_id]) {
              auto pl = a.placement;
              pl[compute[i]->fragment_id] = p;
              pl[compute[j]->fragment_id] = q;
              if (pl == a.placement) continue;
              double c = total(pl);
              if (improves(c, best)) {
                best = c;
                best_pl = std::move(pl);
              }
            }
          }
        }
      }
    }
    if (best_pl.empty()) break;
    a.placement = std::move(best_pl);
    current = best;
  }
  finish(a, fragments, model);
  return a;
}

PlatformAssignment assign_exhaustive(const std::vector<Fragment>& fragments, const CostModel& model) {
  model.bandwidth.require_complete(platform_ids(model));
  PlatformAssignment a;
  std::map<std::string, std::vector<std::string>> candidates;
  if (!check_feasible(fragments, model, a, candidates)) return a;

  std::vector<std::string> ids;
  for (const auto& f : fragments) {
    if (f.kind == FragmentKind::Compute) ids.push_back(f.fragment_id);
  }
  std::map<std::string, std::string> pl, best;
  double best_cost = kInf;
  // Enumeration visits placements in lexicographic order, so a strict
  // comparison keeps the lexicographically first minimum.
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == ids.size()) {
      double c = evaluate_cost(fragments, pl, model).total;
      if (best.empty() || c < best_cost) {
        best_cost = c;
        best = pl;
      }
      return;
    }
    for (const auto& p : candidates[ids[k]]) {
      pl[ids[k]] = p;
      rec(k + 1);
    }
  };
  rec(0);
  a.placement = best;
  finish(a, fragments, model);
  return a;
}

ScheduledPlan materialize(const DataflowGraph& graph, const std::vector<Fragment>& fragments,
                          const PlatformAssignment& assignment, const CostModel& model) {
  if (!assignment.feasible) {
    std::string why = assignment.diagnostics.empty() ? "assignment is infeasible" : assignment.diagnostics.front();
    fail(ErrorCode::InfeasibleAssignment, why);
  }
  ScheduledPlan plan;
  plan.graph = graph;
  plan.assignment = assignment;
  plan.platforms = model.platforms;

  std::map<std::string, const Fragment*> by_id;
  int transfer_count = 0;
  for (const auto& f : fragments) {
    by_id[f.fragment_id] = &f;
    if (f.kind == FragmentKind::Transfer) ++transfer_count;
  }

  std::map<std::string, PlanJob> jobs;
  for (const auto& f : fragments) {
    if (f.kind != FragmentKind::Compute) continue;
    auto it = assignment.placement.find(f.fragment_id);
    if (it == assignment.placement.end()) {
      fail(ErrorCode::InfeasibleAssignment, "fragment " + f.fragment_id + " is unassigned");
    }
    const PlatformDescriptor& p = model.platform(it->second);
    PlanJob j;
    j.job_id = f.fragment_id;
    j.platform = p.platform_id;
    j.backend = p.executor_kind;
    j.node_ids = f.node_ids;
    for (const auto& e : f.entry) {
      auto h = model.placements.home.find(e);
      if (h == model.placements.home.end() || stored_locally(model, e, p.platform_id)) continue;
      j.staging.push_back({e, h->second, p.platform_id});
    }
    for (const auto& id : f.node_ids) plan.node_job[id] = j.job_id;
    jobs[j.job_id] = std::move(j);
    plan.fragments.push_back(f);
  }

  // Transfer jobs follow the actual assignment; provisional transfer ids are
  // kept where the cut still moves data.
  std::vector<Fragment> transfers;
  for (const auto& l : compute_links(fragments, graph)) {
    const std::string& from = assignment.placement.at(l.from);
    const std::string& to = assignment.placement.at(l.to);
    if (from == to) {
      push_unique(jobs[l.to].depends_on, l.from);
      continue;
    }
    std::string id;
    for (const auto& f : fragments) {
      if (f.kind == FragmentKind::Transfer && f.connector == l.connector && f.to_fragment == l.to) id = f.fragment_id;
    }
    if (id.empty()) id = "t" + std::to_string(++transfer_count);
    Fragment t;
    t.fragment_id = id;
    t.kind = FragmentKind::Transfer;
    t.node_ids = {id + ".send", id + ".recv"};
    t.entry = {l.connector};
    t.exit = {l.connector};
    t.home = from;
    t.connector = l.connector;
    t.from_fragment = l.from;
    t.to_fragment = l.to;
    transfers.push_back(t);

    PlanJob j;
    j.job_id = id;
    j.kind = FragmentKind::Transfer;
    j.platform = to;
    j.backend = model.platform(to).executor_kind;
    j.node_ids = t.node_ids;
    j.depends_on = {l.from};
    j.connector = l.connector;
    j.from_platform = from;
    jobs[id] = std::move(j);
    push_unique(jobs[l.to].depends_on, id);
  }
  for (auto& [id, j] : jobs) std::sort(j.depends_on.begin(), j.depends_on.end());

  // Fragment list: each transfer precedes the fragment it feeds.
  std::vector<Fragment> ordered;
  for (const auto& f : plan.fragments) {
    for (const auto& t : transfers) {
      if (t.to_fragment == f.fragment_id) ordered.push_back(t);
    }
    ordered.push_back(f);
  }
  plan.fragments = std::move(ordered);

  // Jobs in dependency order, ties by fragment order.
  std::map<std::string, std::size_t> rank;
  for (std::size_t k = 0; k < plan.fragments.size(); ++k) rank[plan.fragments[k].fragment_id] = k;
  std::set<std::string> done;
  while (done.size() < jobs.size()) {
    const PlanJob* next = nullptr;
    for (const auto& [id, j] : jobs) {
      if (done.count(id)) continue;
      bool ready = std::all_of(j.depends_on.begin(), j.depends_on.end(),
                               [&](const std::string& d) { return done.count(d) > 0; });
      if (ready && (!next || rank[id] < rank[next->job_id])) next = &j;
    }
    if (!next) fail(ErrorCode::InvalidGraph, "job dependencies form a cycle");
    done.insert(next->job_id);
    plan.jobs.push_back(*next);
  }
  return plan;
}

namespace {

json fragment_to_json(const Fragment& f) {
  json j = {{"fragment_id", f.fragment_id},
            {"kind", fragment_kind_name(f.kind)},
            {"node_ids", f.node_ids},
            {"entry", f.entry},
            {"exit", f.exit},
            {"home", f.home ? json(*f.home) : json(nullptr)},
            {"gpus_required", f.gpus_required}};
  if (f.kind == FragmentKind::Transfer) {
    j["connector"] = f.connector;
    j["from_fragment"] = f.from_fragment;
    j["to_fragment"] = f.to_fragment;
  }
  return j;
}

Fragment fragment_from_json(const json& j) {
  Fragment f;
  f.fragment_id = j.at("fragment_id").get<std::string>();
  f.kind = j.at("kind").get<std::string>() == "transfer" ? FragmentKind::Transfer : FragmentKind::Compute;
  f.node_ids = j.at("node_ids").get<std::vector<std::string>>();
  f.entry = j.at("entry").get<std::vector<std::string>>();
  f.exit = j.at("exit").get<std::vector<std::string>>();
  if (!j.at("home").is_null()) f.home = j.at("home").get<std::string>();
  f.gpus_required = j.at("gpus_required").get<int>();
  if (f.kind == FragmentKind::Transfer) {
    f.connector = j.at("connector").get<std::string>();
    f.from_fragment = j.at("from_fragment").get<std::string>();
    f.to_fragment = j.at("to_fragment").get<std::string>();
  }
  return f;
}

json job_to_json(const PlanJob& p) {
  json staging = json::array();
  for (const auto& s : p.staging) staging.push_back({{"dataset", s.dataset}, {"from", s.from}, {"to", s.to}});
  json j = {{"job_id", p.job_id},
            {"kind", fragment_kind_name(p.kind)},
            {"platform", p.platform},
            {"backend", executor_kind_name(p.backend)},
            {"node_ids", p.node_ids},
            {"staging", staging},
            {"depends_on", p.depends_on}};
  if (p.kind == FragmentKind::Transfer) {
    j["connector"] = p.connector;
    j["from_platform"] = p.from_platform;
  }
  return j;
}

PlanJob job_from_json(const json& j) {
  PlanJob p;
  p.job_id = j.at("job_id").get<std::string>();
  p.kind = j.at("kind").get<std::string>() == "transfer" ? FragmentKind::Transfer : FragmentKind::Compute;
  p.platform = j.at("platform").get<std::string>();
  auto backend = parse_executor_kind(j.at("backend").get<std::string>());
  if (!backend) fail(ErrorCode::MalformedJson, "unknown backend " + j.at("backend").dump());
  p.backend = *backend;
  p.node_ids = j.at("node_ids").get<std::vector<std::string>>();
  for (const auto& s : j.at("staging")) {
    p.staging.push_back({s.at("dataset").get<std::string>(), s.at("from").get<std::string>(),
                         s.at("to").get<std::string>()});
  }
  p.depends_on = j.at("depends_on").get<std::vector<std::string>>();
  if (p.kind == FragmentKind::Transfer) {
    p.connector = j.at("connector").get<std::string>();
    p.from_platform = j.at("from_platform").get<std::string>();
  }
  return p;
}

}  // namespace

json plan_to_json(const ScheduledPlan& plan) {
  json fragments = json::array();
  for (const auto& f : plan.fragments) fragments.push_back(fragment_to_json(f));
  json jobs = json::array();
  for (const auto& j : plan.jobs) jobs.push_back(job_to_json(j));
  const PlatformAssignment& a = plan.assignment;
  json cost = {{"execution", a.breakdown.execution}, {"transfer", a.breakdown.transfer}, {"total", a.breakdown.total}};
  json dataflow = dataflow_to_json(plan.graph);
  json platforms = json::array();
  for (const auto& p : plan.platforms) platforms.push_back(platform_to_json(p));
  return {{"dataflow", dataflow},
          {"platforms", platforms},
          {"fragments", fragments},
          {"assignment",
           {{"placement", a.placement},
            {"total_cost", a.total_cost},
            {"feasible", a.feasible},
            {"diagnostics", a.diagnostics}}},
          {"cost", cost},
          {"jobs", jobs}};
}

ScheduledPlan plan_from_json(const json& j) {
  ScheduledPlan plan;
  try {
    plan.graph = dataflow_from_json(j.at("dataflow"));
    if (j.contains("platforms")) {
      for (const auto& p : j.at("platforms")) plan.platforms.push_back(platform_from_json(p));
    }
    for (const auto& f : j.at("fragments")) plan.fragments.push_back(fragment_from_json(f));
    const json& a = j.at("assignment");
    plan.assignment.placement = a.at("placement").get<std::map<std::string, std::string>>();
    plan.assignment.total_cost = a.at("total_cost").is_null() ? kInf : a.at("total_cost").get<double>();
    plan.assignment.feasible = a.at("feasible").get<bool>();
    plan.assignment.diagnostics = a.at("diagnostics").get<std::vector<std::string>>();
    const json& c = j.at("cost");
    plan.assignment.breakdown.execution = c.at("execution").get<std::map<std::string, double>>();
    plan.assignment.breakdown.transfer = c.at("transfer").get<std::map<std::string, double>>();
    plan.assignment.breakdown.total = c.at("total").is_null() ? kInf : c.at("total").get<double>();
    for (const auto& job : j.at("jobs")) plan.jobs.push_back(job_from_json(job));
  } catch (const json::exception& e) {
    fail(ErrorCode::MalformedJson, std::string("plan: ") + e.what());
  }
  for (const auto& job : plan.jobs) {
    for (const auto& id : job.node_ids) {
      if (job.kind == FragmentKind::Compute) plan.node_job[id] = job.job_id;
    }
  }
  return plan;
}

}  // namespace gyp
