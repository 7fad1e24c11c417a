/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include "gyp/executor/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <thread>
#include <unordered_map>

#include "gyp/common/error.hpp"
#include "gyp/core/expr.hpp"

namespace gyp {

int default_workers() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

LiveProfile live_tuple_profile(const DataflowGraph& graph, const std::vector<std::string>& order,
                               const std::map<std::string, std::int64_t>& connector_rows) {
  std::set<std::string> scheduled(order.begin(), order.end());
  // connector → consumers still to run
  std::map<std::string, int> pending;
  for (const auto& id : order) {
    const OperatorNode* n = graph.find(id);
    for (const auto& c : graph.data_inputs(*n)) ++pending[c];
  }
  auto rows = [&](const std::string& c) -> std::int64_t {
    auto it = connector_rows.find(c);
    return it == connector_rows.end() ? 0 : it->second;
  };
  LiveProfile p;
  std::int64_t live = 0;
  std::set<std::string> held;
  for (const auto& id : order) {
    const OperatorNode* n = graph.find(id);
    for (const auto& c : n->outputs) {
      if (graph.producer_of(c) != n) continue;
      live += rows(c);
      held.insert(c);
    }
    p.per_node[id] = live;
    p.peak = std::max(p.peak, live);
    for (const auto& c : graph.data_inputs(*n)) {
      if (--pending[c] == 0 && held.erase(c)) live -= rows(c);
    }
    for (const auto& c : n->outputs) {
      if (pending[c] == 0 && held.erase(c)) live -= rows(c);
    }
  }
  return p;
}

namespace {

using Part = std::vector<Row>;
using Clock = std::chrono::steady_clock;

struct Data {
  ModelPtr model;  // set for model connectors
  Schema schema;
  std::vector<Part> parts;

  std::int64_t rows() const {
    if (model) return 1;
    std::int64_t n = 0;
    for (const auto& p : parts) n += static_cast<std::int64_t>(p.size());
    return n;
  }
  Table gather() const {
    Table t;
    t.schema = schema;
    std::size_t n = 0;
    for (const auto& p : parts) n += p.size();
    t.rows.reserve(n);
    for (const auto& p : parts) t.rows.insert(t.rows.end(), p.begin(), p.end());
    return t;
  }
};

// Runs fn(0..n-1) on up to `workers` threads; rethrows the lowest-index
// failure so errors are deterministic.
template <class F>
void parallel_for(std::size_t n, int workers, F&& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<Part> split(Part rows, std::size_t parts) {
  std::vector<Part> out(parts);
  std::size_t n = rows.size();
  for (std::size_t k = 0; k < parts; ++k) {
    std::size_t lo = n * k / parts, hi = n * (k + 1) / parts;
    out[k].assign(std::make_move_iterator(rows.begin() + lo), std::make_move_iterator(rows.begin() + hi));
  }
  return out;
}

struct RowHash {
  std::size_t operator()(const Row& r) const {
    std::size_t h = 0x84222325;
    for (const auto& v : r) h = h * 0x100000001b3ULL ^ hash_value(v);
    return h;
  }
};
struct RowEq {
  bool operator()(const Row& a, const Row& b) const { return compare_rows(a, b) == 0; }
};

std::vector<std::size_t> column_indices(const Schema& s, const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  for (const auto& n : names) {
    auto i = s.index_of(n);
    if (!i) fail(ErrorCode::UnknownKey, "column '" + n + "' not in (" + s.str() + ")");
    out.push_back(*i);
  }
  return out;
}

Row project(const Row& r, const std::vector<std::size_t>& idx) {
  Row k;
  k.reserve(idx.size());
  for (std::size_t i : idx) k.push_back(r[i]);
  return k;
}

// Inner equi-join of `left` with `right` on `keys`; output is left columns
// followed by right non-key columns.
Part join_kernel(const Part& left, const Schema& ls, const Part& right, const Schema& rs,
                 const std::vector<std::string>& keys) {
  auto lk = column_indices(ls, keys);
  auto rk = column_indices(rs, keys);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (std::find(rk.begin(), rk.end(), i) == rk.end()) keep.push_back(i);
  }
  std::unordered_map<Row, std::vector<std::size_t>, RowHash, RowEq> index;
  for (std::size_t i = 0; i < right.size(); ++i) index[project(right[i], rk)].push_back(i);
  Part out;
  for (const auto& l : left) {
    auto it = index.find(project(l, lk));
    if (it == index.end()) continue;
    for (std::size_t ri : it->second) {
      Row r = l;
      for (std::size_t c : keep) r.push_back(right[ri][c]);
      out.push_back(std::move(r));
    }
  }
  return out;
}

Value sum_values(std::vector<Value>& vals, AttrType type) {
  if (type == AttrType::Int64) {
    std::int64_t s = 0;
    for (const auto& v : vals) s += std::get<std::int64_t>(v);
    return s;
  }
  std::vector<double> d;
  d.reserve(vals.size());
  for (const auto& v : vals) d.push_back(as_double(v));
  std::sort(d.begin(), d.end());
  return pairwise_sum(d.data(), d.size());
}

Part groupby_kernel(const Part& rows, const Schema& s, const std::vector<std::string>& keys,
                    const std::vector<AggSpec>& aggs) {
  auto kidx = column_indices(s, keys);
  std::vector<std::optional<std::size_t>> cols;
  for (const auto& a : aggs) {
    if (a.fn == AggFn::Count && a.column == "*") cols.push_back(std::nullopt);
    else cols.push_back(column_indices(s, {a.column}).front());
  }
  std::map<Row, std::vector<std::size_t>, RowLess> groups;
  for (std::size_t i = 0; i < rows.size(); ++i) groups[project(rows[i], kidx)].push_back(i);
  Part out;
  for (auto& [key, members] : groups) {
    Row r = key;
    for (std::size_t a = 0; a < aggs.size(); ++a) {
      const AggSpec& spec = aggs[a];
      if (spec.fn == AggFn::Count) {
        r.push_back(static_cast<std::int64_t>(members.size()));
        continue;
      }
      std::size_t c = *cols[a];
      std::vector<Value> vals;
      vals.reserve(members.size());
      for (std::size_t i : members) vals.push_back(rows[i][c]);
      switch (spec.fn) {
        case AggFn::Sum: r.push_back(sum_values(vals, s[c].type)); break;
        case AggFn::Mean: {
          Value total = sum_values(vals, AttrType::Float64);
          r.push_back(std::get<double>(total) / static_cast<double>(vals.size()));
          break;
        }
        case AggFn::Min:
        case AggFn::Max: {
          Value best = vals.front();
          for (const auto& v : vals) {
            int cmp = compare_values(v, best);
            if (spec.fn == AggFn::Min ? cmp < 0 : cmp > 0) best = v;
          }
          r.push_back(best);
          break;
        }
        case AggFn::Count: break;
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

// Keeps, per key, the smallest row under the all-column order.
Part dedup_kernel(const Part& rows, const std::vector<std::size_t>& kidx) {
  std::map<Row, const Row*, RowLess> best;
  for (const auto& r : rows) {
    auto [it, inserted] = best.emplace(project(r, kidx), &r);
    if (!inserted && compare_rows(r, *it->second) < 0) it->second = &r;
  }
  Part out;
  out.reserve(best.size());
  for (const auto& [k, r] : best) out.push_back(*r);
  return out;
}

Value cast_value(const Value& v, AttrType to) {
  if (type_of(v) == to) return v;
  return parse_value(format_value(v), to);
}

void check_conformance(const Part& rows, const Schema& s, const std::string& node) {
  for (const auto& r : rows) {
    bool ok = r.size() == s.size();
    for (std::size_t i = 0; ok && i < r.size(); ++i) ok = type_of(r[i]) == s[i].type;
    if (!ok) fail(ErrorCode::SchemaViolation, "node '" + node + "': output row does not conform to (" + s.str() + ")");
  }
}

std::map<std::string, PortType> connector_types(const DataflowGraph& g) {
  bool complete = true;
  for (const auto& n : g.nodes) {
    for (const auto& c : n.outputs) {
      if (g.producer_of(c) == &n && n.op != OperatorKind::Sink && !g.connector_types.count(c)) complete = false;
    }
  }
  if (complete) return g.connector_types;
  Propagation p = propagate_schemas(g, FunctionRegistry::with_builtins(), {});
  if (!p.violations.empty()) fail(ErrorCode::InvalidGraph, p.violations.front().message);
  for (const auto& [c, t] : g.connector_types) p.connectors[c] = t;
  return p.connectors;
}

class Engine {
 public:
  Engine(const DataflowGraph& g, const std::map<std::string, ExecInput>& inputs, const ExecOptions& o)
      : g_(g), inputs_(inputs), options_(o), types_(connector_types(g)) {
    workers_ = o.backend == ExecutorKind::Single ? 1 : (o.workers > 0 ? o.workers : default_workers());
  }

  ExecResult run(const std::vector<std::string>& requested) {
    std::vector<std::string> order = topological_order(g_);
    if (!requested.empty()) {
      std::set<std::string> want(requested.begin(), requested.end());
      for (const auto& id : want) {
        if (!g_.find(id)) fail(ErrorCode::UnknownNode, id);
      }
      std::erase_if(order, [&](const std::string& id) { return !want.count(id); });
    }
    std::set<std::string> in_set(order.begin(), order.end());
    std::map<std::string, int> pending;
    for (const auto& id : order) {
      for (const auto& c : g_.data_inputs(*g_.find(id))) ++pending[c];
    }

    for (const auto& id : order) {
      const OperatorNode& n = *g_.find(id);
      NodeStats stats;
      stats.node_id = id;
      auto t0 = Clock::now();
      std::vector<Data> outs;
      try {
        outs = run_node(n, stats);
      } catch (const Error& e) {
        if (e.detail().rfind("node '", 0) == 0) throw;
        fail(e.code(), "node '" + id + "': " + e.detail());
      } catch (const std::exception& e) {
        fail(ErrorCode::FunctionFailure, "node '" + id + "': " + e.what());
      }
      stats.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();
      if (n.op == OperatorKind::Sink || n.op == OperatorKind::Train) {
        stats.output_cardinality = n.op == OperatorKind::Train ? 1 : stats.input_cardinalities.front();
      } else if (!outs.empty()) {
        stats.output_cardinality = outs.front().rows();
      }

      for (std::size_t i = 0; i < outs.size() && i < n.outputs.size(); ++i) {
        const std::string& c = n.outputs[i];
        if (g_.producer_of(c) != &n) continue;
        if (outs[i].model) {
          result_.models[c] = outs[i].model;
        } else {
          result_.connector_rows[c] = outs[i].rows();
        }
        bool exported = false;
        bool consumed = false;
        for (const OperatorNode* consumer : g_.consumers_of(c)) {
          if (in_set.count(consumer->node_id)) consumed = true;
          else exported = true;
        }
        if ((exported || !consumed) && !outs[i].model) result_.tables[c] = outs[i].gather();
        if (consumed) values_[c] = std::move(outs[i]);
      }
      for (const auto& c : g_.data_inputs(n)) {
        if (--pending[c] == 0) values_.erase(c);
      }
      result_.nodes.push_back(std::move(stats));
    }

    LiveProfile live = live_tuple_profile(g_, order, result_.connector_rows);
    for (auto& s : result_.nodes) s.live_tuples = live.per_node[s.node_id];
    result_.peak_live_tuples = live.peak;
    return std::move(result_);
  }

 private:
  const PortType& type(const std::string& c) const {
    auto it = types_.find(c);
    if (it == types_.end()) fail(ErrorCode::InvalidGraph, "connector '" + c + "' has no type");
    return it->second;
  }

  const Data& value(const std::string& c) {
    auto it = values_.find(c);
    if (it != values_.end()) return it->second;
    auto in = inputs_.find(c);
    if (in == inputs_.end()) fail(ErrorCode::MissingInput, "connector '" + c + "'");
    Data d;
    if (const auto* m = std::get_if<ModelPtr>(&in->second)) {
      d.model = *m;
    } else if (const auto* t = std::get_if<Table>(&in->second)) {
      d.schema = t->schema;
      d.parts = split(t->rows, workers_);
    } else {
      fail(ErrorCode::MissingInput, "connector '" + c + "' is a stored dataset, not an intermediate");
    }
    return values_[c] = std::move(d);
  }

  Data table_like(const Schema& s) const {
    Data d;
    d.schema = s;
    return d;
  }

  // Applies fn to every partition in parallel.
  template <class F>
  Data per_partition(const Data& in, const Schema& out_schema, F&& fn) {
    Data out = table_like(out_schema);
    out.parts.resize(in.parts.size());
    parallel_for(in.parts.size(), workers_, [&](std::size_t k) { out.parts[k] = fn(in.parts[k]); });
    return out;
  }

  // Hash-repartitions on column `key`; no key coalesces into one partition.
  Data repartition(const Data& in, std::optional<std::size_t> key) {
    Data out = table_like(in.schema);
    if (workers_ == 1 || !key) {
      out.parts.push_back(in.gather().rows);
      return out;
    }
    std::size_t w = static_cast<std::size_t>(workers_);
    std::vector<std::vector<Part>> buckets(in.parts.size(), std::vector<Part>(w));
    parallel_for(in.parts.size(), workers_, [&](std::size_t k) {
      for (const auto& r : in.parts[k]) buckets[k][hash_value(r[*key]) % w].push_back(r);
    });
    out.parts.resize(w);
    parallel_for(w, workers_, [&](std::size_t t) {
      for (auto& b : buckets) {
        out.parts[t].insert(out.parts[t].end(), std::make_move_iterator(b[t].begin()),
                            std::make_move_iterator(b[t].end()));
      }
    });
    return out;
  }

  Data read_source(const std::string& connector, const PortType& t, std::int64_t& rows_read) {
    auto in = inputs_.find(connector);
    if (in == inputs_.end()) fail(ErrorCode::MissingInput, "no data bound to connector '" + connector + "'");
    Data d;
    if (const auto* m = std::get_if<ModelPtr>(&in->second)) {
      d.model = *m;
      rows_read = 1;
      return d;
    }
    d.schema = t.schema;
    if (const auto* tab = std::get_if<Table>(&in->second)) {
      if (tab->schema != t.schema) {
        fail(ErrorCode::SchemaViolation, "input (" + tab->schema.str() + ") differs from (" + t.schema.str() + ")");
      }
      d.parts = split(tab->rows, workers_);
    } else {
      const auto& loc = std::get<DatasetLocation>(in->second);
      std::vector<Table> files(loc.files.size());
      parallel_for(loc.files.size(), workers_, [&](std::size_t i) { files[i] = read_csv(loc.files[i], t.schema); });
      std::size_t w = static_cast<std::size_t>(workers_);
      if (w > 1 && files.size() >= w) {
        d.parts.resize(w);
        for (std::size_t i = 0; i < files.size(); ++i) {
          auto& p = d.parts[i % w];
          p.insert(p.end(), std::make_move_iterator(files[i].rows.begin()),
                   std::make_move_iterator(files[i].rows.end()));
        }
      } else {
        Part all;
        for (auto& f : files) {
          all.insert(all.end(), std::make_move_iterator(f.rows.begin()), std::make_move_iterator(f.rows.end()));
        }
        d.parts = split(std::move(all), w);
      }
    }
    rows_read = d.rows();
    return d;
  }

  std::string param(const OperatorNode& n, const char* name, bool required = true) const {
    auto v = n.param_string(name);
    if (!v && required) fail(ErrorCode::MissingParam, name);
    return v.value_or("");
  }

  std::vector<Data> run_node(const OperatorNode& n, NodeStats& stats) {
    std::vector<const Data*> in;
    if (n.op != OperatorKind::Source) {
      for (const auto& c : g_.data_inputs(n)) {
        in.push_back(&value(c));
        stats.input_cardinalities.push_back(in.back()->rows());
      }
    }
    auto out_type = [&](std::size_t i) -> const PortType& { return type(n.outputs.at(i)); };
    const NativeFunction* native = options_.library ? options_.library->find(n.function_alias) : nullptr;
    if (native && is_element_at_a_time(n.op) && n.op != OperatorKind::Predict) {
      const Schema& s_in = in.at(0)->schema;
      const Schema& s_out = out_type(0).schema;
      Data out = per_partition(*in[0], s_out, [&](const Part& p) {
        Part rows;
        try {
          rows = (*native)(n, s_in, s_out, p);
        } catch (const std::exception& e) {
          fail(ErrorCode::FunctionFailure, "node '" + n.node_id + "': " + e.what());
        }
        check_conformance(rows, s_out, n.node_id);
        return rows;
      });
      std::vector<Data> v;
      v.push_back(std::move(out));
      return v;
    }

    std::vector<Data> outs;
    switch (n.op) {
      case OperatorKind::Source: {
        std::int64_t total = 0;
        for (std::size_t i = 0; i < n.outputs.size(); ++i) {
          std::int64_t rows = 0;
          const PortType& t = out_type(i);
          outs.push_back(read_source(n.outputs[i], t, rows));
          total += rows;
        }
        stats.input_cardinalities.push_back(total);
        break;
      }
      case OperatorKind::Sink: {
        Data all = repartition(*in.at(0), std::nullopt);
        Table t{all.schema, std::move(all.parts.front())};
        result_.sinks[n.node_id] = t.sorted();
        break;
      }
      case OperatorKind::Filter: {
        const Schema& s = in.at(0)->schema;
        auto text = n.param_string("predicate");
        Expr pred = Expr::parse_predicate(text.value_or("true"), s);
        outs.push_back(per_partition(*in[0], s, [&](const Part& p) {
          Part r;
          for (const auto& row : p) {
            if (pred.test(row)) r.push_back(row);
          }
          return r;
        }));
        break;
      }
      case OperatorKind::Map: {
        const Schema& s = in.at(0)->schema;
        const Schema& so = out_type(0).schema;
        std::vector<std::pair<std::size_t, Expr>> exprs;
        for (const auto& a : parse_assignments(n.param_string("assign").value_or(""))) {
          exprs.emplace_back(*so.index_of(a.target), Expr::parse(a.expression, s));
        }
        outs.push_back(per_partition(*in[0], so, [&](const Part& p) {
          Part r;
          r.reserve(p.size());
          for (const auto& row : p) {
            Row o = row;
            o.resize(so.size());
            std::vector<Value> vals;
            vals.reserve(exprs.size());
            for (const auto& [idx, e] : exprs) vals.push_back(e.eval(row));
            for (std::size_t k = 0; k < exprs.size(); ++k) o[exprs[k].first] = std::move(vals[k]);
            r.push_back(std::move(o));
          }
          return r;
        }));
        break;
      }
      case OperatorKind::Cast: {
        const Schema& s = in.at(0)->schema;
        const Schema& so = out_type(0).schema;
        std::vector<std::pair<std::size_t, AttrType>> casts;
        if (auto cols = n.param_string("columns")) {
          Schema targets = Schema::parse(*cols);
          for (const auto& a : targets.attributes()) casts.emplace_back(*s.index_of(a.name), a.type);
        }
        outs.push_back(per_partition(*in[0], so, [&](const Part& p) {
          Part r;
          r.reserve(p.size());
          for (const auto& row : p) {
            Row o = row;
            for (const auto& [idx, t] : casts) {
              try {
                o[idx] = cast_value(row[idx], t);
              } catch (const Error& e) {
                fail(ErrorCode::CastError, "column '" + s[idx].name + "': " + e.detail());
              }
            }
            r.push_back(std::move(o));
          }
          return r;
        }));
        break;
      }
      case OperatorKind::Join: {
        auto keys = parse_name_list(param(n, "keys"));
        std::vector<Data> sides;
        for (const Data* d : in) sides.push_back(repartition(*d, column_indices(d->schema, {keys.front()}).front()));
        const Schema& so = out_type(0).schema;
        Data out = table_like(so);
        out.parts.resize(sides.front().parts.size());
        parallel_for(out.parts.size(), workers_, [&](std::size_t k) {
          Part acc = sides[0].parts[k];
          Schema acc_schema = sides[0].schema;
          for (std::size_t i = 1; i < sides.size(); ++i) {
            acc = join_kernel(acc, acc_schema, sides[i].parts[k], sides[i].schema, keys);
            std::vector<Attribute> attrs = acc_schema.attributes();
            for (const auto& a : sides[i].schema.attributes()) {
              if (std::find(keys.begin(), keys.end(), a.name) == keys.end()) attrs.push_back(a);
            }
            acc_schema = Schema(std::move(attrs));
          }
          out.parts[k] = std::move(acc);
        });
        outs.push_back(std::move(out));
        break;
      }
      case OperatorKind::GroupBy: {
        const Schema& s = in.at(0)->schema;
        auto keys = parse_name_list(param(n, "keys"));
        auto aggs = parse_aggregates(n.param_string("aggs").value_or(""));
        std::optional<std::size_t> k;
        if (!keys.empty()) k = column_indices(s, {keys.front()}).front();
        Data parts = repartition(*in[0], k);
        outs.push_back(per_partition(parts, out_type(0).schema,
                                     [&](const Part& p) { return groupby_kernel(p, s, keys, aggs); }));
        break;
      }
      case OperatorKind::Dedup: {
        const Schema& s = in.at(0)->schema;
        auto text = n.param_string("keys");
        std::vector<std::string> keys = text ? parse_name_list(*text) : s.names();
        if (keys.empty()) keys = s.names();
        auto kidx = column_indices(s, keys);
        Data parts = repartition(*in[0], kidx.front());
        outs.push_back(per_partition(parts, s, [&](const Part& p) { return dedup_kernel(p, kidx); }));
        break;
      }
      case OperatorKind::Train: {
        Data all = repartition(*in.at(0), std::nullopt);
        Table t{all.schema, std::move(all.parts.front())};
        OlsOptions o;
        auto ridge = n.params.find("ridge");
        if (ridge != n.params.end()) o.ridge = as_double(ridge->second);
        auto model = std::make_shared<LinearModel>(
            fit_ols(t, parse_name_list(param(n, "features")), param(n, "target"), o));
        Data m;
        m.model = model;
        outs.push_back(std::move(m));
        if (n.outputs.size() > 1) {
          Data metrics = table_like(training_metrics_schema());
          metrics.parts.push_back({Row{Value(model->rmse), Value(model->n_rows)}});
          outs.push_back(std::move(metrics));
        }
        break;
      }
      case OperatorKind::Predict: {
        const Data* model = nullptr;
        const Data* data = nullptr;
        for (const Data* d : in) (d->model ? model : data) = d;
        if (!model || !data) fail(ErrorCode::SchemaViolation, "predict needs one dataset and one model");
        const LinearModel& m = *model->model;
        auto fidx = column_indices(data->schema, m.features);
        const Schema& so = out_type(0).schema;
        outs.push_back(per_partition(*data, so, [&](const Part& p) {
          Part r;
          r.reserve(p.size());
          std::vector<double> x(fidx.size());
          for (const auto& row : p) {
            for (std::size_t i = 0; i < fidx.size(); ++i) x[i] = as_double(row[fidx[i]]);
            Row o = row;
            o.push_back(m.predict(x));
            r.push_back(std::move(o));
          }
          return r;
        }));
        break;
      }
    }
    return outs;
  }

  const DataflowGraph& g_;
  const std::map<std::string, ExecInput>& inputs_;
  ExecOptions options_;
  std::map<std::string, PortType> types_;
  int workers_ = 1;
  std::map<std::string, Data> values_;
  ExecResult result_;
};

}  // namespace

ExecResult execute(const DataflowGraph& graph, const std::map<std::string, ExecInput>& inputs,
                   const ExecOptions& options, const std::vector<std::string>& nodes) {
  Engine e(graph, inputs, options);
  return e.run(nodes);
}

}  // namespace gyp
