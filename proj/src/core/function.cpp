/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include "gyp/core/function.hpp"

#include <algorithm>
#include <cctype>

#include "gyp/common/error.hpp"

namespace gyp {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto end = s.find(sep, pos);
    if (end == std::string_view::npos) end = s.size();
    out.push_back(s.substr(pos, end - pos));
    pos = end + 1;
  }
  return out;
}

}  // namespace

std::string_view operator_name(OperatorKind op) {
  switch (op) {
    case OperatorKind::Source: return "source";
    case OperatorKind::Sink: return "sink";
    case OperatorKind::Map: return "map";
    case OperatorKind::Filter: return "filter";
    case OperatorKind::Join: return "join";
    case OperatorKind::GroupBy: return "groupby";
    case OperatorKind::Dedup: return "dedup";
    case OperatorKind::Cast: return "cast";
    case OperatorKind::Train: return "train";
    case OperatorKind::Predict: return "predict";
  }
  return "?";
}

std::optional<OperatorKind> parse_operator_name(std::string_view name) {
  std::string n = lower(name);
  if (n == "source") return OperatorKind::Source;
  if (n == "sink") return OperatorKind::Sink;
  if (n == "map") return OperatorKind::Map;
  if (n == "filter") return OperatorKind::Filter;
  if (n == "join") return OperatorKind::Join;
  if (n == "groupby" || n == "group_by") return OperatorKind::GroupBy;
  if (n == "dedup") return OperatorKind::Dedup;
  if (n == "cast") return OperatorKind::Cast;
  if (n == "train" || n == "fit") return OperatorKind::Train;
  if (n == "predict" || n == "infer") return OperatorKind::Predict;
  return std::nullopt;
}

bool is_data_access(OperatorKind op) { return op == OperatorKind::Source || op == OperatorKind::Sink; }

bool is_element_at_a_time(OperatorKind op) {
  return op == OperatorKind::Map || op == OperatorKind::Filter || op == OperatorKind::Cast ||
         op == OperatorKind::Predict;
}

std::string_view function_kind_name(FunctionKind kind) {
  switch (kind) {
    case FunctionKind::Source: return "source";
    case FunctionKind::Sink: return "sink";
    case FunctionKind::TransformElement: return "transform_element";
    case FunctionKind::TransformSet: return "transform_set";
    case FunctionKind::Learner: return "learner";
    case FunctionKind::ModelApply: return "model_apply";
  }
  return "?";
}

std::optional<FunctionKind> parse_function_kind(std::string_view name) {
  for (auto k : {FunctionKind::Source, FunctionKind::Sink, FunctionKind::TransformElement,
                 FunctionKind::TransformSet, FunctionKind::Learner, FunctionKind::ModelApply}) {
    if (function_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

FunctionKind expected_function_kind(OperatorKind op) {
  switch (op) {
    case OperatorKind::Source: return FunctionKind::Source;
    case OperatorKind::Sink: return FunctionKind::Sink;
    case OperatorKind::Map:
    case OperatorKind::Filter:
    case OperatorKind::Cast: return FunctionKind::TransformElement;
    case OperatorKind::Join:
    case OperatorKind::GroupBy:
    case OperatorKind::Dedup: return FunctionKind::TransformSet;
    case OperatorKind::Train: return FunctionKind::Learner;
    case OperatorKind::Predict: return FunctionKind::ModelApply;
  }
  return FunctionKind::TransformElement;
}

std::string Arity::str() const {
  if (max < 0) return std::to_string(min) + "+";
  if (min == max) return std::to_string(min);
  return std::to_string(min) + ".." + std::to_string(max);
}

std::string_view builtin_alias(OperatorKind op) {
  switch (op) {
    case OperatorKind::Source: return "csv_source";
    case OperatorKind::Sink: return "csv_sink";
    case OperatorKind::Train: return "ols_train";
    default: return operator_name(op);
  }
}

FunctionDescriptor builtin_descriptor(OperatorKind op) {
  FunctionDescriptor d;
  d.alias = std::string(builtin_alias(op));
  d.kind = expected_function_kind(op);
  d.opaque = false;
  switch (op) {
    case OperatorKind::Source:
      d.arity_in = {1, -1};
      d.arity_out = {1, -1};
      d.params_schema = {{"schema", AttrType::String}};
      break;
    case OperatorKind::Sink:
      d.arity_in = {1, 1};
      d.arity_out = {0, 0};
      d.params_schema = {{"bucket", AttrType::String}};
      break;
    case OperatorKind::Filter:
      d.arity_in = d.arity_out = {1, 1};
      d.params_schema = {{"predicate", AttrType::String}};
      d.required_params = {"predicate"};
      break;
    case OperatorKind::Map:
      d.arity_in = d.arity_out = {1, 1};
      d.params_schema = {{"assign", AttrType::String}};
      d.required_params = {"assign"};
      break;
    case OperatorKind::Cast:
      d.arity_in = d.arity_out = {1, 1};
      d.params_schema = {{"columns", AttrType::String}};
      d.required_params = {"columns"};
      break;
    case OperatorKind::Join:
      d.arity_in = {2, -1};
      d.arity_out = {1, 1};
      d.params_schema = {{"keys", AttrType::String}};
      d.required_params = {"keys"};
      break;
    case OperatorKind::GroupBy:
      d.arity_in = d.arity_out = {1, 1};
      d.params_schema = {{"keys", AttrType::String}, {"aggs", AttrType::String}};
      d.required_params = {"keys"};
      break;
    case OperatorKind::Dedup:
      d.arity_in = d.arity_out = {1, 1};
      d.params_schema = {{"keys", AttrType::String}};
      d.required_params = {"keys"};
      break;
    case OperatorKind::Train:
      d.arity_in = {1, 1};
      d.arity_out = {1, 2};
      d.params_schema = {{"features", AttrType::String}, {"target", AttrType::String}, {"gpus", AttrType::Int64}};
      d.required_params = {"features", "target"};
      break;
    case OperatorKind::Predict:
      d.arity_in = {2, 2};
      d.arity_out = {1, 1};
      break;
  }
  return d;
}

FunctionRegistry FunctionRegistry::with_builtins() {
  FunctionRegistry r;
  for (auto op : {OperatorKind::Source, OperatorKind::Sink, OperatorKind::Map, OperatorKind::Filter,
                  OperatorKind::Join, OperatorKind::GroupBy, OperatorKind::Dedup, OperatorKind::Cast,
                  OperatorKind::Train, OperatorKind::Predict}) {
    r.add(builtin_descriptor(op));
  }
  return r;
}

void FunctionRegistry::add(FunctionDescriptor descriptor) {
  std::string alias = descriptor.alias;
  functions_.insert_or_assign(std::move(alias), std::move(descriptor));
}

const FunctionDescriptor* FunctionRegistry::find(std::string_view alias) const {
  auto it = functions_.find(alias);
  return it == functions_.end() ? nullptr : &it->second;
}

FunctionDescriptor FunctionRegistry::resolve(std::string_view alias, OperatorKind op) const {
  if (const auto* d = find(alias)) return *d;
  FunctionDescriptor d = builtin_descriptor(op);
  d.alias = std::string(alias);
  d.opaque = true;
  d.required_params.clear();
  return d;
}

std::vector<std::string> FunctionRegistry::aliases() const {
  std::vector<std::string> out;
  for (const auto& [alias, _] : functions_) out.push_back(alias);
  return out;
}

std::vector<std::string> parse_name_list(std::string_view text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  for (auto part : split(text, ',')) {
    auto name = trim(part);
    if (name.empty()) fail(ErrorCode::SchemaMismatch, "empty name in list '" + std::string(text) + "'");
    out.emplace_back(name);
  }
  return out;
}

std::vector<Assignment> parse_assignments(std::string_view text) {
  std::vector<Assignment> out;
  for (auto part : split(text, ';')) {
    if (trim(part).empty()) continue;
    auto eq = part.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::SyntaxError, "assignment '" + std::string(trim(part)) + "' lacks '='");
    }
    auto target = trim(part.substr(0, eq));
    auto expr = trim(part.substr(eq + 1));
    if (target.empty() || expr.empty()) {
      fail(ErrorCode::SyntaxError, "malformed assignment '" + std::string(trim(part)) + "'");
    }
    out.push_back({std::string(target), std::string(expr)});
  }
  return out;
}

std::string_view agg_name(AggFn fn) {
  switch (fn) {
    case AggFn::Sum: return "sum";
    case AggFn::Count: return "count";
    case AggFn::Mean: return "mean";
    case AggFn::Min: return "min";
    case AggFn::Max: return "max";
  }
  return "?";
}

std::vector<AggSpec> parse_aggregates(std::string_view text) {
  std::vector<AggSpec> out;
  if (trim(text).empty()) return out;
  for (auto part : split(text, ',')) {
    auto item = trim(part);
    auto colon = item.find(':');
    if (colon == std::string_view::npos) {
      fail(ErrorCode::SyntaxError, "aggregate '" + std::string(item) + "' lacks ':'");
    }
    std::string fn = lower(trim(item.substr(0, colon)));
    std::string col(trim(item.substr(colon + 1)));
    AggSpec spec{AggFn::Sum, col, ""};
    if (fn == "sum") spec.fn = AggFn::Sum;
    else if (fn == "count") spec.fn = AggFn::Count;
    else if (fn == "mean" || fn == "avg") spec.fn = AggFn::Mean;
    else if (fn == "min") spec.fn = AggFn::Min;
    else if (fn == "max") spec.fn = AggFn::Max;
    else fail(ErrorCode::SyntaxError, "unknown aggregate '" + fn + "'");
    if (col == "*" && spec.fn != AggFn::Count) {
      fail(ErrorCode::SyntaxError, "only count accepts '*'");
    }
    spec.output = col == "*" ? std::string("count") : std::string(agg_name(spec.fn)) + "_" + col;
    out.push_back(std::move(spec));
  }
  return out;
}

}  // namespace gyp
