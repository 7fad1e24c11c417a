/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gyp/common/value.hpp"

namespace gyp {

enum class OperatorKind { Source, Sink, Map, Filter, Join, GroupBy, Dedup, Cast, Train, Predict };

std::string_view operator_name(OperatorKind op);
/// Case-insensitive; accepts the spellings used in dataflow documents
/// ("Join", "groupby", "group_by").
std::optional<OperatorKind> parse_operator_name(std::string_view name);

bool is_data_access(OperatorKind op);
/// map, filter, cast and predict process one tuple at a time.
bool is_element_at_a_time(OperatorKind op);

enum class FunctionKind { Source, Sink, TransformElement, TransformSet, Learner, ModelApply };

std::string_view function_kind_name(FunctionKind kind);
std::optional<FunctionKind> parse_function_kind(std::string_view name);
FunctionKind expected_function_kind(OperatorKind op);

/// Inclusive bounds on connector counts; max < 0 means unbounded.
struct Arity {
  int min = 0;
  int max = 0;
  bool admits(std::size_t n) const {
    return static_cast<int>(n) >= min && (max < 0 || static_cast<int>(n) <= max);
  }
  std::string str() const;
  friend bool operator==(const Arity&, const Arity&) = default;
};

struct FunctionDescriptor {
  std::string alias;
  FunctionKind kind = FunctionKind::TransformElement;
  /// Declared attribute footprint of black-box functions. Builtins derive
  /// theirs from node parameters instead.
  std::set<std::string> reads;
  std::set<std::string> writes;
  Arity arity_in;
  Arity arity_out;
  std::vector<std::pair<std::string, AttrType>> params_schema;
  std::vector<std::string> required_params;
  bool opaque = true;
};

/// Alias → descriptor lookup. Unregistered aliases resolve to an opaque
/// descriptor synthesized from the node's operator class.
class FunctionRegistry {
 public:
  static FunctionRegistry with_builtins();

  void add(FunctionDescriptor descriptor);
  const FunctionDescriptor* find(std::string_view alias) const;
  FunctionDescriptor resolve(std::string_view alias, OperatorKind op) const;
  std::vector<std::string> aliases() const;

 private:
  std::map<std::string, FunctionDescriptor, std::less<>> functions_;
};

/// The builtin alias implementing each operator class.
std::string_view builtin_alias(OperatorKind op);
FunctionDescriptor builtin_descriptor(OperatorKind op);

// Parameter mini-formats shared by the builtins.

/// "a, b ,c" → {"a","b","c"}
std::vector<std::string> parse_name_list(std::string_view text);

struct Assignment {
  std::string target;
  std::string expression;
};
/// "x = a + 1; y = b * 2"
std::vector<Assignment> parse_assignments(std::string_view text);

enum class AggFn { Sum, Count, Mean, Min, Max };
struct AggSpec {
  AggFn fn;
  std::string column;  // "*" for count(*)
  std::string output;
};
/// "sum:x,count:*,mean:y" → outputs sum_x, count, mean_y
std::vector<AggSpec> parse_aggregates(std::string_view text);
std::string_view agg_name(AggFn fn);

}  // namespace gyp
