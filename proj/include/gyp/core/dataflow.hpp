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
#include <vector>

#include "gyp/common/gid.hpp"
#include "gyp/common/value.hpp"
#include "gyp/core/function.hpp"
#include "json.hpp"

namespace gyp {

enum class ArtifactKind { Dataset, Model, Function, Dataflow };

std::string_view artifact_kind_name(ArtifactKind kind);
std::optional<ArtifactKind> parse_artifact_kind(std::string_view name);

using Params = std::map<std::string, Value>;

struct OperatorNode {
  std::string node_id;
  OperatorKind op = OperatorKind::Map;
  std::string function_alias;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  Params params;

  /// String parameter or nullopt when absent.
  std::optional<std::string> param_string(std::string_view name) const;

  friend bool operator==(const OperatorNode&, const OperatorNode&) = default;
};

/// Producer/consumer pairing through a named connector.
struct Edge {
  std::string producer;
  std::string consumer;
  std::string connector;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// What flows through a connector: a table with a schema, or a trained model.
struct PortType {
  bool is_model = false;
  Schema schema;
  std::vector<std::string> features;
  std::string target;

  friend bool operator==(const PortType&, const PortType&) = default;
};

/// Schema of the learner's optional metrics output.
Schema training_metrics_schema();

struct DataflowGraph {
  std::string header_gid;
  std::optional<Gid> gid;
  std::string description;
  std::vector<OperatorNode> nodes;
  std::vector<Edge> edges;

  /// Concrete form only: placeholder → GID (inputs) or output name (sinks).
  std::optional<std::map<std::string, std::string>> binding;
  std::optional<Params> param_values;
  /// Filled by bind(): type of every connector.
  std::map<std::string, PortType> connector_types;

  bool is_concrete() const { return binding.has_value(); }

  const OperatorNode* find(std::string_view node_id) const;
  OperatorNode* find(std::string_view node_id);

  /// Node producing `connector`, or nullptr for placeholders.
  const OperatorNode* producer_of(std::string_view connector) const;
  std::vector<const OperatorNode*> consumers_of(std::string_view connector) const;

  /// Source inputs and sink output-path inputs not produced by any node.
  std::set<std::string> placeholders() const;
  /// Inputs of `node` that carry data (excludes sink output placeholders).
  std::vector<std::string> data_inputs(const OperatorNode& node) const;
  /// Placeholder naming a sink's output, if any.
  std::optional<std::string> sink_target(const OperatorNode& node) const;

  /// Recomputes `edges` from connector names. Throws DanglingConnector when
  /// two nodes produce the same connector.
  void rebuild_edges();
};

/// Parses the JSON dialect: an array whose first element is the
/// {"GID", "description"} header followed by node objects.
DataflowGraph parse_dataflow(std::string_view text);
DataflowGraph dataflow_from_json(const nlohmann::json& doc);
nlohmann::json dataflow_to_json(const DataflowGraph& graph);
std::string serialize_dataflow(const DataflowGraph& graph, int indent = 2);

/// Kahn's algorithm with ties broken by node_id. Throws InvalidGraph on a cycle.
std::vector<std::string> topological_order(const DataflowGraph& graph);

enum class ViolationKind {
  Cycle,
  ArityMismatch,
  KindMismatch,
  UnknownColumn,
  TypeError,
  SchemaMismatch,
  UnproducedInput,
  UnconsumedOutput,
  BadParam,
};

std::string_view violation_kind_name(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::vector<std::string> nodes;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool contains(ViolationKind kind) const;
  std::string str() const;
};

/// Placeholder → type map used to seed schema propagation.
using PortMap = std::map<std::string, PortType>;

/// Reports every structural and schema violation. Schemas are propagated from
/// `inputs` and from sources' declared "schema" parameters; connectors whose
/// type is unknown are skipped.
ValidationReport validate(const DataflowGraph& graph, const FunctionRegistry& registry,
                          const PortMap& inputs = {});

struct Propagation {
  PortMap connectors;
  std::vector<Violation> violations;
};

/// Forward schema propagation over a (cycle-free) graph.
Propagation propagate_schemas(const DataflowGraph& graph, const FunctionRegistry& registry,
                              const PortMap& inputs);

struct ResolvedArtifact {
  ArtifactKind kind = ArtifactKind::Dataset;
  Schema schema;
  std::vector<std::string> features;
  std::string target;
};

/// Looks up bound artifacts; implemented by the catalog.
class ArtifactResolver {
 public:
  virtual ~ArtifactResolver() = default;
  virtual std::optional<ResolvedArtifact> resolve_artifact(const Gid& gid) const = 0;
};

/// Produces the concrete form of `graph`: placeholders bound, "${name}"
/// references in string parameters substituted from `params`, and connector
/// types resolved and propagated.
DataflowGraph bind(const DataflowGraph& graph, const std::map<std::string, std::string>& bindings,
                   const Params& params, const ArtifactResolver& resolver, const FunctionRegistry& registry);

/// Attribute footprint of a node, used for rewrite legality.
struct NodeEffects {
  std::set<std::string> reads;
  std::set<std::string> writes;
};

NodeEffects node_effects(const OperatorNode& node, const FunctionDescriptor& descriptor);

nlohmann::json value_to_json(const Value& v);
Value value_from_json(const nlohmann::json& j);

}  // namespace gyp
