/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include "gyp/kgraph/facts.hpp"

#include <map>

namespace gyp {

void declare_base_predicates(FactBase& fb) {
  for (const char* p : {"dataSet", "model", "learner", "dataFlow", "model_run", "model_training", "trans_run"}) {
    fb.declare(p, 1);
  }
  for (const char* p : {"has_input", "has_output", "uses", "has_name", "in_domain", "version_of"}) {
    fb.declare(p, 2);
  }
}

FactBase build_facts(const Catalog& catalog, const ProvenanceStore& provenance) {
  FactBase fb;
  declare_base_predicates(fb);
  std::map<std::string, std::string> function_by_name;
  for (const auto& a : catalog.artifacts()) {
    std::string g = a.gid.str();
    switch (a.kind) {
      case ArtifactKind::Dataset: fb.add("dataSet", {g}); break;
      case ArtifactKind::Model: fb.add("model", {g}); break;
      case ArtifactKind::Dataflow: fb.add("dataFlow", {g}); break;
      case ArtifactKind::Function:
        if (a.meta_string("kind").value_or("") == "learner") fb.add("learner", {g});
        if (!a.name.empty()) {
          fb.add("has_name", {g, a.name});
          function_by_name.emplace(a.name, g);
        }
        break;
    }
    if (!a.domain.empty()) fb.add("in_domain", {g, a.domain});
    if (a.version_of) fb.add("version_of", {g, a.version_of->str()});
  }
  for (const auto& link : provenance.links()) {
    std::string r = link.run.str() + "/" + link.node_id;
    fb.add(link.activity_kind, {r});
    for (const auto& in : link.inputs) fb.add("has_input", {r, in.str()});
    fb.add("has_output", {link.produced.str(), r});
    std::string name;
    for (const auto& f : link.path_functions) name += (name.empty() ? "" : " + ") + f;
    if (name.empty()) name = link.function_alias;
    auto it = function_by_name.find(name);
    std::string f = it != function_by_name.end() ? it->second : "fn:" + name;
    fb.add("uses", {r, f});
    fb.add("has_name", {f, name});
  }
  return fb;
}

}  // namespace gyp
