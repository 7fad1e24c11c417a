/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#pragma once

#include "gyp/catalog/catalog.hpp"
#include "gyp/kgraph/datalog.hpp"
#include "gyp/provenance/provenance.hpp"

namespace gyp {

/// Declares the base predicates (dataSet/1, model/1, learner/1, dataFlow/1,
/// model_run/1, model_training/1, trans_run/1, has_input/2, has_output/2,
/// uses/2, has_name/2, in_domain/2, version_of/2) on `fb`.
void declare_base_predicates(FactBase& fb);

/// Materializes artifacts and provenance links as facts. Each link becomes
/// one activity named "<run>/<node>"; the function it uses is named after
/// the transformation operators on its path, joined by " + ".
FactBase build_facts(const Catalog& catalog, const ProvenanceStore& provenance);

}  // namespace gyp
