/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gyp {

/// Error codes surfaced by every module. The names are stable and are
/// printed verbatim by the command-line tool.
enum class ErrorCode {
  // core-model
  MalformedJson,
  UnknownOperator,
  DuplicateNodeId,
  DanglingConnector,
  MissingBinding,
  UnknownGid,
  SchemaMismatch,
  MissingParam,
  SyntaxError,
  UnknownColumn,
  TypeError,
  // catalog
  UnknownPlatform,
  InvalidMetadata,
  EmptyChangeSet,
  NotAModel,
  NotADataset,
  IllegalTransition,
  DuplicateId,
  IncompleteBandwidthMatrix,
  CatalogIo,
  // provenance
  UnknownDataflow,
  UnknownNode,
  // kgraph
  UnsafeRule,
  DepthExceeded,
  UnknownPredicate,
  ArityMismatch,
  // optimizer
  InvalidGraph,
  MissingSourceSize,
  // scheduler
  UnplacedInput,
  NoFeasiblePlatform,
  InfeasibleAssignment,
  // executor
  MissingInput,
  FunctionFailure,
  SchemaViolation,
  CastError,
  UnknownKey,
  SingularSystem,
  // cli
  BadArgument,
};

std::string_view error_code_name(ErrorCode code);

/// Whether an error stems from bad user input (exit code 1) rather than an
/// internal failure (exit code 2).
bool is_user_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace gyp
