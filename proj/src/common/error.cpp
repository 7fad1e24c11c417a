/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include "gyp/common/error.hpp"

namespace gyp {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::UnknownOperator: return "UnknownOperator";
    case ErrorCode::DuplicateNodeId: return "DuplicateNodeId";
    case ErrorCode::DanglingConnector: return "DanglingConnector";
    case ErrorCode::MissingBinding: return "MissingBinding";
    case ErrorCode::UnknownGid: return "UnknownGid";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::MissingParam: return "MissingParam";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::TypeError: return "TypeError";
    case ErrorCode::UnknownPlatform: return "UnknownPlatform";
    case ErrorCode::InvalidMetadata: return "InvalidMetadata";
    case ErrorCode::EmptyChangeSet: return "EmptyChangeSet";
    case ErrorCode::NotAModel: return "NotAModel";
    case ErrorCode::NotADataset: return "NotADataset";
    case ErrorCode::IllegalTransition: return "IllegalTransition";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::IncompleteBandwidthMatrix: return "IncompleteBandwidthMatrix";
    case ErrorCode::CatalogIo: return "CatalogIo";
    case ErrorCode::UnknownDataflow: return "UnknownDataflow";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::UnsafeRule: return "UnsafeRule";
    case ErrorCode::DepthExceeded: return "DepthExceeded";
    case ErrorCode::UnknownPredicate: return "UnknownPredicate";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::InvalidGraph: return "InvalidGraph";
    case ErrorCode::MissingSourceSize: return "MissingSourceSize";
    case ErrorCode::UnplacedInput: return "UnplacedInput";
    case ErrorCode::NoFeasiblePlatform: return "NoFeasiblePlatform";
    case ErrorCode::InfeasibleAssignment: return "InfeasibleAssignment";
    case ErrorCode::MissingInput: return "MissingInput";
    case ErrorCode::FunctionFailure: return "FunctionFailure";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::CastError: return "CastError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::BadArgument: return "BadArgument";
  }
  return "Unknown";
}

bool is_user_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::CatalogIo:
    case ErrorCode::FunctionFailure:
    case ErrorCode::SingularSystem:
      return false;
    default:
      return true;
  }
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

}  // namespace gyp
