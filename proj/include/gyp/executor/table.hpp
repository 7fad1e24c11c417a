/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gyp/common/value.hpp"

namespace gyp {

/// In-memory dataset: a schema and a multiset of rows.
struct Table {
  Schema schema;
  std::vector<Row> rows;

  /// Rows sorted by every column; the canonical form for comparisons.
  Table sorted() const;
};

/// Splits RFC-4180 text into records of fields. Quoted fields may contain
/// separators, doubled quotes and line breaks. Throws SchemaViolation on an
/// unterminated quote.
std::vector<std::vector<std::string>> parse_csv_records(std::string_view text);

/// Parses CSV text with a header row naming exactly the schema's columns in
/// order. Throws SchemaViolation on header or field-count mismatch and
/// CastError when a field does not parse as its column type.
Table parse_csv(std::string_view text, const Schema& schema, std::string_view origin = "csv");

/// Header plus rows; fields are quoted only when needed.
std::string format_csv(const Table& table);

Table read_csv(const std::filesystem::path& path, const Schema& schema);
/// Writes rows sorted by all columns so output files are byte-deterministic.
void write_csv(const std::filesystem::path& path, const Table& table);

/// CSV files making up a dataset: the file itself, or the *.csv files of a
/// directory in name order. Throws MissingInput when nothing exists there.
std::vector<std::filesystem::path> dataset_files(const std::filesystem::path& location);

}  // namespace gyp
