/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include "gyp/executor/table.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "gyp/common/error.hpp"

namespace gyp {

namespace fs = std::filesystem;

Table Table::sorted() const {
  Table t = *this;
  std::sort(t.rows.begin(), t.rows.end(), RowLess{});
  return t;
}

std::vector<std::vector<std::string>> parse_csv_records(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t i = 0;
  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    records.push_back(std::move(record));
    record.clear();
    field_started = false;
  };
  while (i < text.size()) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        quoted = false;
      } else {
        field.push_back(c);
      }
      ++i;
      continue;
    }
    if (c == '"' && field.empty()) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      field_started = true;
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      end_record();
      ++i;
    } else if (c == '\n') {
      end_record();
    } else {
      field.push_back(c);
      field_started = true;
    }
    ++i;
  }
  if (quoted) fail(ErrorCode::SchemaViolation, "unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

Table parse_csv(std::string_view text, const Schema& schema, std::string_view origin) {
  auto records = parse_csv_records(text);
  if (records.empty()) fail(ErrorCode::SchemaViolation, std::string(origin) + ": missing header row");
  std::vector<std::string> expected = schema.names();
  if (records.front() != expected) {
    std::string got;
    for (const auto& h : records.front()) got += (got.empty() ? "" : ",") + h;
    fail(ErrorCode::SchemaViolation, std::string(origin) + ": header '" + got + "' does not match schema (" +
                                         schema.str() + ")");
  }
  Table t;
  t.schema = schema;
  t.rows.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != schema.size()) {
      fail(ErrorCode::SchemaViolation, std::string(origin) + ": record " + std::to_string(r + 1) + " has " +
                                           std::to_string(rec.size()) + " fields, expected " +
                                           std::to_string(schema.size()));
    }
    Row row;
    row.reserve(rec.size());
    for (std::size_t c = 0; c < rec.size(); ++c) {
      try {
        row.push_back(parse_value(rec[c], schema[c].type));
      } catch (const Error& e) {
        fail(e.code(), std::string(origin) + ": record " + std::to_string(r + 1) + ", column '" + schema[c].name +
                           "': " + e.detail());
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

namespace {

void append_field(std::string& out, const std::string& s) {
  bool quote = s.find_first_of(",\"\r\n") != std::string::npos || (!s.empty() && (s.front() == ' ' || s.back() == ' '));
  if (!quote) {
    out += s;
    return;
  }
  out.push_back('"');
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

}  // namespace

std::string format_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.schema.size(); ++c) {
    if (c) out.push_back(',');
    append_field(out, table.schema[c].name);
  }
  out.push_back('\n');
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out.push_back(',');
      append_field(out, format_value(row[c]));
    }
    out.push_back('\n');
  }
  return out;
}

Table read_csv(const fs::path& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::MissingInput, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), schema, path.string());
}

void write_csv(const fs::path& path, const Table& table) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::CatalogIo, "cannot write " + tmp.string());
    out << format_csv(table.sorted());
    if (!out) fail(ErrorCode::CatalogIo, "cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::vector<fs::path> dataset_files(const fs::path& location) {
  std::error_code ec;
  if (fs::is_regular_file(location, ec)) return {location};
  if (!fs::is_directory(location, ec)) fail(ErrorCode::MissingInput, location.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(location)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace gyp
