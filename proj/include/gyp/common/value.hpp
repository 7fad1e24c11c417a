/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gyp {

enum class AttrType { Int64, Float64, String, Bool, Timestamp };

std::string_view type_name(AttrType type);
std::optional<AttrType> parse_type_name(std::string_view name);
bool is_numeric(AttrType type);

/// Fixed per-type byte width used by transfer-size estimates. Strings use a
/// nominal width unless an observed mean is supplied.
double type_width(AttrType type, double string_width = 16.0);

/// Seconds since the Unix epoch, UTC.
struct Timestamp {
  std::int64_t seconds = 0;
  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

std::optional<Timestamp> parse_iso8601(std::string_view text);
std::string format_iso8601(Timestamp ts);

using Value = std::variant<std::int64_t, double, std::string, bool, Timestamp>;

AttrType type_of(const Value& v);

/// Text form used in CSV files and diagnostics. Floats use the shortest
/// representation that round-trips.
std::string format_value(const Value& v);

/// Strict parse of a text field. Throws CastError when `text` is not a valid
/// literal of `type`.
Value parse_value(std::string_view text, AttrType type);

/// Total order over values. Values of different types order by type index;
/// NaN sorts after every other double and equal to itself.
int compare_values(const Value& a, const Value& b);
bool values_equal(const Value& a, const Value& b);
std::size_t hash_value(const Value& v);

/// Numeric view of int64/float64/bool/timestamp values.
double as_double(const Value& v);

struct Attribute {
  std::string name;
  AttrType type;
  friend bool operator==(const Attribute&, const Attribute&) = default;
};

/// Ordered attribute list. Names are unique and nonempty.
class Schema {
 public:
  Schema() = default;
  /// Throws SchemaMismatch on empty or duplicate names.
  explicit Schema(std::vector<Attribute> attrs);

  /// Parses "name:type,name:type".
  static Schema parse(std::string_view text);
  std::string str() const;

  const std::vector<Attribute>& attributes() const { return attrs_; }
  std::size_t size() const { return attrs_.size(); }
  bool empty() const { return attrs_.empty(); }
  const Attribute& operator[](std::size_t i) const { return attrs_[i]; }

  std::optional<std::size_t> index_of(std::string_view name) const;
  bool contains(std::string_view name) const { return index_of(name).has_value(); }
  std::vector<std::string> names() const;

  /// Estimated bytes per row.
  double row_width(double string_width = 16.0) const;

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::vector<Attribute> attrs_;
};

using Row = std::vector<Value>;

int compare_rows(const Row& a, const Row& b);

struct RowLess {
  bool operator()(const Row& a, const Row& b) const { return compare_rows(a, b) < 0; }
};

}  // namespace gyp
