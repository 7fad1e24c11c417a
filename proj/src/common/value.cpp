/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include "gyp/common/value.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>

#include "gyp/common/error.hpp"

namespace gyp {
namespace {

// Howard Hinnant's civil-date conversions.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y += m <= 2;
}

bool parse_fixed(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  auto first = s.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + len, out);
  return ec == std::errc() && ptr == first + len;
}

[[noreturn]] void cast_error(std::string_view text, AttrType type) {
  fail(ErrorCode::CastError,
       "cannot parse '" + std::string(text) + "' as " + std::string(type_name(type)));
}

}  // namespace

std::string_view type_name(AttrType type) {
  switch (type) {
    case AttrType::Int64: return "int64";
    case AttrType::Float64: return "float64";
    case AttrType::String: return "string";
    case AttrType::Bool: return "bool";
    case AttrType::Timestamp: return "timestamp";
  }
  return "?";
}

std::optional<AttrType> parse_type_name(std::string_view name) {
  if (name == "int64") return AttrType::Int64;
  if (name == "float64") return AttrType::Float64;
  if (name == "string") return AttrType::String;
  if (name == "bool") return AttrType::Bool;
  if (name == "timestamp") return AttrType::Timestamp;
  return std::nullopt;
}

bool is_numeric(AttrType type) {
  return type == AttrType::Int64 || type == AttrType::Float64;
}

double type_width(AttrType type, double string_width) {
  switch (type) {
    case AttrType::Bool: return 1.0;
    case AttrType::String: return string_width;
    default: return 8.0;
  }
}

std::optional<Timestamp> parse_iso8601(std::string_view text) {
  // YYYY-MM-DD[(T| )HH:MM:SS][Z]
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  if (!parse_fixed(text, 0, 4, y) || !parse_fixed(text, 5, 2, mo) || !parse_fixed(text, 8, 2, d)) {
    return std::nullopt;
  }
  std::size_t pos = 10;
  if (pos < text.size() && (text[pos] == 'T' || text[pos] == ' ')) {
    if (text.size() < 19 || text[13] != ':' || text[16] != ':') return std::nullopt;
    if (!parse_fixed(text, 11, 2, h) || !parse_fixed(text, 14, 2, mi) || !parse_fixed(text, 17, 2, s)) {
      return std::nullopt;
    }
    pos = 19;
  }
  if (pos < text.size() && text[pos] == 'Z') ++pos;
  if (pos != text.size()) return std::nullopt;
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60) return std::nullopt;
  std::int64_t days = days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d));
  return Timestamp{days * 86400 + h * 3600 + mi * 60 + s};
}

std::string format_iso8601(Timestamp ts) {
  std::int64_t days = ts.seconds / 86400;
  std::int64_t rem = ts.seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  std::int64_t y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ", static_cast<long long>(y), m, d,
                static_cast<long long>(rem / 3600), static_cast<long long>((rem / 60) % 60),
                static_cast<long long>(rem % 60));
  return buf;
}

AttrType type_of(const Value& v) {
  switch (v.index()) {
    case 0: return AttrType::Int64;
    case 1: return AttrType::Float64;
    case 2: return AttrType::String;
    case 3: return AttrType::Bool;
    default: return AttrType::Timestamp;
  }
}

std::string format_value(const Value& v) {
  switch (v.index()) {
    case 0: return std::to_string(std::get<std::int64_t>(v));
    case 1: {
      double x = std::get<double>(v);
      if (std::isnan(x)) return "nan";
      if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
      char buf[64];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
      return std::string(buf, ptr);
    }
    case 2: return std::get<std::string>(v);
    case 3: return std::get<bool>(v) ? "true" : "false";
    default: return format_iso8601(std::get<Timestamp>(v));
  }
}

Value parse_value(std::string_view text, AttrType type) {
  switch (type) {
    case AttrType::Int64: {
      std::int64_t out = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
      if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) cast_error(text, type);
      return out;
    }
    case AttrType::Float64: {
      if (text == "nan") return std::nan("");
      if (text == "inf") return HUGE_VAL;
      if (text == "-inf") return -HUGE_VAL;
      double out = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
      if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) cast_error(text, type);
      return out;
    }
    case AttrType::String:
      return std::string(text);
    case AttrType::Bool:
      if (text == "true") return true;
      if (text == "false") return false;
      cast_error(text, type);
    case AttrType::Timestamp: {
      auto ts = parse_iso8601(text);
      if (!ts) cast_error(text, type);
      return *ts;
    }
  }
  cast_error(text, type);
}

int compare_values(const Value& a, const Value& b) {
  if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
  switch (a.index()) {
    case 0: {
      auto x = std::get<std::int64_t>(a), y = std::get<std::int64_t>(b);
      return x < y ? -1 : (x > y ? 1 : 0);
    }
    case 1: {
      double x = std::get<double>(a), y = std::get<double>(b);
      bool xn = std::isnan(x), yn = std::isnan(y);
      if (xn || yn) return xn == yn ? 0 : (xn ? 1 : -1);
      return x < y ? -1 : (x > y ? 1 : 0);
    }
    case 2: {
      int c = std::get<std::string>(a).compare(std::get<std::string>(b));
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case 3: {
      bool x = std::get<bool>(a), y = std::get<bool>(b);
      return x == y ? 0 : (x ? 1 : -1);
    }
    default: {
      auto x = std::get<Timestamp>(a), y = std::get<Timestamp>(b);
      return x < y ? -1 : (x > y ? 1 : 0);
    }
  }
}

bool values_equal(const Value& a, const Value& b) { return compare_values(a, b) == 0; }

std::size_t hash_value(const Value& v) {
  switch (v.index()) {
    case 0: return std::hash<std::int64_t>{}(std::get<std::int64_t>(v));
    case 1: {
      double x = std::get<double>(v);
      if (std::isnan(x)) return 0x7ff8;
      if (x == 0.0) x = 0.0;  // fold -0.0
      return std::hash<double>{}(x);
    }
    case 2: return std::hash<std::string>{}(std::get<std::string>(v));
    case 3: return std::get<bool>(v) ? 1 : 2;
    default: return std::hash<std::int64_t>{}(std::get<Timestamp>(v).seconds) ^ 0x5bd1e995;
  }
}

double as_double(const Value& v) {
  switch (v.index()) {
    case 0: return static_cast<double>(std::get<std::int64_t>(v));
    case 1: return std::get<double>(v);
    case 3: return std::get<bool>(v) ? 1.0 : 0.0;
    case 4: return static_cast<double>(std::get<Timestamp>(v).seconds);
    default:
      fail(ErrorCode::TypeError, "string value used as a number");
  }
}

Schema::Schema(std::vector<Attribute> attrs) : attrs_(std::move(attrs)) {
  std::set<std::string_view> seen;
  for (const auto& a : attrs_) {
    if (a.name.empty()) fail(ErrorCode::SchemaMismatch, "empty attribute name");
    if (!seen.insert(a.name).second) fail(ErrorCode::SchemaMismatch, "duplicate attribute '" + a.name + "'");
  }
}

Schema Schema::parse(std::string_view text) {
  std::vector<Attribute> attrs;
  std::size_t pos = 0;
  auto trim = [](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
  };
  if (trim(text).empty()) return Schema();
  while (pos <= text.size()) {
    auto end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    auto item = trim(text.substr(pos, end - pos));
    auto colon = item.find(':');
    if (colon == std::string_view::npos) {
      fail(ErrorCode::SchemaMismatch, "attribute '" + std::string(item) + "' lacks a type");
    }
    auto type = parse_type_name(trim(item.substr(colon + 1)));
    if (!type) fail(ErrorCode::SchemaMismatch, "unknown type in '" + std::string(item) + "'");
    attrs.push_back({std::string(trim(item.substr(0, colon))), *type});
    pos = end + 1;
  }
  return Schema(std::move(attrs));
}

std::string Schema::str() const {
  std::string out;
  for (std::size_t i = 0; i < attrs_.size(); ++i) {
    if (i) out += ',';
    out += attrs_[i].name;
    out += ':';
    out += type_name(attrs_[i].type);
  }
  return out;
}

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < attrs_.size(); ++i) {
    if (attrs_[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<std::string> Schema::names() const {
  std::vector<std::string> out;
  out.reserve(attrs_.size());
  for (const auto& a : attrs_) out.push_back(a.name);
  return out;
}

double Schema::row_width(double string_width) const {
  double w = 0;
  for (const auto& a : attrs_) w += type_width(a.type, string_width);
  return w;
}

int compare_rows(const Row& a, const Row& b) {
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    int c = compare_values(a[i], b[i]);
    if (c) return c;
  }
  return a.size() == b.size() ? 0 : (a.size() < b.size() ? -1 : 1);
}

}  // namespace gyp
