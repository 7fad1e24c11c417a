/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <string_view>

namespace gyp {

/// 128-bit artifact identifier, rendered as 32 lowercase hex characters.
class Gid {
 public:
  constexpr Gid() = default;
  constexpr Gid(std::uint64_t hi, std::uint64_t lo) : hi_(hi), lo_(lo) {}

  static std::optional<Gid> parse(std::string_view text);
  /// Like parse() but throws UnknownGid on malformed input.
  static Gid from_string(std::string_view text);

  std::string str() const;
  bool is_nil() const { return hi_ == 0 && lo_ == 0; }

  std::uint64_t hi() const { return hi_; }
  std::uint64_t lo() const { return lo_; }

  friend auto operator<=>(const Gid&, const Gid&) = default;

 private:
  std::uint64_t hi_ = 0;
  std::uint64_t lo_ = 0;
};

class GidGenerator {
 public:
  /// Seeds from std::random_device.
  GidGenerator();
  explicit GidGenerator(std::uint64_t seed);

  Gid next();

 private:
  std::mt19937_64 rng_;
};

}  // namespace gyp

template <>
struct std::hash<gyp::Gid> {
  std::size_t operator()(const gyp::Gid& g) const noexcept {
    return std::hash<std::uint64_t>{}(g.hi() ^ (g.lo() * 0x9e3779b97f4a7c15ULL));
  }
};
