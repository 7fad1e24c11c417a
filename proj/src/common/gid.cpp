/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include "gyp/common/gid.hpp"

#include <array>

#include "gyp/common/error.hpp"

namespace gyp {
namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

std::optional<Gid> Gid::parse(std::string_view text) {
  if (text.size() != 32) return std::nullopt;
  std::array<std::uint64_t, 2> words{0, 0};
  for (std::size_t i = 0; i < 32; ++i) {
    int v = hex_value(text[i]);
    if (v < 0) return std::nullopt;
    words[i / 16] = (words[i / 16] << 4) | static_cast<std::uint64_t>(v);
  }
  return Gid(words[0], words[1]);
}

Gid Gid::from_string(std::string_view text) {
  auto gid = parse(text);
  if (!gid) fail(ErrorCode::UnknownGid, "malformed GID '" + std::string(text) + "'");
  return *gid;
}

std::string Gid::str() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(32, '0');
  for (int i = 0; i < 16; ++i) {
    out[15 - i] = kDigits[(hi_ >> (4 * i)) & 0xf];
    out[31 - i] = kDigits[(lo_ >> (4 * i)) & 0xf];
  }
  return out;
}

GidGenerator::GidGenerator() {
  std::random_device rd;
  std::seed_seq seq{rd(), rd(), rd(), rd()};
  rng_.seed(seq);
}

GidGenerator::GidGenerator(std::uint64_t seed) : rng_(seed) {}

Gid GidGenerator::next() {
  Gid g;
  do {
    std::uint64_t hi = rng_();
    std::uint64_t lo = rng_();
    g = Gid(hi, lo);
  } while (g.is_nil());
  return g;
}

}  // namespace gyp
