/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace gyp {

/// Keyed JSON records persisted as an append-only log of
/// {"op": "put"|"delete", "record": {...}} lines. Every record carries "type"
/// and "key" fields. Deleted keys are remembered so they are never reissued.
///
/// With an empty path the store lives in memory only. Writers in other
/// processes are excluded with an advisory lock on "<path>.lock"; before every
/// write the store replays whatever other processes appended meanwhile.
class RecordStore {
 public:
  struct Options {
    /// fsync after every append so a returning write is durable.
    bool fsync = true;
  };

  RecordStore();
  explicit RecordStore(std::filesystem::path path);
  RecordStore(std::filesystem::path path, Options options);
  ~RecordStore();

  RecordStore(const RecordStore&) = delete;
  RecordStore& operator=(const RecordStore&) = delete;

  const std::filesystem::path& path() const { return path_; }

  void put(const std::string& type, const std::string& key, nlohmann::json body);
  void remove(const std::string& type, const std::string& key);

  /// Runs `fn` while holding the writer lock, after catching up with other
  /// writers. Puts and removes issued through the handle are appended as one
  /// batch when `fn` returns.
  class Batch {
   public:
    const nlohmann::json* get(const std::string& type, const std::string& key) const;
    bool retired(const std::string& type, const std::string& key) const;
    std::vector<nlohmann::json> list(const std::string& type) const;
    void put(const std::string& type, const std::string& key, nlohmann::json body);
    void remove(const std::string& type, const std::string& key);

   private:
    friend class RecordStore;
    explicit Batch(RecordStore& store) : store_(store) {}
    RecordStore& store_;
    std::vector<nlohmann::json> lines_;
  };
  template <typename Fn>
  auto write(Fn&& fn) {
    std::unique_lock lock(mutex_);
    FileLock file_lock(*this);
    catch_up();
    Batch batch(*this);
    if constexpr (std::is_void_v<decltype(fn(batch))>) {
      fn(batch);
      commit(batch.lines_);
    } else {
      auto result = fn(batch);
      commit(batch.lines_);
      return result;
    }
  }

  std::optional<nlohmann::json> get(const std::string& type, const std::string& key) const;
  bool retired(const std::string& type, const std::string& key) const;
  /// Records of `type` ordered by key.
  std::vector<nlohmann::json> list(const std::string& type) const;
  std::size_t count(const std::string& type) const;

  /// Re-reads records appended by other processes.
  void refresh();

  /// Rewrites the log as a snapshot of live records and tombstones.
  void compact();

  /// Normalized text of the live state: one line per record ordered by
  /// (type, key), followed by tombstones. Independent of log history.
  std::string dump() const;

 private:
  using Key = std::pair<std::string, std::string>;

  class FileLock {
   public:
    explicit FileLock(RecordStore& store);
    ~FileLock();
    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;

   private:
    int fd_ = -1;
  };

  void apply(const nlohmann::json& line);
  void apply_to(const nlohmann::json& line, std::map<Key, nlohmann::json>& records, std::set<Key>& retired) const;
  void load_all();
  void catch_up();
  void commit(const std::vector<nlohmann::json>& lines);

  std::filesystem::path path_;
  Options options_;
  mutable std::shared_mutex mutex_;
  std::map<Key, nlohmann::json> records_;
  std::set<Key> retired_;
  std::uintmax_t offset_ = 0;
  std::uintmax_t inode_ = 0;
};

}  // namespace gyp
