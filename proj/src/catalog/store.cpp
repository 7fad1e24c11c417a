/* Copyright 2026 The gyp Authors. Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License. You may obtain a copy at
 * http://www.apache.org/licenses/LICENSE-2.0. Distributed on an "AS IS" BASIS, WITHOUT WARRANTIES
 * OR CONDITIONS OF ANY KIND, either express or implied. */

#include "gyp/catalog/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gyp/common/error.hpp"

namespace gyp {

using nlohmann::json;

namespace {

[[noreturn]] void io_fail(const std::string& what, const std::filesystem::path& p) {
  fail(ErrorCode::CatalogIo, what + " " + p.string() + ": " + std::strerror(errno));
}

void write_all(int fd, const std::string& data, const std::filesystem::path& p) {
  const char* ptr = data.data();
  std::size_t left = data.size();
  while (left > 0) {
    ssize_t n = ::write(fd, ptr, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail("write", p);
    }
    ptr += n;
    left -= static_cast<std::size_t>(n);
  }
}

json make_line(const char* op, const std::string& type, const std::string& key, json body) {
  body["type"] = type;
  body["key"] = key;
  return json{{"op", op}, {"record", std::move(body)}};
}

}  // namespace

RecordStore::RecordStore() = default;

RecordStore::RecordStore(std::filesystem::path path) : RecordStore(std::move(path), Options{}) {}

RecordStore::RecordStore(std::filesystem::path path, Options options)
    : path_(std::move(path)), options_(options) {
  if (path_.empty()) return;
  if (path_.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path_.parent_path(), ec);
  }
  std::unique_lock lock(mutex_);
  FileLock file_lock(*this);
  load_all();
}

RecordStore::~RecordStore() = default;

RecordStore::FileLock::FileLock(RecordStore& store) {
  if (store.path_.empty()) return;
  std::string lock_path = store.path_.string() + ".lock";
  fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) io_fail("open", lock_path);
  while (::flock(fd_, LOCK_EX) != 0) {
    if (errno != EINTR) io_fail("lock", lock_path);
  }
}

RecordStore::FileLock::~FileLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

void RecordStore::apply_to(const json& line, std::map<Key, json>& records, std::set<Key>& retired) const {
  if (!line.is_object() || !line.contains("op") || !line.contains("record")) {
    fail(ErrorCode::CatalogIo, "malformed log entry in " + path_.string());
  }
  const json& rec = line["record"];
  Key key{rec.at("type").get<std::string>(), rec.at("key").get<std::string>()};
  std::string op = line["op"].get<std::string>();
  if (op == "put") {
    records[key] = rec;
  } else if (op == "delete") {
    records.erase(key);
    retired.insert(key);
  } else {
    fail(ErrorCode::CatalogIo, "unknown log op '" + op + "' in " + path_.string());
  }
}

void RecordStore::apply(const json& line) { apply_to(line, records_, retired_); }

// Reads complete lines from `offset_`; a trailing partial line (torn append)
// is left for a later read.
void RecordStore::catch_up() {
  if (path_.empty()) return;
  struct stat st {};
  if (::stat(path_.c_str(), &st) != 0) {
    if (errno == ENOENT) {
      records_.clear();
      retired_.clear();
      offset_ = 0;
      inode_ = 0;
      return;
    }
    io_fail("stat", path_);
  }
  if (static_cast<std::uintmax_t>(st.st_ino) != inode_ || static_cast<std::uintmax_t>(st.st_size) < offset_) {
    records_.clear();
    retired_.clear();
    offset_ = 0;
    inode_ = static_cast<std::uintmax_t>(st.st_ino);
  }
  if (static_cast<std::uintmax_t>(st.st_size) == offset_) return;
  std::ifstream in(path_, std::ios::binary);
  if (!in) io_fail("open", path_);
  in.seekg(static_cast<std::streamoff>(offset_));
  std::string chunk((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  while (true) {
    auto nl = chunk.find('\n', pos);
    if (nl == std::string::npos) break;
    std::string_view text(chunk.data() + pos, nl - pos);
    if (!text.empty()) {
      json line;
      try {
        line = json::parse(text);
      } catch (const json::exception& e) {
        fail(ErrorCode::CatalogIo, "corrupt log " + path_.string() + ": " + e.what());
      }
      apply(line);
    }
    pos = nl + 1;
  }
  offset_ += pos;
}

void RecordStore::load_all() {
  records_.clear();
  retired_.clear();
  offset_ = 0;
  inode_ = 0;
  catch_up();
}

void RecordStore::commit(const std::vector<json>& lines) {
  if (path_.empty() || lines.empty()) return;
  std::string data;
  for (const auto& l : lines) {
    data += l.dump();
    data += '\n';
  }
  int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) io_fail("open", path_);
  write_all(fd, data, path_);
  if (options_.fsync && ::fsync(fd) != 0) {
    ::close(fd);
    io_fail("fsync", path_);
  }
  struct stat st {};
  ::fstat(fd, &st);
  ::close(fd);
  inode_ = static_cast<std::uintmax_t>(st.st_ino);
  offset_ = static_cast<std::uintmax_t>(st.st_size);
}

const json* RecordStore::Batch::get(const std::string& type, const std::string& key) const {
  auto it = store_.records_.find({type, key});
  return it == store_.records_.end() ? nullptr : &it->second;
}

bool RecordStore::Batch::retired(const std::string& type, const std::string& key) const {
  return store_.retired_.count({type, key}) > 0;
}

std::vector<json> RecordStore::Batch::list(const std::string& type) const {
  std::vector<json> out;
  for (auto it = store_.records_.lower_bound({type, ""}); it != store_.records_.end() && it->first.first == type;
       ++it) {
    out.push_back(it->second);
  }
  return out;
}

void RecordStore::Batch::put(const std::string& type, const std::string& key, json body) {
  json line = make_line("put", type, key, std::move(body));
  store_.apply(line);
  lines_.push_back(std::move(line));
}

void RecordStore::Batch::remove(const std::string& type, const std::string& key) {
  json line = make_line("delete", type, key, json::object());
  store_.apply(line);
  lines_.push_back(std::move(line));
}

void RecordStore::put(const std::string& type, const std::string& key, json body) {
  write([&](Batch& b) { b.put(type, key, std::move(body)); });
}

void RecordStore::remove(const std::string& type, const std::string& key) {
  write([&](Batch& b) { b.remove(type, key); });
}

std::optional<json> RecordStore::get(const std::string& type, const std::string& key) const {
  std::shared_lock lock(mutex_);
  auto it = records_.find({type, key});
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

bool RecordStore::retired(const std::string& type, const std::string& key) const {
  std::shared_lock lock(mutex_);
  return retired_.count({type, key}) > 0;
}

std::vector<json> RecordStore::list(const std::string& type) const {
  std::shared_lock lock(mutex_);
  std::vector<json> out;
  for (auto it = records_.lower_bound({type, ""}); it != records_.end() && it->first.first == type; ++it) {
    out.push_back(it->second);
  }
  return out;
}

std::size_t RecordStore::count(const std::string& type) const {
  std::shared_lock lock(mutex_);
  std::size_t n = 0;
  for (auto it = records_.lower_bound({type, ""}); it != records_.end() && it->first.first == type; ++it) ++n;
  return n;
}

void RecordStore::refresh() {
  std::unique_lock lock(mutex_);
  FileLock file_lock(*this);
  catch_up();
}

void RecordStore::compact() {
  if (path_.empty()) return;
  std::unique_lock lock(mutex_);
  FileLock file_lock(*this);
  catch_up();
  std::string data;
  for (const auto& [key, rec] : records_) {
    data += json{{"op", "put"}, {"record", rec}}.dump();
    data += '\n';
  }
  for (const auto& [type, key] : retired_) {
    if (records_.count({type, key})) continue;
    data += make_line("delete", type, key, json::object()).dump();
    data += '\n';
  }
  std::filesystem::path tmp = path_.string() + ".tmp";
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) io_fail("open", tmp);
  write_all(fd, data, tmp);
  if (::fsync(fd) != 0) {
    ::close(fd);
    io_fail("fsync", tmp);
  }
  ::close(fd);
  std::error_code ec;
  std::filesystem::rename(tmp, path_, ec);
  if (ec) fail(ErrorCode::CatalogIo, "rename " + tmp.string() + ": " + ec.message());
  load_all();
}

std::string RecordStore::dump() const {
  std::shared_lock lock(mutex_);
  std::ostringstream os;
  for (const auto& [key, rec] : records_) os << rec.dump() << '\n';
  for (const auto& [type, key] : retired_) {
    if (!records_.count({type, key})) os << "retired " << type << ' ' << key << '\n';
  }
  return os.str();
}

}  // namespace gyp
