// Copyright 2026 The TraceGrid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tracegrid/store.h"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>
#include <system_error>

#include "json.hpp"
#include "tracegrid/error.h"

namespace tracegrid {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kFilePrefix = "snapshots-";
constexpr std::string_view kFileSuffix = ".json";
constexpr const char* kMetaKey = "store-meta.json";

bool IsSnapshotFile(const std::string& key) {
  return key.size() > kFilePrefix.size() + kFileSuffix.size() && key.starts_with(kFilePrefix) &&
         key.ends_with(kFileSuffix);
}

[[noreturn]] void StorageError(const std::string& what, const std::error_code& ec = {}) {
  throw Error(ErrorKind::kStorageFailure, ec ? what + ": " + ec.message() : what);
}

}  // namespace

std::string SnapshotFileName(int64_t first_ts) {
  return std::string(kFilePrefix) + std::to_string(first_ts) + std::string(kFileSuffix);
}

// ---------------------------------------------------------------------------
// FilesystemBlobStore

FilesystemBlobStore::FilesystemBlobStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) StorageError("cannot create " + root_.string(), ec);
  if (!fs::is_directory(root_)) StorageError(root_.string() + " is not a directory");
}

void FilesystemBlobStore::Put(const std::string& key, const std::string& bytes) {
  const fs::path target = root_ / key;
  const fs::path tmp = root_ / (key + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) StorageError("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) StorageError("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    StorageError("cannot rename into " + target.string(), ec);
  }
}

std::optional<std::string> FilesystemBlobStore::Get(const std::string& key) const {
  const fs::path path = root_ / key;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::error_code ec;
    if (!fs::exists(path, ec)) return std::nullopt;
    StorageError("cannot open " + path.string());
  }
  std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (in.bad()) StorageError("read error on " + path.string());
  return bytes;
}

std::vector<std::string> FilesystemBlobStore::List() const {
  std::vector<std::string> keys;
  std::error_code ec;
  for (fs::directory_iterator it(root_, ec), end; !ec && it != end; it.increment(ec)) {
    if (it->is_regular_file()) {
      const auto name = it->path().filename().string();
      if (!name.ends_with(".tmp")) keys.push_back(name);
    }
  }
  if (ec) StorageError("cannot list " + root_.string(), ec);
  std::sort(keys.begin(), keys.end());
  return keys;
}

// ---------------------------------------------------------------------------
// MemoryBlobStore

void MemoryBlobStore::Put(const std::string& key, const std::string& bytes) {
  std::lock_guard lock(mu_);
  if (fail_writes_) StorageError("write to " + key + " rejected (injected failure)");
  blobs_[key] = bytes;
}

std::optional<std::string> MemoryBlobStore::Get(const std::string& key) const {
  std::lock_guard lock(mu_);
  const auto it = blobs_.find(key);
  if (it == blobs_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> MemoryBlobStore::List() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> keys;
  for (const auto& [k, v] : blobs_) keys.push_back(k);
  return keys;
}

void MemoryBlobStore::set_fail_writes(bool fail) {
  std::lock_guard lock(mu_);
  fail_writes_ = fail;
}

std::optional<int64_t> StoredIntervalMs(const BlobStore& blobs) {
  const auto meta = blobs.Get(kMetaKey);
  if (!meta) return std::nullopt;
  const auto doc = nlohmann::json::parse(*meta, nullptr, false);
  if (doc.is_discarded() || !doc.contains("interval_ms") ||
      !doc["interval_ms"].is_number_integer()) {
    StorageError(std::string(kMetaKey) + " is corrupt");
  }
  return doc["interval_ms"].get<int64_t>();
}

// ---------------------------------------------------------------------------
// SnapshotStore

SnapshotStore::SnapshotStore(std::shared_ptr<BlobStore> blobs, Options options)
    : blobs_(std::move(blobs)), options_(options) {
  if (options_.interval_length_ms <= 0) {
    throw Error(ErrorKind::kInvalidSpec, "interval length must be positive");
  }
  Reopen();
}

void SnapshotStore::Reopen() {
  if (const auto stored = StoredIntervalMs(*blobs_)) {
    if (*stored != options_.interval_length_ms) {
      StorageError("store was written with interval " + std::to_string(*stored) +
                   " ms, opened with " + std::to_string(options_.interval_length_ms) + " ms");
    }
  } else {
    blobs_->Put(kMetaKey, nlohmann::json{{"interval_ms", options_.interval_length_ms}}.dump());
  }

  std::vector<std::pair<int64_t, std::string>> keys;
  for (const auto& key : blobs_->List()) {
    if (!IsSnapshotFile(key)) continue;
    const auto digits = key.substr(kFilePrefix.size(),
                                   key.size() - kFilePrefix.size() - kFileSuffix.size());
    try {
      keys.emplace_back(std::stoll(digits), key);
    } catch (const std::exception&) {
      continue;
    }
  }
  std::sort(keys.begin(), keys.end());

  for (size_t i = 0; i < keys.size(); ++i) {
    const auto bytes = blobs_->Get(keys[i].second);
    if (!bytes) StorageError(keys[i].second + " vanished during reopen");
    auto parsed = ParseSnapshots(*bytes, options_.interval_length_ms);
    if (parsed.empty()) continue;

    SnapshotFile file;
    file.path = keys[i].second;
    file.first_ts = parsed.front().interval_start;
    file.last_ts = parsed.back().interval_start;
    file.byte_size = bytes->size();
    if (last_start_ && file.first_ts <= *last_start_) {
      StorageError(file.path + " overlaps an earlier snapshot file");
    }
    last_start_ = file.last_ts;

    const bool last = i + 1 == keys.size();
    file.sealed = !last || file.byte_size > options_.file_cap_bytes;
    if (!file.sealed) {
      open_entries_.clear();
      for (const auto& s : parsed) open_entries_.push_back(SerializeSnapshotEntry(s));
      open_snapshots_ = std::move(parsed);
    }
    files_.push_back(std::move(file));
  }
}

void SnapshotStore::WriteOpenFile(const std::vector<std::string>& entries, SnapshotFile& file) {
  const std::string bytes = JoinEntries(entries);
  blobs_->Put(file.path, bytes);
  file.byte_size = bytes.size();
}

SnapshotFile SnapshotStore::Append(const IntervalSnapshot& snapshot) {
  std::unique_lock lock(mu_);
  if (last_start_ && snapshot.interval_start <= *last_start_) {
    throw Error(ErrorKind::kOutOfOrderAppend,
                "snapshot at " + std::to_string(snapshot.interval_start) +
                    " does not follow the last stored snapshot at " +
                    std::to_string(*last_start_));
  }
  if (snapshot.interval_length_ms != options_.interval_length_ms) {
    throw Error(ErrorKind::kInvalidSpec,
                "snapshot length " + std::to_string(snapshot.interval_length_ms) +
                    " ms does not match the store interval " +
                    std::to_string(options_.interval_length_ms) + " ms");
  }
  // Stored values are what a reader will parse back; keeping the canonical
  // form in memory makes the open file indistinguishable from a sealed one.
  IntervalSnapshot stored = Canonicalize(snapshot);
  std::string entry = SerializeSnapshotEntry(stored);

  const bool have_open = !files_.empty() && !files_.back().sealed;
  if (have_open) {
    std::vector<std::string> candidate = open_entries_;
    candidate.push_back(entry);
    if (JoinedSize(candidate) <= options_.file_cap_bytes) {
      SnapshotFile file = files_.back();
      WriteOpenFile(candidate, file);
      file.last_ts = stored.interval_start;
      files_.back() = file;
      open_entries_ = std::move(candidate);
      open_snapshots_.push_back(std::move(stored));
      last_start_ = snapshot.interval_start;
      return file;
    }
  }

  SnapshotFile file;
  file.path = SnapshotFileName(stored.interval_start);
  file.first_ts = file.last_ts = stored.interval_start;
  std::vector<std::string> entries{entry};
  WriteOpenFile(entries, file);

  // Only now is the previous file final.
  if (have_open) {
    files_.back().sealed = true;
    std::lock_guard cache_lock(cache_mu_);
    sealed_cache_[files_.back().path] =
        std::make_shared<const std::vector<IntervalSnapshot>>(std::move(open_snapshots_));
  }
  open_entries_.clear();
  open_snapshots_.clear();

  if (file.byte_size > options_.file_cap_bytes) {
    file.sealed = true;
    warnings_.push_back("snapshot at " + std::to_string(stored.interval_start) + " serializes to " +
                        std::to_string(file.byte_size) + " bytes, above the " +
                        std::to_string(options_.file_cap_bytes) +
                        "-byte cap; stored alone in " + file.path);
    std::lock_guard cache_lock(cache_mu_);
    sealed_cache_[file.path] =
        std::make_shared<const std::vector<IntervalSnapshot>>(std::vector{std::move(stored)});
  } else {
    open_entries_ = std::move(entries);
    open_snapshots_.push_back(std::move(stored));
  }
  files_.push_back(file);
  last_start_ = snapshot.interval_start;
  return file;
}

SnapshotStore::Parsed SnapshotStore::ReadSealed(const SnapshotFile& file) const {
  {
    std::lock_guard lock(cache_mu_);
    if (const auto it = sealed_cache_.find(file.path); it != sealed_cache_.end()) return it->second;
  }
  const auto bytes = blobs_->Get(file.path);
  if (!bytes) StorageError(file.path + " is missing");
  auto parsed = std::make_shared<const std::vector<IntervalSnapshot>>(
      ParseSnapshots(*bytes, options_.interval_length_ms));
  std::lock_guard lock(cache_mu_);
  sealed_cache_.emplace(file.path, parsed);
  return parsed;
}

std::vector<IntervalSnapshot> SnapshotStore::LoadWindow(int64_t from, int64_t to) const {
  if (from >= to) {
    throw Error(ErrorKind::kInvalidSpec, "window start must precede window end");
  }
  std::vector<SnapshotFile> files;
  std::vector<IntervalSnapshot> open;
  {
    std::shared_lock lock(mu_);
    files = files_;
    if (!files_.empty() && !files_.back().sealed) {
      for (const auto& s : open_snapshots_) {
        if (s.interval_start >= from && s.interval_start < to) open.push_back(s);
      }
    }
  }

  std::vector<IntervalSnapshot> out;
  for (const auto& file : files) {
    if (!file.sealed) continue;
    if (file.last_ts < from || file.first_ts >= to) continue;
    for (const auto& s : *ReadSealed(file)) {
      if (s.interval_start >= from && s.interval_start < to) out.push_back(s);
    }
  }
  out.insert(out.end(), std::make_move_iterator(open.begin()), std::make_move_iterator(open.end()));
  return out;
}

std::vector<SnapshotFile> SnapshotStore::Files() const {
  std::shared_lock lock(mu_);
  return files_;
}

std::optional<int64_t> SnapshotStore::LastStart() const {
  std::shared_lock lock(mu_);
  return last_start_;
}

std::vector<std::string> SnapshotStore::Warnings() const {
  std::shared_lock lock(mu_);
  return warnings_;
}

}  // namespace tracegrid
