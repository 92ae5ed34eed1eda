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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "tracegrid/aggregation.h"
#include "tracegrid/snapshot_codec.h"

namespace tracegrid {

inline constexpr size_t kFileCapBytes = 1'048'576;

// Key/value blob storage behind the snapshot store. Implementations report
// I/O problems as ErrorKind::kStorageFailure.
class BlobStore {
 public:
  virtual ~BlobStore() = default;

  // Replaces the blob atomically: readers see either the old or new bytes.
  virtual void Put(const std::string& key, const std::string& bytes) = 0;
  virtual std::optional<std::string> Get(const std::string& key) const = 0;
  // Keys in ascending bytewise order.
  virtual std::vector<std::string> List() const = 0;
};

class FilesystemBlobStore : public BlobStore {
 public:
  // Creates `root` if needed.
  explicit FilesystemBlobStore(std::filesystem::path root);

  void Put(const std::string& key, const std::string& bytes) override;
  std::optional<std::string> Get(const std::string& key) const override;
  std::vector<std::string> List() const override;

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
};

class MemoryBlobStore : public BlobStore {
 public:
  void Put(const std::string& key, const std::string& bytes) override;
  std::optional<std::string> Get(const std::string& key) const override;
  std::vector<std::string> List() const override;

  // Subsequent Put calls throw kStorageFailure while set.
  void set_fail_writes(bool fail);

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::string> blobs_;
  bool fail_writes_ = false;
};

// Anything that can hand out the snapshots of a time window.
class SnapshotSource {
 public:
  virtual ~SnapshotSource() = default;
  virtual std::vector<IntervalSnapshot> LoadWindow(int64_t from, int64_t to) const = 0;
};

struct SnapshotFile {
  std::string path;  // blob key, "snapshots-<first_ts>.json"
  int64_t first_ts = 0;
  int64_t last_ts = 0;
  size_t byte_size = 0;
  bool sealed = false;
};

std::string SnapshotFileName(int64_t first_ts);

// Interval length recorded by an earlier SnapshotStore, if any.
std::optional<int64_t> StoredIntervalMs(const BlobStore& blobs);

// Append-only timeline of interval snapshots persisted as capped JSON files.
//
// Snapshots are grouped into files of at most kFileCapBytes. A snapshot that
// alone exceeds the cap is written to a file of its own and a warning is
// recorded. One writer, many readers.
class SnapshotStore : public SnapshotSource {
 public:
  struct Options {
    int64_t interval_length_ms = kDefaultIntervalMs;
    size_t file_cap_bytes = kFileCapBytes;
  };

  // Reopens whatever the blob store already holds. The last file, if under
  // the cap, becomes the open file again. Throws kStorageFailure when the
  // stored interval length differs from `options.interval_length_ms`.
  SnapshotStore(std::shared_ptr<BlobStore> blobs, Options options);
  explicit SnapshotStore(std::shared_ptr<BlobStore> blobs)
      : SnapshotStore(std::move(blobs), Options{}) {}

  // Throws kOutOfOrderAppend unless the snapshot starts after every stored
  // one; kStorageFailure on I/O errors (the store is left unchanged).
  SnapshotFile Append(const IntervalSnapshot& snapshot);

  // Snapshots with interval_start in [from, to), ascending. Throws
  // kInvalidSpec when from >= to.
  std::vector<IntervalSnapshot> LoadWindow(int64_t from, int64_t to) const override;

  std::vector<SnapshotFile> Files() const;
  std::optional<int64_t> LastStart() const;
  std::vector<std::string> Warnings() const;
  int64_t interval_length_ms() const { return options_.interval_length_ms; }

 private:
  using Parsed = std::shared_ptr<const std::vector<IntervalSnapshot>>;

  void Reopen();
  void WriteOpenFile(const std::vector<std::string>& entries, SnapshotFile& file);
  Parsed ReadSealed(const SnapshotFile& file) const;

  std::shared_ptr<BlobStore> blobs_;
  Options options_;

  mutable std::shared_mutex mu_;
  std::vector<SnapshotFile> files_;  // ascending; back() may be open
  std::vector<std::string> open_entries_;
  std::vector<IntervalSnapshot> open_snapshots_;
  std::optional<int64_t> last_start_;
  std::vector<std::string> warnings_;

  mutable std::mutex cache_mu_;
  mutable std::map<std::string, Parsed> sealed_cache_;
};

}  // namespace tracegrid
