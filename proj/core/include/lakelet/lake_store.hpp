#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lakelet/schema.hpp"

namespace lakelet {

/// Refinement stage of lake storage.
enum class Zone { kLanding, kRaw, kCurated };

std::string_view to_string(Zone z);
Zone zone_from_string(std::string_view s);

/// Dataset and zone names: `[a-z0-9_-]+`.
bool is_valid_name(std::string_view name);

/// (zone, name) pair, written "raw/tweets".
struct DatasetId {
  Zone zone = Zone::kRaw;
  std::string name;

  static DatasetId parse(std::string_view text);
  std::string to_string() const;

  auto operator<=>(const DatasetId&) const = default;
};

struct ObjectKey {
  Zone zone = Zone::kRaw;
  std::string dataset;
  std::string partition;  // single path segment, may be empty
  std::string filename;

  /// Throws kInvalidKey.
  void validate() const;
  /// zones/<zone>/<dataset>/[<partition>/]<filename>
  std::filesystem::path relative_path() const;

  auto operator<=>(const ObjectKey&) const = default;
};

struct ObjectRef {
  ObjectKey key;
  uint64_t size_bytes = 0;
  std::string content_hash;
  std::optional<uint64_t> record_count;

  bool operator==(const ObjectRef&) const = default;
};

struct DatasetManifest {
  std::string dataset;
  Zone zone = Zone::kRaw;
  uint64_t version = 0;
  std::vector<ObjectRef> files;  // sorted by (partition, filename)
  std::string committed_at;
  std::optional<SchemaDescriptor> schema_hint;
  std::string hash_algo;

  bool operator==(const DatasetManifest&) const = default;
};

/// Write-once, zone-structured object store with atomically committed
/// per-dataset manifests.
///
/// Objects are staged and renamed into place by put_object but stay invisible
/// until commit_manifest lists them. Manifest versions are written with
/// link(2) so a version file is never overwritten; `CURRENT` is then replaced
/// by rename. A reader resolves `CURRENT` first and loads that immutable
/// version file, so it sees version N or N+1 and nothing in between.
///
/// Thread-safe. Commits to the same dataset are serialised by a per-dataset
/// lock; commits racing from another handle or process are detected
/// through the no-replace link and retried.
class LakeStore {
 public:
  static constexpr int kMaxCommitRetries = 8;

  /// Opens (creating directories as needed) and runs crash recovery: staged
  /// temp files are deleted and `CURRENT` is repaired to the newest
  /// parseable manifest.
  explicit LakeStore(std::filesystem::path root);

  LakeStore(const LakeStore&) = delete;
  LakeStore& operator=(const LakeStore&) = delete;

  const std::filesystem::path& root() const { return root_; }

  ObjectRef put_object(const ObjectKey& key, std::string_view payload,
                       std::optional<uint64_t> record_count = std::nullopt);

  DatasetManifest commit_manifest(const DatasetId& dataset, const std::vector<ObjectRef>& new_files,
                                  std::optional<SchemaDescriptor> schema_hint = std::nullopt);

  /// Files of the requested (default latest) version; empty if the dataset has
  /// no manifest yet. Throws kUnknownVersion.
  std::vector<ObjectRef> list_objects(const DatasetId& dataset,
                                      std::optional<uint64_t> at_version = std::nullopt) const;

  std::string read_object(const ObjectRef& ref) const;

  /// 0 when nothing has been committed.
  uint64_t current_version(const DatasetId& dataset) const;
  std::optional<DatasetManifest> latest_manifest(const DatasetId& dataset) const;
  DatasetManifest manifest(const DatasetId& dataset, uint64_t version) const;

  /// Datasets that have at least one manifest, sorted.
  std::vector<DatasetId> committed_datasets() const;

  bool object_exists(const ObjectKey& key) const;
  std::filesystem::path object_path(const ObjectKey& key) const;
  std::filesystem::path manifest_dir(const DatasetId& dataset) const;

  struct RecoveryStats {
    uint64_t temp_files_removed = 0;
    uint64_t manifests_quarantined = 0;
    uint64_t current_repaired = 0;
  };
  const RecoveryStats& recovery_stats() const { return recovery_; }

 private:
  void recover();
  std::mutex& dataset_lock(const DatasetId& dataset);

  std::filesystem::path root_;
  RecoveryStats recovery_;
  mutable std::mutex locks_mu_;
  std::map<DatasetId, std::unique_ptr<std::mutex>> locks_;
};

}  // namespace lakelet
