#include "lakelet/lake_store.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <set>
#include <thread>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include "fs_util.hpp"
#include "lakelet/error.hpp"
#include "lakelet/hash.hpp"
#include "lakelet/json_codec.hpp"
#include "lakelet/time_util.hpp"

namespace lakelet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kCurrentFile = "CURRENT";

bool is_segment_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
         c == '-' || c == '.' || c == '=';
}

bool is_valid_segment(std::string_view s) {
  if (s.empty() || s == "." || s == ".." || s.front() == '.') return false;
  if (fs_util::is_temp_name(s)) return false;
  return std::all_of(s.begin(), s.end(), is_segment_char);
}

std::optional<uint64_t> parse_u64(std::string_view s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

/// Version number from "v<N>.json", if the name has that shape.
std::optional<uint64_t> manifest_version_of(std::string_view filename) {
  if (filename.size() < 7 || filename.front() != 'v' || !filename.ends_with(".json")) {
    return std::nullopt;
  }
  return parse_u64(filename.substr(1, filename.size() - 6));
}

fs::path version_file(const fs::path& dir, uint64_t v) {
  return dir / ("v" + std::to_string(v) + ".json");
}

uint64_t read_current(const fs::path& dir) {
  std::error_code ec;
  if (!fs::exists(dir / kCurrentFile, ec)) return 0;
  auto v = parse_u64(fs_util::read_file(dir / kCurrentFile));
  return v.value_or(0);
}

std::optional<DatasetManifest> try_load_manifest(const fs::path& file) {
  try {
    auto m = json::parse(fs_util::read_file(file)).get<DatasetManifest>();
    return m;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// Serialises committers across processes so CURRENT only moves forward.
class DirLock {
 public:
  explicit DirLock(const fs::path& dir) {
    fd_ = ::open((dir / "LOCK").c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd_ < 0) throw_error(ErrorCode::kIoError, "cannot open lock in " + dir.string());
    while (::flock(fd_, LOCK_EX) != 0) {
      if (errno != EINTR) {
        ::close(fd_);
        throw_error(ErrorCode::kIoError, "cannot lock " + dir.string());
      }
    }
  }
  ~DirLock() { ::close(fd_); }
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  int fd_ = -1;
};

bool same_key_order(const ObjectRef& a, const ObjectRef& b) {
  return std::tie(a.key.partition, a.key.filename) < std::tie(b.key.partition, b.key.filename);
}

}  // namespace

std::string_view to_string(Zone z) {
  switch (z) {
    case Zone::kLanding: return "landing";
    case Zone::kRaw: return "raw";
    case Zone::kCurated: return "curated";
  }
  return "raw";
}

Zone zone_from_string(std::string_view s) {
  if (s == "landing") return Zone::kLanding;
  if (s == "raw") return Zone::kRaw;
  if (s == "curated") return Zone::kCurated;
  throw_error(ErrorCode::kInvalidKey, "unknown zone '" + std::string(s) + "'");
}

bool is_valid_name(std::string_view name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

DatasetId DatasetId::parse(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    throw_error(ErrorCode::kInvalidKey,
                "dataset must be written <zone>/<name>: '" + std::string(text) + "'");
  }
  DatasetId id{zone_from_string(text.substr(0, slash)), std::string(text.substr(slash + 1))};
  if (!is_valid_name(id.name)) {
    throw_error(ErrorCode::kInvalidKey, "invalid dataset name '" + id.name + "'");
  }
  return id;
}

std::string DatasetId::to_string() const {
  return std::string(lakelet::to_string(zone)) + "/" + name;
}

void ObjectKey::validate() const {
  if (!is_valid_name(dataset)) {
    throw_error(ErrorCode::kInvalidKey, "invalid dataset name '" + dataset + "'");
  }
  if (!partition.empty() && !is_valid_segment(partition)) {
    throw_error(ErrorCode::kInvalidKey, "invalid partition '" + partition + "'");
  }
  if (!is_valid_segment(filename)) {
    throw_error(ErrorCode::kInvalidKey, "invalid filename '" + filename + "'");
  }
}

fs::path ObjectKey::relative_path() const {
  fs::path p = fs::path("zones") / std::string(to_string(zone)) / dataset;
  if (!partition.empty()) p /= partition;
  return p / filename;
}

LakeStore::LakeStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_ / "zones");
  fs::create_directories(root_ / "manifests");
  recover();
}

void LakeStore::recover() {
  for (const char* top : {"zones", "manifests"}) {
    std::vector<fs::path> doomed;
    for (const auto& entry : fs::recursive_directory_iterator(root_ / top)) {
      if (entry.is_regular_file() && fs_util::is_temp_name(entry.path().filename().string())) {
        doomed.push_back(entry.path());
      }
    }
    for (const auto& p : doomed) {
      std::error_code ec;
      if (fs::remove(p, ec)) ++recovery_.temp_files_removed;
    }
  }

  for (const auto& zone_dir : fs::directory_iterator(root_ / "manifests")) {
    if (!zone_dir.is_directory()) continue;
    for (const auto& ds_dir : fs::directory_iterator(zone_dir.path())) {
      if (!ds_dir.is_directory()) continue;
      std::vector<uint64_t> versions;
      for (const auto& f : fs::directory_iterator(ds_dir.path())) {
        if (auto v = manifest_version_of(f.path().filename().string())) versions.push_back(*v);
      }
      std::sort(versions.rbegin(), versions.rend());
      uint64_t best = 0;
      for (uint64_t v : versions) {
        auto m = try_load_manifest(version_file(ds_dir.path(), v));
        if (m && m->version == v) {
          best = v;
          break;
        }
        // An unreadable newest manifest would block every later commit of
        // that version number, so move it aside.
        std::error_code ec;
        auto from = version_file(ds_dir.path(), v);
        fs::rename(from, fs::path(from.string() + ".corrupt"), ec);
        if (!ec) ++recovery_.manifests_quarantined;
      }
      uint64_t current = 0;
      try {
        current = read_current(ds_dir.path());
      } catch (const LakeError&) {
        current = 0;
      }
      if (best > 0 && current != best) {
        fs_util::write_atomic(ds_dir.path() / kCurrentFile, std::to_string(best));
        ++recovery_.current_repaired;
      }
    }
  }
}

std::mutex& LakeStore::dataset_lock(const DatasetId& dataset) {
  std::lock_guard guard(locks_mu_);
  auto& slot = locks_[dataset];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

fs::path LakeStore::object_path(const ObjectKey& key) const { return root_ / key.relative_path(); }

fs::path LakeStore::manifest_dir(const DatasetId& dataset) const {
  return root_ / "manifests" / std::string(to_string(dataset.zone)) / dataset.name;
}

bool LakeStore::object_exists(const ObjectKey& key) const {
  std::error_code ec;
  return fs::exists(object_path(key), ec);
}

ObjectRef LakeStore::put_object(const ObjectKey& key, std::string_view payload,
                                std::optional<uint64_t> record_count) {
  key.validate();
  fs::path target = object_path(key);
  std::error_code ec;
  fs::create_directories(target.parent_path(), ec);
  if (ec) throw_error(ErrorCode::kIoError, "mkdir " + target.parent_path().string() + ": " + ec.message());
  if (!fs_util::write_atomic_no_replace(target, payload)) {
    throw_error(ErrorCode::kDuplicateObject, "object already exists: " + key.relative_path().string());
  }
  return ObjectRef{key, payload.size(), sha256_hex(payload), record_count};
}

uint64_t LakeStore::current_version(const DatasetId& dataset) const {
  return read_current(manifest_dir(dataset));
}

DatasetManifest LakeStore::manifest(const DatasetId& dataset, uint64_t version) const {
  fs::path file = version_file(manifest_dir(dataset), version);
  std::error_code ec;
  if (version == 0 || !fs::exists(file, ec)) {
    throw_error(ErrorCode::kUnknownVersion,
                dataset.to_string() + " has no version " + std::to_string(version));
  }
  try {
    return json::parse(fs_util::read_file(file)).get<DatasetManifest>();
  } catch (const json::exception& e) {
    throw_error(ErrorCode::kCorruptObject, "unparseable manifest " + file.string() + ": " + e.what());
  }
}

std::optional<DatasetManifest> LakeStore::latest_manifest(const DatasetId& dataset) const {
  uint64_t v = current_version(dataset);
  if (v == 0) return std::nullopt;
  return manifest(dataset, v);
}

std::vector<ObjectRef> LakeStore::list_objects(const DatasetId& dataset,
                                               std::optional<uint64_t> at_version) const {
  uint64_t current = current_version(dataset);
  if (at_version) {
    if (*at_version == 0 || *at_version > current) {
      throw_error(ErrorCode::kUnknownVersion,
                  dataset.to_string() + " has no version " + std::to_string(*at_version));
    }
    return manifest(dataset, *at_version).files;
  }
  if (current == 0) return {};
  return manifest(dataset, current).files;
}

DatasetManifest LakeStore::commit_manifest(const DatasetId& dataset,
                                           const std::vector<ObjectRef>& new_files,
                                           std::optional<SchemaDescriptor> schema_hint) {
  if (!is_valid_name(dataset.name)) {
    throw_error(ErrorCode::kInvalidKey, "invalid dataset name '" + dataset.name + "'");
  }
  std::set<ObjectKey> incoming;
  for (const auto& ref : new_files) {
    if (ref.key.zone != dataset.zone || ref.key.dataset != dataset.name) {
      throw_error(ErrorCode::kInvalidKey, ref.key.relative_path().string() +
                                               " does not belong to " + dataset.to_string());
    }
    if (!incoming.insert(ref.key).second) {
      throw_error(ErrorCode::kDuplicateObject,
                  "file listed twice in one commit: " + ref.key.relative_path().string());
    }
    fs::path p = object_path(ref.key);
    std::error_code ec;
    if (!fs::exists(p, ec)) {
      throw_error(ErrorCode::kDanglingRef, "commit references missing file " + p.string());
    }
    std::string bytes = fs_util::read_file(p);
    if (bytes.size() != ref.size_bytes || sha256_hex(bytes) != ref.content_hash) {
      throw_error(ErrorCode::kCorruptObject, "file does not match its ref: " + p.string());
    }
  }

  std::lock_guard guard(dataset_lock(dataset));
  fs::path dir = manifest_dir(dataset);
  fs::create_directories(dir);
  DirLock file_lock(dir);

  uint64_t floor = 0;
  for (int attempt = 0; attempt < kMaxCommitRetries; ++attempt) {
    uint64_t base = std::max(read_current(dir), floor);
    std::vector<ObjectRef> files;
    if (base > 0) files = manifest(dataset, base).files;
    for (const auto& ref : files) {
      if (incoming.count(ref.key)) {
        throw_error(ErrorCode::kDuplicateObject,
                    "already referenced by " + dataset.to_string() + ": " +
                        ref.key.relative_path().string());
      }
    }
    files.insert(files.end(), new_files.begin(), new_files.end());
    std::stable_sort(files.begin(), files.end(), same_key_order);

    DatasetManifest next{dataset.name,
                         dataset.zone,
                         base + 1,
                         std::move(files),
                         iso8601_now(),
                         schema_hint,
                         std::string(kContentHashAlgo)};
    if (!fs_util::write_atomic_no_replace(version_file(dir, next.version), json(next).dump(2))) {
      // Another writer claimed this version; rebase on top of it.
      floor = base + 1;
      std::this_thread::sleep_for(std::chrono::milliseconds(1 << attempt));
      continue;
    }
    fs_util::write_atomic(dir / kCurrentFile, std::to_string(next.version));
    return next;
  }
  throw_error(ErrorCode::kCommitConflict,
              "gave up committing " + dataset.to_string() + " after " +
                  std::to_string(kMaxCommitRetries) + " attempts");
}

std::string LakeStore::read_object(const ObjectRef& ref) const {
  fs::path p = object_path(ref.key);
  std::error_code ec;
  if (!fs::exists(p, ec)) {
    throw_error(ErrorCode::kMissingObject, "missing object " + ref.key.relative_path().string());
  }
  std::string bytes = fs_util::read_file(p);
  if (bytes.size() != ref.size_bytes || sha256_hex(bytes) != ref.content_hash) {
    throw_error(ErrorCode::kCorruptObject,
                "hash mismatch for " + ref.key.relative_path().string());
  }
  return bytes;
}

std::vector<DatasetId> LakeStore::committed_datasets() const {
  std::vector<DatasetId> out;
  for (Zone z : {Zone::kLanding, Zone::kRaw, Zone::kCurated}) {
    fs::path zdir = root_ / "manifests" / std::string(to_string(z));
    std::error_code ec;
    if (!fs::is_directory(zdir, ec)) continue;
    for (const auto& d : fs::directory_iterator(zdir)) {
      if (!d.is_directory()) continue;
      DatasetId id{z, d.path().filename().string()};
      if (read_current(d.path()) > 0) out.push_back(id);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace lakelet
