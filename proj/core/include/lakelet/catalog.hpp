#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lakelet/lake_store.hpp"
#include "lakelet/schema.hpp"

namespace lakelet {

enum class DataFormat { kCsv, kJsonl };

std::string_view to_string(DataFormat f);
DataFormat format_from_string(std::string_view s);
/// File extension including the dot: ".csv" / ".jsonl".
std::string_view file_extension(DataFormat f);

struct DatasetDescriptor {
  std::string name;
  Zone zone = Zone::kRaw;
  DataFormat format = DataFormat::kCsv;
  std::string created_at;
  std::string source;
  std::optional<SchemaDescriptor> schema_hint;

  DatasetId id() const { return {zone, name}; }
  bool operator==(const DatasetDescriptor&) const = default;
};

enum class JobKind { kBatchImport, kFlowRun, kQuery };

std::string_view to_string(JobKind k);
JobKind job_kind_from_string(std::string_view s);

/// Lineage edge between node ids of the form "source:<label>",
/// "dataset:<zone>/<name>" or "job:<job-id>".
struct LineageEdge {
  std::string from_node;
  std::string to_node;
  JobKind job_kind = JobKind::kBatchImport;
  std::string at;

  bool operator==(const LineageEdge&) const = default;
};

std::string source_node(std::string_view label);
std::string dataset_node(const DatasetId& id);
std::string job_node(std::string_view job_id);

/// Dataset registry plus lineage DAG, persisted to `<lake_root>/catalog.json`.
///
/// Every mutation reloads the file, applies the change and rewrites it
/// atomically under one lock, so handles in the same process stay coherent.
class Catalog {
 public:
  static constexpr std::string_view kFileName = "catalog.json";

  explicit Catalog(std::filesystem::path lake_root);

  /// Throws kAlreadyRegistered, kInvalidKey.
  void register_dataset(DatasetDescriptor desc);
  std::optional<DatasetDescriptor> find_dataset(const DatasetId& id) const;
  /// Throws kUnknownDataset.
  DatasetDescriptor get_dataset(const DatasetId& id) const;
  std::vector<DatasetDescriptor> datasets() const;

  /// Returns false when an identical (from, to, kind) edge already exists.
  /// Throws kCycleDetected, kUnknownDataset.
  bool record_lineage(LineageEdge edge);
  bool has_edge(std::string_view from_node, std::string_view to_node) const;
  std::vector<LineageEdge> edges() const;

  /// All upstream edges of `node_id`, ordered so that an edge appears after
  /// every edge feeding its from_node; ties break by node id.
  /// Throws kUnknownDataset for a node the catalog has never seen.
  std::vector<LineageEdge> lineage_of(std::string_view node_id) const;

  bool node_exists(std::string_view node_id) const;

  /// Writes an empty catalog file if none exists.
  void ensure_file() const;

  const std::filesystem::path& path() const { return path_; }

 private:
  struct State {
    std::vector<DatasetDescriptor> datasets;
    std::vector<LineageEdge> lineage;
  };

  State load() const;
  void store(const State& state) const;
  static bool node_known(const State& state, std::string_view node_id);

  std::filesystem::path path_;
  mutable std::mutex mu_;
};

}  // namespace lakelet
