#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lakelet/catalog.hpp"
#include "lakelet/lake_store.hpp"

namespace lakelet {

/// CSV file with a header row, standing in for one relational table.
struct TableSource {
  std::filesystem::path path;
  std::string table_name;
  std::optional<std::string> split_column;
};

/// Inclusive integer range of the split column.
struct SplitRange {
  int64_t lo = 0;
  int64_t hi = 0;

  bool contains(int64_t v) const { return lo <= v && v <= hi; }
  bool operator==(const SplitRange&) const = default;
};

/// Uniform partition of [min, max] of `values` into at most `num_splits`
/// contiguous ranges whose widths differ by at most one. Empty input gives an
/// empty plan.
std::vector<SplitRange> plan_splits(std::span<const int64_t> values, size_t num_splits);

/// Reads the source and plans on its split column.
/// Throws kNonNumericSplitColumn, kInvalidArgument (no split column / not in header).
std::vector<SplitRange> plan_splits(const TableSource& source, size_t num_splits);

/// Index of the range holding `v` in a plan from plan_splits.
size_t split_index(std::span<const SplitRange> plan, int64_t v);

struct ImportOptions {
  size_t num_splits = 4;
  /// Strict: a malformed source row aborts the import. Lenient: skip and count.
  bool strict = false;
};

struct ImportReport {
  std::string dataset;
  uint64_t rows_imported = 0;
  uint64_t splits_used = 0;  // non-empty splits
  uint64_t files_written = 0;
  std::chrono::milliseconds duration{0};
  std::vector<uint64_t> rows_per_split;  // by planned split index, empties included
  uint64_t manifest_version = 0;         // 0 when nothing was committed
  bool no_op = false;
  bool already_imported_warning = false;
  uint64_t non_numeric_split_fallbacks = 0;
  uint64_t rows_skipped = 0;
  std::string source_hash;
};

/// Imports `source` into `target` (auto-registered as csv). Each non-empty
/// split becomes one part file `part-<index:05>.csv` with the header repeated;
/// all parts land in a single manifest commit. Throws kImportAborted and
/// leaves no new manifest version on any failure.
ImportReport import_table(LakeStore& store, Catalog& catalog, const TableSource& source,
                          const DatasetId& target, const ImportOptions& options = {});

/// Lineage label for a source file: "<filename>@<first 16 hex of sha256>".
std::string source_label(const std::filesystem::path& path, const std::string& content_hash);

}  // namespace lakelet
