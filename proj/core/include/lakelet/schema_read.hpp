#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "lakelet/csv.hpp"
#include "lakelet/lake_store.hpp"
#include "lakelet/schema.hpp"

namespace lakelet {

enum class ReadMode { kStrict, kLenient };

/// Type of a raw CSV cell in the inference lattice; nullopt for an empty
/// cell (null). Integers outside int64 fall through to float, then string.
std::optional<DType> classify_text(std::string_view cell);
/// Same for a JSON value. Objects and arrays classify as string.
std::optional<DType> classify_json(const nlohmann::json& v);

/// Converts a raw cell to `target`, widening along the lattice
/// (bool -> int -> float -> string). nullopt means the cell does not fit.
std::optional<Value> coerce_text(std::string_view cell, DType target);
std::optional<Value> coerce_json(const nlohmann::json& v, DType target);

/// Incremental inference state. Feeding more observations can only widen a
/// dtype or set nullable; fields are never removed.
class SchemaBuilder {
 public:
  /// CSV: declare the header; a field absent from later headers becomes nullable.
  void observe_header(const std::vector<std::string>& names);
  void observe_text(std::string_view name, std::string_view cell);
  void observe_json(std::string_view name, const nlohmann::json& v);
  /// Marks every known field not in `present` as nullable.
  void end_record(const std::vector<std::string>& present);

  SchemaDescriptor build() const;
  uint64_t records() const { return records_; }

 private:
  struct Slot {
    std::string name;
    std::optional<DType> dtype;
    bool nullable = false;
  };
  Slot& slot(std::string_view name);

  std::vector<Slot> slots_;
  uint64_t records_ = 0;
};

struct InferOptions {
  std::optional<uint64_t> sample_rows;  // nullopt = all rows
  ReadMode mode = ReadMode::kStrict;
};

struct InferStats {
  uint64_t records_sampled = 0;
  uint64_t records_skipped = 0;
};

/// Infers a schema from the latest committed files of `dataset` (format taken
/// from file extension). Throws kEmptyDataset, kInferFailed (strict).
SchemaDescriptor infer_schema(const LakeStore& store, const DatasetId& dataset,
                              const InferOptions& options = {}, InferStats* stats = nullptr);

/// Projects raw records onto a schema. Files are visited in manifest order and
/// records in file order. Lenient mode yields exactly one row per record and
/// counts every coercion failure; strict mode throws ReadAbortedError.
class RowReader {
 public:
  RowReader(const LakeStore& store, DatasetId dataset, SchemaDescriptor schema, ReadMode mode,
            std::optional<uint64_t> at_version = std::nullopt);

  bool next(Row& row);

  const SchemaDescriptor& schema() const { return schema_; }
  uint64_t malformed_count() const { return malformed_; }
  uint64_t rows_read() const { return rows_read_; }

 private:
  bool load_next_file();
  bool next_csv(Row& row);
  bool next_jsonl(Row& row);
  void violation(uint64_t line, const std::string& reason);

  const LakeStore& store_;
  DatasetId dataset_;
  SchemaDescriptor schema_;
  ReadMode mode_;
  std::vector<ObjectRef> files_;
  size_t next_file_ = 0;

  std::string current_name_;
  std::string buffer_;
  bool current_is_csv_ = false;
  size_t pos_ = 0;      // jsonl scan position
  uint64_t line_ = 0;   // jsonl line number
  std::vector<std::optional<size_t>> csv_mapping_;  // schema field -> file column
  std::unique_ptr<csv::Cursor> csv_;
  size_t header_width_ = 0;
  bool open_ = false;

  uint64_t malformed_ = 0;
  uint64_t rows_read_ = 0;
};

RowReader open_reader(const LakeStore& store, const DatasetId& dataset,
                      const SchemaDescriptor& schema, ReadMode mode);

/// Convenience: infer (all rows) then read everything.
struct TypedTable {
  SchemaDescriptor schema;
  std::vector<Row> rows;
  uint64_t malformed = 0;
};
TypedTable read_dataset(const LakeStore& store, const DatasetId& dataset, ReadMode mode);

}  // namespace lakelet
