#include "lakelet/batch_import.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <thread>

#include "fs_util.hpp"
#include "lakelet/csv.hpp"
#include "lakelet/error.hpp"
#include "lakelet/hash.hpp"
#include "lakelet/schema_read.hpp"
#include "lakelet/time_util.hpp"

namespace lakelet {

namespace fs = std::filesystem;

namespace {

struct ParsedSource {
  csv::Table table;
  std::string hash;
  uint64_t skipped = 0;
};

ParsedSource read_source(const TableSource& source, bool strict) {
  std::string bytes;
  try {
    bytes = fs_util::read_file(source.path);
  } catch (const LakeError& e) {
    throw_error(ErrorCode::kImportAborted, "cannot read source: " + std::string(e.what()));
  }
  ParsedSource out;
  out.hash = sha256_hex(bytes);
  csv::Cursor cursor(bytes);
  try {
    auto header = cursor.next();
    if (!header) {
      throw_error(ErrorCode::kImportAborted, source.path.string() + " has no header row");
    }
    out.table.header = std::move(*header);
    while (auto rec = cursor.next()) {
      if (rec->size() != out.table.header.size()) {
        if (strict) {
          throw_error(ErrorCode::kImportAborted,
                      source.path.string() + ":" + std::to_string(cursor.record_line()) +
                          ": expected " + std::to_string(out.table.header.size()) + " fields, got " +
                          std::to_string(rec->size()));
        }
        ++out.skipped;
        continue;
      }
      out.table.rows.push_back(std::move(*rec));
    }
  } catch (const LakeError& e) {
    if (e.code() == ErrorCode::kImportAborted) throw;
    // Unterminated quote: the remainder of the file is unusable either way.
    if (strict) throw_error(ErrorCode::kImportAborted, source.path.string() + ": " + e.what());
    ++out.skipped;
  }
  return out;
}

size_t split_column_index(const TableSource& source, const csv::Record& header) {
  if (!source.split_column) {
    throw_error(ErrorCode::kInvalidArgument, "no split column set for " + source.table_name);
  }
  auto it = std::find(header.begin(), header.end(), *source.split_column);
  if (it == header.end()) {
    throw_error(ErrorCode::kInvalidArgument,
                "split column '" + *source.split_column + "' not in header of " + source.path.string());
  }
  return static_cast<size_t>(it - header.begin());
}

std::vector<int64_t> split_values(const csv::Table& table, size_t column) {
  std::vector<int64_t> values;
  values.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    auto v = coerce_text(row[column], DType::kInt);
    if (!v || v->is_null() || classify_text(row[column]) != DType::kInt) {
      throw_error(ErrorCode::kNonNumericSplitColumn,
                  "split column value '" + row[column] + "' is not an integer");
    }
    values.push_back(v->as_int());
  }
  return values;
}

std::string part_filename(size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "part-%05zu.csv", index);
  return buf;
}

std::string pick_partition(const LakeStore& store, const DatasetId& target) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "import-%06llu",
                static_cast<unsigned long long>(store.current_version(target) + 1));
  std::string base = buf;
  fs::path dataset_dir = store.root() / "zones" / std::string(to_string(target.zone)) / target.name;
  std::string candidate = base;
  std::error_code ec;
  for (int n = 1; fs::exists(dataset_dir / candidate, ec); ++n) {
    candidate = base + "-" + std::to_string(n);
  }
  return candidate;
}

}  // namespace

std::vector<SplitRange> plan_splits(std::span<const int64_t> values, size_t num_splits) {
  if (num_splits == 0) throw_error(ErrorCode::kInvalidArgument, "num_splits must be positive");
  if (values.empty()) return {};
  auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  // Width is span + 1, which only overflows for the full int64 range, so
  // derive quotient and remainder from span instead.
  const uint64_t span = static_cast<uint64_t>(*mx) - static_cast<uint64_t>(*mn);
  const uint64_t n = span >= num_splits - 1 ? num_splits : span + 1;
  uint64_t base = span / n;
  uint64_t extra = span % n + 1;
  if (extra == n) {
    ++base;
    extra = 0;
  }
  std::vector<SplitRange> plan;
  plan.reserve(n);
  uint64_t start = static_cast<uint64_t>(*mn);
  for (uint64_t i = 0; i < n; ++i) {
    uint64_t w = base + (i < extra ? 1 : 0);
    plan.push_back(SplitRange{static_cast<int64_t>(start), static_cast<int64_t>(start + w - 1)});
    start += w;
  }
  return plan;
}

std::vector<SplitRange> plan_splits(const TableSource& source, size_t num_splits) {
  ParsedSource parsed = read_source(source, /*strict=*/true);
  size_t col = split_column_index(source, parsed.table.header);
  auto values = split_values(parsed.table, col);
  return plan_splits(values, num_splits);
}

size_t split_index(std::span<const SplitRange> plan, int64_t v) {
  auto it = std::upper_bound(plan.begin(), plan.end(), v,
                             [](int64_t x, const SplitRange& r) { return x < r.lo; });
  if (it == plan.begin() || !std::prev(it)->contains(v)) {
    throw_error(ErrorCode::kInvalidArgument, "value " + std::to_string(v) + " outside split plan");
  }
  return static_cast<size_t>(std::prev(it) - plan.begin());
}

std::string source_label(const fs::path& path, const std::string& content_hash) {
  return path.filename().string() + "@" + content_hash.substr(0, 16);
}

ImportReport import_table(LakeStore& store, Catalog& catalog, const TableSource& source,
                          const DatasetId& target, const ImportOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  if (options.num_splits == 0) throw_error(ErrorCode::kInvalidArgument, "num_splits must be positive");
  if (!is_valid_name(target.name)) {
    throw_error(ErrorCode::kInvalidKey, "invalid dataset name '" + target.name + "'");
  }

  ImportReport report;
  report.dataset = target.to_string();
  ParsedSource parsed = read_source(source, options.strict);
  report.source_hash = parsed.hash;
  report.rows_skipped = parsed.skipped;
  const csv::Table& table = parsed.table;

  auto finish = [&] {
    report.duration = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);
    return report;
  };

  if (auto existing = catalog.find_dataset(target); existing && existing->format != DataFormat::kCsv) {
    throw_error(ErrorCode::kInvalidArgument, target.to_string() + " is registered as " +
                                                 std::string(to_string(existing->format)));
  }
  if (table.rows.empty()) {
    report.no_op = true;
    return finish();
  }

  // Row -> split assignment. Without a usable integer split column every row
  // goes to a single split.
  std::vector<SplitRange> plan;
  std::vector<size_t> assignment(table.rows.size(), 0);
  size_t planned = 1;
  if (source.split_column && options.num_splits > 1) {
    size_t col = split_column_index(source, table.header);
    try {
      auto values = split_values(table, col);
      plan = plan_splits(values, options.num_splits);
      planned = plan.size();
      for (size_t i = 0; i < values.size(); ++i) assignment[i] = split_index(plan, values[i]);
    } catch (const LakeError& e) {
      if (e.code() != ErrorCode::kNonNumericSplitColumn) throw;
      ++report.non_numeric_split_fallbacks;
      std::fill(assignment.begin(), assignment.end(), 0);
      planned = 1;
    }
  } else if (source.split_column) {
    split_column_index(source, table.header);
  }

  std::vector<std::vector<size_t>> members(planned);
  for (size_t i = 0; i < assignment.size(); ++i) members[assignment[i]].push_back(i);
  report.rows_per_split.reserve(planned);
  for (const auto& m : members) report.rows_per_split.push_back(m.size());

  const std::string partition = pick_partition(store, target);
  std::vector<std::optional<ObjectRef>> refs(planned);
  std::vector<std::exception_ptr> errors(planned);
  {
    std::vector<std::jthread> workers;
    workers.reserve(planned);
    for (size_t s = 0; s < planned; ++s) {
      if (members[s].empty()) continue;
      workers.emplace_back([&, s] {
        try {
          std::string payload = csv::format_record(table.header);
          for (size_t row : members[s]) payload += csv::format_record(table.rows[row]);
          ObjectKey key{target.zone, target.name, partition, part_filename(s)};
          refs[s] = store.put_object(key, payload, members[s].size());
        } catch (...) {
          errors[s] = std::current_exception();
        }
      });
    }
  }

  std::vector<ObjectRef> written;
  std::string failure;
  for (size_t s = 0; s < planned; ++s) {
    if (refs[s]) written.push_back(*refs[s]);
    if (errors[s] && failure.empty()) {
      try {
        std::rethrow_exception(errors[s]);
      } catch (const std::exception& e) {
        failure = "split " + std::to_string(s) + ": " + e.what();
      }
    }
  }
  auto discard_written = [&] {
    for (const auto& r : written) {
      std::error_code ec;
      fs::remove(store.object_path(r.key), ec);
    }
  };
  if (!failure.empty()) {
    discard_written();
    throw_error(ErrorCode::kImportAborted, "import of " + source.table_name + " failed: " + failure);
  }

  SchemaDescriptor hint;
  for (const auto& name : table.header) hint.fields.push_back(Field{name, DType::kString, true});

  if (!catalog.find_dataset(target)) {
    catalog.register_dataset(DatasetDescriptor{target.name, target.zone, DataFormat::kCsv, iso8601_now(),
                                               "csv:" + source.path.filename().string(), hint});
  }

  DatasetManifest manifest;
  try {
    manifest = store.commit_manifest(target, written, hint);
  } catch (const LakeError& e) {
    discard_written();
    throw_error(ErrorCode::kImportAborted, "commit of " + target.to_string() + " failed: " + e.what());
  }

  const std::string src = source_node(source_label(source.path, parsed.hash));
  const std::string dst = dataset_node(target);
  report.already_imported_warning = catalog.has_edge(src, dst);
  catalog.record_lineage(LineageEdge{src, dst, JobKind::kBatchImport, iso8601_now()});

  report.manifest_version = manifest.version;
  report.files_written = written.size();
  report.splits_used = written.size();
  for (const auto& r : written) report.rows_imported += r.record_count.value_or(0);
  return finish();
}

}  // namespace lakelet
