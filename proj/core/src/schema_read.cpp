#include "lakelet/schema_read.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "lakelet/error.hpp"

namespace lakelet {

using nlohmann::json;

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

std::optional<bool> parse_bool(std::string_view s) {
  if (iequals(s, "true")) return true;
  if (iequals(s, "false")) return false;
  return std::nullopt;
}

bool is_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool looks_integer(std::string_view s) {
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) s.remove_prefix(1);
  return is_digits(s);
}

// [+-]? (d+ (. d*)? | . d+) ([eE] [+-]? d+)?
bool looks_decimal(std::string_view s) {
  size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  size_t int_start = i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  bool int_digits = i > int_start;
  bool frac_digits = false;
  if (i < s.size() && s[i] == '.') {
    ++i;
    size_t frac_start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    frac_digits = i > frac_start;
  }
  if (!int_digits && !frac_digits) return false;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    size_t exp_start = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == exp_start) return false;
  }
  return i == s.size();
}

std::optional<int64_t> parse_int(std::string_view s) {
  if (!looks_integer(s)) return std::nullopt;
  if (s[0] == '+') s.remove_prefix(1);
  int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_float(std::string_view s) {
  if (!looks_decimal(s)) return std::nullopt;
  if (s[0] == '+') s.remove_prefix(1);
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

bool is_csv_file(const ObjectKey& key) { return key.filename.ends_with(".csv"); }
bool is_jsonl_file(const ObjectKey& key) { return key.filename.ends_with(".jsonl"); }

/// Next non-blank line of `text` starting at `pos`; advances pos/line.
std::optional<std::string_view> next_line(std::string_view text, size_t& pos, uint64_t& line) {
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view l = text.substr(pos, end - pos);
    pos = end + 1;
    ++line;
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    if (!l.empty()) return l;
  }
  return std::nullopt;
}

}  // namespace

std::optional<DType> classify_text(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (parse_bool(cell)) return DType::kBool;
  if (parse_int(cell)) return DType::kInt;
  if (parse_float(cell)) return DType::kFloat;
  return DType::kString;
}

std::optional<DType> classify_json(const json& v) {
  switch (v.type()) {
    case json::value_t::null: return std::nullopt;
    case json::value_t::boolean: return DType::kBool;
    case json::value_t::number_integer: return DType::kInt;
    case json::value_t::number_unsigned:
      return v.get<uint64_t>() <= static_cast<uint64_t>(std::numeric_limits<int64_t>::max())
                 ? DType::kInt
                 : DType::kFloat;
    case json::value_t::number_float: return DType::kFloat;
    default: return DType::kString;
  }
}

std::optional<Value> coerce_text(std::string_view cell, DType target) {
  if (cell.empty()) return Value::null();
  switch (target) {
    case DType::kString: return Value(std::string(cell));
    case DType::kBool:
      if (auto b = parse_bool(cell)) return Value(*b);
      return std::nullopt;
    case DType::kInt:
      if (auto i = parse_int(cell)) return Value(*i);
      if (auto b = parse_bool(cell)) return Value(static_cast<int64_t>(*b));
      return std::nullopt;
    case DType::kFloat:
      if (auto d = parse_float(cell)) return Value(*d);
      if (auto b = parse_bool(cell)) return Value(*b ? 1.0 : 0.0);
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<Value> coerce_json(const json& v, DType target) {
  if (v.is_null()) return Value::null();
  switch (target) {
    case DType::kString:
      if (v.is_string()) return Value(v.get<std::string>());
      return Value(v.dump());
    case DType::kBool:
      if (v.is_boolean()) return Value(v.get<bool>());
      return std::nullopt;
    case DType::kInt:
      if (v.is_boolean()) return Value(static_cast<int64_t>(v.get<bool>()));
      if (v.is_number_integer() && classify_json(v) == DType::kInt) return Value(v.get<int64_t>());
      return std::nullopt;
    case DType::kFloat:
      if (v.is_boolean()) return Value(v.get<bool>() ? 1.0 : 0.0);
      if (v.is_number()) return Value(v.get<double>());
      return std::nullopt;
  }
  return std::nullopt;
}

SchemaBuilder::Slot& SchemaBuilder::slot(std::string_view name) {
  for (auto& s : slots_) {
    if (s.name == name) return s;
  }
  // A field first seen after some records were already absorbed was missing
  // from those records.
  slots_.push_back(Slot{std::string(name), std::nullopt, records_ > 0});
  return slots_.back();
}

void SchemaBuilder::observe_header(const std::vector<std::string>& names) {
  for (const auto& n : names) slot(n);
}

void SchemaBuilder::observe_text(std::string_view name, std::string_view cell) {
  Slot& s = slot(name);
  auto t = classify_text(cell);
  if (!t) {
    s.nullable = true;
    return;
  }
  s.dtype = s.dtype ? widen(*s.dtype, *t) : *t;
}

void SchemaBuilder::observe_json(std::string_view name, const json& v) {
  Slot& s = slot(name);
  auto t = classify_json(v);
  if (!t) {
    s.nullable = true;
    return;
  }
  s.dtype = s.dtype ? widen(*s.dtype, *t) : *t;
}

void SchemaBuilder::end_record(const std::vector<std::string>& present) {
  for (auto& s : slots_) {
    if (std::find(present.begin(), present.end(), s.name) == present.end()) s.nullable = true;
  }
  ++records_;
}

SchemaDescriptor SchemaBuilder::build() const {
  SchemaDescriptor out;
  // A field seen only as null sits at the lattice bottom so later values can
  // only widen it.
  for (const auto& s : slots_) {
    out.fields.push_back(Field{s.name, s.dtype.value_or(DType::kBool), s.nullable || !s.dtype});
  }
  return out;
}

SchemaDescriptor infer_schema(const LakeStore& store, const DatasetId& dataset,
                              const InferOptions& options, InferStats* stats) {
  auto files = store.list_objects(dataset);
  if (files.empty()) {
    throw_error(ErrorCode::kEmptyDataset, dataset.to_string() + " has no committed files");
  }
  const bool strict = options.mode == ReadMode::kStrict;
  SchemaBuilder builder;
  InferStats local;
  auto budget_left = [&] { return !options.sample_rows || local.records_sampled < *options.sample_rows; };
  auto fail = [&](const std::string& where, const std::string& why) {
    if (strict) throw_error(ErrorCode::kInferFailed, where + ": " + why);
    ++local.records_skipped;
  };

  for (const auto& ref : files) {
    if (!budget_left()) break;
    const std::string name = ref.key.relative_path().string();
    std::string bytes;
    try {
      bytes = store.read_object(ref);
    } catch (const LakeError& e) {
      fail(name, e.what());
      continue;
    }

    if (is_csv_file(ref.key)) {
      csv::Cursor cursor(bytes);
      try {
        auto header = cursor.next();
        if (!header) continue;
        builder.observe_header(*header);
        while (budget_left()) {
          auto rec = cursor.next();
          if (!rec) break;
          if (rec->size() != header->size()) {
            fail(name + ":" + std::to_string(cursor.record_line()),
                 "expected " + std::to_string(header->size()) + " fields, got " +
                     std::to_string(rec->size()));
            continue;
          }
          for (size_t i = 0; i < rec->size(); ++i) builder.observe_text((*header)[i], (*rec)[i]);
          builder.end_record(*header);
          ++local.records_sampled;
        }
      } catch (const LakeError& e) {
        fail(name, e.what());
      }
    } else if (is_jsonl_file(ref.key)) {
      size_t pos = 0;
      uint64_t line_no = 0;
      while (budget_left()) {
        auto line = next_line(bytes, pos, line_no);
        if (!line) break;
        // Ordered parse so fields are reported in first-seen order.
        auto obj = nlohmann::ordered_json::parse(*line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object()) {
          fail(name + ":" + std::to_string(line_no), "not a JSON object");
          continue;
        }
        std::vector<std::string> present;
        present.reserve(obj.size());
        for (auto it = obj.begin(); it != obj.end(); ++it) {
          builder.observe_json(it.key(), json(it.value()));
          present.push_back(it.key());
        }
        builder.end_record(present);
        ++local.records_sampled;
      }
    } else {
      fail(name, "unsupported file extension");
    }
  }

  SchemaDescriptor schema = builder.build();
  if (schema.fields.empty()) {
    throw_error(ErrorCode::kEmptyDataset, dataset.to_string() + " has no records to infer from");
  }
  if (stats) *stats = local;
  return schema;
}

RowReader::RowReader(const LakeStore& store, DatasetId dataset, SchemaDescriptor schema,
                     ReadMode mode, std::optional<uint64_t> at_version)
    : store_(store),
      dataset_(std::move(dataset)),
      schema_(std::move(schema)),
      mode_(mode),
      files_(store.list_objects(dataset_, at_version)) {}

void RowReader::violation(uint64_t line, const std::string& reason) {
  if (mode_ == ReadMode::kStrict) throw ReadAbortedError(current_name_, line, reason);
  ++malformed_;
}

bool RowReader::load_next_file() {
  while (next_file_ < files_.size()) {
    const ObjectRef& ref = files_[next_file_++];
    current_name_ = ref.key.relative_path().string();
    buffer_ = store_.read_object(ref);
    pos_ = 0;
    line_ = 0;
    if (is_csv_file(ref.key)) {
      current_is_csv_ = true;
      csv_ = std::make_unique<csv::Cursor>(buffer_);
      std::optional<csv::Record> header;
      try {
        header = csv_->next();
      } catch (const LakeError& e) {
        violation(1, e.what());
        csv_.reset();
        continue;
      }
      if (!header) {
        csv_.reset();
        continue;
      }
      csv_mapping_.assign(schema_.fields.size(), std::nullopt);
      for (size_t f = 0; f < schema_.fields.size(); ++f) {
        for (size_t c = 0; c < header->size(); ++c) {
          if ((*header)[c] == schema_.fields[f].name) {
            csv_mapping_[f] = c;
            break;
          }
        }
      }
      header_width_ = header->size();
      return true;
    }
    if (is_jsonl_file(ref.key)) {
      current_is_csv_ = false;
      csv_.reset();
      return true;
    }
    violation(0, "unsupported file extension");
  }
  return false;
}

bool RowReader::next_csv(Row& row) {
  std::optional<csv::Record> rec;
  try {
    rec = csv_->next();
  } catch (const LakeError& e) {
    // Unterminated quote swallows the rest of the file: one malformed record.
    violation(csv_->record_line(), e.what());
    csv_.reset();
    row.assign(schema_.fields.size(), Value::null());
    return true;
  }
  if (!rec) return false;
  const uint64_t line = csv_->record_line();
  if (rec->size() != header_width_) {
    violation(line, "expected " + std::to_string(header_width_) + " fields, got " +
                        std::to_string(rec->size()));
  }
  row.clear();
  row.reserve(schema_.fields.size());
  for (size_t f = 0; f < schema_.fields.size(); ++f) {
    const Field& field = schema_.fields[f];
    std::string_view cell;
    if (csv_mapping_[f] && *csv_mapping_[f] < rec->size()) cell = (*rec)[*csv_mapping_[f]];
    auto v = coerce_text(cell, field.dtype);
    if (!v) {
      violation(line, "value '" + std::string(cell) + "' is not " +
                          std::string(to_string(field.dtype)) + " for field " + field.name);
      v = Value::null();
    } else if (v->is_null() && !field.nullable) {
      violation(line, "null in non-nullable field " + field.name);
    }
    row.push_back(std::move(*v));
  }
  return true;
}

bool RowReader::next_jsonl(Row& row) {
  auto line = next_line(buffer_, pos_, line_);
  if (!line) return false;
  row.assign(schema_.fields.size(), Value::null());
  json obj = json::parse(*line, nullptr, false);
  if (obj.is_discarded() || !obj.is_object()) {
    violation(line_, "not a JSON object");
    return true;
  }
  for (size_t f = 0; f < schema_.fields.size(); ++f) {
    const Field& field = schema_.fields[f];
    auto it = obj.find(field.name);
    if (it == obj.end() || it->is_null()) {
      if (!field.nullable) violation(line_, "missing value for non-nullable field " + field.name);
      continue;
    }
    auto v = coerce_json(*it, field.dtype);
    if (!v) {
      violation(line_, "value " + it->dump() + " is not " + std::string(to_string(field.dtype)) +
                           " for field " + field.name);
      continue;
    }
    row[f] = std::move(*v);
  }
  return true;
}

bool RowReader::next(Row& row) {
  for (;;) {
    if (!open_) {
      if (!load_next_file()) return false;
      open_ = true;
    }
    bool got = current_is_csv_ ? (csv_ && next_csv(row)) : next_jsonl(row);
    if (got) {
      ++rows_read_;
      return true;
    }
    open_ = false;
  }
}

RowReader open_reader(const LakeStore& store, const DatasetId& dataset,
                      const SchemaDescriptor& schema, ReadMode mode) {
  return RowReader(store, dataset, schema, mode);
}

TypedTable read_dataset(const LakeStore& store, const DatasetId& dataset, ReadMode mode) {
  TypedTable out;
  if (store.list_objects(dataset).empty()) return out;
  try {
    out.schema = infer_schema(store, dataset, InferOptions{std::nullopt, mode});
  } catch (const LakeError& e) {
    if (e.code() == ErrorCode::kEmptyDataset) return out;
    throw;
  }
  RowReader reader(store, dataset, out.schema, mode);
  Row row;
  while (reader.next(row)) out.rows.push_back(row);
  out.malformed = reader.malformed_count();
  return out;
}

}  // namespace lakelet
