#include "lakelet/csv.hpp"

#include "lakelet/error.hpp"

namespace lakelet::csv {

std::optional<Record> Cursor::next() {
  // Skip blank lines (a lone LF or CRLF).
  while (pos_ < text_.size()) {
    if (text_[pos_] == '\n') {
      ++pos_;
      ++line_;
    } else if (text_[pos_] == '\r' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n') {
      pos_ += 2;
      ++line_;
    } else {
      break;
    }
  }
  if (pos_ >= text_.size()) return std::nullopt;

  record_line_ = line_;
  Record record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  while (pos_ < text_.size()) {
    char c = text_[pos_];
    if (in_quotes) {
      if (c == '"') {
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
          field.push_back('"');
          pos_ += 2;
          continue;
        }
        in_quotes = false;
        ++pos_;
        continue;
      }
      if (c == '\n') ++line_;
      field.push_back(c);
      ++pos_;
      continue;
    }
    if (c == '"' && field.empty() && !field_was_quoted) {
      in_quotes = true;
      field_was_quoted = true;
      ++pos_;
      continue;
    }
    if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      field_was_quoted = false;
      ++pos_;
      continue;
    }
    if (c == '\r' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n') {
      pos_ += 2;
      ++line_;
      record.push_back(std::move(field));
      return record;
    }
    if (c == '\n') {
      ++pos_;
      ++line_;
      record.push_back(std::move(field));
      return record;
    }
    field.push_back(c);
    ++pos_;
  }
  if (in_quotes) {
    throw_error(ErrorCode::kParseError,
                "unterminated quoted field starting on line " + std::to_string(record_line_));
  }
  record.push_back(std::move(field));
  return record;
}

std::vector<Record> parse(std::string_view text) {
  Cursor cursor(text);
  std::vector<Record> out;
  while (auto rec = cursor.next()) out.push_back(std::move(*rec));
  return out;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_record(const Record& record) {
  std::string out;
  for (size_t i = 0; i < record.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += escape(record[i]);
  }
  // A single empty field would otherwise render as a blank line and vanish.
  if (record.size() == 1 && record[0].empty()) out = "\"\"";
  out.push_back('\n');
  return out;
}

Table parse_table(std::string_view text) {
  Cursor cursor(text);
  auto header = cursor.next();
  if (!header) throw_error(ErrorCode::kParseError, "CSV document has no header row");
  Table table{std::move(*header), {}};
  while (auto rec = cursor.next()) table.rows.push_back(std::move(*rec));
  return table;
}

std::string format_table(const Table& table) {
  std::string out = format_record(table.header);
  for (const auto& row : table.rows) out += format_record(row);
  return out;
}

}  // namespace lakelet::csv
