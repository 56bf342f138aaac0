#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lakelet::csv {

using Record = std::vector<std::string>;

/// RFC-4180 style reader: comma separated, double-quote quoting with "" as
/// an escaped quote, LF or CRLF line ends. Blank lines are skipped.
class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  /// Reads the next record. Throws LakeError(kParseError) on an unterminated
  /// quoted field.
  std::optional<Record> next();

  /// 1-based line on which the most recently returned record started.
  uint64_t record_line() const { return record_line_; }

 private:
  std::string_view text_;
  size_t pos_ = 0;
  uint64_t line_ = 1;
  uint64_t record_line_ = 0;
};

std::vector<Record> parse(std::string_view text);

/// Quotes `field` only when it contains a separator, quote or line break.
std::string escape(std::string_view field);
std::string format_record(const Record& record);

struct Table {
  Record header;
  std::vector<Record> rows;
};

/// First record is the header. Throws kParseError on an empty document.
Table parse_table(std::string_view text);
std::string format_table(const Table& table);

}  // namespace lakelet::csv
