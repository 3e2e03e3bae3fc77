#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

namespace sparcs::data {

// Streaming reader for comma-separated, double-quote-quoted UTF-8 text
// (RFC 4180 plus LF-only line endings). Quoted fields may span lines.
class CsvReader {
 public:
  enum class Status { kRecord, kMalformed, kEnd };

  explicit CsvReader(std::istream& in) : in_(in) {}

  // Reads the next record into `fields`. A malformed record (stray quote,
  // unterminated quoted field) is still consumed and reported as kMalformed
  // so the caller can tally it and continue. An unterminated quote runs to
  // end of input.
  Status next(std::vector<std::string>& fields);

  // 1-based line number where the last returned record started.
  std::size_t record_line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
  bool first_record_ = true;
};

// Splits a single CSV line; used for small configuration inputs and tests.
std::vector<std::string> split_csv_line(const std::string& line);

// Quotes a field when it contains a comma, quote, or line break.
std::string csv_escape(const std::string& field);

}  // namespace sparcs::data
