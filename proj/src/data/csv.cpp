#include "sparcs/data/csv.hpp"

#include <sstream>

namespace sparcs::data {

CsvReader::Status CsvReader::next(std::vector<std::string>& fields) {
  fields.clear();
  std::streambuf* buf = in_.rdbuf();
  if (buf->sgetc() == std::char_traits<char>::eof()) return Status::kEnd;

  record_line_ = line_;
  if (first_record_) {
    first_record_ = false;
    // UTF-8 byte order mark.
    if (buf->sgetc() == 0xEF) {
      buf->sbumpc();
      if (buf->sgetc() == 0xBB) buf->sbumpc();
      if (buf->sgetc() == 0xBF) buf->sbumpc();
    }
  }

  constexpr int kEof = std::char_traits<char>::eof();
  std::string field;
  bool malformed = false;
  bool in_quotes = false;
  bool field_was_quoted = false;

  while (true) {
    int c = buf->sbumpc();
    if (c == kEof) {
      if (in_quotes) malformed = true;
      fields.push_back(std::move(field));
      break;
    }
    const char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        if (buf->sgetc() == '"') {
          buf->sbumpc();
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line_;
        field.push_back(ch);
      }
      continue;
    }
    if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
      field_was_quoted = false;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && buf->sgetc() == '\n') buf->sbumpc();
      ++line_;
      fields.push_back(std::move(field));
      break;
    } else if (ch == '"') {
      if (field.empty() && !field_was_quoted) {
        in_quotes = true;
        field_was_quoted = true;
      } else {
        malformed = true;
        field.push_back(ch);
      }
    } else {
      if (field_was_quoted) malformed = true;
      field.push_back(ch);
    }
  }
  return malformed ? Status::kMalformed : Status::kRecord;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::istringstream in(line);
  CsvReader reader(in);
  std::vector<std::string> fields;
  reader.next(fields);
  return fields;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace sparcs::data
