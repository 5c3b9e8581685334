#pragma once

// RFC 4180 CSV: CRLF line endings, fields quoted only when they contain a
// comma, quote, CR or LF; doubles in shortest round-trip form.

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace tfdw {

std::string csv_escape(std::string_view field);

class CsvWriter {
 public:
  /// Opens path for writing and emits the header row; FormatError on failure.
  CsvWriter(const std::string& path, const std::string& header);
  ~CsvWriter();

  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(std::int64_t v);
  CsvWriter& operator<<(int v) { return *this << static_cast<std::int64_t>(v); }
  CsvWriter& operator<<(bool v) { return *this << std::string(v ? "true" : "false"); }
  CsvWriter& operator<<(const std::string& v);
  CsvWriter& operator<<(const char* v) { return *this << std::string(v); }
  /// Terminates the current row.
  void end_row();
  void close();

 private:
  void field(const std::string& text);

  std::ofstream out_;
  std::string path_;
  bool row_started_ = false;
};

/// Parse a CSV document (for tests and tools); rows of fields.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

}  // namespace tfdw
