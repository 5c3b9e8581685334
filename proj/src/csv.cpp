#include "tfdw/csv.hpp"

#include "tfdw/errors.hpp"
#include "tfdw/field_io.hpp"

namespace tfdw {

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& header)
    : out_(path, std::ios::binary), path_(path) {
  if (!out_) throw FormatError("cannot open '" + path + "' for writing");
  out_ << header << "\r\n";
}

CsvWriter::~CsvWriter() {
  if (out_.is_open()) {
    if (row_started_) out_ << "\r\n";
    out_.close();
  }
}

void CsvWriter::field(const std::string& text) {
  if (row_started_) out_ << ',';
  out_ << csv_escape(text);
  row_started_ = true;
}

CsvWriter& CsvWriter::operator<<(double v) {
  field(format_double(v));
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::int64_t v) {
  field(std::to_string(v));
  return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& v) {
  field(v);
  return *this;
}

void CsvWriter::end_row() {
  out_ << "\r\n";
  row_started_ = false;
}

void CsvWriter::close() {
  if (row_started_) end_row();
  out_.close();
  if (out_.fail()) throw FormatError("write to '" + path_ + "' failed");
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cur;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(cur));
      cur.clear();
      any = true;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(cur));
      cur.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      cur += c;
      any = true;
    }
  }
  if (quoted) throw FormatError("unterminated quoted CSV field");
  if (any || !cur.empty()) {
    row.push_back(std::move(cur));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace tfdw
