#pragma once

// CSV and file helpers. Numbers are printed with "%.12g", '\n' line endings.

#include <string>
#include <vector>

namespace nvcpt {

std::string format_number(double v);

/// Writes `content` to `path` via a temporary file in the same directory and rename.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& row(const std::vector<std::string>& cells);
  CsvWriter& row(const std::vector<double>& values);
  std::string str() const { return text_; }
  void write(const std::string& path) const { atomic_write(path, text_); }

 private:
  size_t columns_;
  std::string text_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  /// Column by header name; throws InputError when missing.
  const std::vector<double>& column(const std::string& name) const;
  size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

/// Numeric CSV with a header row. Empty files and malformed cells are InputErrors.
CsvTable parse_csv(const std::string& text, const std::string& origin = "csv");
CsvTable read_csv(const std::string& path);

}  // namespace nvcpt
