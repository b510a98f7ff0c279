#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace itwf {

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

/// One CSV cell. Floating-point values use format_double.
struct CsvField {
  std::string text;

  CsvField(std::string_view s) : text(s) {}
  CsvField(char const *s) : text(s) {}
  CsvField(std::string s) : text(std::move(s)) {}
  CsvField(double v) : text(format_double(v)) {}
  CsvField(int v) : text(std::to_string(v)) {}
  CsvField(long v) : text(std::to_string(v)) {}
  CsvField(long long v) : text(std::to_string(v)) {}
};

/// CSV text built in memory; fields never need quoting here.
class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<CsvField> const &fields);

  size_t rows() const { return rows_; }
  std::string const &text() const { return text_; }
  /// Throws IoError.
  void write(std::filesystem::path const &path) const;

private:
  void append(std::vector<std::string> const &fields);

  size_t columns_;
  size_t rows_ = 0;
  std::string text_;
};

} // namespace itwf
