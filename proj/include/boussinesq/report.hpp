#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace boussinesq {

/// Shortest round-trip decimal form of a double ("inf", "-inf", "nan" for specials).
std::string format_double(double value);

/// RFC-4180-style table: one header row, CRLF line endings, fields quoted
/// when they contain a comma, quote or line break. Optional `# key=value`
/// preamble lines precede the header.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_comment(std::string key, std::string value);
  void add_row(std::vector<std::string> fields);
  void add_numeric_row(const std::vector<double>& values);

  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }

  void write(std::ostream& out) const;
  std::string str() const;

 private:
  std::vector<std::pair<std::string, std::string>> comments_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string csv_escape(const std::string& field);

}  // namespace boussinesq
