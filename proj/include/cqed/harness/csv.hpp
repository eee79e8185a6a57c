#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace cqed::harness {

/// Nine significant digits, '.' decimal, independent of locale.
std::string format_number(double v);

class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> columns);

  void add_row(const std::vector<double>& values);
  /// Extra "# ..." line written after the timestamp line.
  void add_note(std::string note);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }

  /// First line: "# generated <UTC timestamp> by readout <version>".
  std::string render() const;
  void write(const std::filesystem::path& path) const;

private:
  std::vector<std::string> columns_;
  std::vector<std::string> notes_;
  std::vector<std::vector<double>> rows_;
};

} // namespace cqed::harness
