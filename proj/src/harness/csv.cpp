#include "cqed/harness/csv.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "cqed/errors.hpp"

namespace cqed::harness {

std::string format_number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
  return std::string(buf, r.ptr);
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add_row(const std::vector<double>& values) {
  if (values.size() != columns_.size()) {
    throw InvalidArgument("CsvTable: row width does not match the header");
  }
  rows_.push_back(values);
}

void CsvTable::add_note(std::string note) { notes_.push_back(std::move(note)); }

std::string CsvTable::render() const {
  std::ostringstream os;
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  os << "# generated " << std::put_time(std::gmtime(&t), "%Y-%m-%dT%H:%M:%SZ")
     << " by readout " << CQED_VERSION << "\n";
  for (const auto& n : notes_) os << "# " << n << "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
  os << "\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << "\n";
  }
  return os.str();
}

void CsvTable::write(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  out << render();
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

} // namespace cqed::harness
