#pragma once

// Named figure presets. Each produces one or more CSV tables with the
// parameter sets baked in; `coarse` shrinks the grids but keeps the
// headline cells.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cqed/harness/cache.hpp"
#include "cqed/harness/csv.hpp"
#include "cqed/model.hpp"

namespace cqed::harness {

struct FigureOptions {
  bool coarse = false;
  int jobs = 1;
  const ResultCache* cache = nullptr;  ///< may be null
  std::ostream* log = nullptr;         ///< one line per cell when set
};

using NamedTable = std::pair<std::string, CsvTable>;  ///< (file name, table)

const std::vector<std::string>& figure_names();

/// Throws InvalidArgument for an unknown name.
std::vector<NamedTable> build_figure(const std::string& name, const SystemParams& base,
                                     const FigureOptions& opt);

/// Builds and writes the tables under `output_dir`; returns the paths.
std::vector<std::filesystem::path> run_figure(const std::string& name, const SystemParams& base,
                                              const FigureOptions& opt,
                                              const std::filesystem::path& output_dir);

std::vector<double> linspace(double a, double b, int n);
std::vector<double> logspace(double a, double b, int n);
/// Sorted union of `grid` and `pins` (exact duplicates dropped).
std::vector<double> with_pins(std::vector<double> grid, const std::vector<double>& pins);

/// Canonical text of a parameter set (17 significant digits per field).
std::string canonical_system(const SystemParams& p);

} // namespace cqed::harness
