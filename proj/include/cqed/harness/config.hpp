#pragma once

// Flat key-value run configuration. Files use `key = value` lines with `#`
// comments; command-line flags (--key-name) override file values.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cqed/diffusion.hpp"
#include "cqed/fluorescence.hpp"
#include "cqed/reflection.hpp"

namespace cqed::harness {

struct ConfigKey {
  const char* name;
  const char* unit;
  const char* help;
};

/// Every accepted key; anything else is rejected.
const std::vector<ConfigKey>& config_schema();
bool is_known_key(const std::string& key);

/// `t_pulse_ns` -> `t-pulse-ns`.
std::string flag_name(const std::string& key);

struct ConfigIssue {
  std::string source;  ///< file name or "flag"
  int line = 0;        ///< 0 when not tied to a line
  std::string key;
  std::string message;

  std::string describe() const;
};

struct ConfigValues {
  std::string source = "config";
  std::map<std::string, std::string> values;
  std::map<std::string, int> lines;
  std::vector<ConfigIssue> issues;
};

ConfigValues parse_config(std::istream& in, const std::string& source);
ConfigValues load_config_file(const std::filesystem::path& path);

/// Named parameter sets; `table3` is the near-term default.
const std::vector<std::string>& preset_names();
std::optional<SystemParams> preset(const std::string& name);

struct Range {
  std::string key;
  std::vector<double> values;
};

/// `key=start:stop:count[:log]` or `key=v1,v2,...`.
std::optional<Range> parse_range(const std::string& arg, std::string* error);

struct RunConfig {
  std::string command;
  std::string figure;
  std::string preset = "table3";
  ConfigValues file;
  std::map<std::string, std::string> flags;
  std::vector<std::string> sweep_specs;
  std::filesystem::path output_dir = ".";
  bool use_cache = true;
  bool coarse = false;
  int jobs = 1;
};

/// Fully resolved physical inputs of one run.
struct ResolvedConfig {
  SystemParams system;
  double P_in = 0;
  double t_pulse = 0;
  std::optional<Detunings> detunings;
  WaitMode wait_mode = WaitMode::seven_tau_off;
  std::optional<Index> fock_dim;
  Protocol protocol = Protocol::fluorescence;
  double gamma_sd = 0;
  std::vector<Range> sweeps;
  std::map<std::string, std::string> merged;  ///< file values overridden by flags

  FluorescenceScenario fluorescence() const;
  ReflectionScenario reflection() const;
};

struct Resolution {
  ResolvedConfig config;
  std::vector<ConfigIssue> issues;  ///< schema and physical-range violations
  bool ok() const { return issues.empty(); }
};

/// Applies preset, file values, then flags, and validates the result.
Resolution resolve(const RunConfig& rc);

/// Applies one key (physical units as in the schema) to `c`.
void apply_value(ResolvedConfig& c, const std::string& key, double value);

/// Canonical text of every physical input, the basis of the config hash.
std::string canonical_text(const ResolvedConfig& c, const std::string& command);

} // namespace cqed::harness
