#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "cqed/harness/commands.hpp"
#include "cqed/harness/figures.hpp"

namespace h = cqed::harness;

namespace {

struct Shared {
  std::string config_path;
  std::string preset = "table3";
  std::string output_dir = ".";
  bool no_cache = false;
  int jobs = 1;
  std::vector<std::string> sweeps;
  std::map<std::string, std::string> values;
};

void add_common(CLI::App* cmd, Shared& s, bool with_sweeps) {
  cmd->add_option("--config", s.config_path, "key = value parameter file");
  cmd->add_option("--preset", s.preset, "named parameter set")->capture_default_str();
  cmd->add_option("--output-dir", s.output_dir, "directory for CSV outputs")->capture_default_str();
  cmd->add_flag("--no-cache", s.no_cache, "ignore and do not write the result cache");
  cmd->add_option("--jobs", s.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
  if (with_sweeps) {
    cmd->add_option("--sweep", s.sweeps, "key=start:stop:count[:log] or key=v1,v2,...");
  }
  for (const auto& k : h::config_schema()) {
    std::string help = k.help;
    if (*k.unit) help += std::string(" [") + k.unit + "]";
    cmd->add_option("--" + h::flag_name(k.name), s.values[k.name], help);
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cavity-QED spin-readout simulator"};
  app.set_version_flag("--version", CQED_VERSION);
  app.require_subcommand(1);

  Shared shared;
  std::string figure;
  bool coarse = false;
  auto* fl = app.add_subcommand("fluorescence", "excite-collect fluorescence readout");
  auto* rf = app.add_subcommand("reflection", "cavity-reflection readout");
  auto* df = app.add_subcommand("diffusion", "readout fidelity under spectral diffusion");
  auto* fg = app.add_subcommand("figure", "regenerate a figure's CSV tables");
  auto* va = app.add_subcommand("validate", "check a configuration without computing");
  for (auto* c : {fl, rf, df}) add_common(c, shared, true);
  add_common(fg, shared, false);
  add_common(va, shared, false);
  fg->add_option("name", figure, "figure name")->required()->check(CLI::IsMember(h::figure_names()));
  fg->add_flag("--coarse", coarse, "reduced grids (headline cells kept)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? h::exit_ok : h::exit_config_error;
  }

  h::RunConfig rc;
  rc.command = app.get_subcommands().front()->get_name();
  rc.figure = figure;
  rc.coarse = coarse;
  rc.preset = shared.preset;
  rc.output_dir = shared.output_dir;
  rc.use_cache = !shared.no_cache;
  rc.jobs = shared.jobs;
  rc.sweep_specs = shared.sweeps;
  if (!shared.config_path.empty()) rc.file = h::load_config_file(shared.config_path);
  auto* sub = app.get_subcommands().front();
  for (const auto& [key, value] : shared.values) {
    if (sub->count("--" + h::flag_name(key)) > 0) rc.flags[key] = value;
  }
  return h::run(rc, std::cout, std::cerr);
}
