#include "cqed/harness/commands.hpp"

#include <algorithm>
#include <ostream>

#include "cqed/diffusion.hpp"
#include "cqed/harness/figures.hpp"

namespace cqed::harness {

namespace {

Json issues_json(const std::vector<ConfigIssue>& issues) {
  Json a = Json::array();
  for (const auto& i : issues) {
    a.push_back({{"source", i.source}, {"line", i.line}, {"key", i.key}, {"message", i.message},
                 {"text", i.describe()}});
  }
  return a;
}

ResultCache make_cache(const RunConfig& rc) {
  return ResultCache(default_cache_dir(rc.output_dir), rc.use_cache);
}

// Cartesian product of the sweep ranges; a single empty point without sweeps.
std::vector<std::vector<double>> sweep_points(const std::vector<Range>& sweeps) {
  std::vector<std::vector<double>> pts{{}};
  for (const auto& r : sweeps) {
    std::vector<std::vector<double>> next;
    for (const auto& p : pts) {
      for (double v : r.values) {
        auto q = p;
        q.push_back(v);
        next.push_back(std::move(q));
      }
    }
    pts = std::move(next);
  }
  return pts;
}

Json run_point(const std::string& command, const ResolvedConfig& c, const ResultCache& cache) {
  return cached(cache, std::string(CQED_VERSION) + "|" + canonical_text(c, command), [&](Json& prov) {
    if (command == "fluorescence") {
      const auto s = c.fluorescence();
      prov["fock_dim"] = s.fock_dim;
      return fluorescence_payload(fluorescence_fidelity(s));
    }
    if (command == "reflection") {
      const auto s = c.reflection();
      prov["fock_dim"] = s.fock_dim > 0 ? s.fock_dim : reflection_fock_dim(s.system, s.P_in);
      prov["count_grid"] = {{"per_segment", 64}, {"doubling_tolerance", 1e-4}};
      if (!s.detunings) prov["optimizer"] = {{"grid_points", 41}, {"starts", 5}, {"box_kappa", 5.0}};
      return reflection_payload(reflection_fidelity(s));
    }
    // diffusion
    ShiftedReadout readout = c.protocol == Protocol::fluorescence
                                 ? ShiftedReadout::fluorescence(c.fluorescence())
                                 : ShiftedReadout::reflection(c.reflection());
    const auto d = diffused_fidelity_converged(readout, c.gamma_sd);
    prov["quadrature_points"] = d.quadrature_points;
    prov["quadrature_delta"] = d.quadrature_delta;
    return Json{{"protocol", to_string(c.protocol)},
                {"gamma_sd_GHz", to_ghz(c.gamma_sd)},
                {"fidelity", d.result.fidelity},
                {"threshold_M", d.result.threshold_M},
                {"undiffused_fidelity", readout.nominal().fidelity},
                {"mean_up", d.result.mean_up},
                {"mean_down", d.result.mean_down}};
  });
}

void write_point_csv(const std::string& command, const Json& payload, const RunConfig& rc) {
  std::vector<std::string> cols;
  std::vector<double> row;
  for (const auto& [k, v] : payload.items()) {
    if (v.is_number()) {
      cols.push_back(k);
      row.push_back(v.get<double>());
    }
  }
  CsvTable t(cols);
  t.add_row(row);
  const char* name = command == "fluorescence" ? "fluor_point.csv"
                     : command == "reflection" ? "refl_point.csv"
                                               : "diffusion_point.csv";
  t.write(rc.output_dir / name);
}

} // namespace

Json fluorescence_payload(const FluorescenceOutcome& o) {
  return Json{{"fidelity", o.result.fidelity},
              {"threshold_M", o.result.threshold_M},
              {"N_ph_up", o.N_ph_up},
              {"N_ph_down", o.N_ph_down},
              {"P_e_up", o.up.P_e},
              {"P_g_up", o.up.P_g},
              {"P_e_down", o.down.P_e},
              {"P_g_down", o.down.P_g},
              {"beta_cav", o.rates.beta_cav},
              {"Gamma_cav_on", o.rates.gamma_on},
              {"Gamma_cav_off", o.rates.gamma_off},
              {"tau_cav_on", o.tau_on},
              {"tau_cav_off", o.tau_off},
              {"t_wait", o.t_wait},
              {"t_seq", o.t_seq},
              {"N_cyc", o.N_cyc},
              {"N_cyc_capped", o.N_cyc_capped},
              {"eta_sys", o.eta_sys},
              {"total_time", o.total_time}};
}

Json reflection_payload(const ReflectionOutcome& o) {
  return Json{{"fidelity", o.result.fidelity},
              {"threshold_M", o.result.threshold_M},
              {"N_ph_up", o.N_ph_up},
              {"N_ph_down", o.N_ph_down},
              {"R_up", o.R_up},
              {"R_down", o.R_down},
              {"contrast", o.contrast},
              {"delta_a", o.detunings.delta_a},
              {"delta_c", o.detunings.delta_c},
              {"detunings_optimized", o.optimized},
              {"t_pulse", o.result.duration}};
}

Json validation_report(const RunConfig& rc) {
  const auto res = resolve(rc);
  return Json{{"valid", res.ok()}, {"issues", issues_json(res.issues)}};
}

int run(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  if (rc.command == "validate") {
    const Json report = validation_report(rc);
    out << report.dump(2) << "\n";
    return report.at("valid").get<bool>() ? exit_ok : exit_config_error;
  }
  const auto res = resolve(rc);
  if (!res.ok()) {
    for (const auto& i : res.issues) err << "config error: " << i.describe() << "\n";
    return exit_config_error;
  }
  const ResolvedConfig& c = res.config;
  if (rc.command == "figure") {
    const auto& names = figure_names();
    if (std::find(names.begin(), names.end(), rc.figure) == names.end()) {
      err << "config error: unknown figure '" << rc.figure << "'\n";
      return exit_config_error;
    }
  } else if (rc.command != "fluorescence" && rc.command != "reflection" &&
             rc.command != "diffusion") {
    err << "config error: unknown command '" << rc.command << "'\n";
    return exit_config_error;
  }

  try {
    const ResultCache cache = make_cache(rc);
    if (rc.command == "figure") {
      FigureOptions opt;
      opt.coarse = rc.coarse;
      opt.jobs = rc.jobs;
      opt.cache = &cache;
      opt.log = &err;
      const auto files = run_figure(rc.figure, c.system, opt, rc.output_dir);
      Json j{{"figure", rc.figure}, {"files", Json::array()}};
      for (const auto& f : files) j["files"].push_back(f.string());
      out << j.dump(2) << "\n";
      return exit_ok;
    }

    if (c.sweeps.empty()) {
      const Json payload = run_point(rc.command, c, cache);
      const std::string hash = config_hash(std::string(CQED_VERSION) + "|" + canonical_text(c, rc.command));
      write_point_csv(rc.command, payload, rc);
      Json provenance = Json::object();
      if (auto hit = cache.load(hash)) provenance = (*hit)["provenance"];
      out << make_record(hash, payload, provenance).dump(2) << "\n";
      return exit_ok;
    }

    const auto points = sweep_points(c.sweeps);
    std::vector<std::string> cols;
    for (const auto& r : c.sweeps) cols.push_back(r.key);
    Json records = Json::array();
    std::vector<std::vector<double>> rows;
    std::vector<std::string> value_cols;
    for (std::size_t i = 0; i < points.size(); ++i) {
      ResolvedConfig pc = c;
      for (std::size_t k = 0; k < c.sweeps.size(); ++k) apply_value(pc, c.sweeps[k].key, points[i][k]);
      require_valid(pc.system);
      err << rc.command << " sweep [" << (i + 1) << "/" << points.size() << "]\n";
      const Json payload = run_point(rc.command, pc, cache);
      if (value_cols.empty()) {
        for (const auto& [k, v] : payload.items()) if (v.is_number()) value_cols.push_back(k);
      }
      std::vector<double> row = points[i];
      for (const auto& k : value_cols) row.push_back(payload.at(k).get<double>());
      rows.push_back(std::move(row));
      records.push_back(payload);
    }
    cols.insert(cols.end(), value_cols.begin(), value_cols.end());
    CsvTable t(cols);
    for (const auto& r : rows) t.add_row(r);
    t.write(rc.output_dir / ("sweep_" + rc.command + ".csv"));
    out << Json{{"command", rc.command}, {"points", records}}.dump(2) << "\n";
    return exit_ok;
  } catch (const std::exception& e) {
    err << "engine error: " << e.what() << "\n";
    return exit_engine_error;
  }
}

} // namespace cqed::harness
