#include "cqed/harness/figures.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <ostream>
#include <sstream>

#include "cqed/diffusion.hpp"
#include "cqed/harness/pool.hpp"

namespace cqed::harness {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  return v;
}

std::vector<double> logspace(double a, double b, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(n == 1 ? a : a * std::pow(b / a, double(i) / (n - 1)));
  return v;
}

std::vector<double> with_pins(std::vector<double> grid, const std::vector<double>& pins) {
  grid.insert(grid.end(), pins.begin(), pins.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::string canonical_system(const SystemParams& p) {
  std::ostringstream os;
  os.precision(17);
  os << "Q=" << p.Q << ";lambda_0=" << p.lambda_0 << ";Gamma0=" << p.Gamma0
     << ";Gamma=" << p.Gamma << ";r_g=" << p.r_g << ";g_sim=" << p.g_sim
     << ";eta_QE=" << p.eta_QE << ";eta_cav=" << p.eta_cav << ";eta_det=" << p.eta_det
     << ";delta_g=" << p.delta_g << ";delta_e=" << p.delta_e << ";phi=" << p.phi;
  return os.str();
}

namespace {

std::mutex log_mutex;

void log_cell(const FigureOptions& opt, const std::string& fig, std::size_t i, std::size_t n,
              const std::string& what) {
  if (!opt.log) return;
  std::lock_guard lock(log_mutex);
  *opt.log << fig << " [" << (i + 1) << "/" << n << "] " << what << "\n";
}

template <typename Compute>
Json cell(const FigureOptions& opt, const std::string& canonical, Compute&& compute) {
  if (opt.cache) return cached(*opt.cache, canonical, compute);
  Json provenance = Json::object();
  return compute(provenance);
}

std::string key(const std::string& kind, const SystemParams& p, std::initializer_list<double> extra) {
  std::ostringstream os;
  os.precision(17);
  os << CQED_VERSION << "|" << kind << "|" << canonical_system(p);
  for (double x : extra) os << "|" << x;
  return os.str();
}

std::string grid_key(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (double x : v) os << x << ",";
  return os.str();
}

Detunings cached_optimum(const SystemParams& p, const FigureOptions& opt) {
  const Json j = cell(opt, key("optimum", p, {kProbePower}), [&](Json& prov) {
    const auto o = optimize_detunings(p);
    prov["optimizer"] = {{"grid_points", 41}, {"starts", 5}, {"box_kappa", 5.0}};
    return Json{{"delta_a", o.detunings.delta_a}, {"delta_c", o.detunings.delta_c},
                {"contrast", o.contrast}, {"on_boundary", o.on_boundary}};
  });
  return {j.at("delta_a").get<double>(), j.at("delta_c").get<double>()};
}

// Infidelity over `pulses` at one power, with one count curve per spin.
std::vector<double> power_row(const SystemParams& p, const Detunings& d, double P,
                              const std::vector<double>& pulses, const FigureOptions& opt) {
  const std::string k = key("power_row", p, {d.delta_a, d.delta_c, P}) + "|" + grid_key(pulses);
  const Json j = cell(opt, k, [&](Json& prov) {
    DriveParams drive;
    drive.P_in = P;
    drive.delta_a = d.delta_a;
    drive.delta_c = d.delta_c;
    drive.t_pulse = pulses.back();
    const auto up = reflected_count_curve(p, drive, Spin::up, pulses);
    const auto down = reflected_count_curve(p, drive, Spin::down, pulses);
    std::vector<double> row;
    for (std::size_t i = 0; i < pulses.size(); ++i) {
      row.push_back(1.0 - poisson_fidelity(up[i], down[i]).fidelity);
    }
    prov["fock_dim"] = reflection_fock_dim(p, drive.P_in);
    return Json{{"infidelity", row}};
  });
  return j.at("infidelity").get<std::vector<double>>();
}

struct Surface {
  std::vector<std::vector<double>> rows;
  std::size_t best_power = 0, best_pulse = 0;
  double min = 1.0;
};

Surface surface(const SystemParams& p, const Detunings& d, const std::vector<double>& powers,
                const std::vector<double>& pulses, const FigureOptions& opt, const std::string& fig) {
  Surface s;
  s.rows = parallel_map<std::vector<double>>(powers.size(), opt.jobs, [&](std::size_t i) {
    log_cell(opt, fig, i, powers.size(), "P_in = " + format_number(powers[i] * 1e12) + " pW");
    return power_row(p, d, powers[i], pulses, opt);
  });
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    for (std::size_t k = 0; k < pulses.size(); ++k) {
      if (s.rows[i][k] < s.min) {
        s.min = s.rows[i][k];
        s.best_power = i;
        s.best_pulse = k;
      }
    }
  }
  return s;
}

std::vector<double> pw(std::vector<double> v) {
  for (double& x : v) x *= 1e-12;
  return v;
}

std::vector<double> us(std::vector<double> v) {
  for (double& x : v) x *= 1e-6;
  return v;
}

// ---------------------------------------------------------------- figures

std::vector<NamedTable> fig2(const std::string& name, double Q, const SystemParams& base,
                             const FigureOptions& opt) {
  const std::vector<double> rg = opt.coarse ? std::vector<double>{1, 3, 10, 30}
                                            : std::vector<double>{1, 2, 3, 5, 7, 10, 15, 20, 30, 50, 100};
  const std::vector<double> tp_ns = opt.coarse ? std::vector<double>{10, 100}
                                               : std::vector<double>{10, 30, 100};
  const std::vector<double> gammas_ghz{0.1, 1.0};
  struct Cell { double rg, tp, gamma; };
  std::vector<Cell> cells;
  for (double g : gammas_ghz) for (double t : tp_ns) for (double r : rg) cells.push_back({r, t, g});

  const auto infid = parallel_map<double>(cells.size(), opt.jobs, [&](std::size_t i) {
    const Cell& c = cells[i];
    FluorescenceScenario s;
    s.system = base;
    s.system.Q = Q;
    s.system.Gamma = ghz(c.gamma);
    s.system.r_g = c.rg;
    s.t_pulse = nanosecond(c.tp);
    log_cell(opt, name, i, cells.size(),
             "r_g = " + format_number(c.rg) + ", t_pulse = " + format_number(c.tp) + " ns");
    const Json j = cell(opt, key("fluorescence", s.system, {s.P_in, s.t_pulse, double(s.fock_dim)}),
                        [&](Json& prov) {
                          const auto o = fluorescence_fidelity(s);
                          prov["fock_dim"] = s.fock_dim;
                          return Json{{"infidelity", 1.0 - o.result.fidelity},
                                      {"total_time", o.total_time}};
                        });
    return j.at("infidelity").get<double>();
  });

  CsvTable t({"r_g", "t_pulse_ns", "Q", "gamma_GHz", "infidelity"});
  for (std::size_t i = 0; i < cells.size(); ++i) {
    t.add_row({cells[i].rg, cells[i].tp, Q, cells[i].gamma, infid[i]});
  }
  return {{name + ".csv", std::move(t)}};
}

std::vector<NamedTable> fig3a(const SystemParams& base, const FigureOptions& opt) {
  const int n = opt.coarse ? 9 : 25;
  const auto powers = with_pins(pw(logspace(0.1, 100, n)), pw({3.8, 16}));
  const auto pulses = with_pins(us(logspace(0.5, 50, n)), us({8.7, 47}));
  const Detunings d = cached_optimum(base, opt);
  const Surface s = surface(base, d, powers, pulses, opt, "fig3a");
  CsvTable t({"P_in_pW", "t_pulse_us", "infidelity"});
  for (std::size_t i = 0; i < powers.size(); ++i) {
    for (std::size_t k = 0; k < pulses.size(); ++k) {
      t.add_row({powers[i] * 1e12, pulses[k] * 1e6, s.rows[i][k]});
    }
  }
  return {{"fig3a.csv", std::move(t)}};
}

std::vector<NamedTable> fig3b(const SystemParams& base, const FigureOptions& opt) {
  const std::vector<double> rg = opt.coarse ? std::vector<double>{1, 3, 5, 10, 20}
                                            : std::vector<double>{1, 2, 3, 4, 5, 7, 10, 15, 20};
  const int n = opt.coarse ? 7 : 13;
  const auto powers = with_pins(pw(logspace(0.1, 100, n)), pw({3.8}));
  const auto pulses = with_pins(us(logspace(0.5, 50, 2 * n - 1)), us({47}));
  CsvTable t({"r_g", "min_infidelity", "best_P_in_pW", "best_t_pulse_us"});
  for (std::size_t i = 0; i < rg.size(); ++i) {
    SystemParams p = base;
    p.r_g = rg[i];
    log_cell(opt, "fig3b", i, rg.size(), "r_g = " + format_number(rg[i]));
    const Surface s = surface(p, cached_optimum(p, opt), powers, pulses, opt, "fig3b");
    t.add_row({rg[i], s.min, powers[s.best_power] * 1e12, pulses[s.best_pulse] * 1e6});
  }
  return {{"fig3b.csv", std::move(t)}};
}

std::vector<NamedTable> fig3c(const SystemParams& base, const FigureOptions& opt) {
  const auto Qs = opt.coarse ? std::vector<double>{5e4, 2e5, 5e5}
                             : with_pins(logspace(2e4, 1e6, 8), {2e5});
  const auto gammas = opt.coarse ? std::vector<double>{0.1, 0.5, 2.0}
                                 : std::vector<double>{0.05, 0.1, 0.2, 0.5, 1.0, 2.0};
  const int n = opt.coarse ? 7 : 13;
  const auto powers = with_pins(pw(logspace(0.1, 100, n)), pw({3.8}));
  const auto pulses = with_pins(us(logspace(0.5, 50, n)), us({47}));
  CsvTable t({"Q", "gamma_GHz", "cooperativity", "max_fidelity"});
  std::size_t i = 0;
  for (double Q : Qs) {
    for (double G : gammas) {
      SystemParams p = base;
      p.Q = Q;
      p.Gamma = ghz(G);
      log_cell(opt, "fig3c", i++, Qs.size() * gammas.size(),
               "Q = " + format_number(Q) + ", Gamma/2pi = " + format_number(G) + " GHz");
      const Surface s = surface(p, cached_optimum(p, opt), powers, pulses, opt, "fig3c");
      t.add_row({Q, G, derive_rates(p).cooperativity, 1.0 - s.min});
    }
  }
  return {{"fig3c.csv", std::move(t)}};
}

FluorescenceScenario fig4_fluorescence(const SystemParams& base) {
  FluorescenceScenario s;
  s.system = base;
  return s;
}

ReflectionScenario fig4_reflection(const SystemParams& base, const FigureOptions& opt) {
  ReflectionScenario s;
  s.system = base;
  s.detunings = cached_optimum(base, opt);
  return s;
}

std::vector<NamedTable> fig4a(const SystemParams& base, const FigureOptions& opt) {
  const auto x = linspace(-3, 3, opt.coarse ? 13 : 25);
  const Json j = cell(opt, key("fig4a", base, {}) + "|" + grid_key(x), [&](Json& prov) {
    auto fl = ShiftedReadout::fluorescence(fig4_fluorescence(base));
    auto rf = ShiftedReadout::reflection(fig4_reflection(base, opt));
    std::vector<double> dw;
    for (double v : x) dw.push_back(v * base.Gamma);
    log_cell(opt, "fig4a", 0, 2, "fluorescence");
    const auto a = infidelity_vs_detuning(fl, dw);
    log_cell(opt, "fig4a", 1, 2, "reflection");
    const auto b = infidelity_vs_detuning(rf, dw);
    std::vector<double> fa, fb;
    for (std::size_t i = 0; i < x.size(); ++i) {
      fa.push_back(a[i].infidelity);
      fb.push_back(b[i].infidelity);
    }
    prov["threshold_fluor"] = fl.nominal().threshold_M;
    prov["threshold_refl"] = rf.nominal().threshold_M;
    return Json{{"fluor", fa}, {"refl", fb}};
  });
  const auto fa = j.at("fluor").get<std::vector<double>>();
  const auto fb = j.at("refl").get<std::vector<double>>();
  CsvTable t({"delta_omega_over_gamma", "infid_fluor", "infid_refl"});
  for (std::size_t i = 0; i < x.size(); ++i) t.add_row({x[i], fa[i], fb[i]});
  return {{"fig4a.csv", std::move(t)}};
}

std::vector<NamedTable> fig4b(const SystemParams& base, const FigureOptions& opt) {
  const std::vector<double> x = opt.coarse
                                    ? std::vector<double>{0, 0.5, 1.0, 2.0}
                                    : std::vector<double>{0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0};
  const Json j = cell(opt, key("fig4b", base, {double(opt.coarse)}) + "|" + grid_key(x), [&](Json& prov) {
    auto fl = ShiftedReadout::fluorescence(fig4_fluorescence(base));
    auto rf = ShiftedReadout::reflection(fig4_reflection(base, opt));
    std::vector<double> fa, fb;
    Json points = Json::array();
    for (std::size_t i = 0; i < x.size(); ++i) {
      log_cell(opt, "fig4b", i, x.size(), "2 Gamma_sd / Gamma = " + format_number(x[i]));
      const double gsd = 0.5 * x[i] * base.Gamma;
      if (opt.coarse) {
        const auto m = DiffusionModel::gaussian(gsd);
        fa.push_back(1.0 - diffused_fidelity(fl, m).fidelity);
        fb.push_back(1.0 - diffused_fidelity(rf, m).fidelity);
        points.push_back(m.quadrature.size());
      } else {
        const auto a = diffused_fidelity_converged(fl, gsd);
        const auto b = diffused_fidelity_converged(rf, gsd);
        fa.push_back(1.0 - a.result.fidelity);
        fb.push_back(1.0 - b.result.fidelity);
        points.push_back({a.quadrature_points, b.quadrature_points});
      }
    }
    prov["quadrature_points"] = points;
    return Json{{"fluor", fa}, {"refl", fb}};
  });
  const auto fa = j.at("fluor").get<std::vector<double>>();
  const auto fb = j.at("refl").get<std::vector<double>>();
  CsvTable t({"two_gamma_sd_over_gamma", "infid_fluor", "infid_refl"});
  for (std::size_t i = 0; i < x.size(); ++i) t.add_row({x[i], fa[i], fb[i]});
  return {{"fig4b.csv", std::move(t)}};
}

std::vector<NamedTable> fig5a(const SystemParams& base, const FigureOptions& opt) {
  const auto etas = opt.coarse
                        ? std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.45, 0.5, 0.55, 0.6, 0.7, 0.8, 0.9}
                        : linspace(0.05, 0.95, 19);
  const auto rows = parallel_map<Json>(etas.size(), opt.jobs, [&](std::size_t i) {
    SystemParams p = base;
    p.eta_cav = etas[i];
    log_cell(opt, "fig5a", i, etas.size(), "eta_cav = " + format_number(etas[i]));
    return cell(opt, key("fig5a", p, {}), [&](Json&) {
      const auto pt = eta_cav_study(base, {etas[i]}).front();
      return Json{{"opt", pt.optimized.contrast}, {"aligned", pt.aligned.contrast}};
    });
  });
  CsvTable t({"eta_cav", "contrast_opt", "contrast_aligned"});
  for (std::size_t i = 0; i < etas.size(); ++i) {
    t.add_row({etas[i], rows[i].at("opt").get<double>(), rows[i].at("aligned").get<double>()});
  }
  return {{"fig5a.csv", std::move(t)}};
}

std::vector<NamedTable> fig5b(const SystemParams& base, const FigureOptions& opt) {
  std::vector<NamedTable> out;
  const std::vector<double> etas{0.3, 0.5, 0.8};
  for (std::size_t i = 0; i < etas.size(); ++i) {
    SystemParams p = base;
    p.eta_cav = etas[i];
    log_cell(opt, "fig5b", i, etas.size(), "eta_cav = " + format_number(etas[i]));
    const auto s = reflection_spectrum(p, opt.coarse ? 101 : 401);
    CsvTable t({"delta_c_GHz", "R_up", "R_down"});
    t.add_note("delta_a_GHz=" + format_number(to_ghz(s.delta_a)) +
               " line_A_delta_c_GHz=" + format_number(to_ghz(s.line_a)) +
               " max_contrast_delta_c_GHz=" + format_number(to_ghz(s.best_delta_c)));
    for (std::size_t k = 0; k < s.delta_c.size(); ++k) {
      t.add_row({to_ghz(s.delta_c[k]), s.R_up[k], s.R_down[k]});
    }
    out.emplace_back("fig5b_" + format_number(etas[i]) + ".csv", std::move(t));
  }
  return out;
}

std::vector<NamedTable> fig6(const SystemParams& base, const FigureOptions& opt) {
  const auto powers = with_pins(pw(logspace(0.5, 100, opt.coarse ? 7 : 13)), pw({3.8, 23.4}));
  const auto pulses = with_pins(us(linspace(opt.coarse ? 5 : 2, 200, opt.coarse ? 40 : 100)), us({11}));
  const Detunings d = cached_optimum(base, opt);
  const Surface s = surface(base, d, powers, pulses, opt, "fig6");
  CsvTable t({"P_in_pW", "t_pulse_us", "infidelity", "min_infidelity_at_power",
              "best_t_pulse_us_at_power"});
  for (std::size_t i = 0; i < powers.size(); ++i) {
    const auto& row = s.rows[i];
    const auto best = static_cast<std::size_t>(std::min_element(row.begin(), row.end()) - row.begin());
    for (std::size_t k = 0; k < pulses.size(); ++k) {
      t.add_row({powers[i] * 1e12, pulses[k] * 1e6, row[k], row[best], pulses[best] * 1e6});
    }
  }
  return {{"fig6.csv", std::move(t)}};
}

} // namespace

const std::vector<std::string>& figure_names() {
  static const std::vector<std::string> names = {"fig2c", "fig2d", "fig3a", "fig3b", "fig3c",
                                                 "fig4a", "fig4b", "fig5a", "fig5b", "fig6"};
  return names;
}

std::vector<NamedTable> build_figure(const std::string& name, const SystemParams& base,
                                     const FigureOptions& opt) {
  if (name == "fig2c") return fig2(name, 1e5, base, opt);
  if (name == "fig2d") return fig2(name, 2e5, base, opt);
  if (name == "fig3a") return fig3a(base, opt);
  if (name == "fig3b") return fig3b(base, opt);
  if (name == "fig3c") return fig3c(base, opt);
  if (name == "fig4a") return fig4a(base, opt);
  if (name == "fig4b") return fig4b(base, opt);
  if (name == "fig5a") return fig5a(base, opt);
  if (name == "fig5b") return fig5b(base, opt);
  if (name == "fig6") return fig6(base, opt);
  throw InvalidArgument("unknown figure '" + name + "'");
}

std::vector<std::filesystem::path> run_figure(const std::string& name, const SystemParams& base,
                                              const FigureOptions& opt,
                                              const std::filesystem::path& output_dir) {
  std::vector<std::filesystem::path> paths;
  for (const auto& [file, table] : build_figure(name, base, opt)) {
    paths.push_back(output_dir / file);
    table.write(paths.back());
  }
  return paths;
}

} // namespace cqed::harness
