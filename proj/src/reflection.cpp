#include "cqed/reflection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cqed/log.hpp"
#include "cqed/simplex.hpp"

namespace cqed {

namespace {

using cd = std::complex<double>;

DriveParams probe_drive(const Detunings& d, double P_in) {
  DriveParams drive;
  drive.P_in = P_in;
  drive.delta_a = d.delta_a;
  drive.delta_c = d.delta_c;
  drive.t_pulse = 1.0;
  return drive;
}

double line_a_detuning(const SystemParams& p, double delta_a) {
  DriveParams d;
  d.delta_a = delta_a;
  return line_detuning(p, d, 0, 2);
}

} // namespace

cd reflectivity_analytic(const SystemParams& p, double branch_detuning, double delta_c,
                         double g) {
  const auto r = derive_rates(p);
  const cd i(0, 1);
  const cd atom = g * g / (i * branch_detuning + p.Gamma / 2.0);
  return 1.0 - r.kappa * p.eta_cav / (r.kappa / 2.0 + i * delta_c + atom);
}

cd reflectivity_analytic(const SystemParams& p, const Detunings& d, Spin spin) {
  const auto drive = probe_drive(d, 0);
  const double branch = line_detuning(p, drive, ground_level(spin), excited_level(spin));
  return reflectivity_analytic(p, branch, d.delta_c, derive_rates(p).g_par);
}

cd reflection_amplitude_linear(const SystemParams& p, const Detunings& d, Spin spin) {
  require_valid(p);
  const HilbertLayout layout(2);
  const auto rates = derive_rates(p);
  const Operator H = build_hamiltonian(p, rates, probe_drive(d, 0), layout);
  const auto c_ops = build_collapse_ops(p, rates, layout);
  const Index dim = layout.total_dim();
  const Index g0 = layout.index(ground_level(spin), 0);
  const Index g1 = layout.index(ground_level(spin), 1);

  // Coherences |x><g0| form an invariant subspace of the undriven
  // Liouvillian; K is its generator acting on x.
  const cd minus_i(0, -1);
  CMat K = minus_i * (H.matrix - H.matrix(g0, g0) * CMat::Identity(dim, dim));
  for (const auto& c : c_ops) {
    const CVec cg = c.matrix.col(g0);
    const CVec cdcg = c.matrix.adjoint() * cg;
    const cd lambda = cg(g0);
    const double mu = cdcg(g0).real();
    if ((cg - lambda * CVec::Unit(dim, g0)).norm() > 1e-12 * (1 + cg.norm()) ||
        (cdcg - mu * CVec::Unit(dim, g0)).norm() > 1e-12 * (1 + cdcg.norm())) {
      throw NumericalError("reflection_amplitude_linear: ground state is not a dark state");
    }
    K -= 0.5 * (c.matrix.adjoint() * c.matrix);
    K -= 0.5 * mu * CMat::Identity(dim, dim);
    K += std::conj(lambda) * c.matrix;
  }
  // Steady first-order coherence: K x = i Omega |g1>, <a> = <g0|a|x>,
  // and r = 1 + kappa_wg <g0| a K^-1 |g1>.
  const CVec x = K.partialPivLu().solve(CVec::Unit(dim, g1));
  const cd y = (annihilation(layout).matrix.row(g0) * x).value();
  return 1.0 + rates.kappa_wg * y;
}

double reflectivity_linear(const SystemParams& p, const Detunings& d, Spin spin) {
  return std::norm(reflection_amplitude_linear(p, d, spin));
}

NumericReflectivity reflectivity_numeric(const SystemParams& p, const DriveParams& d,
                                         Spin spin, Index fock_dim) {
  require_valid(p);
  if (!(d.P_in > 0)) throw InvalidArgument("reflectivity_numeric: P_in must be > 0");
  const HilbertLayout layout(fock_dim > 0 ? fock_dim : reflection_fock_dim(p, d.P_in));
  const auto rates = derive_rates(p);
  const auto c_ops = build_collapse_ops(p, rates, layout);
  const Liouvillian L = build_liouvillian(build_hamiltonian(p, rates, d, layout), c_ops);
  const double probe = 2.0 / rates.kappa;
  const Propagator E(L, probe);
  const auto w = expectation_functional(annihilation(layout));
  const double eps = photon_flux(p, d.P_in);
  const cd a_in(0, std::sqrt(eps));

  CVec v = vectorize(Density::basis_state(layout, ground_level(spin), 0));
  std::vector<cd> f{(w * v).value()};
  const auto max_steps = static_cast<std::size_t>(std::ceil(1e4 / (rates.kappa * probe)));
  cd previous;
  for (std::size_t n = 1; n <= max_steps; ++n) {
    v = E.apply(v);
    f.push_back((w * v).value());
    if (n % 2 != 0 || n < 4) continue;
    const std::size_t k = n / 2;
    // Linear optical-pumping drift cancels in 2 f(t) - f(2t).
    const cd estimate = 2.0 * f[k] - f[n];
    if (k >= 3 && std::abs(estimate - previous) < 1e-8 * std::abs(estimate)) {
      check_physical(unvectorize(layout, v), "reflectivity_numeric");
      NumericReflectivity out;
      out.amplitude = (a_in + std::sqrt(rates.kappa_wg) * estimate) / a_in;
      out.R = std::norm(out.amplitude);
      out.settle_time = static_cast<double>(k) * probe;
      return out;
    }
    previous = estimate;
  }
  throw ConvergenceError("reflectivity_numeric: no quasi-steady state within 1e4 cavity lifetimes");
}

double contrast(const SystemParams& p, const Detunings& d) {
  return std::abs(reflectivity_linear(p, d, Spin::up) - reflectivity_linear(p, d, Spin::down));
}

namespace {

struct Candidate {
  double value;
  Eigen::VectorXd x;
};

// Grid scan followed by simplex refinement, maximizing `objective` over the
// box [-1, 1]^n (in units of the box half width).
template <typename Fn>
std::pair<Eigen::VectorXd, double> grid_then_simplex(Fn&& objective, int dims, int points,
                                                     int starts) {
  std::vector<Candidate> cells;
  const double step = 2.0 / (points - 1);
  Eigen::VectorXd x(dims);
  if (dims == 1) {
    for (int i = 0; i < points; ++i) {
      x(0) = -1 + i * step;
      cells.push_back({objective(x), x});
    }
  } else {
    for (int i = 0; i < points; ++i) {
      for (int j = 0; j < points; ++j) {
        x << -1 + i * step, -1 + j * step;
        cells.push_back({objective(x), x});
      }
    }
  }
  std::stable_sort(cells.begin(), cells.end(),
                   [](const Candidate& a, const Candidate& b) { return a.value > b.value; });

  auto clamped = [](Eigen::VectorXd y) { return y.cwiseMax(-1.0).cwiseMin(1.0).eval(); };
  Candidate best = cells.front();
  SimplexOptions opt;
  opt.initial_step = step;
  opt.x_tol = 1e-10;
  for (int s = 0; s < std::min<int>(starts, static_cast<int>(cells.size())); ++s) {
    const auto r = nelder_mead_minimize(
        [&](const Eigen::VectorXd& y) { return -objective(clamped(y)); }, cells[s].x, opt);
    if (-r.value > best.value) best = {-r.value, clamped(r.x)};
  }
  return {best.x, best.value};
}

void flag_boundary(OptimizedDetunings& o, const Eigen::VectorXd& x, const char* what) {
  o.on_boundary = (x.cwiseAbs().array() >= 1.0 - 1e-9).any();
  if (o.on_boundary) {
    std::ostringstream os;
    os << what << ": optimum on the search-box boundary (Delta_a/2pi = "
       << to_ghz(o.detunings.delta_a) << " GHz, Delta_c/2pi = " << to_ghz(o.detunings.delta_c)
       << " GHz); the box may be too small";
    warn(os.str());
  }
}

} // namespace

OptimizedDetunings optimize_detunings(const SystemParams& p, double P_probe,
                                      const OptimizerOptions& opt) {
  require_valid(p);
  if (!(P_probe > 0 && P_probe <= 1e-12)) {
    throw InvalidArgument("optimize_detunings: probe power must lie in (0, 1] pW");
  }
  if (opt.grid_points < 2 || opt.starts < 1) {
    throw InvalidArgument("optimize_detunings: bad optimizer options");
  }
  const double box = opt.box_half_width_kappa * derive_rates(p).kappa;
  auto to_detunings = [&](const Eigen::VectorXd& x) { return Detunings{x(0) * box, x(1) * box}; };
  const auto [x, value] = grid_then_simplex(
      [&](const Eigen::VectorXd& y) { return contrast(p, to_detunings(y)); }, 2,
      opt.grid_points, opt.starts);
  OptimizedDetunings o;
  o.detunings = to_detunings(x);
  o.contrast = value;
  o.R_up = reflectivity_linear(p, o.detunings, Spin::up);
  o.R_down = reflectivity_linear(p, o.detunings, Spin::down);
  flag_boundary(o, x, "optimize_detunings");
  return o;
}

OptimizedDetunings optimize_aligned(const SystemParams& p, const OptimizerOptions& opt) {
  require_valid(p);
  const double box = opt.box_half_width_kappa * derive_rates(p).kappa;
  auto to_detunings = [&](const Eigen::VectorXd& x) {
    const double da = x(0) * box;
    return Detunings{da, line_a_detuning(p, da)};
  };
  const auto [x, value] = grid_then_simplex(
      [&](const Eigen::VectorXd& y) { return contrast(p, to_detunings(y)); }, 1,
      10 * (opt.grid_points - 1) + 1, opt.starts);
  OptimizedDetunings o;
  o.detunings = to_detunings(x);
  o.contrast = value;
  o.R_up = reflectivity_linear(p, o.detunings, Spin::up);
  o.R_down = reflectivity_linear(p, o.detunings, Spin::down);
  flag_boundary(o, x, "optimize_aligned");
  return o;
}

Index reflection_fock_dim(const SystemParams& p, double P_in, double tail) {
  const double n = 4 * p.eta_cav * photon_flux(p, P_in) / derive_rates(p).kappa;
  // P(n >= N) by complement of the first N Poisson terms.
  double term = std::exp(-n), head = term;
  Index N = 1;
  for (; N < 3 || 1 - head > tail; ++N) {
    term *= n / N;
    head += term;
    if (N > 40) throw InvalidArgument("reflection_fock_dim: drive too strong for truncation");
  }
  return N;
}

DriveParams reflection_drive(const ReflectionScenario& s, const Detunings& d) {
  DriveParams drive;
  drive.P_in = s.P_in;
  drive.t_pulse = s.t_pulse;
  drive.delta_a = d.delta_a + s.transition_shift;
  drive.delta_c = d.delta_c;
  return drive;
}

namespace {

std::vector<double> integrate_counts(const Liouvillian& L, const Density& rho0,
                                     const std::vector<double>& times, cd a_in,
                                     double sqrt_kwg, double eta_det, GeometricGrid grid) {
  const auto w = expectation_functional(annihilation(L.layout));
  const auto series = integrate_along(
      L, rho0, times,
      [&](const CVec& v) { return std::norm(a_in + sqrt_kwg * (w * v).value()); }, grid);
  std::vector<double> out = series.cumulative;
  for (double& n : out) n *= eta_det;
  return out;
}

bool grids_agree(const std::vector<double>& coarse, const std::vector<double>& fine,
                 const std::vector<double>& sent) {
  for (std::size_t k = 0; k < fine.size(); ++k) {
    if (std::abs(coarse[k] - fine[k]) > 1e-4 * std::abs(fine[k]) + 1e-9 * sent[k] + 1e-12) {
      return false;
    }
  }
  return true;
}

double relative_change(const std::vector<double>& coarse, const std::vector<double>& fine) {
  double worst = 0;
  for (std::size_t k = 0; k < fine.size(); ++k) {
    if (fine[k] != 0) worst = std::max(worst, std::abs(coarse[k] - fine[k]) / std::abs(fine[k]));
  }
  return worst;
}

} // namespace

CountCurve reflected_count_curve_checked(const SystemParams& p, const DriveParams& d, Spin spin,
                                         const std::vector<double>& report_times,
                                         Index fock_dim) {
  require_valid(p);
  CountCurve result;
  if (report_times.empty()) return result;
  std::vector<std::size_t> order(report_times.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return report_times[a] < report_times[b]; });
  std::vector<double> times;
  for (auto i : order) {
    if (!(report_times[i] > 0)) throw InvalidArgument("reflected_count_curve: times must be > 0");
    if (times.empty() || report_times[i] > times.back()) times.push_back(report_times[i]);
  }

  std::vector<double> sorted_counts(times.size(), 0.0);
  if (d.P_in > 0) {
    const HilbertLayout layout(fock_dim > 0 ? fock_dim : reflection_fock_dim(p, d.P_in));
    const auto rates = derive_rates(p);
    const auto c_ops = build_collapse_ops(p, rates, layout);
    const Liouvillian L = build_liouvillian(build_hamiltonian(p, rates, d, layout), c_ops);
    const Density rho0 = Density::basis_state(layout, ground_level(spin), 0);
    const double eps = photon_flux(p, d.P_in);
    const cd a_in(0, std::sqrt(eps));
    const double skwg = std::sqrt(rates.kappa_wg);
    std::vector<double> sent;
    for (double t : times) sent.push_back(p.eta_det * eps * t);

    GeometricGrid grid{0.05 / (rates.kappa + p.Gamma), 64};
    auto coarse = integrate_counts(L, rho0, times, a_in, skwg, p.eta_det, grid);
    auto fine = integrate_counts(L, rho0, times, a_in, skwg, p.eta_det, grid.refined());
    if (!grids_agree(coarse, fine, sent)) {
      coarse = std::move(fine);
      fine = integrate_counts(L, rho0, times, a_in, skwg, p.eta_det, grid.refined().refined());
      result.refinements = 1;
      if (!grids_agree(coarse, fine, sent)) {
        throw ConvergenceError("reflected_count_curve: grid-doubling check failed after refinement");
      }
    }
    result.grid_delta = relative_change(coarse, fine);
    sorted_counts = std::move(fine);
  }

  result.counts.resize(report_times.size());
  for (std::size_t i = 0; i < report_times.size(); ++i) {
    const auto it = std::lower_bound(times.begin(), times.end(), report_times[i]);
    result.counts[i] = sorted_counts[static_cast<std::size_t>(it - times.begin())];
  }
  return result;
}

std::vector<double> reflected_count_curve(const SystemParams& p, const DriveParams& d,
                                          Spin spin, const std::vector<double>& report_times,
                                          Index fock_dim) {
  return reflected_count_curve_checked(p, d, spin, report_times, fock_dim).counts;
}

namespace {

Detunings resolve(const ReflectionScenario& s, bool* optimized = nullptr) {
  if (optimized) *optimized = !s.detunings.has_value();
  if (s.detunings) return *s.detunings;
  return optimize_detunings(s.system).detunings;
}

} // namespace

double reflected_counts(const ReflectionScenario& s, Spin spin) {
  if (!(s.t_pulse > 0)) throw InvalidArgument("reflected_counts: t_pulse must be > 0");
  const auto d = reflection_drive(s, resolve(s));
  return reflected_count_curve(s.system, d, spin, {s.t_pulse}, s.fock_dim).front();
}

ReflectionOutcome reflection_fidelity(const ReflectionScenario& s) {
  if (!(s.t_pulse > 0)) throw InvalidArgument("reflection_fidelity: t_pulse must be > 0");
  ReflectionOutcome o;
  o.detunings = resolve(s, &o.optimized);
  Detunings shifted = o.detunings;
  shifted.delta_a += s.transition_shift;
  o.R_up = reflectivity_linear(s.system, shifted, Spin::up);
  o.R_down = reflectivity_linear(s.system, shifted, Spin::down);
  o.contrast = std::abs(o.R_up - o.R_down);
  const auto d = reflection_drive(s, o.detunings);
  o.N_ph_up = reflected_count_curve(s.system, d, Spin::up, {s.t_pulse}, s.fock_dim).front();
  o.N_ph_down = reflected_count_curve(s.system, d, Spin::down, {s.t_pulse}, s.fock_dim).front();
  o.result = poisson_fidelity(o.N_ph_up, o.N_ph_down);
  o.result.duration = s.t_pulse;
  return o;
}

double PowerPulseSurface::min_infidelity() const {
  return best_infidelity.empty() ? 1.0
                                 : *std::min_element(best_infidelity.begin(), best_infidelity.end());
}

PowerPulseSurface sweep_power_pulse(const SystemParams& p, const std::vector<double>& powers,
                                    const std::vector<double>& pulses,
                                    std::optional<Detunings> d, Index fock_dim) {
  if (powers.empty() || pulses.empty()) {
    throw InvalidArgument("sweep_power_pulse: empty grid");
  }
  PowerPulseSurface s;
  s.detunings = d ? *d : optimize_detunings(p).detunings;
  s.powers = powers;
  s.pulses = pulses;
  for (double P : powers) {
    DriveParams drive = probe_drive(s.detunings, P);
    const auto up = reflected_count_curve(p, drive, Spin::up, pulses, fock_dim);
    const auto down = reflected_count_curve(p, drive, Spin::down, pulses, fock_dim);
    std::vector<double> row;
    std::size_t best = 0;
    for (std::size_t k = 0; k < pulses.size(); ++k) {
      row.push_back(1.0 - poisson_fidelity(up[k], down[k]).fidelity);
      if (row[k] < row[best]) best = k;
    }
    s.best_pulse.push_back(pulses[best]);
    s.best_infidelity.push_back(row[best]);
    s.infidelity.push_back(std::move(row));
  }
  return s;
}

std::vector<RgPoint> sweep_rg_reflection(const SystemParams& p, const std::vector<double>& rg_list,
                                         const std::vector<double>& powers,
                                         const std::vector<double>& pulses) {
  std::vector<RgPoint> out;
  for (double rg : rg_list) {
    if (!(rg > 0)) throw InvalidArgument("sweep_rg_reflection: r_g must be > 0");
    SystemParams q = p;
    q.r_g = rg;
    const auto s = sweep_power_pulse(q, powers, pulses);
    RgPoint pt{rg, 1.0, 0, 0};
    for (std::size_t i = 0; i < s.powers.size(); ++i) {
      if (s.best_infidelity[i] < pt.min_infidelity) {
        pt = {rg, s.best_infidelity[i], s.powers[i], s.best_pulse[i]};
      }
    }
    out.push_back(pt);
  }
  return out;
}

std::vector<QGammaCell> sweep_Q_Gamma(const SystemParams& p, const std::vector<double>& Q_list,
                                      const std::vector<double>& Gamma_list,
                                      const std::vector<double>& powers,
                                      const std::vector<double>& pulses) {
  std::vector<QGammaCell> out;
  for (double Q : Q_list) {
    for (double G : Gamma_list) {
      SystemParams q = p;
      q.Q = Q;
      q.Gamma = G;
      const auto s = sweep_power_pulse(q, powers, pulses);
      out.push_back({Q, G, derive_rates(q).cooperativity, 1.0 - s.min_infidelity()});
    }
  }
  return out;
}

std::vector<EtaPoint> eta_cav_study(const SystemParams& p, const std::vector<double>& eta_list,
                                    const OptimizerOptions& opt) {
  std::vector<EtaPoint> out;
  for (double eta : eta_list) {
    SystemParams q = p;
    q.eta_cav = eta;
    out.push_back({eta, optimize_detunings(q, kProbePower, opt), optimize_aligned(q, opt)});
  }
  return out;
}

double jump_ratio(const std::vector<double>& x, const std::vector<double>& y, double x0) {
  if (x.size() != y.size() || x.size() < 4) {
    throw InvalidArgument("jump_ratio: need at least four matching samples");
  }
  const std::size_t intervals = x.size() - 1;
  auto step = [&](std::size_t i) { return std::abs(y[i + 1] - y[i]); };
  std::size_t gap = intervals;
  for (std::size_t i = 0; i < intervals; ++i) {
    if (x[i] <= x0 && x0 <= x[i + 1] && (gap == intervals || step(i) > step(gap))) gap = i;
  }
  if (gap == intervals) throw InvalidArgument("jump_ratio: x0 outside the sampled range");
  double neighbour = 0;
  if (gap > 0) neighbour = std::max(neighbour, step(gap - 1));
  if (gap + 1 < intervals) neighbour = std::max(neighbour, step(gap + 1));
  return neighbour > 0 ? step(gap) / neighbour : INFINITY;
}

ReflectionSpectrum reflection_spectrum(const SystemParams& p, int points,
                                       double half_width_kappa) {
  if (points < 2) throw InvalidArgument("reflection_spectrum: need at least two points");
  const auto best = optimize_detunings(p);
  const double kappa = derive_rates(p).kappa;
  ReflectionSpectrum s;
  s.delta_a = best.detunings.delta_a;
  s.best_delta_c = best.detunings.delta_c;
  s.line_a = line_a_detuning(p, s.delta_a);
  for (int i = 0; i < points; ++i) {
    const double dc = kappa * half_width_kappa * (-1.0 + 2.0 * i / (points - 1));
    const Detunings d{s.delta_a, dc};
    s.delta_c.push_back(dc);
    s.R_up.push_back(reflectivity_linear(p, d, Spin::up));
    s.R_down.push_back(reflectivity_linear(p, d, Spin::down));
  }
  return s;
}

} // namespace cqed
