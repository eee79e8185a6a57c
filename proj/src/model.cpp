#include "cqed/model.hpp"

#include <cmath>
#include <sstream>

namespace cqed {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

} // namespace

std::vector<std::string> validate(const SystemParams& p) {
  std::vector<std::string> v;
  if (!(p.Q > 0)) v.push_back("Q must be > 0 (got " + fmt(p.Q) + ")");
  if (!(p.lambda_0 > 0))
    v.push_back("lambda_0 must be > 0 (got " + fmt(p.lambda_0) + ")");
  if (!(p.Gamma0 > 0))
    v.push_back("Gamma0 must be > 0 (got " + fmt(to_ghz(p.Gamma0)) + " GHz)");
  if (!(p.Gamma >= p.Gamma0))
    v.push_back("Gamma >= Gamma0 violated: Gamma/2pi = " +
                fmt(to_ghz(p.Gamma)) + " GHz < Gamma0/2pi = " +
                fmt(to_ghz(p.Gamma0)) + " GHz");
  if (!(p.eta_cav > 0 && p.eta_cav <= 1))
    v.push_back("eta_cav must lie in (0, 1] (got " + fmt(p.eta_cav) + ")");
  if (!(p.eta_QE > 0 && p.eta_QE <= 1))
    v.push_back("eta_QE must lie in (0, 1] (got " + fmt(p.eta_QE) + ")");
  if (!(p.eta_det >= 0 && p.eta_det <= 1))
    v.push_back("eta_det must lie in [0, 1] (got " + fmt(p.eta_det) + ")");
  if (!(p.r_g > 0)) v.push_back("r_g must be > 0 (got " + fmt(p.r_g) + ")");
  if (!(p.g_sim >= 0))
    v.push_back("g_sim must be >= 0 (got " + fmt(p.g_sim) + ")");
  if (!std::isfinite(p.delta_g) || !std::isfinite(p.delta_e) ||
      !std::isfinite(p.phi))
    v.push_back("delta_g, delta_e and phi must be finite");
  return v;
}

std::vector<std::string> validate(const DriveParams& d) {
  std::vector<std::string> v;
  if (!(d.P_in >= 0)) v.push_back("P_in must be >= 0 (got " + fmt(d.P_in) + ")");
  if (!(d.t_pulse > 0))
    v.push_back("t_pulse must be > 0 (got " + fmt(d.t_pulse) + ")");
  if (!std::isfinite(d.delta_a) || !std::isfinite(d.delta_c))
    v.push_back("detunings must be finite");
  return v;
}

void require_valid(const SystemParams& p) {
  const auto v = validate(p);
  if (v.empty()) return;
  std::string msg = "invalid system parameters:";
  for (const auto& s : v) msg += "\n  " + s;
  throw InvalidArgument(msg);
}

DerivedRates derive_rates(const SystemParams& p) {
  require_valid(p);
  DerivedRates r;
  r.omega_c0 = kTwoPi * kSpeedOfLight / p.lambda_0;
  r.kappa = r.omega_c0 / p.Q;
  r.kappa_wg = p.eta_cav * r.kappa;
  r.kappa_sc = r.kappa - r.kappa_wg;
  r.g = p.g_sim * std::sqrt(p.eta_QE);
  const double norm = std::sqrt(1.0 + p.r_g * p.r_g);
  r.g_par = r.g * p.r_g / norm;
  r.g_perp = r.g / norm;
  r.cooperativity = 4.0 * r.g * r.g / (r.kappa * p.Gamma);
  r.gamma_dephasing = 0.5 * (p.Gamma - p.Gamma0);
  return r;
}

double photon_flux(const SystemParams& p, double P_in) {
  const double omega_L = kTwoPi * kSpeedOfLight / p.lambda_0;
  return P_in / (kHbar * omega_L);
}

double level_energy(const SystemParams& p, const DriveParams& d, Index level) {
  switch (level) {
    case 0: return -p.delta_g;
    case 1: return p.delta_g;
    case 2: return d.delta_a - p.delta_e;
    case 3: return d.delta_a + p.delta_e;
    default: throw InvalidArgument("level_energy: level out of range");
  }
}

double line_detuning(const SystemParams& p, const DriveParams& d, Index ground,
                     Index excited) {
  return level_energy(p, d, excited) - level_energy(p, d, ground);
}

double resonant_atomic_detuning(const SystemParams& p, Index ground,
                                Index excited) {
  DriveParams zero;
  return -line_detuning(p, zero, ground, excited);
}

Operator build_hamiltonian(const SystemParams& p, const DerivedRates& r,
                           const DriveParams& d, HilbertLayout layout) {
  const auto a = annihilation(layout);
  const auto ad = a.adjoint();
  auto sigma = [&](Index i, Index j) { return atomic_sigma(layout, i, j); };

  Operator h = d.delta_c * (ad * a);
  h += p.delta_g * (sigma(1, 1) - sigma(0, 0));
  h += (d.delta_a - p.delta_e) * sigma(2, 2);
  h += (d.delta_a + p.delta_e) * sigma(3, 3);

  const Complex<double> perp_phase = std::polar(r.g_perp, p.phi);
  Operator coupling = r.g_par * ((sigma(3, 1) + sigma(2, 0)) * ad);
  coupling += perp_phase * ((sigma(3, 0) + sigma(2, 1)) * ad);
  h += coupling;
  h += coupling.adjoint();

  if (d.P_in > 0) {
    const double eps = photon_flux(p, d.P_in);
    h += std::sqrt(r.kappa * p.eta_cav * eps) * (ad + a);
  }
  return h;
}

std::vector<Operator> build_collapse_ops(const SystemParams& p,
                                         const DerivedRates& r,
                                         HilbertLayout layout) {
  if (p.Gamma < p.Gamma0) {
    throw InvalidArgument("build_collapse_ops: invalid linewidth, Gamma < Gamma0");
  }
  auto sigma = [&](Index i, Index j) { return atomic_sigma(layout, i, j); };
  const double dephase = std::sqrt(r.gamma_dephasing / 2.0);
  const double spe = std::sqrt(p.Gamma0 / 2.0);

  std::vector<Operator> c;
  c.reserve(7);
  c.push_back(std::sqrt(r.kappa) * annihilation(layout));
  c.push_back(dephase * (sigma(2, 2) - sigma(0, 0)));
  c.push_back(dephase * (sigma(3, 3) - sigma(1, 1)));
  c.push_back(spe * sigma(3, 1));
  c.push_back(spe * sigma(2, 0));
  c.push_back(spe * sigma(3, 0));
  c.push_back(spe * sigma(2, 1));
  return c;
}

} // namespace cqed
