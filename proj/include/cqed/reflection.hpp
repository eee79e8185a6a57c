#pragma once

// Spin-dependent cavity-reflection readout.
//
// Input-output convention: a_out = a_in + sqrt(kappa_wg) a with a_in = i sqrt(eps),
// so the reflection amplitude is r = 1 + sqrt(kappa_wg) <a> / (i sqrt(eps)).

#include <complex>
#include <optional>
#include <vector>

#include "cqed/lindblad.hpp"
#include "cqed/statistics.hpp"

namespace cqed {

struct Detunings {
  double delta_a = 0;
  double delta_c = 0;
};

struct ReflectionScenario {
  SystemParams system = SystemParams::table3();
  double P_in = picowatt(3.8);
  double t_pulse = microsecond(47);
  /// Empty: optimize at the weak probe power before counting.
  std::optional<Detunings> detunings;
  /// 0 selects reflection_fock_dim(system, P_in).
  Index fock_dim = 0;
  /// Static shift of the atomic transition frequency (adds to Delta_a).
  double transition_shift = 0;
};

/// Weak probe used for detuning optimization and reflectivity spectra.
inline constexpr double kProbePower = 1e-13;

/// Single-transition weak-excitation amplitude
/// r = 1 - kappa eta_cav / (kappa/2 + i Delta_c + g^2 / (i Delta + Gamma/2)).
std::complex<double> reflectivity_analytic(const SystemParams& p, double branch_detuning,
                                           double delta_c, double g);

/// Same formula with g = g_par and the detuning of the spin-conserving line
/// of `spin`.
std::complex<double> reflectivity_analytic(const SystemParams& p, const Detunings& d,
                                           Spin spin);

/// First-order (P_in -> 0) response of the full Lindblad model starting in
/// |spin_g, vacuum>; includes all four optical lines.
std::complex<double> reflection_amplitude_linear(const SystemParams& p, const Detunings& d,
                                                 Spin spin);

double reflectivity_linear(const SystemParams& p, const Detunings& d, Spin spin);

struct NumericReflectivity {
  std::complex<double> amplitude;
  double R = 0;
  double settle_time = 0;
};

/// Propagates |spin_g, vacuum> under the drive until the drift-corrected
/// estimate 2<a>(t) - <a>(2t) is stationary to 1e-8 relative between probe
/// intervals. Throws ConvergenceError after 1e4 cavity lifetimes.
NumericReflectivity reflectivity_numeric(const SystemParams& p, const DriveParams& d,
                                         Spin spin, Index fock_dim = 0);

double contrast(const SystemParams& p, const Detunings& d);

struct OptimizedDetunings {
  Detunings detunings;
  double contrast = 0;
  bool on_boundary = false;
  double R_up = 0;
  double R_down = 0;
};

struct OptimizerOptions {
  int grid_points = 41;
  double box_half_width_kappa = 5.0;
  int starts = 5;
};

/// Maximizes |R_up - R_down| over |Delta_a|, |Delta_c| <= 5 kappa: grid scan,
/// then simplex refinement from the best cells. Requires P_probe <= 1 pW.
OptimizedDetunings optimize_detunings(const SystemParams& p, double P_probe = kProbePower,
                                      const OptimizerOptions& opt = {});

/// Cavity pinned to line A, Delta_a optimized over the same box.
OptimizedDetunings optimize_aligned(const SystemParams& p, const OptimizerOptions& opt = {});

/// Smallest truncation >= 3 whose Poisson tail P(n >= fock_dim) at the
/// resonant empty-cavity photon number 4 eta_cav eps / kappa is <= `tail`.
/// Every `fock_dim` argument below treats 0 as this choice.
Index reflection_fock_dim(const SystemParams& p, double P_in, double tail = 1e-6);

DriveParams reflection_drive(const ReflectionScenario& s, const Detunings& d);

/// eta_det * int_0^t |a_in + sqrt(kappa_wg) <a>|^2 dt' at each report time,
/// with a grid-doubling self-check (1e-4 relative).
std::vector<double> reflected_count_curve(const SystemParams& p, const DriveParams& d,
                                          Spin spin, const std::vector<double>& report_times,
                                          Index fock_dim = 0);

struct CountCurve {
  std::vector<double> counts;
  double grid_delta = 0;  ///< largest relative change under grid doubling
  int refinements = 0;    ///< extra doublings needed to pass the check
};

CountCurve reflected_count_curve_checked(const SystemParams& p, const DriveParams& d, Spin spin,
                                         const std::vector<double>& report_times,
                                         Index fock_dim = 0);

double reflected_counts(const ReflectionScenario& s, Spin spin);

struct ReflectionOutcome {
  Detunings detunings;
  bool optimized = false;
  double R_up = 0;
  double R_down = 0;
  double contrast = 0;
  double N_ph_up = 0;
  double N_ph_down = 0;
  ReadoutResult result;
};

ReflectionOutcome reflection_fidelity(const ReflectionScenario& s);

struct PowerPulseSurface {
  Detunings detunings;
  std::vector<double> powers;
  std::vector<double> pulses;
  std::vector<std::vector<double>> infidelity;  ///< [power][pulse]
  std::vector<double> best_pulse;               ///< per power
  std::vector<double> best_infidelity;          ///< per power

  double min_infidelity() const;
};

/// Optimizes detunings once (unless given) and sweeps the (P_in, t_pulse) grid.
PowerPulseSurface sweep_power_pulse(const SystemParams& p, const std::vector<double>& powers,
                                    const std::vector<double>& pulses,
                                    std::optional<Detunings> d = std::nullopt,
                                    Index fock_dim = 0);

struct RgPoint {
  double r_g = 0;
  double min_infidelity = 0;
  double best_power = 0;
  double best_pulse = 0;
};

std::vector<RgPoint> sweep_rg_reflection(const SystemParams& p, const std::vector<double>& rg_list,
                                         const std::vector<double>& powers,
                                         const std::vector<double>& pulses);

struct QGammaCell {
  double Q = 0;
  double Gamma = 0;
  double cooperativity = 0;
  double max_fidelity = 0;
};

std::vector<QGammaCell> sweep_Q_Gamma(const SystemParams& p, const std::vector<double>& Q_list,
                                      const std::vector<double>& Gamma_list,
                                      const std::vector<double>& powers,
                                      const std::vector<double>& pulses);

struct EtaPoint {
  double eta_cav = 0;
  OptimizedDetunings optimized;
  OptimizedDetunings aligned;
};

std::vector<EtaPoint> eta_cav_study(const SystemParams& p, const std::vector<double>& eta_list,
                                    const OptimizerOptions& opt = {});

/// Largest |y[i+1] - y[i]| over the interval containing x0, divided by the
/// largest step of the neighbouring intervals on either side.
double jump_ratio(const std::vector<double>& x, const std::vector<double>& y, double x0);

struct ReflectionSpectrum {
  double delta_a = 0;
  double line_a = 0;       ///< Delta_c at which the cavity meets line A
  double best_delta_c = 0;
  std::vector<double> delta_c;
  std::vector<double> R_up;
  std::vector<double> R_down;
};

/// Weak-drive R versus Delta_c at the optimized Delta_a.
ReflectionSpectrum reflection_spectrum(const SystemParams& p, int points = 201,
                                       double half_width_kappa = 5.0);

} // namespace cqed
