#pragma once

// Cavity-QED model of a four-level spin emitter in a one-sided cavity.
//
// Levels: |0> = down_g, |1> = up_g, |2> = down_e, |3> = up_e.
// Spin-conserving lines: A = 0<->2, B = 1<->3. Spin-flip lines: 0<->3, 1<->2.
// All frequencies are angular (rad/s), times in seconds, powers in watts.

#include <string>
#include <vector>

#include "cqed/operators.hpp"
#include "cqed/units.hpp"

namespace cqed {

using Operator = QOperator<double>;
using Density = DensityMatrix<double>;

enum class Spin { down, up };

inline Index ground_level(Spin s) { return s == Spin::down ? 0 : 1; }
/// Excited level reached by the spin-conserving line from `s`.
inline Index excited_level(Spin s) { return s == Spin::down ? 2 : 3; }
inline Spin other(Spin s) { return s == Spin::down ? Spin::up : Spin::down; }
inline const char* to_string(Spin s) { return s == Spin::down ? "down" : "up"; }

struct SystemParams {
  double Q = 2e5;
  double lambda_0 = 1326e-9;
  double Gamma0 = khz(169.3);
  double Gamma = ghz(0.1);
  double r_g = 10.0;
  double g_sim = mhz(376.0);
  double eta_QE = 0.234;
  double eta_cav = 0.5;
  double eta_det = 0.275;
  double delta_g = ghz(3.0);
  double delta_e = ghz(1.0);
  double phi = kPi / 2;

  /// Near-term target parameters (Q = 2e5, Gamma/2pi = 0.1 GHz, r_g = 10).
  static SystemParams table3() { return {}; }
};

struct DerivedRates {
  double omega_c0 = 0;
  double kappa = 0;
  double kappa_wg = 0;
  double kappa_sc = 0;
  double g = 0;
  double g_par = 0;
  double g_perp = 0;
  double cooperativity = 0;
  double gamma_dephasing = 0;  ///< Gamma_d = (Gamma - Gamma0) / 2
};

struct DriveParams {
  double P_in = 0;      ///< W
  double delta_a = 0;   ///< omega_a - omega_L
  double delta_c = 0;   ///< omega_c - omega_L
  double t_pulse = 0;   ///< s
};

/// Violated invariants of `p`, one human-readable line each. Empty if valid.
std::vector<std::string> validate(const SystemParams& p);
std::vector<std::string> validate(const DriveParams& d);

/// Throws InvalidArgument listing every violation.
void require_valid(const SystemParams& p);

DerivedRates derive_rates(const SystemParams& p);

/// Input photon flux P_in / (hbar omega_L), with omega_L = 2 pi c / lambda_0.
double photon_flux(const SystemParams& p, double P_in);

/// Rotating-frame energy of an atomic level (H_0 diagonal, rad/s).
double level_energy(const SystemParams& p, const DriveParams& d, Index level);

/// Frequency of the ground->excited line relative to the laser,
/// i.e. E_excited - E_ground in the rotating frame.
double line_detuning(const SystemParams& p, const DriveParams& d,
                     Index ground, Index excited);

/// Atomic detuning Delta_a that puts line ground->excited on resonance with
/// the laser.
double resonant_atomic_detuning(const SystemParams& p, Index ground,
                                Index excited);

Operator build_hamiltonian(const SystemParams& p, const DerivedRates& r,
                           const DriveParams& d, HilbertLayout layout);

/// Table of Lindblad channels: cavity decay, two excited-state dephasing
/// operators, four spontaneous-emission operators (balanced, Gamma0/2 each).
std::vector<Operator> build_collapse_ops(const SystemParams& p,
                                         const DerivedRates& r,
                                         HilbertLayout layout);

} // namespace cqed
