#pragma once

// Excite-collect fluorescence readout. Laser and cavity sit on line A
// (|0> <-> |2>), so |down_g> is the bright spin state.

#include <vector>

#include "cqed/lindblad.hpp"
#include "cqed/statistics.hpp"

namespace cqed {

enum class WaitMode { seven_tau_off, seven_tau_on };

struct FluorescenceScenario {
  SystemParams system = SystemParams::table3();
  double P_in = picowatt(100);
  double t_pulse = nanosecond(10);
  WaitMode wait_mode = WaitMode::seven_tau_off;
  Index fock_dim = 4;
  /// Static shift of the atomic transition frequency (adds to Delta_a).
  double transition_shift = 0;

  /// Laser and cavity resonant with the unshifted line A.
  DriveParams drive() const;
};

struct PurcellRates {
  double gamma_on = 0;   ///< fitted decay rate of |2> (cavity-resonant line A)
  double gamma_off = 0;  ///< fitted decay rate of |3> (detuned line B)
  double beta_cav = 0;   ///< (gamma_on - Gamma0) / gamma_on
  double gamma_on_bad_cavity = 0;  ///< Gamma0 + 4 g_par^2 / kappa
};

/// Fits undriven decays from |2, 0> and |3, 0>.
PurcellRates purcell_rates(const FluorescenceScenario& s);

struct SequencePopulations {
  double P_e = 0;  ///< excited population of the initialized manifold at t_pulse
  double P_g = 1;  ///< population left in the initialized manifold at t_seq
};

/// One excite (t_pulse, drive on) then collect (t_wait, drive off) sequence
/// starting from |spin_g, vacuum>.
SequencePopulations run_sequence(const FluorescenceScenario& s, Spin spin,
                                 double t_wait);

/// N_cyc = round(1 / (1 - P_g)), at least 1, capped at 1e6.
long cycle_count(double P_g, bool* capped = nullptr);

/// beta * eta_sys * P_e * sum_{n < N_cyc} P_g^n, summed in closed form.
double expected_counts(double beta_cav, double eta_sys, double P_e, double P_g,
                       long N_cyc);

/// Readout parameters that stay fixed once chosen at the nominal detuning.
struct FluorescencePlan {
  double t_wait = 0;
  long N_cyc = 1;
};

struct FluorescenceOutcome {
  PurcellRates rates;
  double tau_on = 0;
  double tau_off = 0;
  double t_wait = 0;
  double t_seq = 0;
  long N_cyc = 1;
  bool N_cyc_capped = false;
  SequencePopulations up;
  SequencePopulations down;
  double eta_sys = 0;
  double N_ph_up = 0;
  double N_ph_down = 0;
  ReadoutResult result;
  double total_time = 0;

  FluorescencePlan plan() const { return {t_wait, N_cyc}; }
};

FluorescenceOutcome fluorescence_fidelity(const FluorescenceScenario& s);

struct CountPair {
  double up = 0;
  double down = 0;
};

/// Mean detected counts per spin with a frozen plan (t_wait, N_cyc);
/// beta_cav is re-fitted for the scenario as given.
CountPair fluorescence_counts(const FluorescenceScenario& s,
                              const FluorescencePlan& plan);

/// Excited population at the end of each pulse for `repetitions` successive
/// excite-collect sequences.
std::vector<double> pulse_train_excitation(const FluorescenceScenario& s,
                                           Spin spin, double t_wait,
                                           long repetitions);

struct RgCell {
  double r_g = 0;
  double t_pulse = 0;
  double Q = 0;
  double Gamma = 0;
  double infidelity = 0;
};

/// 1 - F over (r_g, t_pulse) at fixed (Q, Gamma); other parameters from base.
std::vector<RgCell> sweep_rg(const FluorescenceScenario& base, double Q,
                             double Gamma, const std::vector<double>& t_pulse_list,
                             const std::vector<double>& rg_list);

} // namespace cqed
