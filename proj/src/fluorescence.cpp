#include "cqed/fluorescence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cqed/log.hpp"

namespace cqed {

namespace {

constexpr long kMaxCycles = 1000000;

struct Engine {
  SystemParams system;
  DerivedRates rates;
  DriveParams drive;
  HilbertLayout layout;
  Liouvillian on;
  Liouvillian off;
};

Engine make_engine(const FluorescenceScenario& s) {
  require_valid(s.system);
  Engine e{s.system, derive_rates(s.system), s.drive(), HilbertLayout(s.fock_dim), {}, {}};
  e.drive.delta_a += s.transition_shift;
  const auto c_ops = build_collapse_ops(e.system, e.rates, e.layout);
  e.on = build_liouvillian(build_hamiltonian(e.system, e.rates, e.drive, e.layout), c_ops);
  DriveParams dark = e.drive;
  dark.P_in = 0;
  e.off = build_liouvillian(build_hamiltonian(e.system, e.rates, dark, e.layout), c_ops);
  return e;
}

// Lorentzian cavity-enhanced emission rate for one line, used only to pick
// the sampling step of the decay fit.
double lorentzian_rate(double g, double detuning, double kappa, double Gamma) {
  const double w = kappa + Gamma;
  return 4 * g * g * w / (w * w + 4 * detuning * detuning);
}

double rough_decay_rate(const Engine& e, Index excited) {
  double rate = e.system.Gamma0;
  for (Index ground : {Index{0}, Index{1}}) {
    const bool conserving = (excited - 2) == ground;
    const double g = conserving ? e.rates.g_par : e.rates.g_perp;
    const double cavity_gap =
        line_detuning(e.system, e.drive, ground, excited) - e.drive.delta_c;
    rate += lorentzian_rate(g, cavity_gap, e.rates.kappa, e.system.Gamma);
  }
  return rate;
}

double fitted_decay_rate(const Engine& e, Index excited) {
  const double dt = 1.0 / (40.0 * rough_decay_rate(e, excited));
  const Propagator step(e.off, dt);
  const auto w = expectation_functional(atomic_sigma<double>(e.layout, excited, excited));
  CVec v = vectorize(Density::basis_state(e.layout, excited, 0));
  std::vector<double> t, y;
  const double floor = std::exp(-7.0);
  for (int k = 0; k < 40000; ++k) {
    const double pop = (w * v).value().real();
    t.push_back(k * dt);
    y.push_back(pop);
    if (pop < floor) break;
    v = step.apply(v);
  }
  return fit_decay(t, y).rate;
}

PurcellRates rates_of(const Engine& e, bool with_off = true) {
  PurcellRates r;
  r.gamma_on = fitted_decay_rate(e, 2);
  if (with_off) r.gamma_off = fitted_decay_rate(e, 3);
  r.beta_cav = std::clamp((r.gamma_on - e.system.Gamma0) / r.gamma_on, 0.0, 1.0 - 1e-15);
  r.gamma_on_bad_cavity =
      e.system.Gamma0 + 4 * e.rates.g_par * e.rates.g_par / e.rates.kappa;
  return r;
}

SequencePopulations sequence_of(const Engine& e, const Propagator& pulse,
                                const Propagator& wait, Spin spin) {
  const Index g = ground_level(spin), x = excited_level(spin);
  CVec v = vectorize(Density::basis_state(e.layout, g, 0));
  v = pulse.apply(v);
  const Density after_pulse = unvectorize(e.layout, v);
  check_physical(after_pulse, "run_sequence");
  v = wait.apply(v);
  const Density after_wait = unvectorize(e.layout, v);
  check_physical(after_wait, "run_sequence");
  SequencePopulations out;
  out.P_e = std::clamp(after_pulse.population(x), 0.0, 1.0);
  out.P_g = std::clamp(after_wait.population(g) + after_wait.population(x), 0.0, 1.0);
  return out;
}

double wait_time(const FluorescenceScenario& s, const PurcellRates& r) {
  return s.wait_mode == WaitMode::seven_tau_off ? 7.0 / r.gamma_off : 7.0 / r.gamma_on;
}

} // namespace

DriveParams FluorescenceScenario::drive() const {
  DriveParams d;
  d.P_in = P_in;
  d.t_pulse = t_pulse;
  d.delta_a = resonant_atomic_detuning(system, 0, 2);
  d.delta_c = 0;
  return d;
}

PurcellRates purcell_rates(const FluorescenceScenario& s) {
  return rates_of(make_engine(s));
}

SequencePopulations run_sequence(const FluorescenceScenario& s, Spin spin,
                                 double t_wait) {
  if (!(t_wait >= 0)) throw InvalidArgument("run_sequence: t_wait must be >= 0");
  const Engine e = make_engine(s);
  return sequence_of(e, Propagator(e.on, s.t_pulse), Propagator(e.off, t_wait), spin);
}

long cycle_count(double P_g, bool* capped) {
  if (!(P_g >= 0 && P_g <= 1)) throw InvalidArgument("cycle_count: P_g outside [0, 1]");
  if (capped) *capped = false;
  const double n = P_g < 1 ? std::round(1.0 / (1.0 - P_g)) : INFINITY;
  if (!(n <= kMaxCycles)) {
    std::ostringstream os;
    os << "N_cyc capped at " << kMaxCycles << " (P_g = " << P_g << ")";
    warn(os.str());
    if (capped) *capped = true;
    return kMaxCycles;
  }
  return std::max(1L, static_cast<long>(n));
}

double expected_counts(double beta_cav, double eta_sys, double P_e, double P_g,
                       long N_cyc) {
  if (N_cyc < 1) throw InvalidArgument("expected_counts: N_cyc must be >= 1");
  const double n = static_cast<double>(N_cyc);
  // sum_{k<n} P_g^k = (1 - P_g^n) / (1 - P_g), written to stay accurate as P_g -> 1.
  const double geometric = P_g < 1 ? -std::expm1(n * std::log(P_g)) / (1.0 - P_g) : n;
  return beta_cav * eta_sys * P_e * (P_g > 0 ? geometric : 1.0);
}

FluorescenceOutcome fluorescence_fidelity(const FluorescenceScenario& s) {
  const Engine e = make_engine(s);
  FluorescenceOutcome o;
  o.rates = rates_of(e);
  o.tau_on = 1.0 / o.rates.gamma_on;
  o.tau_off = 1.0 / o.rates.gamma_off;
  o.t_wait = wait_time(s, o.rates);
  o.t_seq = s.t_pulse + o.t_wait;

  const Propagator pulse(e.on, s.t_pulse), wait(e.off, o.t_wait);
  o.up = sequence_of(e, pulse, wait, Spin::up);
  o.down = sequence_of(e, pulse, wait, Spin::down);
  o.N_cyc = cycle_count(o.down.P_g, &o.N_cyc_capped);

  o.eta_sys = s.system.eta_cav * s.system.eta_det;
  o.N_ph_up = expected_counts(o.rates.beta_cav, o.eta_sys, o.up.P_e, o.up.P_g, o.N_cyc);
  o.N_ph_down = expected_counts(o.rates.beta_cav, o.eta_sys, o.down.P_e, o.down.P_g, o.N_cyc);
  o.total_time = static_cast<double>(o.N_cyc) * o.t_seq;
  o.result = poisson_fidelity(o.N_ph_up, o.N_ph_down);
  o.result.duration = o.total_time;
  return o;
}

CountPair fluorescence_counts(const FluorescenceScenario& s,
                              const FluorescencePlan& plan) {
  const Engine e = make_engine(s);
  const PurcellRates r = rates_of(e, false);
  const Propagator pulse(e.on, s.t_pulse), wait(e.off, plan.t_wait);
  const double eta_sys = s.system.eta_cav * s.system.eta_det;
  CountPair c;
  for (Spin spin : {Spin::up, Spin::down}) {
    const auto pop = sequence_of(e, pulse, wait, spin);
    const double n = expected_counts(r.beta_cav, eta_sys, pop.P_e, pop.P_g, plan.N_cyc);
    (spin == Spin::up ? c.up : c.down) = n;
  }
  return c;
}

std::vector<double> pulse_train_excitation(const FluorescenceScenario& s,
                                           Spin spin, double t_wait,
                                           long repetitions) {
  if (repetitions < 0) throw InvalidArgument("pulse_train_excitation: repetitions < 0");
  const Engine e = make_engine(s);
  const Propagator pulse(e.on, s.t_pulse), wait(e.off, t_wait);
  const auto w = expectation_functional(
      atomic_sigma<double>(e.layout, excited_level(spin), excited_level(spin)));
  CVec v = vectorize(Density::basis_state(e.layout, ground_level(spin), 0));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(repetitions));
  for (long n = 0; n < repetitions; ++n) {
    v = pulse.apply(v);
    out.push_back((w * v).value().real());
    v = wait.apply(v);
  }
  check_physical(unvectorize(e.layout, v), "pulse_train_excitation");
  return out;
}

std::vector<RgCell> sweep_rg(const FluorescenceScenario& base, double Q,
                             double Gamma, const std::vector<double>& t_pulse_list,
                             const std::vector<double>& rg_list) {
  if (t_pulse_list.empty() || rg_list.empty()) {
    throw InvalidArgument("sweep_rg: empty parameter list");
  }
  std::vector<RgCell> out;
  for (double rg : rg_list) {
    for (double tp : t_pulse_list) {
      FluorescenceScenario s = base;
      s.system.Q = Q;
      s.system.Gamma = Gamma;
      s.system.r_g = rg;
      s.t_pulse = tp;
      const auto o = fluorescence_fidelity(s);
      out.push_back({rg, tp, Q, Gamma, 1.0 - o.result.fidelity});
    }
  }
  return out;
}

} // namespace cqed
