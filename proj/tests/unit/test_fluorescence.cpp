#include <doctest.h>

#include <cmath>

#include "cqed/fluorescence.hpp"

using namespace cqed;

namespace {

FluorescenceScenario fig2a() {
  FluorescenceScenario s;
  s.system.Q = 1e5;
  s.system.Gamma = ghz(1.0);
  return s;
}

} // namespace

TEST_CASE("cycle count rounding and cap") {
  CHECK(cycle_count(0.0) == 1);
  CHECK(cycle_count(0.3) == 1);
  CHECK(cycle_count(0.5) == 2);
  CHECK(cycle_count(0.99) == 100);
  bool capped = false;
  CHECK(cycle_count(1.0, &capped) == 1000000);
  CHECK(capped);
  cycle_count(0.9, &capped);
  CHECK_FALSE(capped);
}

TEST_CASE("closed-form photon sum") {
  CHECK(expected_counts(0.9, 0.1375, 0.0, 0.99, 100) == 0.0);
  const double beta = 0.97, eta = 0.1375, Pe = 0.41, Pg = 0.9987;
  double direct = 0, power = 1;
  for (int n = 0; n < 1000; ++n) {
    direct += beta * eta * Pe * power;
    power *= Pg;
  }
  CHECK(std::abs(expected_counts(beta, eta, Pe, Pg, 1000) / direct - 1) < 1e-12);
  CHECK(std::abs(expected_counts(beta, eta, Pe, 1.0, 7) - 7 * beta * eta * Pe) < 1e-15);
  CHECK(std::abs(expected_counts(beta, eta, Pe, 0.0, 1) - beta * eta * Pe) < 1e-15);
}

TEST_CASE("uncoupled emitter has no cavity enhancement") {
  FluorescenceScenario s;
  s.system.g_sim = 0;
  const PurcellRates r = purcell_rates(s);
  CHECK(std::abs(r.gamma_on / s.system.Gamma0 - 1) < 1e-6);
  CHECK(std::abs(r.gamma_off / s.system.Gamma0 - 1) < 1e-6);
  CHECK(r.beta_cav < 1e-6);
}

TEST_CASE("Purcell rates") {
  FluorescenceScenario s;
  const PurcellRates r = purcell_rates(s);
  const DerivedRates d = derive_rates(s.system);
  const double oracle = s.system.Gamma0 + 4 * d.g_par * d.g_par / d.kappa;
  CHECK(std::abs(r.gamma_on / oracle - 1) < 0.05);
  CHECK(r.gamma_on_bad_cavity == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(r.gamma_off < r.gamma_on);
  CHECK(r.beta_cav == doctest::Approx((r.gamma_on - s.system.Gamma0) / r.gamma_on).epsilon(1e-12));

  const PurcellRates wide = purcell_rates(fig2a());
  CHECK(wide.gamma_on > wide.gamma_off);
}

TEST_CASE("sequence populations") {
  FluorescenceScenario dark = fig2a();
  dark.P_in = 0;
  const auto none = run_sequence(dark, Spin::down, 50e-9);
  CHECK(none.P_e == 0.0);
  CHECK(std::abs(none.P_g - 1) < 1e-12);

  const FluorescenceScenario s = fig2a();
  const auto bright = run_sequence(s, Spin::down, 50e-9);
  const auto other = run_sequence(s, Spin::up, 50e-9);
  CHECK(bright.P_e > 10 * other.P_e);
  CHECK(bright.P_g < 1.0);
  CHECK(other.P_g < 1.0);

  CHECK(std::abs(FluorescenceScenario{}.system.eta_cav * FluorescenceScenario{}.system.eta_det - 0.1375) < 1e-15);
}

TEST_CASE("near-term readout") {
  const FluorescenceScenario s;
  const FluorescenceOutcome o = fluorescence_fidelity(s);
  CHECK(o.eta_sys == doctest::Approx(0.1375));
  CHECK(o.N_ph_down >= o.N_ph_up);
  CHECK(o.N_cyc == cycle_count(o.down.P_g));
  CHECK(o.total_time == doctest::Approx(o.N_cyc * o.t_seq));
  CHECK(o.t_wait == doctest::Approx(7 * o.tau_off));
  CHECK(o.tau_on == doctest::Approx(1 / o.rates.gamma_on));
  CHECK(o.result.fidelity > 0.999);
  CHECK(o.N_ph_down == doctest::Approx(expected_counts(o.rates.beta_cav, o.eta_sys, o.down.P_e, o.down.P_g, o.N_cyc)));

  const CountPair c = fluorescence_counts(s, o.plan());
  CHECK(c.down == doctest::Approx(o.N_ph_down).epsilon(1e-9));
  CHECK(c.up == doctest::Approx(o.N_ph_up).epsilon(1e-9));

  FluorescenceScenario flipped = s;
  flipped.system.phi = -s.system.phi;
  CHECK(std::abs(fluorescence_fidelity(flipped).result.fidelity - o.result.fidelity) < 1e-6);
}

TEST_CASE("longer pulses do not help") {
  FluorescenceScenario s;
  s.wait_mode = WaitMode::seven_tau_on;
  double last = 1.0;
  for (double tp : {10e-9, 30e-9, 100e-9, 300e-9, 1e-6}) {
    s.t_pulse = tp;
    const double f = fluorescence_fidelity(s).result.fidelity;
    CHECK(f <= last + 1e-9);
    last = f;
  }
}

TEST_CASE("cyclicity and cavity quality trends") {
  FluorescenceScenario s;
  s.system.Q = 1e5;
  FluorescenceScenario cyclic = s;
  cyclic.system.r_g = 1e3;
  CHECK(1 - fluorescence_fidelity(cyclic).result.fidelity < 1 - fluorescence_fidelity(s).result.fidelity);

  FluorescenceScenario broad = s;
  broad.system.Gamma = ghz(1.0);
  FluorescenceScenario sharp;
  CHECK(1 - fluorescence_fidelity(sharp).result.fidelity < 1 - fluorescence_fidelity(broad).result.fidelity);

  const auto cells = sweep_rg(s, 1e5, ghz(0.1), {10e-9}, {10.0});
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].infidelity == doctest::Approx(1 - fluorescence_fidelity(s).result.fidelity).epsilon(1e-12));
  CHECK_THROWS_AS(sweep_rg(s, 1e5, ghz(0.1), {}, {10.0}), InvalidArgument);
}

TEST_CASE("pulse train decays geometrically") {
  const FluorescenceScenario s;
  const FluorescenceOutcome o = fluorescence_fidelity(s);
  const auto pe = pulse_train_excitation(s, Spin::down, o.t_wait, o.N_cyc);
  REQUIRE(pe.size() == std::size_t(o.N_cyc));
  CHECK(pe.front() == doctest::Approx(o.down.P_e).epsilon(1e-9));

  // Two-manifold chain: leave with 1 - P_g(down), return with 1 - P_g(up).
  double bright = 1, worst_chain = 0, worst_geometric = 0;
  for (long n = 0; n < o.N_cyc; ++n) {
    const double geometric = pe.front() * std::pow(o.down.P_g, double(n));
    worst_chain = std::max(worst_chain, std::abs(pe[n] / (pe.front() * bright) - 1));
    worst_geometric = std::max(worst_geometric, std::abs(pe[n] / geometric - 1));
    CHECK(pe[n] >= geometric * (1 - 1e-9));
    bright = bright * o.down.P_g + (1 - bright) * (1 - o.up.P_g);
  }
  MESSAGE("deviation from P_g^n: " << worst_geometric << ", from the two-way chain: " << worst_chain);
  CHECK(worst_chain < 0.02);
  CHECK(worst_geometric < 0.02 + o.N_cyc * (1 - o.up.P_g));
}
