#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cqed/diffusion.hpp"

using namespace cqed;

namespace {

ReflectionScenario short_reflection() {
  ReflectionScenario s;
  s.t_pulse = microsecond(5);
  s.P_in = picowatt(16);
  return s;
}

double gamma() { return SystemParams::table3().Gamma; }

} // namespace

TEST_CASE("Gaussian quadrature") {
  const double gsd = ghz(0.05);
  const DiffusionModel m = DiffusionModel::gaussian(gsd);
  REQUIRE(m.quadrature.size() == 41);
  CHECK(m.quadrature.front().first == doctest::Approx(-3 * gsd));
  CHECK(m.quadrature.back().first == doctest::Approx(3 * gsd));
  double total = 0;
  for (const auto& [dw, w] : m.quadrature) total += w;
  CHECK(std::abs(total - 1) < 1e-9);
  const double mid = m.quadrature[20].second;
  for (const auto& [dw, w] : m.quadrature) {
    const double u = dw / gsd;
    CHECK(w / mid == doctest::Approx(std::exp(-std::log(2.0) * u * u)).epsilon(1e-12));
  }
  const DiffusionModel m61 = DiffusionModel::gaussian(gsd, 61);
  const auto half = std::find_if(m61.quadrature.begin(), m61.quadrature.end(),
                                 [&](const auto& q) { return std::abs(q.first - gsd) < 1e-6 * gsd; });
  REQUIRE(half != m61.quadrature.end());
  CHECK(half->second / m61.quadrature[30].second == doctest::Approx(0.5).epsilon(1e-12));

  const DiffusionModel delta = DiffusionModel::gaussian(0.0);
  REQUIRE(delta.quadrature.size() == 1);
  CHECK(delta.quadrature[0].second == 1.0);
  CHECK_THROWS_AS(DiffusionModel::gaussian(gsd, 21), InvalidArgument);
  CHECK_THROWS_AS(DiffusionModel::gaussian(-gsd), InvalidArgument);
}

TEST_CASE("shifted scenarios") {
  const FluorescenceScenario f;
  const FluorescenceScenario f0 = detuned_scenario(f, 0.0);
  CHECK(f0.transition_shift == 0.0);
  CHECK(f0.drive().delta_a == f.drive().delta_a);
  CHECK(detuned_scenario(f, 1e9).transition_shift == 1e9);

  ReflectionScenario r;
  const ReflectionScenario r0 = detuned_scenario(r, 0.0);
  REQUIRE(r0.detunings.has_value());
  const Detunings opt = optimize_detunings(r.system).detunings;
  CHECK(r0.detunings->delta_a == opt.delta_a);
  CHECK(r0.detunings->delta_c == opt.delta_c);
  const ReflectionScenario r1 = detuned_scenario(r0, 2e8);
  CHECK(r1.detunings->delta_c == opt.delta_c);
  CHECK(reflection_drive(r1, *r1.detunings).delta_a == doctest::Approx(opt.delta_a + 2e8));
}

TEST_CASE("fluorescence under spectral wandering") {
  ShiftedReadout readout = ShiftedReadout::fluorescence(FluorescenceScenario{});
  const double G = gamma();
  CHECK(readout.protocol() == Protocol::fluorescence);
  const ReadoutResult undiffused = diffused_fidelity(readout, DiffusionModel::gaussian(0.0));
  CHECK(std::abs(undiffused.fidelity - readout.nominal().fidelity) < 1e-6);

  const std::vector<double> grid{-G, -0.5 * G, -0.25 * G, 0.0, 0.25 * G, 0.5 * G, G};
  const auto curve = infidelity_vs_detuning(readout, grid);
  const auto lowest = std::min_element(curve.begin(), curve.end(),
                                       [](const auto& a, const auto& b) { return a.infidelity < b.infidelity; });
  CHECK(std::abs(lowest->delta_omega) <= 0.25 * G);
  CHECK(curve[3].infidelity == doctest::Approx(1 - readout.nominal().fidelity).epsilon(1e-9));
  const double asym = std::abs(curve[0].infidelity - curve[6].infidelity) / (curve[0].infidelity + curve[6].infidelity);
  MESSAGE("fluorescence infidelity at -G, +G: " << curve[0].infidelity << ", " << curve[6].infidelity);
  CHECK(asym < 0.1);

  double last = 1 - readout.nominal().fidelity;
  for (double ratio : {0.25, 0.5, 1.0}) {
    const double f = diffused_fidelity(readout, DiffusionModel::gaussian(ratio * G / 2)).fidelity;
    CHECK(1 - f >= last - 1e-12);
    CHECK(f <= readout.nominal().fidelity + 1e-12);
    last = 1 - f;
  }
  const std::size_t before = readout.evaluations();
  diffused_fidelity(readout, DiffusionModel::gaussian(0.5 * G / 2));
  CHECK(readout.evaluations() == before);
}

TEST_CASE("reflection under spectral wandering") {
  ShiftedReadout readout = ShiftedReadout::reflection(short_reflection());
  const double G = gamma();
  CHECK(std::abs(diffused_fidelity(readout, DiffusionModel::gaussian(0.0)).fidelity - readout.nominal().fidelity) < 1e-6);
  const std::vector<double> grid{-G, -0.5 * G, -0.25 * G, 0.0, 0.25 * G, 0.5 * G, G};
  const auto curve = infidelity_vs_detuning(readout, grid);
  const auto lowest = std::min_element(curve.begin(), curve.end(),
                                       [](const auto& a, const auto& b) { return a.infidelity < b.infidelity; });
  CHECK(std::abs(lowest->delta_omega) <= 0.25 * G);
  MESSAGE("reflection infidelity at -G, +G: " << curve[0].infidelity << ", " << curve[6].infidelity);
  const double asym = std::abs(curve[0].infidelity - curve[6].infidelity) / (curve[0].infidelity + curve[6].infidelity);
  CHECK(asym > 0.1);

  const DiffusedReadout conv = diffused_fidelity_converged(readout, 0.5 * G / 2);
  CHECK(conv.quadrature_delta < 1e-5);
  CHECK(conv.result.fidelity <= readout.nominal().fidelity + 1e-12);
  CHECK(diffused_fidelity_converged(readout, 0.0).quadrature_points == 1);
}

TEST_CASE("mixed count distributions are normalized") {
  ShiftedReadout readout = ShiftedReadout::reflection(short_reflection());
  const DiffusionModel m = DiffusionModel::gaussian(gamma() / 2);
  double largest = 0;
  for (const auto& [dw, w] : m.quadrature) {
    const CountPair c = readout.counts(dw);
    largest = std::max({largest, c.up, c.down});
  }
  const std::size_t k = poisson_support(largest);
  std::vector<std::pair<double, CountDistribution>> up, down;
  for (const auto& [dw, w] : m.quadrature) {
    up.emplace_back(w, poisson(readout.counts(dw).up, k));
    down.emplace_back(w, poisson(readout.counts(dw).down, k));
  }
  CHECK(std::abs(mixture(up).total() - 1) < 1e-9);
  CHECK(std::abs(mixture(down).total() - 1) < 1e-9);
  CHECK(diffused_fidelity(readout, m).fidelity == doctest::Approx(fidelity(mixture(up), mixture(down)).fidelity).epsilon(1e-12));
}
