#include "cqed/diffusion.hpp"

#include <algorithm>
#include <cmath>

namespace cqed {

DiffusionModel DiffusionModel::gaussian(double gamma_sd, int points, double span) {
  if (!(gamma_sd >= 0)) throw InvalidArgument("DiffusionModel: gamma_sd must be >= 0");
  DiffusionModel m;
  m.gamma_sd = gamma_sd;
  if (gamma_sd == 0) {
    m.quadrature = {{0.0, 1.0}};
    return m;
  }
  if (points < 41 || !(span >= 3)) {
    throw InvalidArgument("DiffusionModel: need >= 41 points over at least +-3 gamma_sd");
  }
  const double ln2 = std::log(2.0);
  double total = 0;
  for (int i = 0; i < points; ++i) {
    const double dw = gamma_sd * span * (-1.0 + 2.0 * i / (points - 1));
    const double u = dw / gamma_sd;
    const double w = std::sqrt(ln2 / kPi) / gamma_sd * std::exp(-ln2 * u * u);
    m.quadrature.emplace_back(dw, w);
    total += w;
  }
  for (auto& q : m.quadrature) q.second /= total;
  return m;
}

const char* to_string(Protocol p) {
  return p == Protocol::fluorescence ? "fluorescence" : "reflection";
}

FluorescenceScenario detuned_scenario(const FluorescenceScenario& base, double delta_omega) {
  FluorescenceScenario s = base;
  s.transition_shift += delta_omega;
  return s;
}

ReflectionScenario detuned_scenario(const ReflectionScenario& base, double delta_omega) {
  ReflectionScenario s = base;
  if (!s.detunings) s.detunings = optimize_detunings(s.system).detunings;
  s.transition_shift += delta_omega;
  return s;
}

ShiftedReadout::ShiftedReadout(Protocol p, std::function<CountPair(double)> fn)
    : protocol_(p), fn_(std::move(fn)) {
  const CountPair c = counts(0.0);
  nominal_ = poisson_fidelity(c.up, c.down);
}

ShiftedReadout ShiftedReadout::fluorescence(const FluorescenceScenario& base) {
  const FluorescencePlan plan = fluorescence_fidelity(base).plan();
  return ShiftedReadout(Protocol::fluorescence, [base, plan](double dw) {
    return fluorescence_counts(detuned_scenario(base, dw), plan);
  });
}

ShiftedReadout ShiftedReadout::reflection(const ReflectionScenario& base) {
  const ReflectionScenario fixed = detuned_scenario(base, 0.0);
  return ShiftedReadout(Protocol::reflection, [fixed](double dw) {
    const ReflectionScenario s = detuned_scenario(fixed, dw);
    const DriveParams d = reflection_drive(s, *s.detunings);
    CountPair c;
    c.up = reflected_count_curve(s.system, d, Spin::up, {s.t_pulse}, s.fock_dim).front();
    c.down = reflected_count_curve(s.system, d, Spin::down, {s.t_pulse}, s.fock_dim).front();
    return c;
  });
}

CountPair ShiftedReadout::counts(double delta_omega) {
  const auto it = memo_.find(delta_omega);
  if (it != memo_.end()) return it->second;
  const CountPair c = fn_(delta_omega);
  memo_.emplace(delta_omega, c);
  return c;
}

std::vector<DetuningPoint> infidelity_vs_detuning(ShiftedReadout& readout,
                                                  const std::vector<double>& delta_omega) {
  const long M = readout.nominal().threshold_M;
  std::vector<DetuningPoint> out;
  for (double dw : delta_omega) {
    DetuningPoint pt;
    pt.delta_omega = dw;
    pt.counts = readout.counts(dw);
    const std::size_t k = poisson_support(std::max(pt.counts.up, pt.counts.down));
    pt.infidelity = 1.0 - fidelity_at(poisson(pt.counts.up, k), poisson(pt.counts.down, k), M);
    out.push_back(pt);
  }
  return out;
}

ReadoutResult diffused_fidelity(ShiftedReadout& readout, const DiffusionModel& model) {
  if (model.quadrature.empty()) throw InvalidArgument("diffused_fidelity: empty quadrature");
  std::vector<CountPair> means;
  double largest = 0;
  for (const auto& [dw, w] : model.quadrature) {
    means.push_back(readout.counts(dw));
    largest = std::max({largest, means.back().up, means.back().down});
  }
  const std::size_t k = poisson_support(largest);
  std::vector<std::pair<double, CountDistribution>> up, down;
  for (std::size_t i = 0; i < means.size(); ++i) {
    const double w = model.quadrature[i].second;
    up.emplace_back(w, poisson(means[i].up, k));
    down.emplace_back(w, poisson(means[i].down, k));
  }
  return fidelity(mixture(up), mixture(down));
}

DiffusedReadout diffused_fidelity_converged(ShiftedReadout& readout, double gamma_sd,
                                            double tol) {
  if (gamma_sd == 0) {
    return {diffused_fidelity(readout, DiffusionModel::gaussian(0)), 1, 0.0};
  }
  int n = 41;
  ReadoutResult previous = diffused_fidelity(readout, DiffusionModel::gaussian(gamma_sd, n));
  while (n < 321) {
    n = 2 * n - 1;
    const ReadoutResult next = diffused_fidelity(readout, DiffusionModel::gaussian(gamma_sd, n));
    const double delta = std::abs(next.fidelity - previous.fidelity);
    if (delta < tol) return {next, n, delta};
    previous = next;
  }
  throw ConvergenceError("diffused_fidelity: quadrature not converged at 321 points");
}

} // namespace cqed
