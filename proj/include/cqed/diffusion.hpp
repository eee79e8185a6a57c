#pragma once

// Quasi-static spectral diffusion: each shot sees a transition shifted by a
// Gaussian-distributed delta_omega, with readout parameters frozen at
// delta_omega = 0.

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "cqed/fluorescence.hpp"
#include "cqed/reflection.hpp"

namespace cqed {

struct DiffusionModel {
  double gamma_sd = 0;  ///< half width at half maximum
  std::vector<std::pair<double, double>> quadrature;  ///< (delta_omega, weight)

  /// Uniform grid over +-span*gamma_sd, weights
  /// (1/gamma_sd) sqrt(ln2/pi) exp(-ln2 (dw/gamma_sd)^2) renormalized to 1.
  /// gamma_sd = 0 gives the single point (0, 1).
  static DiffusionModel gaussian(double gamma_sd, int points = 41, double span = 3.0);
};

enum class Protocol { fluorescence, reflection };

const char* to_string(Protocol p);

FluorescenceScenario detuned_scenario(const FluorescenceScenario& base, double delta_omega);

/// Resolves the detunings of `base` (optimizing if unset) before shifting,
/// so the cavity stays where the delta_omega = 0 optimum put it.
ReflectionScenario detuned_scenario(const ReflectionScenario& base, double delta_omega);

/// Mean counts per spin as a function of delta_omega for one protocol, with
/// the readout plan fixed at delta_omega = 0. Results are memoized; not
/// thread-safe.
class ShiftedReadout {
public:
  static ShiftedReadout fluorescence(const FluorescenceScenario& base);
  static ShiftedReadout reflection(const ReflectionScenario& base);

  Protocol protocol() const { return protocol_; }
  /// Fidelity and threshold at delta_omega = 0.
  const ReadoutResult& nominal() const { return nominal_; }
  CountPair counts(double delta_omega);
  std::size_t evaluations() const { return memo_.size(); }

private:
  ShiftedReadout(Protocol p, std::function<CountPair(double)> fn);

  Protocol protocol_;
  std::function<CountPair(double)> fn_;
  std::map<double, CountPair> memo_;
  ReadoutResult nominal_;
};

struct DetuningPoint {
  double delta_omega = 0;
  CountPair counts;
  double infidelity = 0;  ///< with the delta_omega = 0 threshold
};

std::vector<DetuningPoint> infidelity_vs_detuning(ShiftedReadout& readout,
                                                  const std::vector<double>& delta_omega);

/// Threshold fidelity of the Gaussian-mixed count distributions (threshold
/// re-optimized on the mixtures).
ReadoutResult diffused_fidelity(ShiftedReadout& readout, const DiffusionModel& model);

struct DiffusedReadout {
  ReadoutResult result;
  int quadrature_points = 0;
  double quadrature_delta = 0;  ///< |F(n) - F((n + 1) / 2)|
};

/// Starts at 41 points and doubles the quadrature until F changes by less
/// than `tol`; throws ConvergenceError past 321 points.
DiffusedReadout diffused_fidelity_converged(ShiftedReadout& readout, double gamma_sd,
                                            double tol = 1e-5);

} // namespace cqed
