#pragma once

// Photon-count distributions and thresholded single-shot readout fidelity.

#include <span>
#include <utility>
#include <vector>

namespace cqed {

struct CountDistribution {
  enum class Kind { poisson, mixture };

  Kind kind = Kind::poisson;
  std::vector<double> probabilities;  ///< P(k), k = 0 .. k_max

  double mean() const;
  double total() const;
  std::size_t k_max() const { return probabilities.empty() ? 0 : probabilities.size() - 1; }
  double at(std::size_t k) const { return k < probabilities.size() ? probabilities[k] : 0.0; }
};

/// Support cutoff for a Poisson of the given mean: mean + 12 sqrt(mean) + 12.
std::size_t poisson_support(double mean);

/// P(k) = e^-mean mean^k / k!, truncated at max(k_max, poisson_support(mean)).
/// `dark_counts` adds an independent Poisson background to the mean.
CountDistribution poisson(double mean, std::size_t k_max = 0, double dark_counts = 0.0);

/// Pointwise convex combination. Throws InvalidArgument unless the weights
/// are non-negative and sum to 1 within 1e-9.
CountDistribution mixture(std::span<const std::pair<double, CountDistribution>> weighted);

struct ReadoutResult {
  double fidelity = 0.5;
  long threshold_M = 0;
  double mean_up = 0;
  double mean_down = 0;
  double duration = 0;  ///< seconds
};

/// Threshold fidelity at a fixed M. The distribution with the larger mean is
/// the bright one (counts above M assign it), the other is dark:
/// F = 1/2 [P_dark(k<M) + P_dark(M)/2 + P_bright(k>M) + P_bright(M)/2].
double fidelity_at(const CountDistribution& up, const CountDistribution& down, long M);

/// Optimal-threshold fidelity: scans M over the joint support and keeps the
/// smallest M attaining the maximum.
ReadoutResult fidelity(const CountDistribution& up, const CountDistribution& down);

/// Fidelity for two Poisson means (convenience).
ReadoutResult poisson_fidelity(double mean_up, double mean_down, double dark_counts = 0.0);

} // namespace cqed
