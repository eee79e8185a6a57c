#include "cqed/statistics.hpp"

#include <algorithm>
#include <cmath>

#include "cqed/errors.hpp"

namespace cqed {

double CountDistribution::mean() const {
  double m = 0;
  for (std::size_t k = 0; k < probabilities.size(); ++k) m += k * probabilities[k];
  return m;
}

double CountDistribution::total() const {
  double s = 0;
  for (double p : probabilities) s += p;
  return s;
}

std::size_t poisson_support(double mean) {
  return static_cast<std::size_t>(std::ceil(mean + 12.0 * std::sqrt(mean) + 12.0));
}

CountDistribution poisson(double mean, std::size_t k_max, double dark_counts) {
  if (!(mean >= 0) || !(dark_counts >= 0)) {
    throw InvalidArgument("poisson: mean must be >= 0");
  }
  const double mu = mean + dark_counts;
  const std::size_t n = std::max(k_max, poisson_support(mu));
  CountDistribution d;
  d.kind = CountDistribution::Kind::poisson;
  d.probabilities.resize(n + 1);
  if (mu == 0) {
    d.probabilities[0] = 1.0;
    return d;
  }
  const double log_mu = std::log(mu);
  for (std::size_t k = 0; k <= n; ++k) {
    const double kd = static_cast<double>(k);
    d.probabilities[k] = std::exp(kd * log_mu - mu - std::lgamma(kd + 1.0));
  }
  return d;
}

CountDistribution mixture(std::span<const std::pair<double, CountDistribution>> weighted) {
  if (weighted.empty()) throw InvalidArgument("mixture: no components");
  double wsum = 0;
  std::size_t n = 0;
  for (const auto& [w, dist] : weighted) {
    if (!(w >= 0)) throw InvalidArgument("mixture: negative weight");
    wsum += w;
    n = std::max(n, dist.probabilities.size());
  }
  if (std::abs(wsum - 1.0) > 1e-9) {
    throw InvalidArgument("mixture: weights sum to " + std::to_string(wsum) + ", not 1");
  }
  CountDistribution out;
  out.kind = CountDistribution::Kind::mixture;
  out.probabilities.assign(n, 0.0);
  for (const auto& [w, dist] : weighted) {
    for (std::size_t k = 0; k < dist.probabilities.size(); ++k) {
      out.probabilities[k] += w * dist.probabilities[k];
    }
  }
  return out;
}

namespace {

struct Roles {
  const CountDistribution* bright;
  const CountDistribution* dark;
};

Roles assign_roles(const CountDistribution& up, const CountDistribution& down) {
  // Equal means: treat down as bright (its role in the canonical formula).
  if (up.mean() > down.mean()) return {&up, &down};
  return {&down, &up};
}

} // namespace

double fidelity_at(const CountDistribution& up, const CountDistribution& down, long M) {
  const auto [bright, dark] = assign_roles(up, down);
  double dark_below = 0, bright_above = 0;
  const auto m = static_cast<std::size_t>(std::max(M, 0L));
  for (std::size_t k = 0; k < dark->probabilities.size() && k < m; ++k) {
    dark_below += dark->probabilities[k];
  }
  if (M < 0) {
    return 0.5 * (0.0 + bright->total());
  }
  for (std::size_t k = m + 1; k < bright->probabilities.size(); ++k) {
    bright_above += bright->probabilities[k];
  }
  return 0.5 * (dark_below + 0.5 * dark->at(m) + bright_above + 0.5 * bright->at(m));
}

ReadoutResult fidelity(const CountDistribution& up, const CountDistribution& down) {
  const auto [bright, dark] = assign_roles(up, down);
  const std::size_t n = std::max(bright->probabilities.size(), dark->probabilities.size());

  // Running sums: dark mass strictly below M, bright mass strictly above M.
  double bright_tail = bright->total();
  double dark_below = 0;
  ReadoutResult best;
  best.fidelity = -1;
  for (std::size_t M = 0; M < n; ++M) {
    bright_tail -= bright->at(M);
    const double f = 0.5 * (dark_below + 0.5 * dark->at(M) +
                            std::max(bright_tail, 0.0) + 0.5 * bright->at(M));
    if (f > best.fidelity) {
      best.fidelity = f;
      best.threshold_M = static_cast<long>(M);
    }
    dark_below += dark->at(M);
  }
  best.mean_up = up.mean();
  best.mean_down = down.mean();
  return best;
}

ReadoutResult poisson_fidelity(double mean_up, double mean_down, double dark_counts) {
  const std::size_t k = poisson_support(std::max(mean_up, mean_down) + dark_counts);
  auto r = fidelity(poisson(mean_up, k, dark_counts), poisson(mean_down, k, dark_counts));
  r.mean_up = mean_up;
  r.mean_down = mean_down;
  return r;
}

} // namespace cqed
