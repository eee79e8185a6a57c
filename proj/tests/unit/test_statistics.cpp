#include <doctest.h>

#include <cmath>
#include <random>

#include "cqed/errors.hpp"
#include "cqed/statistics.hpp"

using namespace cqed;

namespace {

double log_poisson(double mean, int k) {
  if (mean == 0) return k == 0 ? 0.0 : -INFINITY;
  return -mean + k * std::log(mean) - std::lgamma(k + 1.0);
}

/// Enumerates every threshold over k <= k_max straight from the pmf.
double brute_force_fidelity(double up, double down, int k_max) {
  const double bright = std::max(up, down), dark = std::min(up, down);
  double best = 0;
  for (int M = 0; M <= k_max; ++M) {
    double f = 0;
    for (int k = 0; k <= k_max; ++k) {
      const double pd = std::exp(log_poisson(dark, k));
      const double pb = std::exp(log_poisson(bright, k));
      if (k < M) f += pd;
      if (k > M) f += pb;
      if (k == M) f += 0.5 * (pd + pb);
    }
    best = std::max(best, 0.5 * f);
  }
  return best;
}

} // namespace

TEST_CASE("poisson distributions") {
  const auto zero = poisson(0.0);
  CHECK(zero.at(0) == 1.0);
  CHECK(zero.total() == 1.0);
  const auto one = poisson(1.0);
  CHECK(std::abs(one.at(0) - std::exp(-1.0)) < 1e-15);
  CHECK(std::abs(one.at(1) - std::exp(-1.0)) < 1e-15);
  for (double mean : {0.3, 4.0, 37.5, 420.0}) {
    const auto d = poisson(mean);
    double m = 0;
    for (std::size_t k = 0; k <= d.k_max(); ++k) m += double(k) * d.at(k);
    CHECK(std::abs(m - mean) < 1e-9 * std::max(1.0, mean));
    CHECK(std::abs(d.total() - 1) < 1e-9);
    CHECK(double(d.k_max()) >= mean + 12 * std::sqrt(mean));
  }
  CHECK(poisson(2.0, 200).k_max() == 200);
  CHECK(std::abs(poisson(2.0, 0, 0.5).mean() - 2.5) < 1e-9);
}

TEST_CASE("fidelity limits") {
  const auto a = poisson(3.0), b = poisson(3.0);
  CHECK(fidelity(a, b).fidelity == doctest::Approx(0.5).epsilon(1e-12));
  for (long M : {0L, 2L, 7L}) CHECK(fidelity_at(a, b, M) == doctest::Approx(0.5).epsilon(1e-12));
  const auto r = poisson_fidelity(0.0, 100.0);
  CHECK(r.fidelity > 1 - 1e-6);
  CHECK(r.mean_down == 100.0);
}

TEST_CASE("threshold scan matches brute-force enumeration") {
  const auto r = poisson_fidelity(0.1, 5.0);
  CHECK(std::abs(r.fidelity - brute_force_fidelity(0.1, 5.0, 60)) < 1e-12);

  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double up = 20 * u(rng), down = 20 * u(rng);
    const auto res = poisson_fidelity(up, down);
    CHECK(std::abs(res.fidelity - brute_force_fidelity(up, down, 120)) < 1e-10);
    CHECK(std::abs(poisson_fidelity(down, up).fidelity - res.fidelity) < 1e-14);
    CHECK(res.fidelity >= 0.5);
    const auto du = poisson(up, 150), dd = poisson(down, 150);
    CHECK(fidelity_at(du, dd, res.threshold_M - 1) <= res.fidelity + 1e-15);
    CHECK(fidelity_at(du, dd, res.threshold_M + 1) <= res.fidelity + 1e-15);
  }
}

TEST_CASE("fidelity grows with the separation of the means") {
  for (double fixed : {0.0, 0.5, 3.0}) {
    double last = 0.5 - 1e-15;
    for (int i = 0; i <= 40; ++i) {
      const double f = poisson_fidelity(fixed, fixed + 0.5 * i).fidelity;
      CHECK(f >= last - 1e-14);
      last = f;
    }
  }
}

TEST_CASE("mixtures") {
  const auto p2 = poisson(2.0, 40), p0 = poisson(0.0, 40);
  const std::vector<std::pair<double, CountDistribution>> single{{1.0, p2}};
  const auto same = mixture(single);
  for (std::size_t k = 0; k <= 40; ++k) CHECK(same.at(k) == p2.at(k));
  CHECK(same.kind == CountDistribution::Kind::mixture);

  const std::vector<std::pair<double, CountDistribution>> half{{0.5, p0}, {0.5, p2}};
  CHECK(std::abs(mixture(half).at(0) - (1 + std::exp(-2.0)) / 2) < 1e-15);

  const std::vector<std::pair<double, CountDistribution>> three{
      {0.2, poisson(1.0, 80)}, {0.5, poisson(7.5, 80)}, {0.3, poisson(30.0, 80)}};
  CHECK(std::abs(mixture(three).mean() - (0.2 * 1 + 0.5 * 7.5 + 0.3 * 30)) < 1e-9);
  CHECK(std::abs(mixture(three).total() - 1) < 1e-9);

  const std::vector<std::pair<double, CountDistribution>> bad{{0.6, p0}, {0.6, p2}};
  CHECK_THROWS_AS(mixture(bad), cqed::InvalidArgument);
  const std::vector<std::pair<double, CountDistribution>> negative{{1.5, p0}, {-0.5, p2}};
  CHECK_THROWS_AS(mixture(negative), cqed::InvalidArgument);
}
