#pragma once

#include <random>

#include "cqed/model.hpp"

namespace testing {

inline cqed::CMatrix<double> random_matrix(std::mt19937_64& rng, cqed::Index rows, cqed::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  cqed::CMatrix<double> m(rows, cols);
  for (cqed::Index i = 0; i < rows; ++i)
    for (cqed::Index j = 0; j < cols; ++j) m(i, j) = {n(rng), n(rng)};
  return m;
}

/// Random positive, unit-trace density matrix.
inline cqed::Density random_density(std::mt19937_64& rng, cqed::HilbertLayout l) {
  const auto a = random_matrix(rng, l.total_dim(), l.total_dim());
  cqed::CMatrix<double> rho = a * a.adjoint();
  rho /= rho.trace();
  return {l, rho};
}

/// A valid parameter set drawn around the near-term defaults.
inline cqed::SystemParams random_system(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  cqed::SystemParams p;
  p.Q = 2e4 + u(rng) * 4e5;
  p.Gamma0 = cqed::khz(50 + 300 * u(rng));
  p.Gamma = p.Gamma0 + cqed::ghz(2.0 * u(rng));
  p.r_g = 0.5 + 20 * u(rng);
  p.g_sim = cqed::mhz(100 + 600 * u(rng));
  p.eta_QE = 0.05 + 0.95 * u(rng);
  p.eta_cav = 0.05 + 0.95 * u(rng);
  p.delta_g = cqed::ghz(-5 + 10 * u(rng));
  p.delta_e = cqed::ghz(-5 + 10 * u(rng));
  p.phi = 2 * cqed::kPi * u(rng);
  return p;
}

inline cqed::DriveParams random_drive(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  cqed::DriveParams d;
  d.P_in = 1e-12 * 50 * u(rng);
  d.delta_a = cqed::ghz(-5 + 10 * u(rng));
  d.delta_c = cqed::ghz(-5 + 10 * u(rng));
  d.t_pulse = 1e-8;
  return d;
}

} // namespace testing
