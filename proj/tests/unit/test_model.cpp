#include <doctest.h>

#include <cmath>
#include <random>

#include "cqed/model.hpp"
#include "test_support.hpp"

using namespace cqed;

TEST_CASE("derived rates of the near-term parameters") {
  const SystemParams p = SystemParams::table3();
  const DerivedRates r = derive_rates(p);
  const double kappa = 2 * std::numbers::pi * 299792458.0 / 1326e-9 / 2e5;
  CHECK(std::abs(r.kappa / kappa - 1) < 1e-14);
  CHECK(std::abs(to_ghz(r.kappa) - 1.130) < 1e-3);
  CHECK(std::abs(to_mhz(r.g) - 376.0 * std::sqrt(0.234)) < 1e-9);
  CHECK(std::abs(to_mhz(r.g) - 181.9) < 0.05);
  CHECK(std::abs(r.cooperativity - 4 * r.g * r.g / (r.kappa * p.Gamma)) < 1e-14);
  CHECK(std::abs(r.cooperativity - 1.2) < 0.05);
  CHECK(r.kappa_wg + r.kappa_sc == r.kappa);
  CHECK(std::abs((r.g_par * r.g_par + r.g_perp * r.g_perp) / (r.g * r.g) - 1) < 1e-12);
  CHECK(std::abs(r.g_par / r.g_perp - p.r_g) < 1e-12);
}

TEST_CASE("validation lists every violation") {
  SystemParams p;
  CHECK(validate(p).empty());
  p.Gamma = p.Gamma0 / 2;
  p.eta_cav = 1.5;
  const auto v = validate(p);
  CHECK(v.size() == 2);
  CHECK_THROWS_AS(derive_rates(p), InvalidArgument);
  SystemParams q;
  q.r_g = 0;
  CHECK(validate(q).size() == 1);
  DriveParams d;
  CHECK(validate(d).size() == 1);
  d.t_pulse = 1e-9;
  CHECK(validate(d).empty());
}

TEST_CASE("undriven resonant Hamiltonian") {
  SystemParams p;
  p.delta_g = 0;
  p.delta_e = 0;
  const DerivedRates r = derive_rates(p);
  const HilbertLayout l(3);
  const Operator H = build_hamiltonian(p, r, DriveParams{}, l);
  CHECK(std::abs(H.matrix(l.index(0, 0), l.index(0, 0))) == 0.0);
  CHECK(H.matrix.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::abs(H.matrix(l.index(0, 1), l.index(2, 0)) - r.g_par) < 1e-6);
  CHECK(std::abs(std::abs(H.matrix(l.index(0, 1), l.index(3, 0))) - r.g_perp) < 1e-6);
}

TEST_CASE("Hamiltonian is Hermitian for random parameters") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const SystemParams p = testing::random_system(rng);
    const Operator H = build_hamiltonian(p, derive_rates(p), testing::random_drive(rng), HilbertLayout(2 + trial % 4));
    CHECK(H.hermiticity_error() <= 1e-12 * H.matrix.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("without the cross coupling the spin manifolds decouple") {
  SystemParams p;
  p.r_g = 1e15;
  const DerivedRates r = derive_rates(p);
  DriveParams d;
  d.P_in = 1e-11;
  d.delta_a = ghz(0.3);
  const HilbertLayout l(4);
  const Operator H = build_hamiltonian(p, r, d, l);
  double worst = 0;
  for (Index down : {0, 2})
    for (Index up : {1, 3})
      for (Index n = 0; n < 4; ++n)
        for (Index m = 0; m < 4; ++m) worst = std::max(worst, std::abs(H.matrix(l.index(up, n), l.index(down, m))));
  CHECK(worst <= 1e-12 * r.g);
}

TEST_CASE("drive term scales with the square root of power") {
  SystemParams p;
  const DerivedRates r = derive_rates(p);
  const HilbertLayout l(4);
  DriveParams d;
  d.delta_a = ghz(0.4);
  d.delta_c = ghz(-0.2);
  const Operator H0 = build_hamiltonian(p, r, d, l);
  d.P_in = 2e-12;
  const CMatrix<double> drive1 = build_hamiltonian(p, r, d, l).matrix - H0.matrix;
  d.P_in = 2e-12 * 9;
  const CMatrix<double> drive3 = build_hamiltonian(p, r, d, l).matrix - H0.matrix;
  CHECK((drive3 - 3.0 * drive1).cwiseAbs().maxCoeff() <= 1e-9 * drive3.cwiseAbs().maxCoeff());
  const double eps = 2e-12 / (kHbar * r.omega_c0);
  CHECK(std::abs(std::abs(drive1(l.index(1, 1), l.index(1, 0))) - std::sqrt(r.kappa * p.eta_cav * eps)) <
        1e-6 * std::sqrt(r.kappa * eps));
}

TEST_CASE("line detunings") {
  SystemParams p;
  DriveParams d;
  d.delta_a = resonant_atomic_detuning(p, 0, 2);
  CHECK(std::abs(line_detuning(p, d, 0, 2)) < 1e-3);
  CHECK(std::abs(d.delta_a - (p.delta_e - p.delta_g)) < 1e-3);
  CHECK(std::abs(line_detuning(p, d, 1, 3) - 2 * (p.delta_e - p.delta_g)) < 1e-3);
  CHECK(std::abs(to_ghz(std::abs(line_detuning(p, d, 1, 3))) - 4.0) < 1e-9);
  CHECK_THROWS_AS(level_energy(p, d, 4), InvalidArgument);
}

TEST_CASE("collapse operators") {
  SystemParams p;
  const DerivedRates r = derive_rates(p);
  const HilbertLayout l(3);
  const auto c = build_collapse_ops(p, r, l);
  REQUIRE(c.size() == 7);
  CHECK(std::abs(std::abs(c[0].matrix(l.index(0, 0), l.index(0, 1))) - std::sqrt(r.kappa)) < 1e-9);

  Operator sum = Operator::zero(l);
  for (std::size_t i = 1; i < c.size(); ++i) sum += c[i].adjoint() * c[i];
  const double gd = (p.Gamma - p.Gamma0) / 2;
  for (Index level = 0; level < 4; ++level) {
    const double expected = level >= 2 ? p.Gamma0 + gd / 2 : gd / 2;
    CHECK(std::abs(sum.matrix(l.index(level, 1), l.index(level, 1)).real() - expected) < 1e-6 * p.Gamma);
  }
  CHECK((sum.matrix - CMatrix<double>(sum.matrix.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-9);

  SystemParams pure = p;
  pure.Gamma = pure.Gamma0;
  const auto cp = build_collapse_ops(pure, derive_rates(pure), l);
  CHECK(cp[1].matrix.cwiseAbs().maxCoeff() == 0.0);
  CHECK(cp[2].matrix.cwiseAbs().maxCoeff() == 0.0);

  SystemParams broken = p;
  broken.Gamma = p.Gamma0 / 2;
  CHECK_THROWS_AS(build_collapse_ops(broken, r, l), InvalidArgument);
}
