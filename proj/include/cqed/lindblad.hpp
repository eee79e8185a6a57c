#pragma once

// Liouvillian construction and exact propagation for piecewise-constant
// Hamiltonians. Density matrices are vectorized column-major:
// vec(rho)[i + d*j] = rho(i, j), so vec(A X B) = (B^T kron A) vec(X).

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cqed/model.hpp"

namespace cqed {

using CVec = CVector<double>;
using CMat = CMatrix<double>;

class FitQualityError : public ConvergenceError {
public:
  using ConvergenceError::ConvergenceError;
};

struct Liouvillian {
  HilbertLayout layout;
  CMat matrix;  ///< total_dim^2 x total_dim^2
};

/// L[rho] = -i[H, rho] + sum_i (c rho c^dag - 1/2 {c^dag c, rho}).
/// Rejects H whose anti-Hermitian part exceeds 1e-10 relative to max|H|.
Liouvillian build_liouvillian(const Operator& H,
                              std::span<const Operator> collapse);

CVec vectorize(const Density& rho);
Density unvectorize(HilbertLayout layout, const CVec& v);

/// Row vector w with w . vec(rho) = Tr(rho op).
Eigen::RowVectorXcd expectation_functional(const Operator& op);

/// exp(L t) for a fixed step t.
class Propagator {
public:
  Propagator(const Liouvillian& L, double t);
  const CMat& matrix() const { return E_; }
  double step() const { return t_; }
  CVec apply(const CVec& v) const { return E_ * v; }
  /// exp(L 2t) from this propagator by squaring.
  Propagator doubled() const;

private:
  Propagator() = default;
  CMat E_;
  double t_ = 0;
};

/// Throws NumericalError when min eigenvalue < -1e-6 or the trace deviates
/// from one by more than 1e-6; `where` goes into the diagnostic.
void check_physical(const Density& rho, const char* where);

/// rho(t) = exp(L t)[rho0].
Density propagate(const Liouvillian& L, const Density& rho0, double t);

/// Stationary state: L vec(rho) = 0 with Tr(rho) = 1.
Density steady_state(const Liouvillian& L);

struct NamedObservable {
  std::string name;
  Operator op;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Density> states;
  std::map<std::string, std::vector<Complex<double>>> observables;

  std::vector<double> real_series(const std::string& name) const;
};

/// Evolves rho0 and samples states/observables at every grid time.
/// Uniform grids reuse one propagator.
Trajectory evolve_observed(const Liouvillian& L, const Density& rho0,
                           std::span<const double> time_grid,
                           std::span<const NamedObservable> observables,
                           bool keep_states = true);

struct DecayFit {
  double rate = 0;
  double r_squared = 0;
  std::size_t points = 0;
};

/// Least-squares slope of log(y) versus t over the window where
/// y in [y0 * exp(-last_efold), y0 * exp(-first_efold)].
/// Throws FitQualityError when R^2 < min_r_squared or the window has
/// fewer than 5 samples.
DecayFit fit_decay(std::span<const double> t, std::span<const double> y,
                   double first_efold = 1.0, double last_efold = 6.0,
                   double min_r_squared = 0.999);

double fit_decay_rate(const Trajectory& traj, const std::string& observable);

struct FockConvergence {
  Index fock_dim = 0;
  double value = 0;
  double delta = 0;  ///< |value(fock_dim + 1) - value(fock_dim)|
};

/// Smallest fock_dim >= start_dim whose headline value changes by less than
/// `tol` when the truncation grows by one. Throws ConvergenceError beyond
/// max_dim.
FockConvergence fock_convergence(const std::function<double(Index)>& headline,
                                 Index start_dim, double tol = 1e-4,
                                 Index max_dim = 16);

/// Piecewise-geometric time grid: `per_segment` steps of first_step, then
/// per_segment steps of 2*first_step, and so on (dense near t = 0). The
/// first step is halved until the grid holds at least 200 samples.
struct GeometricGrid {
  double first_step = 1e-11;
  int per_segment = 32;

  GeometricGrid refined() const { return {first_step / 2, per_segment * 2}; }
};

struct IntegratedSeries {
  std::vector<double> report_times;
  std::vector<double> cumulative;  ///< integral of the integrand to each time
  std::size_t grid_points = 0;
};

/// Trapezoidal integral of integrand(vec rho(t)) from 0 to each report time
/// (sorted, > 0) over a geometric grid.
IntegratedSeries integrate_along(
    const Liouvillian& L, const Density& rho0,
    std::span<const double> report_times,
    const std::function<double(const CVec&)>& integrand, GeometricGrid grid);

} // namespace cqed
