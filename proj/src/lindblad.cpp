#include "cqed/lindblad.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <optional>
#include <sstream>

namespace cqed {

Liouvillian build_liouvillian(const Operator& H,
                              std::span<const Operator> collapse) {
  const double scale = std::max(1.0, H.matrix.cwiseAbs().maxCoeff());
  if (H.hermiticity_error() > 1e-10 * scale) {
    std::ostringstream os;
    os << "build_liouvillian: Hamiltonian is not Hermitian (max|H - H^dag| = "
       << H.hermiticity_error() << ")";
    throw InvalidArgument(os.str());
  }
  const Index d = H.layout.total_dim();
  const CMat I = CMat::Identity(d, d);
  const Complex<double> minus_i(0, -1);

  CMat L = minus_i * (Eigen::kroneckerProduct(I, H.matrix).eval() -
                      Eigen::kroneckerProduct(H.matrix.transpose(), I).eval());
  for (const auto& c : collapse) {
    require_same_layout(H.layout, c.layout, "build_liouvillian");
    const CMat cdc = c.matrix.adjoint() * c.matrix;
    L += Eigen::kroneckerProduct(c.matrix.conjugate(), c.matrix);
    L -= 0.5 * Eigen::kroneckerProduct(I, cdc).eval();
    L -= 0.5 * Eigen::kroneckerProduct(cdc.transpose(), I).eval();
  }
  return {H.layout, std::move(L)};
}

CVec vectorize(const Density& rho) {
  return Eigen::Map<const CVec>(rho.matrix.data(), rho.matrix.size());
}

Density unvectorize(HilbertLayout layout, const CVec& v) {
  const Index d = layout.total_dim();
  if (v.size() != d * d) {
    throw InvalidArgument("unvectorize: vector length does not match layout");
  }
  return {layout, Eigen::Map<const CMat>(v.data(), d, d)};
}

Eigen::RowVectorXcd expectation_functional(const Operator& op) {
  // Tr(rho op) = sum_ij rho_ij op_ji = vec(op^T) . vec(rho)
  const CMat t = op.matrix.transpose();
  return Eigen::Map<const Eigen::RowVectorXcd>(t.data(), t.size());
}

Propagator::Propagator(const Liouvillian& L, double t) : t_(t) {
  if (t < 0) throw InvalidArgument("Propagator: negative time step");
  E_ = (L.matrix * Complex<double>(t, 0)).exp();
}

Propagator Propagator::doubled() const {
  Propagator p;
  p.E_ = E_ * E_;
  p.t_ = 2 * t_;
  return p;
}

void check_physical(const Density& rho, const char* where) {
  const double tr_err = std::abs(rho.trace() - 1.0);
  const double lam = rho.min_eigenvalue();
  if (lam < -1e-6 || tr_err > 1e-6) {
    std::ostringstream os;
    os << where << ": unphysical state (min eigenvalue " << lam
       << ", |Tr - 1| = " << tr_err << ", hermiticity error "
       << rho.hermiticity_error() << ")";
    throw NumericalError(os.str());
  }
}

Density propagate(const Liouvillian& L, const Density& rho0, double t) {
  require_same_layout(L.layout, rho0.layout, "propagate");
  if (t < 0) throw InvalidArgument("propagate: t must be >= 0");
  if (t == 0) return rho0;
  const Propagator P(L, t);
  Density out = unvectorize(L.layout, P.apply(vectorize(rho0)));
  check_physical(out, "propagate");
  return out;
}

Density steady_state(const Liouvillian& L) {
  const Index d = L.layout.total_dim();
  CMat A = L.matrix;
  CVec b = CVec::Zero(d * d);
  // Replace the first row by the trace functional.
  A.row(0).setZero();
  for (Index k = 0; k < d; ++k) A(0, k + d * k) = 1.0;
  b(0) = 1.0;
  const CVec v = A.partialPivLu().solve(b);
  Density rho = unvectorize(L.layout, v);
  rho.matrix = 0.5 * (rho.matrix + rho.matrix.adjoint()).eval();
  return rho;
}

std::vector<double> Trajectory::real_series(const std::string& name) const {
  const auto it = observables.find(name);
  if (it == observables.end()) {
    throw InvalidArgument("Trajectory: no observable named '" + name + "'");
  }
  std::vector<double> out;
  out.reserve(it->second.size());
  for (const auto& z : it->second) out.push_back(z.real());
  return out;
}

Trajectory evolve_observed(const Liouvillian& L, const Density& rho0,
                           std::span<const double> time_grid,
                           std::span<const NamedObservable> observables,
                           bool keep_states) {
  require_same_layout(L.layout, rho0.layout, "evolve_observed");
  if (time_grid.empty()) return {};
  if (time_grid.front() < 0) {
    throw InvalidArgument("evolve_observed: first grid time must be >= 0");
  }
  for (std::size_t k = 1; k < time_grid.size(); ++k) {
    if (!(time_grid[k] > time_grid[k - 1])) {
      throw InvalidArgument("evolve_observed: time grid must be strictly increasing");
    }
  }

  std::vector<Eigen::RowVectorXcd> functionals;
  for (const auto& o : observables) {
    require_same_layout(L.layout, o.op.layout, "evolve_observed");
    functionals.push_back(expectation_functional(o.op));
  }

  Trajectory traj;
  auto record = [&](double t, const CVec& v) {
    traj.times.push_back(t);
    for (std::size_t i = 0; i < observables.size(); ++i) {
      traj.observables[observables[i].name].push_back((functionals[i] * v).value());
    }
    if (keep_states) {
      traj.states.push_back(unvectorize(L.layout, v));
    }
  };

  CVec v = vectorize(rho0);
  if (time_grid.front() > 0) v = Propagator(L, time_grid.front()).apply(v);
  record(time_grid.front(), v);

  // One propagator per distinct step (uniform grids need a single one).
  std::optional<Propagator> cached;
  for (std::size_t k = 1; k < time_grid.size(); ++k) {
    const double dt = time_grid[k] - time_grid[k - 1];
    if (!cached || std::abs(cached->step() - dt) > 1e-12 * dt) {
      cached.emplace(L, dt);
    }
    v = cached->apply(v);
    record(time_grid[k], v);
  }
  check_physical(unvectorize(L.layout, v), "evolve_observed");
  return traj;
}

DecayFit fit_decay(std::span<const double> t, std::span<const double> y,
                   double first_efold, double last_efold,
                   double min_r_squared) {
  if (t.size() != y.size() || t.empty()) {
    throw InvalidArgument("fit_decay: series length mismatch or empty");
  }
  const double y0 = y.front();
  if (!(y0 > 0)) throw InvalidArgument("fit_decay: initial value must be > 0");
  const double hi = y0 * std::exp(-first_efold);
  const double lo = y0 * std::exp(-last_efold);

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (y[k] > hi) continue;
    if (y[k] < lo || !(y[k] > 0)) break;
    const double x = t[k];
    const double ly = std::log(y[k]);
    sx += x; sy += ly; sxx += x * x; sxy += x * ly; syy += ly * ly;
    ++n;
  }
  if (n < 5) {
    throw FitQualityError("fit_decay: fewer than 5 samples inside the fit window");
  }
  const double dn = static_cast<double>(n);
  const double cov = sxy - sx * sy / dn;
  const double varx = sxx - sx * sx / dn;
  const double vary = syy - sy * sy / dn;
  const double slope = cov / varx;
  DecayFit fit;
  fit.rate = -slope;
  fit.r_squared = vary > 0 ? cov * cov / (varx * vary) : 1.0;
  fit.points = n;
  if (fit.r_squared < min_r_squared) {
    std::ostringstream os;
    os << "fit_decay: poor exponential fit (R^2 = " << fit.r_squared << ")";
    throw FitQualityError(os.str());
  }
  return fit;
}

double fit_decay_rate(const Trajectory& traj, const std::string& observable) {
  const auto y = traj.real_series(observable);
  return fit_decay(traj.times, y).rate;
}

FockConvergence fock_convergence(const std::function<double(Index)>& headline,
                                 Index start_dim, double tol, Index max_dim) {
  if (start_dim < 2) throw InvalidArgument("fock_convergence: start_dim must be >= 2");
  double prev = headline(start_dim);
  for (Index n = start_dim; n < max_dim; ++n) {
    const double next = headline(n + 1);
    const double delta = std::abs(next - prev);
    if (delta < tol) return {n, prev, delta};
    prev = next;
  }
  throw ConvergenceError("fock_convergence: no convergence by fock_dim = " +
                         std::to_string(max_dim));
}

IntegratedSeries integrate_along(
    const Liouvillian& L, const Density& rho0,
    std::span<const double> report_times,
    const std::function<double(const CVec&)>& integrand, GeometricGrid grid) {
  require_same_layout(L.layout, rho0.layout, "integrate_along");
  for (std::size_t k = 0; k < report_times.size(); ++k) {
    if (!(report_times[k] > 0) || (k > 0 && !(report_times[k] > report_times[k - 1]))) {
      throw InvalidArgument("integrate_along: report times must be positive and increasing");
    }
  }
  if (!(grid.first_step > 0) || grid.per_segment < 1) {
    throw InvalidArgument("integrate_along: bad grid specification");
  }

  IntegratedSeries out;
  out.report_times.assign(report_times.begin(), report_times.end());
  out.cumulative.resize(report_times.size());
  if (report_times.empty()) return out;

  // At least 200 samples before the last report time.
  auto projected = [&](double h) {
    const double span = report_times.back() / (grid.per_segment * h) + 1.0;
    return grid.per_segment * std::ceil(std::log2(span));
  };
  double h = grid.first_step;
  while (projected(h) < 200) h /= 2;

  Propagator E(L, h);
  CVec v = vectorize(rho0);
  double t = 0;
  double f = integrand(v);
  double acc = 0;
  std::size_t next_report = 0;
  std::size_t points = 1;

  while (next_report < report_times.size()) {
    for (int s = 0; s < grid.per_segment && next_report < report_times.size(); ++s) {
      CVec vn = E.apply(v);
      const double tn = t + E.step();
      const double fn = integrand(vn);
      while (next_report < report_times.size() && report_times[next_report] <= tn) {
        const double tr = report_times[next_report];
        const double fr = f + (fn - f) * (tr - t) / (tn - t);
        out.cumulative[next_report] = acc + 0.5 * (tr - t) * (f + fr);
        ++next_report;
      }
      acc += 0.5 * (tn - t) * (f + fn);
      v = std::move(vn);
      t = tn;
      f = fn;
      ++points;
    }
    if (next_report < report_times.size()) E = E.doubled();
  }
  check_physical(unvectorize(L.layout, v), "integrate_along");
  out.grid_points = points;
  return out;
}

} // namespace cqed
