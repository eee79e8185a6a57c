#pragma once

// Nelder-Mead downhill simplex (standard reflection/expansion/contraction/
// shrink coefficients 1, 2, 1/2, 1/2).

#include <Eigen/Core>

#include <algorithm>
#include <numeric>
#include <vector>

namespace cqed {

struct SimplexOptions {
  double initial_step = 0.1;
  double x_tol = 1e-9;
  double f_tol = 1e-13;
  int max_evaluations = 4000;
};

struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0;
  int evaluations = 0;
  bool converged = false;
};

template <typename Fn>
SimplexResult nelder_mead_minimize(Fn&& f, const Eigen::VectorXd& x0,
                                   const SimplexOptions& opt = {}) {
  const auto n = x0.size();
  std::vector<Eigen::VectorXd> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) pts[i + 1](i) += opt.initial_step;
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) { ++evals; return f(x); };
  for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = eval(pts[i]);

  std::vector<std::size_t> order(n + 1);
  SimplexResult res;
  while (evals < opt.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return vals[a] < vals[b]; });
    const auto best = order.front(), worst = order.back(), second = order[n - 1];

    double size = 0;
    for (const auto& p : pts) size = std::max(size, (p - pts[best]).cwiseAbs().maxCoeff());
    if (size < opt.x_tol && vals[worst] - vals[best] < opt.f_tol) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (auto i : order) if (i != worst) centroid += pts[i];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd xr = centroid + (centroid - pts[worst]);
    const double fr = eval(xr);
    if (fr < vals[best]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = eval(xe);
      if (fe < fr) { pts[worst] = xe; vals[worst] = fe; }
      else { pts[worst] = xr; vals[worst] = fr; }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                                       : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
    const double fc = eval(xc);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    for (auto i : order) {
      if (i == best) continue;
      pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
      vals[i] = eval(pts[i]);
    }
  }
  const auto it = std::min_element(vals.begin(), vals.end());
  res.x = pts[static_cast<std::size_t>(it - vals.begin())];
  res.value = *it;
  res.evaluations = evals;
  return res;
}

} // namespace cqed
