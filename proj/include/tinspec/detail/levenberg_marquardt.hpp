#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace tinspec::detail {

struct LmOptions {
  int max_iterations = 200;
  double residual_target = 1e-12;  // absolute stop on ||r||
  double min_step = 1e-14;         // relative step size stop
  double fd_step = 1e-6;           // central-difference step (relative)
};

struct LmResult {
  Eigen::VectorXd x;
  Eigen::VectorXd residual;
  double norm = 0.0;
  int iterations = 0;
  bool reached_target = false;
};

/// Levenberg-Marquardt on ||r(x)||^2 with a central finite-difference
/// Jacobian and Marquardt diagonal scaling.
template <class Residual>
LmResult levenberg_marquardt(Residual&& residual, Eigen::VectorXd x, const LmOptions& opt) {
  Eigen::VectorXd r = residual(x);
  double cost = r.squaredNorm();
  double mu = 1e-3;
  LmResult out;

  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    if (std::sqrt(cost) <= opt.residual_target) break;

    const auto n = x.size();
    Eigen::MatrixXd jac(r.size(), n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double h = opt.fd_step * std::max(1.0, std::abs(x(j)));
      Eigen::VectorXd xp = x, xm = x;
      xp(j) += h;
      xm(j) -= h;
      jac.col(j) = (residual(xp) - residual(xm)) / (2.0 * h);
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * r;
    Eigen::VectorXd diag = jtj.diagonal().cwiseMax(1e-12);

    bool improved = false;
    for (int tries = 0; tries < 30; ++tries) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += mu * diag;
      const Eigen::VectorXd step = a.ldlt().solve(-g);
      const Eigen::VectorXd xn = x + step;
      const Eigen::VectorXd rn = residual(xn);
      const double cn = rn.squaredNorm();
      if (std::isfinite(cn) && cn < cost) {
        const double rel = step.norm() / std::max(1.0, x.norm());
        x = xn;
        r = rn;
        cost = cn;
        mu = std::max(mu / 3.0, 1e-12);
        improved = true;
        if (rel < opt.min_step) it = opt.max_iterations;
        break;
      }
      mu *= 4.0;
    }
    if (!improved) break;
  }

  out.x = std::move(x);
  out.residual = std::move(r);
  out.norm = std::sqrt(cost);
  out.iterations = std::min(it, opt.max_iterations);
  out.reached_target = out.norm <= opt.residual_target;
  return out;
}

}  // namespace tinspec::detail
