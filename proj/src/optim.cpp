#include "dearank/optim.hpp"

#include <cmath>
#include <limits>

namespace dearank::optim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double guarded(const Objective& f, const Eigen::VectorXd& x) {
  const double v = f(x);
  return std::isfinite(v) ? v : kInf;
}

}  // namespace

Eigen::VectorXd fd_gradient(const Objective& f, const Eigen::VectorXd& x, double step) {
  const Eigen::Index p = x.size();
  Eigen::VectorXd g(p);
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < p; ++i) {
    const double h = step * std::max(1.0, std::abs(x[i]));
    xp[i] = x[i] + h;
    const double fp = guarded(f, xp);
    xp[i] = x[i] - h;
    const double fm = guarded(f, xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

Eigen::MatrixXd fd_hessian(const Objective& f, const Eigen::VectorXd& x, double step) {
  const Eigen::Index p = x.size();
  Eigen::VectorXd h(p);
  for (Eigen::Index i = 0; i < p; ++i) h[i] = step * std::max(1.0, std::abs(x[i]));

  const double f0 = guarded(f, x);
  Eigen::MatrixXd hess(p, p);
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < p; ++i) {
    xp[i] = x[i] + h[i];
    const double fp = guarded(f, xp);
    xp[i] = x[i] - h[i];
    const double fm = guarded(f, xp);
    xp[i] = x[i];
    hess(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
  }
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      xp[i] = x[i] + h[i];
      xp[j] = x[j] + h[j];
      const double fpp = guarded(f, xp);
      xp[j] = x[j] - h[j];
      const double fpm = guarded(f, xp);
      xp[i] = x[i] - h[i];
      xp[j] = x[j] + h[j];
      const double fmp = guarded(f, xp);
      xp[j] = x[j] - h[j];
      const double fmm = guarded(f, xp);
      xp[i] = x[i];
      xp[j] = x[j];
      const double v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
      hess(i, j) = v;
      hess(j, i) = v;
    }
  }
  return hess;
}

Result minimize(const Objective& f, Eigen::VectorXd x0, const Options& opts) {
  const Eigen::Index p = x0.size();
  Result res;
  res.x = std::move(x0);
  res.value = guarded(f, res.x);
  if (!std::isfinite(res.value)) return res;  // hopeless start
  res.gradient = fd_gradient(f, res.x, opts.fd_step);

  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(p, p);
  auto converged = [&](double fx, const Eigen::VectorXd& g) {
    return g.lpNorm<Eigen::Infinity>() <= opts.grad_tol * std::max(1.0, std::abs(fx));
  };

  for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
    if (converged(res.value, res.gradient)) {
      res.converged = true;
      return res;
    }

    Eigen::VectorXd dir = -(hinv * res.gradient);
    double slope = dir.dot(res.gradient);
    if (!(slope < 0.0)) {  // lost curvature, restart from steepest descent
      hinv.setIdentity();
      dir = -res.gradient;
      slope = dir.dot(res.gradient);
    }

    // Backtracking Armijo search.
    double t = 1.0;
    double fnew = kInf;
    Eigen::VectorXd xnew;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      xnew = res.x + t * dir;
      fnew = guarded(f, xnew);
      if (fnew <= res.value + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // Try a fresh steepest-descent direction once before giving up.
      if ((hinv - Eigen::MatrixXd::Identity(p, p)).norm() > 0.0) {
        hinv.setIdentity();
        continue;
      }
      break;
    }

    const Eigen::VectorXd gnew = fd_gradient(f, xnew, opts.fd_step);
    const Eigen::VectorXd s = xnew - res.x;
    const Eigen::VectorXd yv = gnew - res.gradient;
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::VectorXd vhy = hinv * yv;
      // Sherman-Morrison form of the inverse BFGS update.
      hinv += (sy + yv.dot(vhy)) * rho * rho * (s * s.transpose()) -
              rho * (vhy * s.transpose() + s * vhy.transpose());
    }
    res.x = xnew;
    res.value = fnew;
    res.gradient = gnew;
  }

  res.converged = converged(res.value, res.gradient);
  return res;
}

}  // namespace dearank::optim
