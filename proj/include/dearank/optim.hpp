#ifndef DEARANK_OPTIM_HPP
#define DEARANK_OPTIM_HPP

#include <functional>

#include <Eigen/Core>

namespace dearank::optim {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct Options {
  int max_iterations = 500;
  double grad_tol = 1e-5;    // on ||g||_inf / max(1, |f|)
  double fd_step = 1e-6;     // central-difference step, scaled by max(1, |x_i|)
};

struct Result {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  int iterations = 0;
  bool converged = false;
};

/// Central finite-difference gradient with per-coordinate step
/// step * max(1, |x_i|).
Eigen::VectorXd fd_gradient(const Objective& f, const Eigen::VectorXd& x, double step);

/// Central second differences, symmetrized.
Eigen::MatrixXd fd_hessian(const Objective& f, const Eigen::VectorXd& x, double step);

/// BFGS minimization with numerical gradients and backtracking line search.
/// Non-finite objective values act as an infinite barrier.
Result minimize(const Objective& f, Eigen::VectorXd x0, const Options& opts = {});

}  // namespace dearank::optim

#endif  // DEARANK_OPTIM_HPP
