#ifndef DEARANK_LINPROG_HPP
#define DEARANK_LINPROG_HPP

#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dearank/common.hpp"

namespace dearank::lp {

enum class Sense { Le, Ge, Eq };

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

std::string to_string(Status s);

struct Options {
  double pivot_tol = 1e-9;  // minimum magnitude of an eligible pivot element
  double feas_tol = 1e-9;   // primal feasibility tolerance
  double opt_tol = 1e-9;    // reduced-cost tolerance for optimality
  int max_pivots = 10000;
};

/// Dense LP: maximize objective' x subject to constraints x {<=,>=,=} rhs
/// and x >= lower_bounds (zeros when left empty). Every variable carries a
/// finite lower bound.
struct LinearProgram {
  Eigen::VectorXd objective;
  Eigen::MatrixXd constraints;
  std::vector<Sense> senses;
  Eigen::VectorXd rhs;
  Eigen::VectorXd lower_bounds;  // empty means all zeros

  Eigen::Index num_vars() const { return objective.size(); }
  Eigen::Index num_rows() const { return rhs.size(); }

  // Throws ValidationError on dimension mismatch or non-finite bounds.
  void validate() const;
};

struct Solution {
  Status status = Status::IterationLimit;
  double objective_value = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd primal;  // set iff Optimal
  Eigen::VectorXd duals;   // one multiplier per original row, set iff Optimal

  bool optimal() const { return status == Status::Optimal; }
};

/// Two-phase revised simplex on the dense standard form. Pure function of
/// its inputs; safe to call concurrently on distinct programs.
Solution solve(const LinearProgram& lp, const Options& opts = {});

}  // namespace dearank::lp

#endif  // DEARANK_LINPROG_HPP
