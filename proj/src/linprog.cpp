#include "dearank/linprog.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace dearank::lp {

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

void LinearProgram::validate() const {
  const Eigen::Index n = objective.size();
  const Eigen::Index m = rhs.size();
  if (n == 0) throw ValidationError("linear program has no variables");
  if (constraints.rows() != m || static_cast<Eigen::Index>(senses.size()) != m)
    throw ValidationError("linear program row counts disagree");
  if (m > 0 && constraints.cols() != n)
    throw ValidationError("constraint matrix column count does not match objective length");
  if (lower_bounds.size() != 0 && lower_bounds.size() != n)
    throw ValidationError("lower bound vector length does not match variable count");
  if (lower_bounds.size() != 0 && !lower_bounds.allFinite())
    throw ValidationError("every variable requires a finite lower bound");
  if (!objective.allFinite() || (m > 0 && !constraints.allFinite()) || !rhs.allFinite())
    throw ValidationError("linear program contains non-finite data");
}

namespace {

// Simplex working state over the standardized columns.
struct Tableau {
  Eigen::MatrixXd A;   // m x ncols, rows already sign-normalized so b >= 0
  Eigen::VectorXd b;
  std::vector<Eigen::Index> basis;  // one column per row
  Eigen::MatrixXd Binv;
  Eigen::VectorXd xB;
  int pivots_used = 0;

  void refactorize() {
    const Eigen::Index m = b.size();
    Eigen::MatrixXd B(m, m);
    for (Eigen::Index i = 0; i < m; ++i) B.col(i) = A.col(basis[i]);
    Binv = B.partialPivLu().inverse();
    xB = Binv * b;
  }
};

enum class LoopResult { Optimal, Unbounded, IterationLimit };

// Maximizes cost' x over the tableau from the current basis. `enterable[j]`
// gates which columns may enter (artificials are locked out in phase 2).
LoopResult run_simplex(Tableau& t, const Eigen::VectorXd& cost, const std::vector<char>& enterable,
                       const Options& opts) {
  const Eigen::Index m = t.b.size();
  const Eigen::Index ncols = t.A.cols();
  std::vector<char> in_basis(ncols, 0);
  for (Eigen::Index i = 0; i < m; ++i) in_basis[t.basis[i]] = 1;

  Eigen::VectorXd cB(m);
  auto refresh_cB = [&]() {
    for (Eigen::Index i = 0; i < m; ++i) cB[i] = cost[t.basis[i]];
  };
  refresh_cB();

  bool bland = false;
  int stalled = 0;
  const int stall_limit = static_cast<int>(2 * (m + ncols));
  double last_obj = cB.dot(t.xB);

  while (t.pivots_used < opts.max_pivots) {
    const Eigen::VectorXd y = t.Binv.transpose() * cB;

    // Pricing: Dantzig by default, Bland once the objective stalls.
    Eigen::Index entering = -1;
    double best = opts.opt_tol;
    for (Eigen::Index j = 0; j < ncols; ++j) {
      if (in_basis[j] || !enterable[j]) continue;
      const double d = cost[j] - y.dot(t.A.col(j));
      if (d > best) {
        entering = j;
        if (bland) break;
        best = d;
      }
    }
    if (entering < 0) return LoopResult::Optimal;

    const Eigen::VectorXd w = t.Binv * t.A.col(entering);

    // Ratio test; smallest basis label breaks ties (part of Bland's rule).
    Eigen::Index leaving_row = -1;
    double best_ratio = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (w[i] <= opts.pivot_tol) continue;
      const double ratio = t.xB[i] / w[i];
      if (leaving_row < 0 || ratio < best_ratio - 1e-12 ||
          (ratio <= best_ratio + 1e-12 && t.basis[i] < t.basis[leaving_row])) {
        leaving_row = i;
        best_ratio = ratio;
      }
    }
    if (leaving_row < 0) return LoopResult::Unbounded;

    const double step = t.xB[leaving_row] / w[leaving_row];
    t.xB -= step * w;
    t.xB[leaving_row] = step;
    t.Binv.row(leaving_row) /= w[leaving_row];
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i == leaving_row) continue;
      t.Binv.row(i) -= w[i] * t.Binv.row(leaving_row);
    }
    in_basis[t.basis[leaving_row]] = 0;
    in_basis[entering] = 1;
    t.basis[leaving_row] = entering;
    cB[leaving_row] = cost[entering];
    ++t.pivots_used;

    if (t.pivots_used % 100 == 0) {
      t.refactorize();
      refresh_cB();
    }

    const double obj = cB.dot(t.xB);
    if (obj > last_obj + 1e-12) {
      stalled = 0;
      last_obj = obj;
    } else if (++stalled > stall_limit) {
      bland = true;
    }
  }
  return LoopResult::IterationLimit;
}

}  // namespace

Solution solve(const LinearProgram& lp, const Options& opts) {
  lp.validate();
  const Eigen::Index n = lp.num_vars();
  const Eigen::Index m = lp.num_rows();
  const Eigen::VectorXd lb =
      lp.lower_bounds.size() == 0 ? Eigen::VectorXd::Zero(n) : lp.lower_bounds;

  Solution sol;

  // Unconstrained corner case: optimum sits at the lower bounds unless some
  // objective coefficient is positive.
  if (m == 0) {
    if ((lp.objective.array() > opts.opt_tol).any()) {
      sol.status = Status::Unbounded;
      return sol;
    }
    sol.status = Status::Optimal;
    sol.primal = lb;
    sol.objective_value = lp.objective.dot(lb);
    sol.duals = Eigen::VectorXd(0);
    return sol;
  }

  // Shift x = x' + lb so x' >= 0, append one slack per inequality, then flip
  // rows until the right-hand side is nonnegative.
  Eigen::Index n_slack = 0;
  for (Sense s : lp.senses)
    if (s != Sense::Eq) ++n_slack;

  Eigen::VectorXd b = lp.rhs - lp.constraints * lb;
  Eigen::VectorXd flip = Eigen::VectorXd::Ones(m);

  Eigen::MatrixXd A(m, n + n_slack);
  A.setZero();
  A.leftCols(n) = lp.constraints;
  {
    Eigen::Index sc = n;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (lp.senses[i] == Sense::Eq) continue;
      A(i, sc) = lp.senses[i] == Sense::Le ? 1.0 : -1.0;
      ++sc;
    }
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (b[i] < 0.0) {
      A.row(i) = -A.row(i);
      b[i] = -b[i];
      flip[i] = -1.0;
    }
  }

  // Start from slack columns where they give a unit column; rows without one
  // get an artificial variable and trigger phase 1.
  std::vector<Eigen::Index> basis(m, -1);
  std::vector<Eigen::Index> art_rows;
  {
    Eigen::Index sc = n;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (lp.senses[i] != Sense::Eq) {
        if (A(i, sc) > 0.5)
          basis[i] = sc;
        else
          art_rows.push_back(i);
        ++sc;
      } else {
        art_rows.push_back(i);
      }
    }
  }

  const Eigen::Index n_art = static_cast<Eigen::Index>(art_rows.size());
  Tableau t;
  t.A.resize(m, n + n_slack + n_art);
  t.A.setZero();
  t.A.leftCols(n + n_slack) = A;
  for (Eigen::Index k = 0; k < n_art; ++k) {
    t.A(art_rows[k], n + n_slack + k) = 1.0;
    basis[art_rows[k]] = n + n_slack + k;
  }
  t.b = b;
  t.basis = basis;
  t.refactorize();

  const Eigen::Index ncols = t.A.cols();
  std::vector<char> enterable(ncols, 1);

  if (n_art > 0) {
    Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(ncols);
    phase1_cost.tail(n_art).setConstant(-1.0);
    const LoopResult r = run_simplex(t, phase1_cost, enterable, opts);
    if (r == LoopResult::IterationLimit || r == LoopResult::Unbounded) {
      sol.status = Status::IterationLimit;
      return sol;
    }
    double infeas = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
      if (t.basis[i] >= n + n_slack) infeas += t.xB[i];
    if (infeas > opts.feas_tol * std::max(1.0, b.lpNorm<1>())) {
      sol.status = Status::Infeasible;
      return sol;
    }
    // Pivot leftover artificials out where a real column is available; a row
    // with none is redundant and keeps its zero-valued artificial.
    for (Eigen::Index i = 0; i < m; ++i) {
      if (t.basis[i] < n + n_slack) continue;
      const Eigen::VectorXd row = t.Binv.row(i) * t.A.leftCols(n + n_slack);
      Eigen::Index pivot_col = -1;
      for (Eigen::Index j = 0; j < n + n_slack; ++j) {
        if (std::abs(row[j]) > 1e3 * opts.pivot_tol) {
          bool basic = false;
          for (Eigen::Index k = 0; k < m; ++k)
            if (t.basis[k] == j) basic = true;
          if (!basic) {
            pivot_col = j;
            break;
          }
        }
      }
      if (pivot_col < 0) continue;
      const Eigen::VectorXd w = t.Binv * t.A.col(pivot_col);
      t.Binv.row(i) /= w[i];
      for (Eigen::Index k = 0; k < m; ++k) {
        if (k == i) continue;
        t.Binv.row(k) -= w[k] * t.Binv.row(i);
      }
      t.basis[i] = pivot_col;
      t.xB = t.Binv * t.b;
    }
    for (Eigen::Index j = n + n_slack; j < ncols; ++j) enterable[j] = 0;
  }

  Eigen::VectorXd cost = Eigen::VectorXd::Zero(ncols);
  cost.head(n) = lp.objective;
  const LoopResult r = run_simplex(t, cost, enterable, opts);
  if (r == LoopResult::IterationLimit) {
    sol.status = Status::IterationLimit;
    return sol;
  }
  if (r == LoopResult::Unbounded) {
    sol.status = Status::Unbounded;
    return sol;
  }

  t.refactorize();

  Eigen::VectorXd x_std = Eigen::VectorXd::Zero(ncols);
  for (Eigen::Index i = 0; i < m; ++i) x_std[t.basis[i]] = t.xB[i];
  const Eigen::VectorXd x = x_std.head(n) + lb;

  // An Optimal status promises a feasible point; surface numerical trouble
  // as IterationLimit rather than returning a bad vertex.
  for (Eigen::Index i = 0; i < m; ++i) {
    const double lhs = lp.constraints.row(i).dot(x);
    const double tol = opts.feas_tol * std::max(1.0, std::abs(lp.rhs[i])) * 10.0;
    const double viol = lp.senses[i] == Sense::Le   ? lhs - lp.rhs[i]
                        : lp.senses[i] == Sense::Ge ? lp.rhs[i] - lhs
                                                    : std::abs(lhs - lp.rhs[i]);
    if (viol > tol) {
      sol.status = Status::IterationLimit;
      return sol;
    }
  }
  if ((x_std.array() < -opts.feas_tol * 10.0).any()) {
    sol.status = Status::IterationLimit;
    return sol;
  }

  Eigen::VectorXd cB(m);
  for (Eigen::Index i = 0; i < m; ++i) cB[i] = cost[t.basis[i]];
  const Eigen::VectorXd y = t.Binv.transpose() * cB;

  sol.status = Status::Optimal;
  sol.primal = x;
  sol.objective_value = lp.objective.dot(x);
  sol.duals = flip.asDiagonal() * y;
  return sol;
}

}  // namespace dearank::lp
