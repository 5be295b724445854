#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>

#include "dearank/common.hpp"
#include "dearank/linprog.hpp"

using dearank::Rng;
namespace lp = dearank::lp;

namespace {

lp::LinearProgram make_lp(const Eigen::MatrixXd& a, const std::vector<lp::Sense>& senses,
                          const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  lp::LinearProgram prog;
  prog.objective = c;
  prog.constraints = a;
  prog.senses = senses;
  prog.rhs = b;
  return prog;
}

// Independent oracle: enumerate every potential vertex as an intersection of
// n tight hyperplanes (constraint rows and lower bounds) and keep the best
// feasible one. Only valid for programs known to be bounded.
struct BruteResult {
  bool feasible = false;
  double value = -std::numeric_limits<double>::infinity();
};

BruteResult brute_force(const lp::LinearProgram& prog) {
  const Eigen::Index n = prog.num_vars();
  const Eigen::Index m = prog.num_rows();
  const Eigen::VectorXd lb =
      prog.lower_bounds.size() ? prog.lower_bounds : Eigen::VectorXd::Zero(n);

  // hyperplanes: rows 0..m-1 then bounds m..m+n-1
  const Eigen::Index total = m + n;
  std::vector<Eigen::Index> pick(static_cast<std::size_t>(n));
  BruteResult best;

  std::function<void(Eigen::Index, Eigen::Index)> recurse = [&](Eigen::Index start,
                                                                Eigen::Index depth) {
    if (depth == n) {
      Eigen::MatrixXd a(n, n);
      Eigen::VectorXd rhs(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index hp = pick[static_cast<std::size_t>(i)];
        if (hp < m) {
          a.row(i) = prog.constraints.row(hp);
          rhs[i] = prog.rhs[hp];
        } else {
          a.row(i).setZero();
          a(i, hp - m) = 1.0;
          rhs[i] = lb[hp - m];
        }
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      if (!lu.isInvertible()) return;
      const Eigen::VectorXd x = lu.solve(rhs);
      for (Eigen::Index i = 0; i < m; ++i) {
        const double lhs = prog.constraints.row(i).dot(x);
        const double tol = 1e-7 * std::max(1.0, std::abs(prog.rhs[i]));
        if (prog.senses[i] == lp::Sense::Le && lhs > prog.rhs[i] + tol) return;
        if (prog.senses[i] == lp::Sense::Ge && lhs < prog.rhs[i] - tol) return;
        if (prog.senses[i] == lp::Sense::Eq && std::abs(lhs - prog.rhs[i]) > tol) return;
      }
      if (((x - lb).array() < -1e-7).any()) return;
      best.feasible = true;
      best.value = std::max(best.value, prog.objective.dot(x));
      return;
    }
    for (Eigen::Index hp = start; hp < total; ++hp) {
      pick[static_cast<std::size_t>(depth)] = hp;
      recurse(hp + 1, depth + 1);
    }
  };
  recurse(0, 0);
  return best;
}

}  // namespace

TEST_CASE("one-variable box") {
  Eigen::MatrixXd a(1, 1);
  a << 1.0;
  auto prog = make_lp(a, {lp::Sense::Le}, Eigen::VectorXd::Constant(1, 1.0),
                      Eigen::VectorXd::Constant(1, 1.0));
  const lp::Solution s = lp::solve(prog);
  REQUIRE(s.status == lp::Status::Optimal);
  CHECK(s.objective_value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.primal[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("contradictory constraints are infeasible") {
  Eigen::MatrixXd a(2, 1);
  a << 1.0, 1.0;
  Eigen::VectorXd b(2);
  b << 2.0, 1.0;
  auto prog = make_lp(a, {lp::Sense::Ge, lp::Sense::Le}, b, Eigen::VectorXd::Constant(1, 1.0));
  CHECK(lp::solve(prog).status == lp::Status::Infeasible);
}

TEST_CASE("hand-solved two-variable program with an equality row") {
  // maximize 2u subject to v = 1, u - v <= 0, u,v >= 0
  Eigen::MatrixXd a(2, 2);
  a << 0.0, 1.0, 1.0, -1.0;
  Eigen::VectorXd b(2);
  b << 1.0, 0.0;
  Eigen::VectorXd c(2);
  c << 2.0, 0.0;
  const lp::Solution s = lp::solve(make_lp(a, {lp::Sense::Eq, lp::Sense::Le}, b, c));
  REQUIRE(s.status == lp::Status::Optimal);
  CHECK(s.objective_value == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(s.primal[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(s.primal[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("unbounded direction is reported") {
  Eigen::MatrixXd a(1, 2);
  a << 0.0, 1.0;
  auto prog = make_lp(a, {lp::Sense::Le}, Eigen::VectorXd::Constant(1, 1.0),
                      (Eigen::VectorXd(2) << 1.0, 0.0).finished());
  CHECK(lp::solve(prog).status == lp::Status::Unbounded);
}

TEST_CASE("pivot cap surfaces as iteration limit") {
  Eigen::MatrixXd a(3, 3);
  a << 1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 1.0;
  Eigen::VectorXd b = Eigen::VectorXd::Constant(3, 1.0);
  auto prog = make_lp(a, {lp::Sense::Le, lp::Sense::Le, lp::Sense::Le}, b,
                      Eigen::VectorXd::Constant(3, 1.0));
  lp::Options opts;
  opts.max_pivots = 1;
  CHECK(lp::solve(prog, opts).status == lp::Status::IterationLimit);
}

TEST_CASE("random bounded programs match the vertex oracle") {
  Rng rng(20240811);
  int optimal_seen = 0;
  int infeasible_seen = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.below(3));
    const Eigen::Index m = 2 + static_cast<Eigen::Index>(rng.below(3));
    Eigen::MatrixXd a(m + 1, n);
    Eigen::VectorXd b(m + 1);
    Eigen::VectorXd c(n);
    std::vector<lp::Sense> senses;
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
      b[i] = rng.uniform(-0.5, 1.5);
      const double pick = rng.uniform01();
      senses.push_back(pick < 0.6 ? lp::Sense::Le : pick < 0.85 ? lp::Sense::Ge : lp::Sense::Eq);
    }
    // keep the region bounded so the oracle is exhaustive
    a.row(m).setOnes();
    b[m] = 10.0;
    senses.push_back(lp::Sense::Le);
    for (Eigen::Index j = 0; j < n; ++j) c[j] = rng.uniform(-1.0, 1.0);

    const auto prog = make_lp(a, senses, b, c);
    const lp::Solution got = lp::solve(prog);
    const BruteResult want = brute_force(prog);
    if (want.feasible) {
      REQUIRE(got.status == lp::Status::Optimal);
      CHECK(got.objective_value ==
            doctest::Approx(want.value).epsilon(1e-8).scale(std::max(1.0, std::abs(want.value))));
      ++optimal_seen;
    } else {
      REQUIRE(got.status == lp::Status::Infeasible);
      ++infeasible_seen;
    }
  }
  CHECK(optimal_seen > 20);
  CHECK(infeasible_seen > 5);
}

TEST_CASE("duals satisfy complementary slackness and strong duality") {
  Rng rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    const Eigen::Index n = 3 + static_cast<Eigen::Index>(rng.below(3));
    const Eigen::Index m = 3 + static_cast<Eigen::Index>(rng.below(4));
    Eigen::MatrixXd a(m + 1, n);
    Eigen::VectorXd b(m + 1);
    Eigen::VectorXd c(n);
    std::vector<lp::Sense> senses;
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rng.uniform(0.0, 1.0);
      b[i] = rng.uniform(0.5, 2.0);
      senses.push_back(rng.uniform01() < 0.8 ? lp::Sense::Le : lp::Sense::Eq);
    }
    a.row(m).setOnes();
    b[m] = 25.0;
    senses.push_back(lp::Sense::Le);
    for (Eigen::Index j = 0; j < n; ++j) c[j] = rng.uniform(-0.2, 1.0);

    const auto prog = make_lp(a, senses, b, c);
    const lp::Solution s = lp::solve(prog);
    if (s.status != lp::Status::Optimal) continue;

    // primal feasibility
    for (Eigen::Index i = 0; i <= m; ++i) {
      const double lhs = a.row(i).dot(s.primal);
      if (senses[static_cast<std::size_t>(i)] == lp::Sense::Le) CHECK(lhs <= b[i] + 1e-8);
      if (senses[static_cast<std::size_t>(i)] == lp::Sense::Eq)
        CHECK(lhs == doctest::Approx(b[i]).epsilon(1e-8));
    }
    CHECK((s.primal.array() >= -1e-9).all());

    // row complementary slackness and dual sign
    for (Eigen::Index i = 0; i <= m; ++i) {
      const double slack = b[i] - a.row(i).dot(s.primal);
      CHECK(std::abs(s.duals[i] * slack) <= 1e-7 * std::max(1.0, std::abs(b[i])));
      if (senses[static_cast<std::size_t>(i)] == lp::Sense::Le) CHECK(s.duals[i] >= -1e-7);
    }
    // column complementary slackness and dual feasibility
    const Eigen::VectorXd reduced = c - a.transpose() * s.duals;
    for (Eigen::Index j = 0; j < n; ++j) {
      CHECK(reduced[j] <= 1e-7);
      CHECK(std::abs(reduced[j] * s.primal[j]) <= 1e-7);
    }
    // strong duality (all lower bounds are zero here)
    CHECK(s.objective_value ==
          doctest::Approx(s.duals.dot(b)).epsilon(1e-7).scale(std::max(1.0, std::abs(b.sum()))));
  }
}

TEST_CASE("scaling the rhs or the objective scales the optimum") {
  Rng rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::Index n = 3;
    const Eigen::Index m = 4;
    Eigen::MatrixXd a(m, n);
    Eigen::VectorXd b(m);
    Eigen::VectorXd c(n);
    std::vector<lp::Sense> senses(m, lp::Sense::Le);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rng.uniform(0.2, 1.0);
      b[i] = rng.uniform(0.5, 2.0);
    }
    for (Eigen::Index j = 0; j < n; ++j) c[j] = rng.uniform(0.1, 1.0);
    const double scale = rng.uniform(0.5, 4.0);

    const lp::Solution base = lp::solve(make_lp(a, senses, b, c));
    REQUIRE(base.status == lp::Status::Optimal);

    const lp::Solution rhs_scaled = lp::solve(make_lp(a, senses, scale * b, c));
    REQUIRE(rhs_scaled.status == lp::Status::Optimal);
    CHECK(rhs_scaled.objective_value ==
          doctest::Approx(scale * base.objective_value).epsilon(1e-7));

    const lp::Solution obj_scaled = lp::solve(make_lp(a, senses, b, scale * c));
    REQUIRE(obj_scaled.status == lp::Status::Optimal);
    CHECK(obj_scaled.objective_value ==
          doctest::Approx(scale * base.objective_value).epsilon(1e-7));
  }
}

TEST_CASE("validation rejects inconsistent dimensions") {
  lp::LinearProgram prog;
  prog.objective = Eigen::VectorXd::Ones(2);
  prog.constraints = Eigen::MatrixXd::Ones(1, 3);
  prog.senses = {lp::Sense::Le};
  prog.rhs = Eigen::VectorXd::Ones(1);
  CHECK_THROWS_AS(lp::solve(prog), dearank::ValidationError);
}
