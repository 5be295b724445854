#ifndef DEARANK_DEA_HPP
#define DEARANK_DEA_HPP

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dearank/linprog.hpp"
#include "dearank/ranking.hpp"

namespace dearank::dea {

/// One period of observed units: N rows of I inputs and J outputs.
struct CrossSection {
  std::vector<std::string> labels;  // optional; sized N when present
  Eigen::MatrixXd inputs;           // N x I, strictly positive
  Eigen::MatrixXd outputs;          // N x J, nonnegative, each row has a positive entry

  Eigen::Index num_units() const { return inputs.rows(); }
  Eigen::Index num_inputs() const { return inputs.cols(); }
  Eigen::Index num_outputs() const { return outputs.cols(); }

  void validate() const;
};

enum class Model { Ccr, Ap, H, Log };

std::string to_string(Model m);
Model model_from_string(const std::string& name);

/// Stand-in for an unbounded super-efficiency score; always accompanied by
/// an Unbounded status. It ranks first and maps to 2 under the H transform.
inline constexpr double kUnboundedScore = std::numeric_limits<double>::max();

struct ScoreResult {
  double score = std::numeric_limits<double>::quiet_NaN();
  lp::Status status = lp::Status::IterationLimit;
};

/// Input-oriented multiplier-form efficiency under constant returns to
/// scale, in [0, 1]; 1 marks the (weakly) efficient units.
ScoreResult ccr_score(const CrossSection& cs, Eigen::Index unit, const lp::Options& opts = {});

/// Super-efficiency variant: the evaluated unit is excluded from the
/// benchmark set, so efficient units score above 1. May be unbounded.
ScoreResult ap_score(const CrossSection& cs, Eigen::Index unit, const lp::Options& opts = {});

/// Chebyshev-norm style score normalized to [0, 2]; inefficient units land
/// in [0, 1), efficient ones in [1, 2]. Solved by its own program so the
/// algebraic relation to the super-efficiency score stays a cross-check.
ScoreResult h_score(const CrossSection& cs, Eigen::Index unit, const lp::Options& opts = {});

/// theta_h = 2 theta_ap / (1 + theta_ap) and its inverse.
double ap_to_h(double theta_ap);
double h_to_ap(double theta_h);

/// Natural log of the super-efficiency score (equals the logit-style
/// transform of the H score).
double log_score(double theta_ap);

/// Rank 0 = most efficient; exact ties break by unit index with a warning.
Ranking rank_cross_section(const Eigen::VectorXd& scores,
                           std::vector<std::string>* warnings = nullptr);

struct EfficiencyPanel {
  Model model = Model::Ccr;
  Eigen::MatrixXd scores;           // N x T
  std::vector<lp::Status> statuses; // N*T, column-major like `scores`

  lp::Status status(Eigen::Index unit, Eigen::Index t) const {
    return statuses[static_cast<std::size_t>(unit + scores.rows() * t)];
  }
  bool all_optimal() const;
};

/// Independent cross-sectional solves for every period. Per-cell solver
/// failures are recorded in `statuses`, not thrown. Deterministic for any
/// thread count.
EfficiencyPanel efficiency_panel(std::span<const CrossSection> sections, Model model,
                                 const lp::Options& opts = {}, int threads = 1);

/// Per-period rankings of an efficiency panel.
RankingSeries rankings_from_panel(const EfficiencyPanel& panel,
                                  std::vector<std::string>* warnings = nullptr);

}  // namespace dearank::dea

#endif  // DEARANK_DEA_HPP
