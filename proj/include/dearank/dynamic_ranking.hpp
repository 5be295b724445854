#ifndef DEARANK_DYNAMIC_RANKING_HPP
#define DEARANK_DYNAMIC_RANKING_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dearank/common.hpp"
#include "dearank/plackett_luce.hpp"
#include "dearank/ranking.hpp"

namespace dearank::drm {

/// Observed rankings plus per-period covariate matrices (T entries of
/// N x K; leave empty for a covariate-free model).
struct DrmData {
  RankingSeries rankings;
  std::vector<Eigen::MatrixXd> covariates;

  Eigen::Index num_units() const { return rankings.num_units(); }
  Eigen::Index num_periods() const { return rankings.num_periods(); }
  Eigen::Index num_covariates() const {
    return covariates.empty() ? 0 : covariates.front().cols();
  }

  void validate() const;
};

/// Model parameters: unit effects (summing to zero), covariate loadings,
/// and the two dynamics coefficients.
struct Parameters {
  Eigen::VectorXd omega;
  Eigen::VectorXd beta;
  double phi = 0.0;
  double alpha = 0.0;

  void validate() const;
};

struct FilterResult {
  Eigen::MatrixXd worths;  // N x T
  Eigen::MatrixXd scores;  // N x T, gradient at each period
  double loglik = 0.0;
};

/// Forward recursion of the worth process:
///   w_t = omega + Z_t beta + e_t,  e_1 = 0,
///   e_{t+1} = phi e_t + alpha * grad(w_t | R_t),
/// accumulating the ranking log-likelihood. A non-finite worth turns the
/// log-likelihood into -inf instead of aborting.
FilterResult filter(const DrmData& data, const Parameters& params);

struct IdentifiabilityResult {
  bool ok = false;
  // When not ok: a set of units never outranked by anyone outside the set.
  std::vector<int> component;
};

/// The observed rankings admit a unique maximum only when the "a outranked
/// b at least once" digraph is strongly connected.
IdentifiabilityResult check_identifiability(const RankingSeries& rankings);

enum class Inference { Hessian, Bootstrap };

struct FitOptions {
  int max_iterations = 500;
  double grad_tol = 1e-5;
  double fd_step = 1e-6;
  double hessian_step = 1e-5;
  std::optional<double> fix_phi;
  std::optional<double> fix_alpha;
  // Extra starting point (tried before the built-in multistarts); used by
  // the bootstrap to warm-start replicate fits.
  std::optional<Eigen::VectorXd> start;
};

struct Diagnostics {
  int iterations = 0;
  double grad_norm = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  int starts_tried = 0;
  int bootstrap_replications = 0;
  int bootstrap_failures = 0;
  std::vector<std::string> warnings;
};

/// A fitted model. Free parameters are ordered omega_1..omega_{N-1}, then
/// beta, then phi, then alpha (omega_N is eliminated by the zero-sum
/// constraint); covariance, std_errors and p_values follow that order.
struct Fit {
  Parameters params;
  double loglik = std::numeric_limits<double>::quiet_NaN();
  Eigen::MatrixXd covariance;
  Eigen::VectorXd std_errors;
  Eigen::VectorXd p_values;
  Inference inference = Inference::Hessian;
  Eigen::MatrixXd fitted_worths;
  Eigen::MatrixXd fitted_scores;
  bool phi_free = true;
  bool alpha_free = true;
  Diagnostics diagnostics;

  std::vector<std::string> free_parameter_names(
      const std::vector<std::string>& unit_labels = {},
      const std::vector<std::string>& covariate_names = {}) const;
};

/// Maximum likelihood estimation over the free parameters with
/// Hessian-based standard errors and two-sided normal p-values. Throws
/// IdentifiabilityError when the rankings cannot pin the optimum down and
/// ConvergenceError when every start fails the gradient criterion.
Fit fit(const DrmData& data, const FitOptions& opts = {});

/// Draws a ranking panel from the model: the recursion runs forward, each
/// period's ranking is sampled and its realized score feeds the next
/// period. `horizon` is used when no covariates are given.
RankingSeries simulate(const Parameters& params, const std::vector<Eigen::MatrixXd>& covariates,
                       Eigen::Index horizon, Rng& rng);

/// Parametric bootstrap: `replications` panels are simulated from the
/// fitted parameters with the observed covariates and re-fitted; the
/// spread of the replicate estimates replaces the standard errors.
/// Replicate r draws its RNG from (seed, r), so any thread count gives
/// bit-identical results. Failed replicates are dropped; more than 10%
/// failures is an error.
Fit bootstrap(const DrmData& data, const Fit& fitted, int replications, std::uint64_t seed,
              int threads = 1, const FitOptions& opts = {});

struct BootstrapDetail {
  Eigen::MatrixXd estimates;  // successful replicates x free parameters
  std::vector<int> failed_replicates;
};

/// As bootstrap(), also exposing the per-replicate estimates.
Fit bootstrap(const DrmData& data, const Fit& fitted, int replications, std::uint64_t seed,
              int threads, const FitOptions& opts, BootstrapDetail* detail);

struct LongTermRanking {
  Ranking ranking;            // by descending unit effect
  Eigen::VectorXd omega;      // fitted unit effects
  Fit fit;                    // the underlying covariate-free fit
  std::vector<std::string> warnings;
};

/// Fits the covariate-free model and ranks units by the stationary worth
/// levels omega. Near-equal effects (within 1e-6) order by unit index with
/// a warning.
LongTermRanking long_term_ranking(const DrmData& data, const FitOptions& opts = {});

}  // namespace dearank::drm

#endif  // DEARANK_DYNAMIC_RANKING_HPP
