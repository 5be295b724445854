#ifndef DEARANK_PANEL_REGRESSION_HPP
#define DEARANK_PANEL_REGRESSION_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dearank/common.hpp"
#include "dearank/dynamic_ranking.hpp"

namespace dearank::reg {

enum class Estimator { Pooled, EntityFE };
enum class HcVariant { HC0, HC1 };

struct RegressionResult {
  Eigen::VectorXd coefficients;      // one per covariate
  Eigen::VectorXd robust_std_errors;
  Eigen::VectorXd p_values;
  Estimator estimator = Estimator::EntityFE;
  Eigen::Index n_obs = 0;
  double r_squared = std::numeric_limits<double>::quiet_NaN();
  // Pooled fits carry an intercept; the within transformation absorbs it.
  double intercept = std::numeric_limits<double>::quiet_NaN();
};

/// OLS of a units x periods response panel on per-period covariate
/// matrices with heteroskedasticity-robust (White sandwich) standard
/// errors. EntityFE demeans within each unit before the regression; Pooled
/// adds an intercept instead. Throws ValidationError on a rank-deficient
/// design, naming the collinear columns.
RegressionResult panel_ols(const Eigen::MatrixXd& response,
                           const std::vector<Eigen::MatrixXd>& covariates,
                           Estimator estimator, HcVariant hc = HcVariant::HC0,
                           const std::vector<std::string>& covariate_names = {});

std::string significance_stars(double p);

struct TableCell {
  double coef = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
  double p = std::numeric_limits<double>::quiet_NaN();
};

/// Side-by-side second-stage table: four score regressions next to the
/// ranking model with Hessian and (optionally) bootstrap inference, one row
/// per contextual variable plus rows for the dynamics coefficients.
struct ComparisonTable {
  std::vector<std::string> variables;           // K covariates, then "phi", "alpha"
  std::vector<std::string> column_names;        // ccr, ap, h, log, hessian[, bootstrap]
  std::vector<std::vector<TableCell>> cells;    // [row][column]; NaN coef = empty cell
  std::vector<std::string> sign_agreement;      // per covariate row: agree|opposite|mixed

  std::string to_csv() const;
};

ComparisonTable second_stage_table(const RegressionResult& ccr, const RegressionResult& ap,
                                   const RegressionResult& h, const RegressionResult& log_fit,
                                   const drm::Fit& ranking_fit, const drm::Fit* ranking_boot,
                                   const std::vector<std::string>& covariate_names);

}  // namespace dearank::reg

#endif  // DEARANK_PANEL_REGRESSION_HPP
