#include "dearank/panel_regression.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

namespace dearank::reg {

namespace {

std::string column_label(Eigen::Index j, bool pooled, const std::vector<std::string>& names) {
  if (pooled && j == 0) return "(intercept)";
  const Eigen::Index k = pooled ? j - 1 : j;
  if (k < static_cast<Eigen::Index>(names.size())) return names[static_cast<std::size_t>(k)];
  return "z" + std::to_string(k + 1);
}

}  // namespace

RegressionResult panel_ols(const Eigen::MatrixXd& response,
                           const std::vector<Eigen::MatrixXd>& covariates, Estimator estimator,
                           HcVariant hc, const std::vector<std::string>& covariate_names) {
  const Eigen::Index n = response.rows();
  const Eigen::Index t_count = response.cols();
  if (static_cast<Eigen::Index>(covariates.size()) != t_count)
    throw ValidationError("covariate panel length does not match the response panel");
  if (covariates.empty() || covariates.front().cols() == 0)
    throw ValidationError("panel regression needs at least one covariate");
  const Eigen::Index k = covariates.front().cols();
  for (const Eigen::MatrixXd& z : covariates)
    if (z.rows() != n || z.cols() != k)
      throw ValidationError("covariate matrices must be units x variables");
  if (!response.allFinite()) throw ValidationError("response panel contains missing values");

  const Eigen::Index n_obs = n * t_count;
  const bool pooled = estimator == Estimator::Pooled;
  const Eigen::Index p = pooled ? k + 1 : k;

  // Long form, observation index = unit + N * period.
  Eigen::VectorXd y(n_obs);
  Eigen::MatrixXd x(n_obs, p);
  for (Eigen::Index t = 0; t < t_count; ++t) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index row = i + n * t;
      y[row] = response(i, t);
      if (pooled) {
        x(row, 0) = 1.0;
        x.block(row, 1, 1, k) = covariates[static_cast<std::size_t>(t)].row(i);
      } else {
        x.block(row, 0, 1, k) = covariates[static_cast<std::size_t>(t)].row(i);
      }
    }
  }

  if (!pooled) {
    // Within transformation: demean response and covariates by unit.
    for (Eigen::Index i = 0; i < n; ++i) {
      double ym = 0.0;
      Eigen::RowVectorXd xm = Eigen::RowVectorXd::Zero(p);
      for (Eigen::Index t = 0; t < t_count; ++t) {
        ym += y[i + n * t];
        xm += x.row(i + n * t);
      }
      ym /= static_cast<double>(t_count);
      xm /= static_cast<double>(t_count);
      for (Eigen::Index t = 0; t < t_count; ++t) {
        y[i + n * t] -= ym;
        x.row(i + n * t) -= xm;
      }
    }
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    std::string msg = "design matrix is rank deficient; collinear columns:";
    const auto perm = qr.colsPermutation().indices();
    for (Eigen::Index j = qr.rank(); j < p; ++j)
      msg += " " + column_label(perm[j], pooled, covariate_names);
    if (estimator == Estimator::EntityFE)
      msg += " (columns constant within every unit are removed by the within transformation)";
    throw ValidationError(msg);
  }

  const Eigen::VectorXd beta = qr.solve(y);
  const Eigen::VectorXd resid = y - x * beta;

  const Eigen::MatrixXd xtx_inv = (x.transpose() * x).ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index row = 0; row < n_obs; ++row)
    meat.noalias() += resid[row] * resid[row] * x.row(row).transpose() * x.row(row);
  Eigen::MatrixXd sandwich = xtx_inv * meat * xtx_inv;
  if (hc == HcVariant::HC1)
    sandwich *= static_cast<double>(n_obs) / static_cast<double>(n_obs - p);

  const double sst = pooled ? (y.array() - y.mean()).matrix().squaredNorm() : y.squaredNorm();
  const double ssr = resid.squaredNorm();

  RegressionResult out;
  out.estimator = estimator;
  out.n_obs = n_obs;
  out.r_squared = sst > 0.0 ? 1.0 - ssr / sst : std::numeric_limits<double>::quiet_NaN();
  out.coefficients.resize(k);
  out.robust_std_errors.resize(k);
  out.p_values.resize(k);
  if (pooled) out.intercept = beta[0];
  for (Eigen::Index j = 0; j < k; ++j) {
    const Eigen::Index col = pooled ? j + 1 : j;
    out.coefficients[j] = beta[col];
    out.robust_std_errors[j] = std::sqrt(std::max(0.0, sandwich(col, col)));
    out.p_values[j] = normal_two_sided_p(beta[col] / out.robust_std_errors[j]);
  }
  return out;
}

std::string significance_stars(double p) {
  if (!(p >= 0.0)) return "";
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

std::string ComparisonTable::to_csv() const {
  std::ostringstream os;
  os << "variable";
  for (const std::string& c : column_names)
    os << "," << c << "_coef," << c << "_se," << c << "_p," << c << "_stars";
  os << ",sign_agreement\n";
  for (std::size_t r = 0; r < variables.size(); ++r) {
    os << variables[r];
    for (const TableCell& cell : cells[r]) {
      if (std::isnan(cell.coef)) {
        os << ",,,,";
      } else {
        os << "," << format_num(cell.coef) << "," << format_num(cell.se) << ","
           << format_num(cell.p) << "," << significance_stars(cell.p);
      }
    }
    os << "," << (r < sign_agreement.size() ? sign_agreement[r] : "") << "\n";
  }
  return os.str();
}

ComparisonTable second_stage_table(const RegressionResult& ccr, const RegressionResult& ap,
                                   const RegressionResult& h, const RegressionResult& log_fit,
                                   const drm::Fit& ranking_fit, const drm::Fit* ranking_boot,
                                   const std::vector<std::string>& covariate_names) {
  const Eigen::Index k = ccr.coefficients.size();
  for (const RegressionResult* r : {&ap, &h, &log_fit})
    if (r->coefficients.size() != k)
      throw ValidationError("regression columns cover different covariate sets");
  if (ranking_fit.params.beta.size() != k)
    throw ValidationError("ranking model covers a different covariate set");

  ComparisonTable table;
  table.column_names = {"ccr", "ap", "h", "log", "hessian"};
  if (ranking_boot) table.column_names.push_back("bootstrap");

  const Eigen::Index beta_offset = ranking_fit.params.omega.size() - 1;
  auto drm_cell = [](const drm::Fit& f, double coef, Eigen::Index free_index) {
    return TableCell{coef, f.std_errors[free_index], f.p_values[free_index]};
  };

  for (Eigen::Index j = 0; j < k; ++j) {
    table.variables.push_back(j < static_cast<Eigen::Index>(covariate_names.size())
                                  ? covariate_names[static_cast<std::size_t>(j)]
                                  : "z" + std::to_string(j + 1));
    std::vector<TableCell> row;
    for (const RegressionResult* r : {&ccr, &ap, &h, &log_fit})
      row.push_back({r->coefficients[j], r->robust_std_errors[j], r->p_values[j]});
    row.push_back(drm_cell(ranking_fit, ranking_fit.params.beta[j], beta_offset + j));
    if (ranking_boot)
      row.push_back(drm_cell(*ranking_boot, ranking_boot->params.beta[j], beta_offset + j));
    table.cells.push_back(row);

    // Flag covariates whose sign flips between the score regressions and
    // the ranking model.
    const auto sgn = [](double v) { return v > 0.0 ? 1 : v < 0.0 ? -1 : 0; };
    const int s_ccr = sgn(ccr.coefficients[j]);
    const bool reg_agree = s_ccr == sgn(ap.coefficients[j]) && s_ccr == sgn(h.coefficients[j]) &&
                           s_ccr == sgn(log_fit.coefficients[j]);
    const int s_drm = sgn(ranking_fit.params.beta[j]);
    if (!reg_agree)
      table.sign_agreement.push_back("mixed");
    else
      table.sign_agreement.push_back(s_drm == s_ccr ? "agree" : "opposite");
  }

  // Dynamics rows exist only in the ranking columns.
  const Eigen::Index phi_index = beta_offset + k;
  if (ranking_fit.phi_free) {
    table.variables.push_back("phi");
    std::vector<TableCell> row(4);
    row.push_back(drm_cell(ranking_fit, ranking_fit.params.phi, phi_index));
    if (ranking_boot) row.push_back(drm_cell(*ranking_boot, ranking_boot->params.phi, phi_index));
    table.cells.push_back(row);
  }
  if (ranking_fit.alpha_free) {
    const Eigen::Index alpha_index = phi_index + (ranking_fit.phi_free ? 1 : 0);
    table.variables.push_back("alpha");
    std::vector<TableCell> row(4);
    row.push_back(drm_cell(ranking_fit, ranking_fit.params.alpha, alpha_index));
    if (ranking_boot)
      row.push_back(drm_cell(*ranking_boot, ranking_boot->params.alpha, alpha_index));
    table.cells.push_back(row);
  }
  return table;
}

}  // namespace dearank::reg
