#include "dearank/dea.hpp"

#include <cmath>

namespace dearank::dea {

void CrossSection::validate() const {
  const Eigen::Index n = num_units();
  if (n < 2) throw ValidationError("cross section needs at least two units");
  if (outputs.rows() != n) throw ValidationError("input and output row counts differ");
  if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != n)
    throw ValidationError("label count does not match unit count");
  if (num_inputs() == 0 || num_outputs() == 0)
    throw ValidationError("cross section needs at least one input and one output");
  if (!inputs.allFinite() || !outputs.allFinite())
    throw ValidationError("cross section contains non-finite values");
  if ((inputs.array() <= 0.0).any()) throw ValidationError("all inputs must be strictly positive");
  if ((outputs.array() < 0.0).any()) throw ValidationError("outputs must be nonnegative");
  for (Eigen::Index i = 0; i < n; ++i)
    if ((outputs.row(i).array() <= 0.0).all())
      throw ValidationError("unit " + std::to_string(i) + " has no positive output");
}

std::string to_string(Model m) {
  switch (m) {
    case Model::Ccr: return "ccr";
    case Model::Ap: return "ap";
    case Model::H: return "h";
    case Model::Log: return "log";
  }
  return "unknown";
}

Model model_from_string(const std::string& name) {
  if (name == "ccr") return Model::Ccr;
  if (name == "ap") return Model::Ap;
  if (name == "h") return Model::H;
  if (name == "log") return Model::Log;
  throw ValidationError("unknown efficiency model '" + name + "' (expected ccr|ap|h|log)");
}

namespace {

// Multiplier-form program: maximize y_n'u subject to x_n'v = 1 and
// Y u - X v <= 0 over the benchmark rows. `include_self` distinguishes the
// basic model from the super-efficiency one.
lp::LinearProgram multiplier_program(const CrossSection& cs, Eigen::Index unit, bool include_self) {
  const Eigen::Index n = cs.num_units();
  const Eigen::Index ni = cs.num_inputs();
  const Eigen::Index nj = cs.num_outputs();
  const Eigen::Index rows = 1 + (include_self ? n : n - 1);

  lp::LinearProgram prog;
  prog.objective = Eigen::VectorXd::Zero(nj + ni);
  prog.objective.head(nj) = cs.outputs.row(unit);
  prog.constraints = Eigen::MatrixXd::Zero(rows, nj + ni);
  prog.rhs = Eigen::VectorXd::Zero(rows);
  prog.senses.assign(static_cast<std::size_t>(rows), lp::Sense::Le);

  prog.constraints.block(0, nj, 1, ni) = cs.inputs.row(unit);
  prog.senses[0] = lp::Sense::Eq;
  prog.rhs[0] = 1.0;

  Eigen::Index r = 1;
  for (Eigen::Index m = 0; m < n; ++m) {
    if (!include_self && m == unit) continue;
    prog.constraints.block(r, 0, 1, nj) = cs.outputs.row(m);
    prog.constraints.block(r, nj, 1, ni) = -cs.inputs.row(m);
    ++r;
  }
  return prog;
}

// Normalized program with the score variable delta in [-1, 1]: maximize
// 1 + delta subject to y_n'u >= 1 + delta, x_n'v <= 1 - delta, and the
// benchmark rows without the evaluated unit.
lp::LinearProgram normalized_program(const CrossSection& cs, Eigen::Index unit) {
  const Eigen::Index n = cs.num_units();
  const Eigen::Index ni = cs.num_inputs();
  const Eigen::Index nj = cs.num_outputs();
  const Eigen::Index nvars = 1 + nj + ni;  // [delta, u, v]
  const Eigen::Index rows = 2 + (n - 1);

  lp::LinearProgram prog;
  prog.objective = Eigen::VectorXd::Zero(nvars);
  prog.objective[0] = 1.0;
  prog.constraints = Eigen::MatrixXd::Zero(rows, nvars);
  prog.rhs = Eigen::VectorXd::Zero(rows);
  prog.senses.assign(static_cast<std::size_t>(rows), lp::Sense::Le);
  prog.lower_bounds = Eigen::VectorXd::Zero(nvars);
  prog.lower_bounds[0] = -1.0;

  prog.constraints(0, 0) = -1.0;
  prog.constraints.block(0, 1, 1, nj) = cs.outputs.row(unit);
  prog.senses[0] = lp::Sense::Ge;
  prog.rhs[0] = 1.0;

  prog.constraints(1, 0) = 1.0;
  prog.constraints.block(1, 1 + nj, 1, ni) = cs.inputs.row(unit);
  prog.rhs[1] = 1.0;

  Eigen::Index r = 2;
  for (Eigen::Index m = 0; m < n; ++m) {
    if (m == unit) continue;
    prog.constraints.block(r, 1, 1, nj) = cs.outputs.row(m);
    prog.constraints.block(r, 1 + nj, 1, ni) = -cs.inputs.row(m);
    ++r;
  }
  return prog;
}

}  // namespace

ScoreResult ccr_score(const CrossSection& cs, Eigen::Index unit, const lp::Options& opts) {
  cs.validate();
  const lp::Solution s = lp::solve(multiplier_program(cs, unit, true), opts);
  return {s.optimal() ? s.objective_value : std::numeric_limits<double>::quiet_NaN(), s.status};
}

ScoreResult ap_score(const CrossSection& cs, Eigen::Index unit, const lp::Options& opts) {
  cs.validate();
  const lp::Solution s = lp::solve(multiplier_program(cs, unit, false), opts);
  if (s.status == lp::Status::Unbounded) return {kUnboundedScore, s.status};
  return {s.optimal() ? s.objective_value : std::numeric_limits<double>::quiet_NaN(), s.status};
}

ScoreResult h_score(const CrossSection& cs, Eigen::Index unit, const lp::Options& opts) {
  cs.validate();
  const lp::Solution s = lp::solve(normalized_program(cs, unit), opts);
  if (s.status == lp::Status::Unbounded) return {2.0, s.status};
  return {s.optimal() ? 1.0 + s.objective_value : std::numeric_limits<double>::quiet_NaN(),
          s.status};
}

double ap_to_h(double theta_ap) {
  if (theta_ap >= kUnboundedScore) return 2.0;
  return 2.0 * theta_ap / (1.0 + theta_ap);
}

double h_to_ap(double theta_h) {
  if (theta_h >= 2.0) return kUnboundedScore;
  return theta_h / (2.0 - theta_h);
}

double log_score(double theta_ap) {
  if (theta_ap <= 0.0) return std::numeric_limits<double>::lowest();
  return std::log(theta_ap);
}

Ranking rank_cross_section(const Eigen::VectorXd& scores, std::vector<std::string>* warnings) {
  return Ranking::from_scores(scores, warnings);
}

bool EfficiencyPanel::all_optimal() const {
  for (lp::Status s : statuses)
    if (s != lp::Status::Optimal) return false;
  return true;
}

EfficiencyPanel efficiency_panel(std::span<const CrossSection> sections, Model model,
                                 const lp::Options& opts, int threads) {
  if (sections.empty()) throw ValidationError("efficiency panel needs at least one period");
  const Eigen::Index n = sections.front().num_units();
  for (const CrossSection& cs : sections) {
    cs.validate();
    if (cs.num_units() != n) throw ValidationError("periods have different unit counts");
  }
  const Eigen::Index t_count = static_cast<Eigen::Index>(sections.size());

  EfficiencyPanel panel;
  panel.model = model;
  panel.scores.resize(n, t_count);
  panel.statuses.assign(static_cast<std::size_t>(n * t_count), lp::Status::IterationLimit);

  parallel_for(n * t_count, threads, [&](std::int64_t cell) {
    const Eigen::Index unit = cell % n;
    const Eigen::Index t = cell / n;
    ScoreResult r;
    switch (model) {
      case Model::Ccr: r = ccr_score(sections[t], unit, opts); break;
      case Model::Ap: r = ap_score(sections[t], unit, opts); break;
      case Model::H: r = h_score(sections[t], unit, opts); break;
      case Model::Log: {
        r = ap_score(sections[t], unit, opts);
        if (!std::isnan(r.score)) r.score = log_score(r.score);
        break;
      }
    }
    panel.scores(unit, t) = r.score;
    panel.statuses[static_cast<std::size_t>(cell)] = r.status;
  });
  return panel;
}

RankingSeries rankings_from_panel(const EfficiencyPanel& panel, std::vector<std::string>* warnings) {
  RankingSeries series;
  series.periods.reserve(static_cast<std::size_t>(panel.scores.cols()));
  for (Eigen::Index t = 0; t < panel.scores.cols(); ++t)
    series.periods.push_back(rank_cross_section(panel.scores.col(t), warnings));
  return series;
}

}  // namespace dearank::dea
