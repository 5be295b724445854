#include "dearank/dynamic_ranking.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dearank/optim.hpp"

namespace dearank::drm {

void DrmData::validate() const {
  rankings.validate();
  if (num_periods() < 2) throw ValidationError("dynamic ranking model needs at least two periods");
  if (!covariates.empty()) {
    if (static_cast<Eigen::Index>(covariates.size()) != num_periods())
      throw ValidationError("covariate panel length does not match the ranking series");
    const Eigen::Index k = covariates.front().cols();
    for (const Eigen::MatrixXd& z : covariates) {
      if (z.rows() != num_units() || z.cols() != k)
        throw ValidationError("covariate matrices must all be units x variables");
      if (!z.allFinite()) throw ValidationError("covariates contain missing or non-finite values");
    }
  }
}

void Parameters::validate() const {
  if (omega.size() < 2) throw ValidationError("parameters need at least two unit effects");
  if (!omega.allFinite() || !beta.allFinite() || !std::isfinite(phi) || !std::isfinite(alpha))
    throw ValidationError("parameters must be finite");
  if (std::abs(omega.sum()) > 1e-10)
    throw ValidationError("unit effects must sum to zero (got " + format_num(omega.sum()) + ")");
}

FilterResult filter(const DrmData& data, const Parameters& params) {
  const Eigen::Index n = data.num_units();
  const Eigen::Index t_count = data.num_periods();
  const Eigen::Index k = data.num_covariates();
  if (params.omega.size() != n) throw ValidationError("unit effect count does not match data");
  if (params.beta.size() != k) throw ValidationError("covariate loading count does not match data");

  FilterResult out;
  out.worths.resize(n, t_count);
  out.scores.resize(n, t_count);
  out.loglik = 0.0;

  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w(n);
  for (Eigen::Index t = 0; t < t_count; ++t) {
    w = params.omega + e;
    if (k > 0) w.noalias() += data.covariates[static_cast<std::size_t>(t)] * params.beta;
    if (!w.allFinite()) {
      out.worths.rightCols(t_count - t).setConstant(std::numeric_limits<double>::quiet_NaN());
      out.scores.rightCols(t_count - t).setConstant(std::numeric_limits<double>::quiet_NaN());
      out.loglik = -std::numeric_limits<double>::infinity();
      return out;
    }
    const Ranking& r = data.rankings.periods[static_cast<std::size_t>(t)];
    out.worths.col(t) = w;
    out.loglik += pl::log_probability(w, r);
    out.scores.col(t) = pl::score(w, r);
    e = params.phi * e + params.alpha * out.scores.col(t);
  }
  return out;
}

IdentifiabilityResult check_identifiability(const RankingSeries& rankings) {
  rankings.validate();
  const int n = static_cast<int>(rankings.num_units());

  // adj[a][b] = 1 when a outranked b in some period.
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (const Ranking& r : rankings.periods)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (r.ranks[a] < r.ranks[b]) adj[a][b] = 1;

  // Kosaraju: order by finish time on the graph, then peel components off
  // the transpose.
  std::vector<int> finish_order;
  finish_order.reserve(n);
  std::vector<char> seen(n, 0);
  for (int start = 0; start < n; ++start) {
    if (seen[start]) continue;
    std::vector<std::pair<int, int>> stack{{start, 0}};
    seen[start] = 1;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      bool descended = false;
      for (int u = next; u < n; ++u) {
        if (adj[v][u] && !seen[u]) {
          stack.back().second = u + 1;
          stack.emplace_back(u, 0);
          seen[u] = 1;
          descended = true;
          break;
        }
      }
      if (!descended) {
        finish_order.push_back(v);
        stack.pop_back();
      }
    }
  }

  std::vector<int> component_of(n, -1);
  int num_components = 0;
  for (auto it = finish_order.rbegin(); it != finish_order.rend(); ++it) {
    if (component_of[*it] != -1) continue;
    std::vector<int> stack{*it};
    component_of[*it] = num_components;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int u = 0; u < n; ++u) {
        if (adj[u][v] && component_of[u] == -1) {
          component_of[u] = num_components;
          stack.push_back(u);
        }
      }
    }
    ++num_components;
  }

  IdentifiabilityResult res;
  if (num_components == 1) {
    res.ok = true;
    return res;
  }

  // A component with no incoming edges from outside certifies the failure:
  // nobody outside it ever outranks a member.
  std::vector<char> has_incoming(static_cast<std::size_t>(num_components), 0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (adj[a][b] && component_of[a] != component_of[b])
        has_incoming[static_cast<std::size_t>(component_of[b])] = 1;
  int source = 0;
  while (has_incoming[static_cast<std::size_t>(source)]) ++source;
  for (int v = 0; v < n; ++v)
    if (component_of[v] == source) res.component.push_back(v);
  res.ok = false;
  return res;
}

namespace {

// Mapping between the free parameter vector and Parameters. The last unit
// effect is eliminated by the zero-sum constraint; fixed dynamics
// coefficients are excluded from the vector entirely.
struct Packing {
  Eigen::Index n = 0;
  Eigen::Index k = 0;
  std::optional<double> fix_phi;
  std::optional<double> fix_alpha;

  Eigen::Index size() const {
    return (n - 1) + k + (fix_phi ? 0 : 1) + (fix_alpha ? 0 : 1);
  }

  Parameters unpack(const Eigen::VectorXd& x) const {
    Parameters p;
    p.omega.resize(n);
    p.omega.head(n - 1) = x.head(n - 1);
    p.omega[n - 1] = -x.head(n - 1).sum();
    p.beta = x.segment(n - 1, k);
    Eigen::Index pos = n - 1 + k;
    p.phi = fix_phi ? *fix_phi : x[pos++];
    p.alpha = fix_alpha ? *fix_alpha : x[pos];
    return p;
  }

  Eigen::VectorXd pack(const Parameters& p) const {
    Eigen::VectorXd x(size());
    x.head(n - 1) = p.omega.head(n - 1);
    x.segment(n - 1, k) = p.beta;
    Eigen::Index pos = n - 1 + k;
    if (!fix_phi) x[pos++] = p.phi;
    if (!fix_alpha) x[pos] = p.alpha;
    return x;
  }
};

optim::Options optimizer_options(const FitOptions& opts) {
  optim::Options o;
  o.max_iterations = opts.max_iterations;
  o.grad_tol = opts.grad_tol;
  o.fd_step = opts.fd_step;
  return o;
}

}  // namespace

std::vector<std::string> Fit::free_parameter_names(
    const std::vector<std::string>& unit_labels, const std::vector<std::string>& covariate_names) const {
  std::vector<std::string> names;
  const Eigen::Index n = params.omega.size();
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    names.push_back("omega[" + (static_cast<Eigen::Index>(unit_labels.size()) == n
                                    ? unit_labels[static_cast<std::size_t>(i)]
                                    : std::to_string(i + 1)) +
                    "]");
  }
  for (Eigen::Index j = 0; j < params.beta.size(); ++j) {
    names.push_back("beta[" + (static_cast<Eigen::Index>(covariate_names.size()) == params.beta.size()
                                   ? covariate_names[static_cast<std::size_t>(j)]
                                   : std::to_string(j + 1)) +
                    "]");
  }
  if (phi_free) names.push_back("phi");
  if (alpha_free) names.push_back("alpha");
  return names;
}

Fit fit(const DrmData& data, const FitOptions& opts) {
  data.validate();
  const IdentifiabilityResult ident = check_identifiability(data.rankings);
  if (!ident.ok) {
    std::string msg = "rankings are not identifiable: units {";
    for (std::size_t i = 0; i < ident.component.size(); ++i)
      msg += (i ? "," : "") + std::to_string(ident.component[i] + 1);
    msg += "} are never outranked from outside";
    throw IdentifiabilityError(msg, ident.component);
  }

  const Eigen::Index n = data.num_units();
  const Eigen::Index k = data.num_covariates();
  const Packing pk{n, k, opts.fix_phi, opts.fix_alpha};

  const optim::Objective objective = [&](const Eigen::VectorXd& x) {
    return -filter(data, pk.unpack(x)).loglik;
  };

  std::vector<Eigen::VectorXd> starts;
  if (opts.start) {
    if (opts.start->size() != pk.size())
      throw ValidationError("start vector has wrong length for the free parameters");
    starts.push_back(*opts.start);
  }
  const bool dynamics_free = !opts.fix_phi || !opts.fix_alpha;
  if (!dynamics_free) {
    starts.push_back(Eigen::VectorXd::Zero(pk.size()));
  } else {
    // (a) flat effects with mild dynamics switched on
    Parameters pa;
    pa.omega = Eigen::VectorXd::Zero(n);
    pa.beta = Eigen::VectorXd::Zero(k);
    pa.phi = opts.fix_phi.value_or(0.5);
    pa.alpha = opts.fix_alpha.value_or(0.1);
    starts.push_back(pk.pack(pa));

    // (b) the static fit with the dynamics switched off
    FitOptions static_opts = opts;
    static_opts.start.reset();
    static_opts.fix_phi = 0.0;
    static_opts.fix_alpha = 0.0;
    const Packing pk0{n, k, 0.0, 0.0};
    const optim::Objective static_obj = [&](const Eigen::VectorXd& x) {
      return -filter(data, pk0.unpack(x)).loglik;
    };
    const optim::Result st =
        optim::minimize(static_obj, Eigen::VectorXd::Zero(pk0.size()), optimizer_options(static_opts));
    Parameters pb = pk0.unpack(st.x);
    pb.phi = opts.fix_phi.value_or(0.0);
    pb.alpha = opts.fix_alpha.value_or(0.0);
    starts.push_back(pk.pack(pb));
  }

  optim::Result best;
  bool have_best = false;
  int starts_tried = 0;
  for (const Eigen::VectorXd& s : starts) {
    ++starts_tried;
    const optim::Result r = optim::minimize(objective, s, optimizer_options(opts));
    if (!r.converged) continue;
    if (!have_best || r.value < best.value) {
      best = r;
      have_best = true;
    }
    if (opts.start && starts_tried == 1) break;  // warm start succeeded
  }
  if (!have_best)
    throw ConvergenceError("no start satisfied the gradient criterion after " +
                           std::to_string(starts_tried) + " attempts");

  Fit out;
  out.params = pk.unpack(best.x);
  const FilterResult filtered = filter(data, out.params);
  out.loglik = filtered.loglik;
  out.fitted_worths = filtered.worths;
  out.fitted_scores = filtered.scores;
  out.inference = Inference::Hessian;
  out.phi_free = !opts.fix_phi.has_value();
  out.alpha_free = !opts.fix_alpha.has_value();
  out.diagnostics.iterations = best.iterations;
  out.diagnostics.grad_norm = best.gradient.lpNorm<Eigen::Infinity>();
  out.diagnostics.converged = best.converged;
  out.diagnostics.starts_tried = starts_tried;

  // Covariance from the curvature of the negative log-likelihood.
  const Eigen::MatrixXd hess = optim::fd_hessian(objective, best.x, opts.hessian_step);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess);
  const double max_ev = eig.eigenvalues().cwiseAbs().maxCoeff();
  if (eig.eigenvalues().minCoeff() <= 1e-10 * std::max(1.0, max_ev)) {
    out.diagnostics.warnings.push_back(
        "observed information is near singular; using a pseudo-inverse for the covariance");
    Eigen::VectorXd inv_ev = eig.eigenvalues();
    for (Eigen::Index i = 0; i < inv_ev.size(); ++i)
      inv_ev[i] = std::abs(inv_ev[i]) > 1e-10 * std::max(1.0, max_ev) ? 1.0 / inv_ev[i] : 0.0;
    out.covariance = eig.eigenvectors() * inv_ev.asDiagonal() * eig.eigenvectors().transpose();
  } else {
    out.covariance = eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() *
                     eig.eigenvectors().transpose();
  }

  const Eigen::Index p = pk.size();
  out.std_errors.resize(p);
  out.p_values.resize(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const double var = out.covariance(i, i);
    out.std_errors[i] = var > 0.0 ? std::sqrt(var) : std::numeric_limits<double>::quiet_NaN();
    out.p_values[i] = normal_two_sided_p(best.x[i] / out.std_errors[i]);
  }

  if (std::abs(out.params.phi) >= 1.0)
    out.diagnostics.warnings.push_back("autoregressive coefficient " + format_num(out.params.phi) +
                                       " lies outside the stationary region");
  return out;
}

RankingSeries simulate(const Parameters& params, const std::vector<Eigen::MatrixXd>& covariates,
                       Eigen::Index horizon, Rng& rng) {
  params.validate();
  const Eigen::Index n = params.omega.size();
  const Eigen::Index k = params.beta.size();
  const Eigen::Index t_count =
      covariates.empty() ? horizon : static_cast<Eigen::Index>(covariates.size());
  if (t_count < 1) throw ValidationError("simulation horizon must be positive");
  if (covariates.empty() && k > 0)
    throw ValidationError("covariate loadings given but no covariates supplied");
  for (const Eigen::MatrixXd& z : covariates)
    if (z.rows() != n || z.cols() != k)
      throw ValidationError("covariate matrices must be units x variables");

  RankingSeries series;
  series.periods.reserve(static_cast<std::size_t>(t_count));
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w(n);
  for (Eigen::Index t = 0; t < t_count; ++t) {
    w = params.omega + e;
    if (k > 0) w.noalias() += covariates[static_cast<std::size_t>(t)] * params.beta;
    const Ranking r = pl::sample(w, rng);
    e = params.phi * e + params.alpha * pl::score(w, r);
    series.periods.push_back(r);
  }
  return series;
}

Fit bootstrap(const DrmData& data, const Fit& fitted, int replications, std::uint64_t seed,
              int threads, const FitOptions& opts) {
  return bootstrap(data, fitted, replications, seed, threads, opts, nullptr);
}

Fit bootstrap(const DrmData& data, const Fit& fitted, int replications, std::uint64_t seed,
              int threads, const FitOptions& opts, BootstrapDetail* detail) {
  if (replications <= 0) throw ValidationError("bootstrap needs a positive replication count");
  data.validate();

  const Eigen::Index n = data.num_units();
  const Eigen::Index k = data.num_covariates();
  const Packing pk{n, k, opts.fix_phi, opts.fix_alpha};
  const Eigen::Index p = pk.size();
  const Eigen::VectorXd warm = pk.pack(fitted.params);

  Eigen::MatrixXd estimates(replications, p);
  std::vector<char> ok(static_cast<std::size_t>(replications), 0);

  parallel_for(replications, threads, [&](std::int64_t b) {
    Rng rng = Rng::child(seed, static_cast<std::uint64_t>(b));
    const RankingSeries sim =
        simulate(fitted.params, data.covariates, data.num_periods(), rng);
    DrmData replicate{sim, data.covariates};
    FitOptions ro = opts;
    ro.start = warm;
    try {
      const Fit f = fit(replicate, ro);
      estimates.row(b) = pk.pack(f.params);
      ok[static_cast<std::size_t>(b)] = 1;
    } catch (const std::exception&) {
      // dropped; counted below
    }
  });

  int failures = 0;
  for (char c : ok)
    if (!c) ++failures;
  if (failures * 10 > replications)
    throw NumericalError("bootstrap failed: " + std::to_string(failures) + " of " +
                         std::to_string(replications) + " replicates did not converge");

  const int successes = replications - failures;
  Eigen::MatrixXd kept(successes, p);
  {
    Eigen::Index row = 0;
    for (int b = 0; b < replications; ++b)
      if (ok[static_cast<std::size_t>(b)]) kept.row(row++) = estimates.row(b);
  }

  Fit out = fitted;
  out.inference = Inference::Bootstrap;
  out.diagnostics.bootstrap_replications = replications;
  out.diagnostics.bootstrap_failures = failures;
  if (failures > 0)
    out.diagnostics.warnings.push_back(std::to_string(failures) +
                                       " bootstrap replicates dropped for non-convergence");

  const Eigen::RowVectorXd mean = kept.colwise().mean();
  const Eigen::MatrixXd centered = kept.rowwise() - mean;
  out.covariance = centered.transpose() * centered / std::max(1, successes - 1);
  out.std_errors.resize(p);
  out.p_values.resize(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    out.std_errors[i] = std::sqrt(out.covariance(i, i));
    out.p_values[i] = normal_two_sided_p(warm[i] / out.std_errors[i]);
  }
  if (detail) {
    detail->estimates = kept;
    detail->failed_replicates.clear();
    for (int b = 0; b < replications; ++b)
      if (!ok[static_cast<std::size_t>(b)]) detail->failed_replicates.push_back(b);
  }
  return out;
}

LongTermRanking long_term_ranking(const DrmData& data, const FitOptions& opts) {
  if (data.num_covariates() != 0)
    throw ValidationError("long-term ranking requires the covariate-free model");

  LongTermRanking out;
  out.fit = fit(data, opts);
  out.omega = out.fit.params.omega;

  const Eigen::Index n = out.omega.size();
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (out.omega[a] != out.omega[b]) return out.omega[a] > out.omega[b];
    return a < b;
  });

  // Effects closer than the optimizer can resolve are reported as ties and
  // ordered by unit index.
  constexpr double kTieTol = 1e-6;
  std::size_t group_start = 0;
  for (std::size_t i = 1; i <= idx.size(); ++i) {
    const bool boundary =
        i == idx.size() || out.omega[idx[i - 1]] - out.omega[idx[i]] > kTieTol;
    if (!boundary) continue;
    if (i - group_start > 1) {
      std::sort(idx.begin() + static_cast<std::ptrdiff_t>(group_start),
                idx.begin() + static_cast<std::ptrdiff_t>(i));
      std::string msg = "long-term effects tie within " + format_num(kTieTol) + " for units {";
      for (std::size_t j = group_start; j < i; ++j)
        msg += (j > group_start ? "," : "") + std::to_string(idx[j] + 1);
      msg += "}; ordered by unit index";
      out.warnings.push_back(msg);
    }
    group_start = i;
  }

  Eigen::VectorXi order(n);
  for (Eigen::Index r = 0; r < n; ++r) order[r] = idx[static_cast<std::size_t>(r)];
  out.ranking = Ranking::from_order(order);
  return out;
}

}  // namespace dearank::drm
