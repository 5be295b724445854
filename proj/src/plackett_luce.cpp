#include "dearank/plackett_luce.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dearank::pl {

namespace {

// suffix_lse[r] = log sum_{s >= r} exp(w[order[s]]), built in one backward pass.
Eigen::VectorXd suffix_log_denominators(const Eigen::VectorXd& worths, const Ranking& r) {
  const Eigen::Index n = worths.size();
  Eigen::VectorXd lse(n);
  double acc = -std::numeric_limits<double>::infinity();
  for (Eigen::Index rank = n - 1; rank >= 0; --rank) {
    acc = log_add_exp(acc, worths[r.order[rank]]);
    lse[rank] = acc;
  }
  return lse;
}

void check_args(const Eigen::VectorXd& worths, const Ranking& r) {
  if (worths.size() < 2) throw ValidationError("worth vector needs at least two entries");
  if (worths.size() != r.size()) throw ValidationError("worths and ranking sizes differ");
  if (!worths.allFinite()) throw ValidationError("worths must be finite");
}

}  // namespace

double log_probability(const Eigen::VectorXd& worths, const Ranking& r) {
  check_args(worths, r);
  const Eigen::VectorXd lse = suffix_log_denominators(worths, r);
  return worths.sum() - lse.sum();
}

Eigen::VectorXd score(const Eigen::VectorXd& worths, const Ranking& r) {
  check_args(worths, r);
  const Eigen::Index n = worths.size();
  const Eigen::VectorXd lse = suffix_log_denominators(worths, r);
  Eigen::VectorXd grad(n);
  for (Eigen::Index unit = 0; unit < n; ++unit) {
    // Each term exp(w_n - lse_r) is at most one because unit n is part of
    // every denominator up to its own rank.
    double acc = 0.0;
    for (Eigen::Index rank = 0; rank <= r.ranks[unit]; ++rank)
      acc += std::exp(worths[unit] - lse[rank]);
    grad[unit] = 1.0 - acc;
  }
  return grad;
}

Ranking sample(const Eigen::VectorXd& worths, Rng& rng) {
  const Eigen::Index n = worths.size();
  if (n < 2) throw ValidationError("worth vector needs at least two entries");
  std::vector<int> remaining(static_cast<std::size_t>(n));
  std::iota(remaining.begin(), remaining.end(), 0);
  Eigen::VectorXi order(n);
  for (Eigen::Index rank = 0; rank < n; ++rank) {
    double wmax = -std::numeric_limits<double>::infinity();
    for (int unit : remaining) wmax = std::max(wmax, worths[unit]);
    double total = 0.0;
    for (int unit : remaining) total += std::exp(worths[unit] - wmax);
    double u = rng.uniform01() * total;
    std::size_t pick = remaining.size() - 1;
    for (std::size_t k = 0; k < remaining.size(); ++k) {
      u -= std::exp(worths[remaining[k]] - wmax);
      if (u < 0.0) {
        pick = k;
        break;
      }
    }
    order[rank] = remaining[pick];
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return Ranking::from_order(order);
}

std::map<std::vector<int>, double> enumerate_pmf(const Eigen::VectorXd& worths) {
  const Eigen::Index n = worths.size();
  if (n < 2) throw ValidationError("worth vector needs at least two entries");
  if (n > 8) throw ValidationError("exhaustive enumeration is limited to 8 units");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::map<std::vector<int>, double> pmf;
  do {
    Eigen::VectorXi o(n);
    for (Eigen::Index i = 0; i < n; ++i) o[i] = order[static_cast<std::size_t>(i)];
    pmf[order] = std::exp(log_probability(worths, Ranking::from_order(o)));
  } while (std::next_permutation(order.begin(), order.end()));
  return pmf;
}

}  // namespace dearank::pl
