#ifndef DEARANK_PLACKETT_LUCE_HPP
#define DEARANK_PLACKETT_LUCE_HPP

#include <map>
#include <vector>

#include <Eigen/Core>

#include "dearank/common.hpp"
#include "dearank/ranking.hpp"

namespace dearank::pl {

/// Log-probability of a full ranking under the Plackett-Luce distribution
/// with the given worths. Evaluated entirely in log space with a running
/// log-sum-exp over the suffix denominators, so large worths cannot
/// overflow. Invariant to adding a constant to all worths.
double log_probability(const Eigen::VectorXd& worths, const Ranking& r);

/// Gradient of log_probability with respect to the worths. Components sum
/// to zero and depend on worth differences only.
Eigen::VectorXd score(const Eigen::VectorXd& worths, const Ranking& r);

/// Draws a ranking by sequential selection without replacement with
/// probabilities proportional to exp(worth). Deterministic given the RNG
/// state.
Ranking sample(const Eigen::VectorXd& worths, Rng& rng);

/// Exhaustive distribution over all N! orderings, keyed by the order vector
/// (entry r is the unit with rank r). Test oracle; rejects N > 8.
std::map<std::vector<int>, double> enumerate_pmf(const Eigen::VectorXd& worths);

}  // namespace dearank::pl

#endif  // DEARANK_PLACKETT_LUCE_HPP
