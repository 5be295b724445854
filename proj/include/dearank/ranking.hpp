#ifndef DEARANK_RANKING_HPP
#define DEARANK_RANKING_HPP

#include <string>
#include <vector>

#include <Eigen/Core>

#include "dearank/common.hpp"

namespace dearank {

/// A strict ranking of N units. `ranks[n]` is the 0-based rank of unit n
/// (0 = best); `order[r]` is the unit holding rank r. The two are inverse
/// permutations of each other.
struct Ranking {
  Eigen::VectorXi ranks;
  Eigen::VectorXi order;

  Eigen::Index size() const { return ranks.size(); }

  static Ranking from_ranks(const Eigen::VectorXi& ranks);
  static Ranking from_order(const Eigen::VectorXi& order);

  // Rank 0 goes to the highest score. Exact ties break by ascending unit
  // index and append a note to `warnings` when given.
  static Ranking from_scores(const Eigen::VectorXd& scores,
                             std::vector<std::string>* warnings = nullptr);

  // Throws ValidationError unless ranks and order are inverse permutations.
  void validate() const;
};

/// Rankings of the same N units over consecutive periods.
struct RankingSeries {
  std::vector<Ranking> periods;

  Eigen::Index num_periods() const { return static_cast<Eigen::Index>(periods.size()); }
  Eigen::Index num_units() const { return periods.empty() ? 0 : periods.front().size(); }

  void validate() const;
};

}  // namespace dearank

#endif  // DEARANK_RANKING_HPP
