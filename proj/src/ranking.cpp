#include "dearank/ranking.hpp"

#include <algorithm>
#include <numeric>

namespace dearank {

namespace {

Eigen::VectorXi invert(const Eigen::VectorXi& perm) {
  Eigen::VectorXi inv(perm.size());
  inv.setConstant(-1);
  for (Eigen::Index i = 0; i < perm.size(); ++i) {
    if (perm[i] < 0 || perm[i] >= perm.size() || inv[perm[i]] != -1)
      throw ValidationError("ranking is not a permutation");
    inv[perm[i]] = static_cast<int>(i);
  }
  return inv;
}

}  // namespace

Ranking Ranking::from_ranks(const Eigen::VectorXi& ranks) {
  Ranking r;
  r.ranks = ranks;
  r.order = invert(ranks);
  return r;
}

Ranking Ranking::from_order(const Eigen::VectorXi& order) {
  Ranking r;
  r.order = order;
  r.ranks = invert(order);
  return r;
}

Ranking Ranking::from_scores(const Eigen::VectorXd& scores, std::vector<std::string>* warnings) {
  const Eigen::Index n = scores.size();
  if (n < 2) throw ValidationError("ranking requires at least two units");
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  if (warnings) {
    for (std::size_t r = 1; r < idx.size(); ++r) {
      if (scores[idx[r]] == scores[idx[r - 1]]) {
        warnings->push_back("tie between units " + std::to_string(idx[r - 1]) + " and " +
                            std::to_string(idx[r]) + " at score " + format_num(scores[idx[r]]) +
                            "; broken by unit index");
      }
    }
  }
  Eigen::VectorXi order(n);
  for (Eigen::Index r = 0; r < n; ++r) order[r] = idx[static_cast<std::size_t>(r)];
  return from_order(order);
}

void Ranking::validate() const {
  if (ranks.size() != order.size()) throw ValidationError("ranking size mismatch");
  const Eigen::VectorXi inv = invert(ranks);
  if (inv != order) throw ValidationError("order is not the inverse of ranks");
}

void RankingSeries::validate() const {
  if (periods.empty()) throw ValidationError("ranking series is empty");
  const Eigen::Index n = periods.front().size();
  for (const Ranking& r : periods) {
    r.validate();
    if (r.size() != n) throw ValidationError("ranking series has inconsistent unit counts");
  }
}

}  // namespace dearank
