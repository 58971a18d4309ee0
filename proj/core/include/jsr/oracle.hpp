#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "jsr/types.hpp"

/// Exhaustive solvers for small instances.
namespace jsr::oracle {

struct OracleBudget {
  std::int64_t max_supports = 2'000'000;
  double residual_tol = 1e-8;
  /// Worker threads for the enumeration; 0 picks the hardware concurrency.
  int threads = 1;

  void validate() const;
};

struct MinRankResult {
  /// Every size-k support attaining the minimum, in lexicographic order.
  std::vector<Support> argmin;
  Index min_rank = 0;
  /// Rank of Y used to build the noise subspace.
  Index signal_rank = 0;
};

/// Binomial coefficient with saturation at INT64_MAX.
std::int64_t binomial(Index n, Index k);

/// Minimises rank(Q^* A_I) over all |I| = k, where Q spans the complement of
/// the column space of Y (numerical rank at `tol`).
template <Scalar S>
MinRankResult brute_min_rank_support(const Matrix<S>& a, const Matrix<S>& y, Index k,
                                     RankTolerance tol = {}, OracleBudget budget = {});

/// Smallest support (then lexicographically first) whose least-squares fit
/// reaches ||Y - A_I X^I||_F / ||Y||_F < budget.residual_tol.
template <Scalar S>
std::pair<Matrix<S>, Support> brute_l0(const Matrix<S>& a, const Matrix<S>& y, Index k_max,
                                       RankTolerance tol = {}, OracleBudget budget = {});

/// Smallest subset size <= limit with numerically dependent columns, or
/// limit + 1 when none exists.
template <Scalar S>
Index spark_lower_bound(const Matrix<S>& a, Index limit, RankTolerance tol = {},
                        OracleBudget budget = {});

/// Calls `visit` on every k-subset of {0..n-1} in lexicographic order until it
/// returns false.
template <typename Visit>
void for_each_subset(Index n, Index k, Visit&& visit) {
  if (k < 0 || k > n) return;
  Support idx(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    if (!visit(static_cast<const Support&>(idx))) return;
    Index pos = k - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
    if (pos < 0) return;
    ++idx[static_cast<std::size_t>(pos)];
    for (Index j = pos + 1; j < k; ++j) {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
}

}  // namespace jsr::oracle
