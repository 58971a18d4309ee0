#pragma once

#include "jsr/subspace.hpp"
#include "jsr/types.hpp"

/// Subspace and greedy support estimators. Every routine returns exactly k
/// distinct indices, sorted ascending, with ties broken towards the lower index.
namespace jsr::greedy {

struct GreedyConfig {
  Index k = 1;
  subspace::RankPolicy rank_policy;

  /// Throws unless 1 <= k <= m.
  void validate(Index m) const;
};

/// k largest MUSIC spectrum values.
template <Scalar S>
Support music_recover(const Matrix<S>& a, const Matrix<S>& y, const GreedyConfig& cfg);

template <Scalar S>
Support music_recover(const Matrix<S>& a, const subspace::SubspaceEstimate<S>& est,
                      const GreedyConfig& cfg);

/// Simultaneous OMP: k steps of argmax ||a_i^* R||_2 with R the residual of Y
/// after projecting off the selected columns.
template <Scalar S>
Support somp_recover(const Matrix<S>& a, const Matrix<S>& y, const GreedyConfig& cfg);

/// Subspace-augmented MUSIC: k - r_hat S-OMP steps on the signal subspace,
/// then the r_hat best remaining columns by ||P_W a_i|| / ||a_i|| with W the
/// span of the signal subspace and the greedy picks.
template <Scalar S>
Support samusic_recover(const Matrix<S>& a, const Matrix<S>& y, const GreedyConfig& cfg);

template <Scalar S>
Support samusic_recover(const Matrix<S>& a, const subspace::SubspaceEstimate<S>& est,
                        const GreedyConfig& cfg);

}  // namespace jsr::greedy
