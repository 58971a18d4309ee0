#pragma once

#include <optional>

#include "jsr/types.hpp"

namespace jsr::subspace {

/// Which spectrum the gap rule reads: singular values of Y, or of YY^*
/// (the squares).
enum class GapSpectrum { singular_values_of_y, singular_values_of_yyh };

/// How the signal rank is chosen. Auto applies linops::detect_rank to the
/// configured spectrum; fixed pins it.
struct RankPolicy {
  enum class Mode { automatic, fixed };

  Mode mode = Mode::automatic;
  std::optional<Index> fixed_r;
  double gap_threshold = 0.1;
  GapSpectrum spectrum = GapSpectrum::singular_values_of_y;
  /// When N < m the trailing m - N singular values are zero by construction.
  /// If true the gap rule reads only the first min(m, N); if false it reads
  /// all m, which places the gap at N whenever N < m.
  bool skip_structural_zeros = true;
  /// Singular values at or below zero_floor.rel_tol * sigma_1 are treated as
  /// exact zeros. If any remain, the data has exact rank and r_hat is the
  /// count of nonzero values; otherwise the gap rule decides.
  RankTolerance zero_floor;

  static RankPolicy automatic() { return {}; }
  static RankPolicy fixed(Index r) {
    RankPolicy p;
    p.mode = Mode::fixed;
    p.fixed_r = r;
    return p;
  }

  /// Throws unless fixed mode carries 1 <= r < m.
  void validate(Index m) const;
};

template <Scalar S>
struct SubspaceEstimate {
  Matrix<S> Q;         ///< m x (m - r_hat), orthonormal noise-subspace basis
  Matrix<S> U_sig;     ///< m x r_hat, signal-subspace basis
  Index r_hat = 0;
  RealVector singvals;  ///< singular values of Y, length m (zero padded when N < m)
};

/// SVD of Y split at the rank chosen by `policy`. Throws on Y == 0 or when
/// no rank in [1, m-1] is available (m == 1).
template <Scalar S>
SubspaceEstimate<S> estimate_subspace(const Matrix<S>& y, const RankPolicy& policy);

/// Large finite stand-in for 1/0 in the MUSIC spectrum.
inline constexpr double kSpectrumCap = 1e12;

/// eta_i = 1 / sqrt(a_i^* Q Q^* a_i), capped at kSpectrumCap.
template <Scalar S>
RealVector music_spectrum(const SubspaceEstimate<S>& est, const Matrix<S>& a);

/// Numerical rank of Q^* A_I.
template <Scalar S>
Index subspace_rank_objective(const SubspaceEstimate<S>& est, const Matrix<S>& a,
                              const Support& indices, RankTolerance tol = {});

}  // namespace jsr::subspace
