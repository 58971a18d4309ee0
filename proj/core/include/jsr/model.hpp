#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <variant>

#include "jsr/types.hpp"

namespace jsr::model {

inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

enum class MatrixKind { gaussian, fourier };

/// Parameters of one synthetic MMV instance.
struct SignalSpec {
  Index m = 0;  ///< measurements (rows of A)
  Index n = 0;  ///< dictionary size (columns of A)
  Index N = 0;  ///< snapshots (columns of Y)
  Index k = 0;  ///< row sparsity
  Index r = 0;  ///< rank of the nonzero block
  double tau = 1.0;            ///< singular values of the block are tau^1..tau^r
  double snr_db = kNoiseless;  ///< Frobenius power ratio; +inf for noiseless
  MatrixKind matrix_kind = MatrixKind::gaussian;
  std::uint64_t seed = 0;

  /// Throws jsr::Error on r > k, k > n, r > N, m > n, tau outside (0, 1].
  /// k > m is accepted: phase-transition sweeps start below the sparsity level.
  void validate() const;
};

template <Scalar S>
struct ProblemInstance {
  Matrix<S> A;
  Matrix<S> Y;
  Matrix<S> X_true;
  Support support;
  Index k = 0;
  Index r = 0;
  double snr_db = kNoiseless;
  std::uint64_t seed = 0;

  Index m() const { return A.rows(); }
  Index n() const { return A.cols(); }
  Index snapshots() const { return Y.cols(); }
};

using AnyInstance = std::variant<ProblemInstance<double>, ProblemInstance<Complex>>;

template <Scalar S>
struct SignalDraw {
  Matrix<S> X;
  Support support;
};

// ---- seeding ---------------------------------------------------------------

/// SplitMix64 finaliser; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x);

/// Counter-based seed derivation: folds every word into the base seed.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> words);

// ---- generators ------------------------------------------------------------

/// i.i.d. N(0, 1/m) entries, columns rescaled to unit norm.
Matrix<double> gen_gaussian_matrix(Index m, Index n, std::uint64_t seed);

/// m distinct rows (kept in ascending order) of the unitary n-point DFT,
/// columns rescaled to unit norm. Throws if m > n.
Matrix<Complex> gen_fourier_matrix(Index m, Index n, std::uint64_t seed);

/// Diagonal of the block's singular value profile: tau^1, ..., tau^r.
RealVector singular_value_profile(double tau, Index r);

/// Row-sparse signal X with X^S = U diag(tau^i) V.
template <Scalar S>
SignalDraw<S> gen_signal(const SignalSpec& spec);

/// y0 + E with ||y0||_F^2 / ||E||_F^2 = 10^(snr_db/10) exactly.
template <Scalar S>
Matrix<S> add_noise(const Matrix<S>& y0, double snr_db, std::uint64_t seed);

/// Basic feasible solution of A X = A X_true with m nonzero rows, s of them
/// on the true support.
template <Scalar S>
Matrix<S> gen_bfs_init(const ProblemInstance<S>& inst, Index s, std::uint64_t seed);

template <Scalar S>
ProblemInstance<S> make_instance(const SignalSpec& spec);

/// Dispatches on spec.matrix_kind: gaussian -> real, fourier -> complex.
AnyInstance make_any_instance(const SignalSpec& spec);

}  // namespace jsr::model
