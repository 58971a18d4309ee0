#pragma once

#include <span>

#include "jsr/types.hpp"

/// Dense numerical kernels shared by every solver.
///
/// All "is this zero" decisions go through a RankTolerance relative to the
/// largest singular value (or eigenvalue) of the matrix at hand.
namespace jsr::linops {

/// Hermitian positive semidefinite matrix. Construction checks symmetry and
/// the eigenvalue floor; the stored matrix is the symmetrised input.
template <Scalar S>
class PsdMatrix {
 public:
  PsdMatrix() = default;
  explicit PsdMatrix(Matrix<S> values);

  /// Wraps a matrix that is PSD by construction (no check).
  static PsdMatrix trusted(Matrix<S> values);

  const Matrix<S>& matrix() const { return values_; }
  Index size() const { return values_.rows(); }

 private:
  Matrix<S> values_;
};

/// Sum of sigma_i(W)^p over all singular values; p in (0, 1].
template <Scalar S>
double schatten_p(const Matrix<S>& w, double p);

/// U diag(f(lambda)) U^* with f(l) = l^e above rel_tol * lambda_max, else 0.
template <Scalar S>
PsdMatrix<S> psd_power(const PsdMatrix<S>& m, double exponent, RankTolerance tol = {});

/// Raw-matrix overload for callers that already know the input is PSD.
template <Scalar S>
Matrix<S> psd_power(const Matrix<S>& m, double exponent, RankTolerance tol = {});

/// Trace of psd_power(m, exponent) without forming the matrix.
template <Scalar S>
double psd_power_trace(const Matrix<S>& m, double exponent, RankTolerance tol = {});

/// Orthonormal basis of the complement of the top-r left singular subspace.
template <Scalar S>
Matrix<S> noise_basis(const Matrix<S>& y, Index r);

/// Spectral gap rule: argmax over i <= m-2 of (s_i - s_{i+1}) / (s_i - s_m)
/// when it exceeds `threshold`, else m - 1. Returns a count (1-based rank).
Index detect_rank(std::span<const double> singvals, double threshold = 0.1);

template <Scalar S>
Matrix<S> pinv(const Matrix<S>& b, RankTolerance tol = {});

/// Number of singular values above rel_tol * sigma_max (0 for a zero matrix).
template <Scalar S>
Index numerical_rank(const Matrix<S>& b, RankTolerance tol = {});

/// Number of singular values above rel_tol * scale. Use when the matrix is a
/// projection of a larger operator whose norm sets the meaningful zero level.
template <Scalar S>
Index numerical_rank(const Matrix<S>& b, double scale, RankTolerance tol = {});

template <Scalar S>
RealVector singular_values(const Matrix<S>& b);

/// Squared Euclidean norm of every row.
template <Scalar S>
RealVector row_norms_squared(const Matrix<S>& x);

/// Indices of the k largest scores, ties broken towards the lower index,
/// returned sorted ascending.
Support top_k(const RealVector& scores, Index k);

/// Columns of `a` selected by `support`.
template <Scalar S>
Matrix<S> select_columns(const Matrix<S>& a, const Support& support);

}  // namespace jsr::linops
