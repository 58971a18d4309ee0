#include "jsr/linops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace jsr::linops {

namespace {

template <Scalar S>
Eigen::SelfAdjointEigenSolver<Matrix<S>> hermitian_eig(const Matrix<S>& m) {
  Eigen::SelfAdjointEigenSolver<Matrix<S>> eig(m);
  if (eig.info() != Eigen::Success) {
    throw Error("Hermitian eigendecomposition failed");
  }
  return eig;
}

// f(lambda) with zero retention; eigenvalues at or below the floor map to 0.
RealVector powered_spectrum(const RealVector& lambda, double exponent, RankTolerance tol) {
  RealVector out = RealVector::Zero(lambda.size());
  if (lambda.size() == 0) return out;
  const double lmax = lambda.maxCoeff();
  if (!(lmax > 0.0)) return out;
  const double floor = tol.rel_tol * lmax;
  for (Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) > floor) out(i) = std::pow(lambda(i), exponent);
  }
  return out;
}

}  // namespace

template <Scalar S>
PsdMatrix<S>::PsdMatrix(Matrix<S> values) {
  if (values.rows() != values.cols()) throw Error("PSD matrix must be square");
  const double scale = std::max(values.norm(), 1e-300);
  if ((values - values.adjoint()).norm() > 1e-12 * scale) {
    throw Error("PSD matrix is not Hermitian");
  }
  values_ = (values + values.adjoint()) / 2.0;
  if (values_.size() > 0) {
    const RealVector lambda = hermitian_eig(values_).eigenvalues();
    const double lmax = std::max(lambda.maxCoeff(), 0.0);
    if (lambda.minCoeff() < -1e-10 * lmax) throw Error("matrix has a negative eigenvalue");
  }
}

template <Scalar S>
PsdMatrix<S> PsdMatrix<S>::trusted(Matrix<S> values) {
  PsdMatrix out;
  out.values_ = std::move(values);
  return out;
}

template <Scalar S>
double schatten_p(const Matrix<S>& w, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw Error("Schatten order p must lie in (0, 1]");
  if (!w.allFinite()) throw Error("Schatten norm of a non-finite matrix");
  const RealVector sv = singular_values(w);
  double total = 0.0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > 0.0) total += std::pow(sv(i), p);
  }
  return total;
}

template <Scalar S>
Matrix<S> psd_power(const Matrix<S>& m, double exponent, RankTolerance tol) {
  if (m.size() == 0) return m;
  const auto eig = hermitian_eig<S>(m);
  const RealVector f = powered_spectrum(eig.eigenvalues(), exponent, tol);
  const Matrix<S>& u = eig.eigenvectors();
  return u * f.asDiagonal() * u.adjoint();
}

template <Scalar S>
PsdMatrix<S> psd_power(const PsdMatrix<S>& m, double exponent, RankTolerance tol) {
  return PsdMatrix<S>::trusted(psd_power<S>(m.matrix(), exponent, tol));
}

template <Scalar S>
double psd_power_trace(const Matrix<S>& m, double exponent, RankTolerance tol) {
  if (m.size() == 0) return 0.0;
  const RealVector lambda = hermitian_eig<S>(m).eigenvalues();
  return powered_spectrum(lambda, exponent, tol).sum();
}

template <Scalar S>
RealVector singular_values(const Matrix<S>& b) {
  if (b.size() == 0) return RealVector();
  Eigen::BDCSVD<Matrix<S>> svd(b);
  return svd.singularValues();
}

template <Scalar S>
Matrix<S> noise_basis(const Matrix<S>& y, Index r) {
  const Index m = y.rows();
  if (r < 0 || r >= m) throw Error("noise basis needs 0 <= r < m");
  Eigen::BDCSVD<Matrix<S>> svd(y, Eigen::ComputeFullU);
  return svd.matrixU().rightCols(m - r);
}

Index detect_rank(std::span<const double> singvals, double threshold) {
  const auto m = static_cast<Index>(singvals.size());
  if (m == 0) throw Error("rank undetectable: empty spectrum");
  const double smin = singvals.back();
  if (!(singvals.front() > smin)) throw Error("rank undetectable: all singular values equal");

  double best = -1.0;
  Index best_i = 0;
  for (Index i = 0; i + 2 < m; ++i) {
    const double denom = singvals[i] - smin;
    const double rho = denom > 0.0 ? (singvals[i] - singvals[i + 1]) / denom : 0.0;
    if (rho > best) {
      best = rho;
      best_i = i;
    }
  }
  if (best > threshold) return best_i + 1;
  return m - 1;
}

template <Scalar S>
Matrix<S> pinv(const Matrix<S>& b, RankTolerance tol) {
  if (b.size() == 0) return Matrix<S>::Zero(b.cols(), b.rows());
  Eigen::BDCSVD<Matrix<S>> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& sv = svd.singularValues();
  RealVector inv = RealVector::Zero(sv.size());
  const double floor = sv.size() > 0 ? tol.rel_tol * sv(0) : 0.0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > floor && sv(i) > 0.0) inv(i) = 1.0 / sv(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

template <Scalar S>
Index numerical_rank(const Matrix<S>& b, RankTolerance tol) {
  const RealVector sv = singular_values(b);
  if (sv.size() == 0 || !(sv(0) > 0.0)) return 0;
  const double floor = tol.rel_tol * sv(0);
  return static_cast<Index>((sv.array() > floor).count());
}

template <Scalar S>
Index numerical_rank(const Matrix<S>& b, double scale, RankTolerance tol) {
  if (!(scale >= 0.0)) throw Error("numerical_rank: scale must be nonnegative");
  const RealVector sv = singular_values(b);
  if (sv.size() == 0 || !(sv(0) > 0.0)) return 0;
  return static_cast<Index>((sv.array() > tol.rel_tol * scale).count());
}

template <Scalar S>
RealVector row_norms_squared(const Matrix<S>& x) {
  return x.rowwise().squaredNorm();
}

Support top_k(const RealVector& scores, Index k) {
  const Index n = scores.size();
  if (k < 0 || k > n) throw Error("top_k: k out of range");
  Support order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return scores(a) > scores(b); });
  order.resize(static_cast<std::size_t>(k));
  std::sort(order.begin(), order.end());
  return order;
}

template <Scalar S>
Matrix<S> select_columns(const Matrix<S>& a, const Support& support) {
  Matrix<S> out(a.rows(), static_cast<Index>(support.size()));
  for (std::size_t j = 0; j < support.size(); ++j) out.col(static_cast<Index>(j)) = a.col(support[j]);
  return out;
}

#define JSR_INSTANTIATE(S)                                                             \
  template class PsdMatrix<S>;                                                         \
  template double schatten_p<S>(const Matrix<S>&, double);                             \
  template Matrix<S> psd_power<S>(const Matrix<S>&, double, RankTolerance);            \
  template PsdMatrix<S> psd_power<S>(const PsdMatrix<S>&, double, RankTolerance);      \
  template double psd_power_trace<S>(const Matrix<S>&, double, RankTolerance);         \
  template RealVector singular_values<S>(const Matrix<S>&);                            \
  template Matrix<S> noise_basis<S>(const Matrix<S>&, Index);                          \
  template Matrix<S> pinv<S>(const Matrix<S>&, RankTolerance);                         \
  template Index numerical_rank<S>(const Matrix<S>&, RankTolerance);                   \
  template Index numerical_rank<S>(const Matrix<S>&, double, RankTolerance);           \
  template RealVector row_norms_squared<S>(const Matrix<S>&);                          \
  template Matrix<S> select_columns<S>(const Matrix<S>&, const Support&);

JSR_INSTANTIATE(double)
JSR_INSTANTIATE(Complex)
#undef JSR_INSTANTIATE

}  // namespace jsr::linops
