#pragma once

#include <cmath>

#include "jsr/types.hpp"

namespace jsr::detail {

// Cholesky factor of Sigma_y = lambda I + A Gamma A^*.
template <Scalar S>
class SigmaFactor {
 public:
  SigmaFactor(const GammaVector& gamma, const Matrix<S>& a, double lambda) {
    if (gamma.size() != a.cols()) throw Error("gamma length does not match the columns of A");
    Matrix<S> sigma = (a * gamma.asDiagonal()) * a.adjoint();
    sigma.diagonal().array() += lambda;
    llt_.compute(sigma);
    if (llt_.info() != Eigen::Success) throw Error("Sigma_y is not numerically positive definite");
  }

  // Tr(Sigma^{-1} Y Y^*) = ||L^{-1} Y||_F^2
  double data_term(const Matrix<S>& y) const {
    return llt_.matrixL().solve(y).squaredNorm();
  }

  double log_det() const {
    double total = 0.0;
    const auto& l = llt_.matrixLLT();
    for (Index i = 0; i < l.rows(); ++i) total += std::log(std::real(l(i, i)));
    return 2.0 * total;
  }

  // diag(A^* Sigma^{-1} A)
  RealVector quadratic_forms(const Matrix<S>& a) const {
    return llt_.matrixL().solve(a).colwise().squaredNorm().transpose();
  }

  // Gamma A^* Sigma^{-1} Y
  Matrix<S> x_update(const GammaVector& gamma, const Matrix<S>& a, const Matrix<S>& y) const {
    return gamma.asDiagonal() * (a.adjoint() * llt_.solve(y));
  }

 private:
  Eigen::LLT<Matrix<S>> llt_;
};

}  // namespace jsr::detail
