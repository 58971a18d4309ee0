#pragma once

#include <optional>

#include "jsr/solve_result.hpp"
#include "jsr/types.hpp"

/// M-SBL: alternating closed-form X update and the square-root fixed point
/// for gamma, minimising Tr(Sigma_y^{-1} Y Y^*) + N log|Sigma_y| with
/// Sigma_y = lambda I + A Gamma A^*.
namespace jsr::msbl {

struct MsblConfig {
  double lambda = 1e-3;
  int max_iters = 500;
  double gamma_tol = 1e-3;
  double gamma_floor = 1e-12;
  double prune_tol = 1e-8;
  /// When set, the support estimate is the k largest rows of X_hat.
  std::optional<Index> k;
  /// Defaults to all ones.
  std::optional<GammaVector> initial_gamma;
  bool track_cost = true;

  void validate() const;
};

/// lambda = 10^(-snr/10) ||Y||_F^2 / (m N) for finite SNR,
/// 1e-2 ||Y||_F^2 / (m N) otherwise.
template <Scalar S>
double noise_scaled_lambda(const Matrix<S>& y, double snr_db);

template <Scalar S>
double msbl_cost(const GammaVector& gamma, const Matrix<S>& a, const Matrix<S>& y, double lambda);

/// X = Gamma A^* (lambda I + A Gamma A^*)^{-1} Y. Rows with gamma_i = 0 are zero.
template <Scalar S>
Matrix<S> msbl_x_update(const GammaVector& gamma, const Matrix<S>& a, const Matrix<S>& y,
                        double lambda);

/// gamma_i = ( ||x^i||^2 / N / a_i^H Sigma_y^{-1} a_i )^{1/2} with Sigma_y
/// built from gamma_prev; entries below `floor` are set to zero.
template <Scalar S>
GammaVector msbl_gamma_update(const GammaVector& gamma_prev, const Matrix<S>& x,
                              const Matrix<S>& a, double lambda, double floor = 1e-12);

/// Partial derivatives of Tr(X^* Gamma^{-1} X) + N log|Sigma_y| in gamma
/// with X held fixed: -||x^i||^2 / gamma_i^2 + N a_i^H Sigma_y^{-1} a_i.
template <Scalar S>
RealVector msbl_penalty_gradient(const GammaVector& gamma, const Matrix<S>& x,
                                 const Matrix<S>& a, double lambda);

template <Scalar S>
SolveResult<S> msbl_solve(const Matrix<S>& a, const Matrix<S>& y, const MsblConfig& cfg);

}  // namespace jsr::msbl
