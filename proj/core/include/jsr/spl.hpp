#pragma once

#include <optional>

#include "jsr/linops.hpp"
#include "jsr/solve_result.hpp"
#include "jsr/subspace.hpp"
#include "jsr/types.hpp"

/// Subspace-penalized sparse learning.
///
/// Alternating minimisation of the augmented cost
///
///   C(X, gamma, Psi) = ||Y - A X||_F^2
///       + lambda { Tr(X^* Gamma^{-1} X) + N [ Tr(M Psi) - (2/q) Tr(Psi^{q/2}) ] },
///   M = Q^* A Gamma A^* Q,   2/p + 2/q = 1,
///
/// where Q spans the noise subspace of Y and stays fixed for the whole solve.
/// Each block update is a closed form:
///   X     <- Gamma A^* (lambda I + A Gamma A^*)^{-1} Y
///   Psi   <- M^{p/2 - 1}                 (zero eigenvalues stay zero)
///   gamma <- ( ||x^i||^2 / (N d_i) )^{1/2},  d_i = a_i^* Q Psi Q^* a_i
/// with finite stand-ins when d_i is numerically zero. The p -> 0 mode uses
/// Psi = M^+ and minimises rank(Q^* A Gamma^{1/2}) in the limit.
namespace jsr::spl {

/// Geometric lambda schedule: lambda_t = max(lambda_0 * factor^(t / every), floor).
struct LambdaAnneal {
  double factor = 0.5;
  int every = 10;
  double floor = 1e-10;
};

struct SplConfig {
  /// Schatten order in (0, 1]. Empty selects the p -> 0 rank-minimising update.
  std::optional<double> p;
  double lambda = 1e-3;
  int max_iters = 200;
  double gamma_tol = 1e-3;
  /// d_i at or below this counts as zero.
  double denom_tol = 1e-10;
  /// Finite value used for both degenerate branches of the gamma update.
  double gamma_cap = 1e6;
  double gamma_floor = 1e-12;
  double prune_tol = 1e-8;
  subspace::RankPolicy rank_policy;
  RankTolerance psd_tol;
  std::optional<Index> k;
  std::optional<GammaVector> initial_gamma;
  std::optional<LambdaAnneal> anneal;
  bool track_cost = true;

  void validate() const;
};

/// Exponent applied to M in the Psi update: p/2 - 1, or -1 when p -> 0.
double psi_exponent(std::optional<double> p);

/// Psi = (Q^* A Gamma A^* Q)^{p/2 - 1} with zero retention.
template <Scalar S>
linops::PsdMatrix<S> spl_psi_update(const GammaVector& gamma, const Matrix<S>& a,
                                    const Matrix<S>& q, std::optional<double> p,
                                    RankTolerance tol = {});

/// Same closed form as the M-SBL X update.
template <Scalar S>
Matrix<S> spl_x_update(const GammaVector& gamma, const Matrix<S>& a, const Matrix<S>& y,
                       double lambda);

/// d_i = a_i^* Q Psi Q^* a_i for every column.
template <Scalar S>
RealVector spl_denominators(const linops::PsdMatrix<S>& psi, const Matrix<S>& a,
                            const Matrix<S>& q);

/// Gamma update with the degenerate branches:
///   d_i >  denom_tol               -> (||x^i||^2 / (N d_i))^{1/2}
///   d_i <= denom_tol               -> gamma_cap   (whether or not x^i is zero)
/// Results below gamma_floor are set to zero.
template <Scalar S>
GammaVector spl_gamma_update(const Matrix<S>& x, const linops::PsdMatrix<S>& psi,
                             const Matrix<S>& a, const Matrix<S>& q, const SplConfig& cfg);

/// Augmented cost C(X, gamma, Psi). In p -> 0 mode the Psi terms are replaced
/// by the monitoring surrogate N * numrank(Q^* A Gamma^{1/2}). Throws if a row
/// of X is nonzero where gamma is zero.
template <Scalar S>
double spl_cost(const Matrix<S>& x, const GammaVector& gamma, const linops::PsdMatrix<S>& psi,
                const Matrix<S>& a, const Matrix<S>& y, const Matrix<S>& q, double lambda,
                std::optional<double> p, RankTolerance tol = {});

/// Tr(X^* Gamma^{-1} X) over the rows with gamma_i > 0.
template <Scalar S>
double weighted_row_energy(const Matrix<S>& x, const GammaVector& gamma);

template <Scalar S>
SolveResult<S> spl_solve(const Matrix<S>& a, const Matrix<S>& y, const SplConfig& cfg);

/// Variant reusing a subspace estimate computed by the caller.
template <Scalar S>
SolveResult<S> spl_solve(const Matrix<S>& a, const Matrix<S>& y,
                         const subspace::SubspaceEstimate<S>& est, const SplConfig& cfg);

}  // namespace jsr::spl
