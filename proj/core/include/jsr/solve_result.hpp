#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "jsr/linops.hpp"
#include "jsr/types.hpp"

namespace jsr {

template <Scalar S>
struct SolveResult {
  Matrix<S> X_hat;
  GammaVector gamma;
  Support support_estimate;
  std::vector<double> cost_trace;
  int iters = 0;
  bool converged = false;
  /// Signal rank used by subspace-aware solvers.
  std::optional<Index> r_hat;
};

/// ||g_new - g_old||_2 / ||g_new||_2 with 0/0 := 0 and x/0 := inf.
inline double relative_change(const GammaVector& g_new, const GammaVector& g_old) {
  const double num = (g_new - g_old).norm();
  const double den = g_new.norm();
  if (den > 0.0) return num / den;
  return num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

/// Top-k rows of X_hat by l2 norm when k is known, otherwise the indices with
/// gamma_i > prune_tol * max(gamma).
template <Scalar S>
Support estimate_support(const Matrix<S>& x_hat, const GammaVector& gamma, std::optional<Index> k,
                         double prune_tol) {
  if (k) return linops::top_k(linops::row_norms_squared(x_hat), *k);
  Support out;
  const double gmax = gamma.size() > 0 ? gamma.maxCoeff() : 0.0;
  if (!(gmax > 0.0)) return out;
  for (Index i = 0; i < gamma.size(); ++i) {
    if (gamma(i) > prune_tol * gmax) out.push_back(i);
  }
  return out;
}

}  // namespace jsr
