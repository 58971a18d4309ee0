#include "jsr/msbl.hpp"

#include <cmath>
#include <string>

#include "jsr/linops.hpp"
#include "sigma_factor.hpp"

namespace jsr::msbl {

void MsblConfig::validate() const {
  if (!(lambda > 0.0)) throw Error("msbl: lambda must be positive");
  if (max_iters < 1) throw Error("msbl: max_iters must be positive");
  if (!(gamma_tol > 0.0 && gamma_floor > 0.0 && prune_tol > 0.0)) {
    throw Error("msbl: tolerances must be positive");
  }
  if (!(gamma_floor < prune_tol)) throw Error("msbl: gamma_floor must be below prune_tol");
  if (k && *k < 0) throw Error("msbl: k must be nonnegative");
  if (initial_gamma && (initial_gamma->array() < 0.0).any()) {
    throw Error("msbl: initial gamma must be nonnegative");
  }
}

template <Scalar S>
double noise_scaled_lambda(const Matrix<S>& y, double snr_db) {
  const double power = y.squaredNorm() / static_cast<double>(y.rows() * y.cols());
  const double scale = std::isfinite(snr_db) ? std::pow(10.0, -snr_db / 10.0) : 1e-2;
  return std::max(scale * power, 1e-300);
}

template <Scalar S>
double msbl_cost(const GammaVector& gamma, const Matrix<S>& a, const Matrix<S>& y, double lambda) {
  const detail::SigmaFactor<S> sigma(gamma, a, lambda);
  return sigma.data_term(y) + static_cast<double>(y.cols()) * sigma.log_det();
}

template <Scalar S>
Matrix<S> msbl_x_update(const GammaVector& gamma, const Matrix<S>& a, const Matrix<S>& y,
                        double lambda) {
  const detail::SigmaFactor<S> sigma(gamma, a, lambda);
  return sigma.x_update(gamma, a, y);
}

template <Scalar S>
GammaVector msbl_gamma_update(const GammaVector& gamma_prev, const Matrix<S>& x,
                              const Matrix<S>& a, double lambda, double floor) {
  const detail::SigmaFactor<S> sigma(gamma_prev, a, lambda);
  const RealVector denom = sigma.quadratic_forms(a);
  const RealVector energy = linops::row_norms_squared(x) / static_cast<double>(x.cols());
  GammaVector out(gamma_prev.size());
  for (Index i = 0; i < out.size(); ++i) {
    const double g = std::sqrt(energy(i) / denom(i));
    out(i) = g < floor ? 0.0 : g;
  }
  return out;
}

template <Scalar S>
RealVector msbl_penalty_gradient(const GammaVector& gamma, const Matrix<S>& x,
                                 const Matrix<S>& a, double lambda) {
  const detail::SigmaFactor<S> sigma(gamma, a, lambda);
  const RealVector denom = sigma.quadratic_forms(a);
  const RealVector energy = linops::row_norms_squared(x);
  const auto n_snap = static_cast<double>(x.cols());
  return (-energy.array() / gamma.array().square() + n_snap * denom.array()).matrix();
}

template <Scalar S>
SolveResult<S> msbl_solve(const Matrix<S>& a, const Matrix<S>& y, const MsblConfig& cfg) {
  cfg.validate();
  const Index n = a.cols();
  if (y.rows() != a.rows()) throw Error("msbl: A and Y row counts differ");
  if (cfg.initial_gamma && cfg.initial_gamma->size() != n) {
    throw Error("msbl: initial gamma has the wrong length");
  }
  const auto n_snap = static_cast<double>(y.cols());

  SolveResult<S> res;
  GammaVector gamma = cfg.initial_gamma ? *cfg.initial_gamma : GammaVector::Ones(n);

  for (int t = 0; t < cfg.max_iters; ++t) {
    const detail::SigmaFactor<S> sigma(gamma, a, cfg.lambda);
    if (cfg.track_cost) {
      const double cost = sigma.data_term(y) + n_snap * sigma.log_det();
      if (!std::isfinite(cost)) {
        throw Error("msbl: non-finite cost at iteration " + std::to_string(t));
      }
      res.cost_trace.push_back(cost);
    }
    const Matrix<S> x = sigma.x_update(gamma, a, y);
    const RealVector denom = sigma.quadratic_forms(a);
    const RealVector energy = linops::row_norms_squared(x) / n_snap;

    GammaVector next(n);
    for (Index i = 0; i < n; ++i) {
      const double g = std::sqrt(energy(i) / denom(i));
      next(i) = g < cfg.gamma_floor ? 0.0 : g;
    }
    if (!next.allFinite()) throw Error("msbl: non-finite gamma at iteration " + std::to_string(t));

    const double change = relative_change(next, gamma);
    gamma = std::move(next);
    res.iters = t + 1;
    if (change < cfg.gamma_tol) {
      res.converged = true;
      break;
    }
  }

  const detail::SigmaFactor<S> sigma(gamma, a, cfg.lambda);
  if (cfg.track_cost) {
    const double cost = sigma.data_term(y) + n_snap * sigma.log_det();
    if (!std::isfinite(cost)) throw Error("msbl: non-finite final cost");
    res.cost_trace.push_back(cost);
  }
  res.X_hat = sigma.x_update(gamma, a, y);
  res.gamma = std::move(gamma);
  res.support_estimate = estimate_support(res.X_hat, res.gamma, cfg.k, cfg.prune_tol);
  return res;
}

#define JSR_INSTANTIATE(S)                                                                     \
  template double noise_scaled_lambda<S>(const Matrix<S>&, double);                            \
  template double msbl_cost<S>(const GammaVector&, const Matrix<S>&, const Matrix<S>&, double); \
  template Matrix<S> msbl_x_update<S>(const GammaVector&, const Matrix<S>&, const Matrix<S>&,  \
                                      double);                                                 \
  template GammaVector msbl_gamma_update<S>(const GammaVector&, const Matrix<S>&,              \
                                            const Matrix<S>&, double, double);                 \
  template RealVector msbl_penalty_gradient<S>(const GammaVector&, const Matrix<S>&,           \
                                               const Matrix<S>&, double);                      \
  template SolveResult<S> msbl_solve<S>(const Matrix<S>&, const Matrix<S>&, const MsblConfig&);

JSR_INSTANTIATE(double)
JSR_INSTANTIATE(Complex)
#undef JSR_INSTANTIATE

}  // namespace jsr::msbl
