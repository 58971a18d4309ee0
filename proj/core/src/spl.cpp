#include "jsr/spl.hpp"

#include <cmath>
#include <string>

#include "sigma_factor.hpp"

namespace jsr::spl {

void SplConfig::validate() const {
  if (p && !(*p > 0.0 && *p <= 1.0)) throw Error("spl: p must lie in (0, 1]");
  if (!(lambda > 0.0)) throw Error("spl: lambda must be positive");
  if (max_iters < 1) throw Error("spl: max_iters must be positive");
  if (!(gamma_tol > 0.0 && denom_tol > 0.0 && gamma_floor > 0.0 && prune_tol > 0.0)) {
    throw Error("spl: tolerances must be positive");
  }
  if (!(gamma_cap > 1.0)) throw Error("spl: gamma_cap must exceed 1");
  psd_tol.validate();
  if (k && *k < 0) throw Error("spl: k must be nonnegative");
  if (initial_gamma && (initial_gamma->array() < 0.0).any()) {
    throw Error("spl: initial gamma must be nonnegative");
  }
  if (anneal) {
    if (!(anneal->factor > 0.0 && anneal->factor <= 1.0)) {
      throw Error("spl: anneal factor must lie in (0, 1]");
    }
    if (anneal->every < 1) throw Error("spl: anneal period must be positive");
    if (!(anneal->floor > 0.0)) throw Error("spl: anneal floor must be positive");
  }
}

double psi_exponent(std::optional<double> p) { return p ? *p / 2.0 - 1.0 : -1.0; }

namespace {

// Q^* A Gamma A^* Q from the projected dictionary B = Q^* A.
template <Scalar S>
Matrix<S> projected_gram(const GammaVector& gamma, const Matrix<S>& b) {
  Matrix<S> m = (b * gamma.asDiagonal()) * b.adjoint();
  return (m + m.adjoint()) / 2.0;
}

// d_i = b_i^* Psi b_i.
template <Scalar S>
RealVector denominators(const Matrix<S>& psi, const Matrix<S>& b) {
  const Matrix<S> pb = psi * b;
  RealVector d(b.cols());
  for (Index i = 0; i < b.cols(); ++i) d(i) = std::max(std::real(b.col(i).dot(pb.col(i))), 0.0);
  return d;
}

GammaVector gamma_from(const RealVector& energy, const RealVector& d, double n_snap,
                       const SplConfig& cfg) {
  GammaVector out(d.size());
  for (Index i = 0; i < d.size(); ++i) {
    double g = d(i) > cfg.denom_tol ? std::sqrt(energy(i) / (n_snap * d(i))) : cfg.gamma_cap;
    out(i) = g < cfg.gamma_floor ? 0.0 : g;
  }
  return out;
}

// Rows with gamma_i = 0 are skipped; `strict` demands they are exactly zero.
template <Scalar S>
double row_energy_over_gamma(const Matrix<S>& x, const GammaVector& gamma, bool strict) {
  if (x.rows() != gamma.size()) throw Error("spl: X rows do not match gamma length");
  const RealVector energy = linops::row_norms_squared(x);
  double total = 0.0;
  for (Index i = 0; i < energy.size(); ++i) {
    if (gamma(i) > 0.0) {
      total += energy(i) / gamma(i);
    } else if (strict && energy(i) > 0.0) {
      throw Error("spl: row " + std::to_string(i) + " of X is nonzero where gamma is zero");
    }
  }
  return total;
}

template <Scalar S>
double cost_impl(const Matrix<S>& x, const GammaVector& gamma, const Matrix<S>& psi,
                 const Matrix<S>& a, const Matrix<S>& y, const Matrix<S>& b, double lambda,
                 std::optional<double> p, RankTolerance tol, bool strict) {
  const double fit = (y - a * x).squaredNorm();
  const double weighted = row_energy_over_gamma(x, gamma, strict);
  const auto n_snap = static_cast<double>(y.cols());
  double penalty = 0.0;
  if (b.rows() > 0) {
    if (p) {
      const Matrix<S> m = projected_gram(gamma, b);
      // q/2 = p / (p - 2); the conjugate term is -(2/q) Tr(Psi^{q/2}) with 2/q = 1 - 2/p.
      const double half_q = *p / (*p - 2.0);
      const double two_over_q = 1.0 - 2.0 / *p;
      const double coupling = std::real((m * psi).trace());
      penalty = coupling - two_over_q * linops::psd_power_trace<S>(psi, half_q, tol);
    } else {
      const Matrix<S> w = b * gamma.cwiseSqrt().asDiagonal();
      const Matrix<S> full = a * gamma.cwiseSqrt().asDiagonal();
      const double scale = full.size() > 0 ? linops::singular_values<S>(full)(0) : 0.0;
      penalty = static_cast<double>(linops::numerical_rank<S>(w, scale, tol));
    }
  }
  return fit + lambda * (weighted + n_snap * penalty);
}

template <Scalar S>
void check_shapes(const Matrix<S>& a, const Matrix<S>& q) {
  if (q.rows() != a.rows()) throw Error("spl: Q and A row counts differ");
}

}  // namespace

template <Scalar S>
linops::PsdMatrix<S> spl_psi_update(const GammaVector& gamma, const Matrix<S>& a,
                                    const Matrix<S>& q, std::optional<double> p,
                                    RankTolerance tol) {
  check_shapes(a, q);
  if (gamma.size() != a.cols()) throw Error("spl: gamma length does not match A");
  const Matrix<S> b = q.adjoint() * a;
  return linops::PsdMatrix<S>::trusted(
      linops::psd_power<S>(projected_gram(gamma, b), psi_exponent(p), tol));
}

template <Scalar S>
Matrix<S> spl_x_update(const GammaVector& gamma, const Matrix<S>& a, const Matrix<S>& y,
                       double lambda) {
  const detail::SigmaFactor<S> sigma(gamma, a, lambda);
  return sigma.x_update(gamma, a, y);
}

template <Scalar S>
RealVector spl_denominators(const linops::PsdMatrix<S>& psi, const Matrix<S>& a,
                            const Matrix<S>& q) {
  check_shapes(a, q);
  if (psi.size() != q.cols()) throw Error("spl: Psi size does not match Q");
  return denominators<S>(psi.matrix(), q.adjoint() * a);
}

template <Scalar S>
GammaVector spl_gamma_update(const Matrix<S>& x, const linops::PsdMatrix<S>& psi,
                             const Matrix<S>& a, const Matrix<S>& q, const SplConfig& cfg) {
  if (x.rows() != a.cols()) throw Error("spl: X rows do not match the columns of A");
  const RealVector d = spl_denominators(psi, a, q);
  return gamma_from(linops::row_norms_squared(x), d, static_cast<double>(x.cols()), cfg);
}

template <Scalar S>
double spl_cost(const Matrix<S>& x, const GammaVector& gamma, const linops::PsdMatrix<S>& psi,
                const Matrix<S>& a, const Matrix<S>& y, const Matrix<S>& q, double lambda,
                std::optional<double> p, RankTolerance tol) {
  check_shapes(a, q);
  if (psi.size() != q.cols()) throw Error("spl: Psi size does not match Q");
  const double c = cost_impl<S>(x, gamma, psi.matrix(), a, y, q.adjoint() * a, lambda, p, tol,
                                /*strict=*/true);
  if (!std::isfinite(c)) throw Error("spl: non-finite cost");
  return c;
}

template <Scalar S>
double weighted_row_energy(const Matrix<S>& x, const GammaVector& gamma) {
  return row_energy_over_gamma(x, gamma, true);
}

template <Scalar S>
SolveResult<S> spl_solve(const Matrix<S>& a, const Matrix<S>& y, const SplConfig& cfg) {
  if (y.rows() != a.rows()) throw Error("spl: A and Y row counts differ");
  if (!(y.norm() > 0.0)) throw Error("spl: Y is zero, no subspace to estimate");
  return spl_solve<S>(a, y, subspace::estimate_subspace<S>(y, cfg.rank_policy), cfg);
}

template <Scalar S>
SolveResult<S> spl_solve(const Matrix<S>& a, const Matrix<S>& y,
                         const subspace::SubspaceEstimate<S>& est, const SplConfig& cfg) {
  cfg.validate();
  const Index n = a.cols();
  if (y.rows() != a.rows()) throw Error("spl: A and Y row counts differ");
  if (!(y.norm() > 0.0)) throw Error("spl: Y is zero, no subspace to estimate");
  check_shapes(a, est.Q);
  if (cfg.initial_gamma && cfg.initial_gamma->size() != n) {
    throw Error("spl: initial gamma has the wrong length");
  }
  const auto n_snap = static_cast<double>(y.cols());
  const Matrix<S> b = est.Q.adjoint() * a;
  const double exponent = psi_exponent(cfg.p);

  auto lambda_at = [&](int t) {
    if (!cfg.anneal) return cfg.lambda;
    const double steps = static_cast<double>(t / cfg.anneal->every);
    return std::max(cfg.lambda * std::pow(cfg.anneal->factor, steps), cfg.anneal->floor);
  };

  SolveResult<S> res;
  res.r_hat = est.r_hat;
  GammaVector gamma = cfg.initial_gamma ? *cfg.initial_gamma : GammaVector::Ones(n);

  for (int t = 0; t < cfg.max_iters; ++t) {
    const double lambda = lambda_at(t);
    const Matrix<S> x = spl_x_update<S>(gamma, a, y, lambda);
    const Matrix<S> psi = b.rows() > 0
                              ? linops::psd_power<S>(projected_gram(gamma, b), exponent,
                                                     cfg.psd_tol)
                              : Matrix<S>(0, 0);
    const RealVector d = b.rows() > 0 ? denominators<S>(psi, b) : RealVector::Zero(n);
    GammaVector next = gamma_from(linops::row_norms_squared(x), d, n_snap, cfg);
    if (!x.allFinite() || !psi.allFinite() || !next.allFinite()) {
      throw Error("spl: non-finite state at iteration " + std::to_string(t));
    }
    if (cfg.track_cost) {
      const double c = cost_impl<S>(x, next, psi, a, y, b, lambda, cfg.p, cfg.psd_tol,
                                    /*strict=*/false);
      if (!std::isfinite(c)) throw Error("spl: non-finite cost at iteration " + std::to_string(t));
      res.cost_trace.push_back(c);
    }

    const double change = relative_change(next, gamma);
    gamma = std::move(next);
    res.iters = t + 1;
    if (change < cfg.gamma_tol) {
      res.converged = true;
      break;
    }
  }

  res.X_hat = spl_x_update<S>(gamma, a, y, lambda_at(res.iters));
  if (!res.X_hat.allFinite()) throw Error("spl: non-finite final estimate");
  res.gamma = std::move(gamma);
  res.support_estimate = estimate_support(res.X_hat, res.gamma, cfg.k, cfg.prune_tol);
  return res;
}

#define JSR_INSTANTIATE(S)                                                                       \
  template linops::PsdMatrix<S> spl_psi_update<S>(const GammaVector&, const Matrix<S>&,          \
                                                  const Matrix<S>&, std::optional<double>,       \
                                                  RankTolerance);                                \
  template Matrix<S> spl_x_update<S>(const GammaVector&, const Matrix<S>&, const Matrix<S>&,     \
                                     double);                                                    \
  template RealVector spl_denominators<S>(const linops::PsdMatrix<S>&, const Matrix<S>&,         \
                                          const Matrix<S>&);                                     \
  template GammaVector spl_gamma_update<S>(const Matrix<S>&, const linops::PsdMatrix<S>&,        \
                                           const Matrix<S>&, const Matrix<S>&, const SplConfig&); \
  template double spl_cost<S>(const Matrix<S>&, const GammaVector&, const linops::PsdMatrix<S>&, \
                              const Matrix<S>&, const Matrix<S>&, const Matrix<S>&, double,      \
                              std::optional<double>, RankTolerance);                             \
  template double weighted_row_energy<S>(const Matrix<S>&, const GammaVector&);                  \
  template SolveResult<S> spl_solve<S>(const Matrix<S>&, const Matrix<S>&, const SplConfig&);    \
  template SolveResult<S> spl_solve<S>(const Matrix<S>&, const Matrix<S>&,                       \
                                       const subspace::SubspaceEstimate<S>&, const SplConfig&);

JSR_INSTANTIATE(double)
JSR_INSTANTIATE(Complex)
#undef JSR_INSTANTIATE

}  // namespace jsr::spl
