#include "jsr/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "jsr/linops.hpp"

namespace jsr::subspace {

void RankPolicy::validate(Index m) const {
  if (mode == Mode::fixed) {
    if (!fixed_r || *fixed_r < 1 || *fixed_r >= m) {
      throw Error("rank policy: fixed rank must satisfy 1 <= r < m");
    }
  }
  if (!(gap_threshold > 0.0 && gap_threshold < 1.0)) {
    throw Error("rank policy: gap threshold must lie in (0, 1)");
  }
  zero_floor.validate();
}

template <Scalar S>
SubspaceEstimate<S> estimate_subspace(const Matrix<S>& y, const RankPolicy& policy) {
  const Index m = y.rows();
  if (m < 2) throw Error("subspace estimate needs at least two measurements");
  if (y.cols() < 1) throw Error("subspace estimate needs at least one snapshot");
  if (!(y.norm() > 0.0)) throw Error("subspace estimate of a zero measurement matrix");
  policy.validate(m);

  Eigen::BDCSVD<Matrix<S>> svd(y, Eigen::ComputeFullU);
  SubspaceEstimate<S> est;
  est.singvals = RealVector::Zero(m);
  const RealVector& sv = svd.singularValues();
  est.singvals.head(sv.size()) = sv;

  if (policy.mode == RankPolicy::Mode::fixed) {
    est.r_hat = *policy.fixed_r;
  } else {
    const Index len = policy.skip_structural_zeros ? std::min(m, y.cols()) : m;
    std::vector<double> spectrum(est.singvals.data(), est.singvals.data() + len);
    // Round-off below the floor would otherwise produce spurious gaps.
    const double floor = policy.zero_floor.rel_tol * spectrum.front();
    for (double& s : spectrum) {
      if (s <= floor) s = 0.0;
    }
    if (policy.spectrum == GapSpectrum::singular_values_of_yyh) {
      for (double& s : spectrum) s *= s;
    }
    const auto nonzero = static_cast<Index>(
        std::count_if(spectrum.begin(), spectrum.end(), [](double s) { return s > 0.0; }));
    if (len == 1) {
      est.r_hat = 1;
    } else if (nonzero < len) {
      // Exact-rank data. The gap rule agrees whenever it can see the gap, but
      // it never considers index m - 1, so read the rank off directly.
      est.r_hat = nonzero;
    } else {
      est.r_hat = linops::detect_rank(spectrum, policy.gap_threshold);
    }
  }

  const Matrix<S>& u = svd.matrixU();
  est.U_sig = u.leftCols(est.r_hat);
  est.Q = u.rightCols(m - est.r_hat);
  return est;
}

template <Scalar S>
RealVector music_spectrum(const SubspaceEstimate<S>& est, const Matrix<S>& a) {
  const RealVector energy = (est.Q.adjoint() * a).colwise().squaredNorm().transpose();
  RealVector eta(energy.size());
  for (Index i = 0; i < energy.size(); ++i) {
    const double denom = std::sqrt(energy(i));
    eta(i) = denom > 1.0 / kSpectrumCap ? 1.0 / denom : kSpectrumCap;
  }
  return eta;
}

template <Scalar S>
Index subspace_rank_objective(const SubspaceEstimate<S>& est, const Matrix<S>& a,
                              const Support& indices, RankTolerance tol) {
  if (indices.empty()) throw Error("rank objective needs a nonempty index set");
  // Rank is judged against the scale of A_I: when R(A_I) lies inside the
  // signal subspace, Q^* A_I is pure round-off and has no scale of its own.
  const Matrix<S> a_i = linops::select_columns(a, indices);
  const double scale = linops::singular_values<S>(a_i)(0);
  return linops::numerical_rank<S>(Matrix<S>(est.Q.adjoint() * a_i), scale, tol);
}

#define JSR_INSTANTIATE(S)                                                                 \
  template SubspaceEstimate<S> estimate_subspace<S>(const Matrix<S>&, const RankPolicy&);  \
  template RealVector music_spectrum<S>(const SubspaceEstimate<S>&, const Matrix<S>&);     \
  template Index subspace_rank_objective<S>(const SubspaceEstimate<S>&, const Matrix<S>&,  \
                                            const Support&, RankTolerance);

JSR_INSTANTIATE(double)
JSR_INSTANTIATE(Complex)
#undef JSR_INSTANTIATE

}  // namespace jsr::subspace
