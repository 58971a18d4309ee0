#include "jsr/greedy.hpp"

#include <algorithm>
#include <vector>

#include "jsr/linops.hpp"

namespace jsr::greedy {

void GreedyConfig::validate(Index m) const {
  if (k < 1 || k > m) throw Error("greedy: k must satisfy 1 <= k <= m");
}

namespace {

constexpr double kDependenceTol = 1e-10;

// Greedy simultaneous pursuit on `data`. `basis` holds an orthonormal basis to
// project off before scoring (may be empty); the selected columns are
// appended to it by Gram-Schmidt.
template <Scalar S>
Support pursue(const Matrix<S>& a, const Matrix<S>& data, Index steps, Matrix<S>& basis) {
  const Index m = a.rows();
  const Index n = a.cols();
  Matrix<S> residual = data - basis * (basis.adjoint() * data);
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  Support picked;
  for (Index step = 0; step < steps; ++step) {
    const RealVector score = (a.adjoint() * residual).rowwise().squaredNorm();
    Index best = -1;
    for (Index i = 0; i < n; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      if (best < 0 || score(i) > score(best)) best = i;
    }
    if (best < 0) throw Error("greedy: ran out of columns");
    taken[static_cast<std::size_t>(best)] = true;
    picked.push_back(best);

    Vector<S> v = a.col(best);
    for (int pass = 0; pass < 2; ++pass) v -= basis * (basis.adjoint() * v);
    const double norm = v.norm();
    if (norm < kDependenceTol) throw Error("greedy: selected columns are numerically dependent");
    v /= norm;
    basis.conservativeResize(m, basis.cols() + 1);
    basis.col(basis.cols() - 1) = v;
    residual -= v * (v.adjoint() * residual);
  }
  return picked;
}

}  // namespace

template <Scalar S>
Support music_recover(const Matrix<S>& a, const subspace::SubspaceEstimate<S>& est,
                      const GreedyConfig& cfg) {
  cfg.validate(a.rows());
  return linops::top_k(subspace::music_spectrum(est, a), cfg.k);
}

template <Scalar S>
Support music_recover(const Matrix<S>& a, const Matrix<S>& y, const GreedyConfig& cfg) {
  return music_recover<S>(a, subspace::estimate_subspace<S>(y, cfg.rank_policy), cfg);
}

template <Scalar S>
Support somp_recover(const Matrix<S>& a, const Matrix<S>& y, const GreedyConfig& cfg) {
  cfg.validate(a.rows());
  if (y.rows() != a.rows()) throw Error("somp: A and Y row counts differ");
  Matrix<S> basis(a.rows(), 0);
  Support out = pursue<S>(a, y, cfg.k, basis);
  std::sort(out.begin(), out.end());
  return out;
}

template <Scalar S>
Support samusic_recover(const Matrix<S>& a, const subspace::SubspaceEstimate<S>& est,
                        const GreedyConfig& cfg) {
  cfg.validate(a.rows());
  const Index r = est.r_hat;
  if (r >= cfg.k) return music_recover<S>(a, est, cfg);

  // Partial support from S-OMP on the signal subspace.
  Matrix<S> basis(a.rows(), 0);
  const Support partial = pursue<S>(a, est.U_sig, cfg.k - r, basis);

  // W = orth[U_sig, A_partial]; U_sig is orthonormal already so Gram-Schmidt
  // of the partial columns against it completes the basis.
  Matrix<S> w = est.U_sig;
  for (Index i : partial) {
    Vector<S> v = a.col(i);
    for (int pass = 0; pass < 2; ++pass) v -= w * (w.adjoint() * v);
    const double norm = v.norm();
    if (norm < kDependenceTol) continue;
    w.conservativeResize(Eigen::NoChange, w.cols() + 1);
    w.col(w.cols() - 1) = v / norm;
  }

  RealVector score = (w.adjoint() * a).colwise().norm().transpose();
  score.array() /= a.colwise().norm().transpose().array().max(1e-300);
  for (Index i : partial) score(i) = -1.0;
  Support out = linops::top_k(score, r);
  out.insert(out.end(), partial.begin(), partial.end());
  std::sort(out.begin(), out.end());
  return out;
}

template <Scalar S>
Support samusic_recover(const Matrix<S>& a, const Matrix<S>& y, const GreedyConfig& cfg) {
  return samusic_recover<S>(a, subspace::estimate_subspace<S>(y, cfg.rank_policy), cfg);
}

#define JSR_INSTANTIATE(S)                                                                     \
  template Support music_recover<S>(const Matrix<S>&, const Matrix<S>&, const GreedyConfig&);  \
  template Support music_recover<S>(const Matrix<S>&, const subspace::SubspaceEstimate<S>&,    \
                                    const GreedyConfig&);                                      \
  template Support somp_recover<S>(const Matrix<S>&, const Matrix<S>&, const GreedyConfig&);   \
  template Support samusic_recover<S>(const Matrix<S>&, const Matrix<S>&, const GreedyConfig&); \
  template Support samusic_recover<S>(const Matrix<S>&, const subspace::SubspaceEstimate<S>&,  \
                                      const GreedyConfig&);

JSR_INSTANTIATE(double)
JSR_INSTANTIATE(Complex)
#undef JSR_INSTANTIATE

}  // namespace jsr::greedy
