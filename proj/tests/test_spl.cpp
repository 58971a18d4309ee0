#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "jsr/linops.hpp"
#include "jsr/model.hpp"
#include "jsr/msbl.hpp"
#include "jsr/oracle.hpp"
#include "jsr/spl.hpp"
#include "jsr/subspace.hpp"
#include "test_support.hpp"

namespace jsr {
namespace {

using linops::PsdMatrix;
using spl::SplConfig;
using testing::random_gamma;
using testing::random_matrix;
using testing::spec_for;
using testing::fourier;
using testing::rel_err;
using testing::unit_columns;


Eigen::MatrixXd scalar(double v) { return Eigen::MatrixXd::Constant(1, 1, v); }

TEST(PsiExponent, Values) {
  EXPECT_DOUBLE_EQ(spl::psi_exponent(1.0), -0.5);
  EXPECT_DOUBLE_EQ(spl::psi_exponent(0.5), -0.75);
  EXPECT_DOUBLE_EQ(spl::psi_exponent(std::nullopt), -1.0);
}

TEST(PsiUpdate, SquareRootInverseAtPOne) {
  // Q = I and A = diag(2, 1), Gamma = I give M = diag(4, 1).
  const Eigen::MatrixXd q = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd a = Eigen::Vector2d(2.0, 1.0).asDiagonal();
  const Eigen::MatrixXd psi = spl::spl_psi_update<double>(GammaVector::Ones(2), a, q, 1.0).matrix();
  EXPECT_NEAR(psi(0, 0), 0.5, 1e-14);
  EXPECT_NEAR(psi(1, 1), 1.0, 1e-14);
  EXPECT_NEAR(psi(0, 1), 0.0, 1e-14);
}

TEST(PsiUpdate, PseudoInverseInRankMode) {
  const Eigen::MatrixXd q = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd a = 2.0 * Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd psi =
      spl::spl_psi_update<double>(Eigen::Vector2d(1.0, 0.0), a, q, std::nullopt).matrix();
  EXPECT_NEAR(psi(0, 0), 0.25, 1e-14);
  EXPECT_EQ(psi(1, 1), 0.0);
}

TEST(PsiUpdate, ConjugateExponentRecoversM) {
  const auto a = unit_columns(random_matrix<Complex>(8, 20, 1));
  const auto y = random_matrix<Complex>(8, 3, 2);
  const Matrix<Complex> q = linops::noise_basis<Complex>(y, 3);
  const GammaVector g = random_gamma(20, 3);
  const Matrix<Complex> m = q.adjoint() * a * g.cast<Complex>().asDiagonal() * a.adjoint() * q;
  for (double p : {1.0, 0.5, 0.1}) {
    const Matrix<Complex> psi = spl::spl_psi_update<Complex>(g, a, q, p).matrix();
    const double back = 2.0 / (p - 2.0);  // q/2 - 1
    EXPECT_LT(rel_err(linops::psd_power<Complex>(psi, back), m), 1e-8);
  }
}

// min over Psi of Tr(M Psi) - (2/q) Tr(Psi^{q/2}) is attained at the update
// and equals (2/p) Tr(M^{p/2}).
TEST(PsiUpdate, MinimisesConjugateTerm) {
  const auto b = random_matrix<double>(5, 5, 7);
  const Eigen::MatrixXd m = b * b.transpose() + 0.1 * Eigen::MatrixXd::Identity(5, 5);
  for (double p : {1.0, 0.5}) {
    const double half_q = p / (p - 2.0);
    const double two_over_q = 1.0 - 2.0 / p;
    auto objective = [&](const Eigen::MatrixXd& psi) {
      return (m * psi).trace() - two_over_q * linops::psd_power_trace<double>(psi, half_q);
    };
    const Eigen::MatrixXd psi = linops::psd_power<double>(m, p / 2.0 - 1.0);
    const double best = objective(psi);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    const double expected = (2.0 / p) * eig.eigenvalues().array().pow(p / 2.0).sum();
    EXPECT_NEAR(best, expected, 1e-10 * expected);
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto d = random_matrix<double>(5, 5, 100 + s);
      Eigen::MatrixXd perturbed = psi + 0.05 * (d + d.transpose()) / 2.0;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pe(perturbed);
      if (pe.eigenvalues().minCoeff() <= 0.0) continue;
      EXPECT_GE(objective(perturbed), best - 1e-12 * std::abs(best));
    }
  }
}

TEST(XUpdate, MatchesMsbl) {
  const auto a = unit_columns(random_matrix<Complex>(6, 15, 4));
  const auto y = random_matrix<Complex>(6, 4, 5);
  const GammaVector g = random_gamma(15, 6);
  EXPECT_EQ(spl::spl_x_update<Complex>(g, a, y, 0.01), msbl::msbl_x_update<Complex>(g, a, y, 0.01));
  EXPECT_EQ(spl::spl_x_update<Complex>(GammaVector::Zero(15), a, y, 0.01).norm(), 0.0);
}

TEST(XUpdate, UnitaryDictionary) {
  const auto u = testing::random_unitary<Complex>(5, 8);
  const auto y = random_matrix<Complex>(5, 3, 9);
  const Matrix<Complex> x = spl::spl_x_update<Complex>(GammaVector::Ones(5), u, y, 1e-12);
  EXPECT_LT(rel_err(x, Matrix<Complex>(u.adjoint() * y)), 1e-10);
}

TEST(GammaUpdate, Branches) {
  SplConfig cfg;
  const Eigen::MatrixXd q = scalar(1.0);
  const Eigen::MatrixXd a = scalar(1.0);
  const auto psi = PsdMatrix<double>(scalar(4.0));
  EXPECT_NEAR(spl::spl_gamma_update<double>(scalar(2.0), psi, a, q, cfg)(0), 1.0, 1e-14);
  const auto zero = PsdMatrix<double>(scalar(0.0));
  EXPECT_EQ(spl::spl_gamma_update<double>(scalar(0.0), zero, a, q, cfg)(0), cfg.gamma_cap);
  EXPECT_EQ(spl::spl_gamma_update<double>(scalar(2.0), zero, a, q, cfg)(0), cfg.gamma_cap);
  // d_i above tolerance with a zero row gives zero.
  EXPECT_EQ(spl::spl_gamma_update<double>(scalar(0.0), psi, a, q, cfg)(0), 0.0);
}

TEST(GammaUpdate, DenominatorsMatchDirectForm) {
  const auto a = unit_columns(random_matrix<Complex>(7, 12, 10));
  const Matrix<Complex> q = linops::noise_basis<Complex>(random_matrix<Complex>(7, 2, 11), 2);
  const auto psi = spl::spl_psi_update<Complex>(random_gamma(12, 12), a, q, 0.5);
  const RealVector d = spl::spl_denominators<Complex>(psi, a, q);
  for (Index i = 0; i < 12; ++i) {
    const Complex direct = a.col(i).adjoint() * q * psi.matrix() * q.adjoint() * a.col(i);
    EXPECT_NEAR(d(i), direct.real(), 1e-12 * std::max(1.0, std::abs(direct)));
  }
}

// One update from a state where row i is zero and a_i lies in the signal
// subspace: SPL revives the row, M-SBL keeps it dead.
TEST(GammaUpdate, RevivalContrastWithMsbl) {
  const Index m = 6;
  const auto y = random_matrix<double>(m, 2, 13);
  Eigen::MatrixXd a = unit_columns(random_matrix<double>(m, 10, 14));
  a.col(3) = y.col(0).normalized();
  const Eigen::MatrixXd q = linops::noise_basis<double>(y, 2);
  GammaVector g = random_gamma(10, 15);
  g(3) = 0.0;
  Eigen::MatrixXd x = random_matrix<double>(10, 2, 16);
  x.row(3).setZero();
  SplConfig cfg;
  cfg.p = 0.5;
  const auto psi = spl::spl_psi_update<double>(g, a, q, cfg.p);
  EXPECT_LE(spl::spl_denominators<double>(psi, a, q)(3), cfg.denom_tol);
  EXPECT_GT(spl::spl_gamma_update<double>(x, psi, a, q, cfg)(3), 0.0);
  EXPECT_EQ(msbl::msbl_gamma_update<double>(g, x, a, 0.01)(3), 0.0);
}

TEST(GammaUpdate, MusicCaseFactorisation) {
  // m = k + 1 and r = k: Q is a single column and M is a scalar.
  const Index k = 4;
  const auto inst = model::make_instance<Complex>(fourier(spec_for(k + 1, 30, 8, k, k, 17)));
  const auto est = subspace::estimate_subspace<Complex>(inst.Y, subspace::RankPolicy::fixed(k));
  ASSERT_EQ(est.Q.cols(), 1);
  const GammaVector g = random_gamma(30, 18);
  const Matrix<Complex> x = spl::spl_x_update<Complex>(g, inst.A, inst.Y, 1e-3);
  SplConfig cfg;
  cfg.p = 0.5;
  const auto psi = spl::spl_psi_update<Complex>(g, inst.A, est.Q, cfg.p);
  const GammaVector next = spl::spl_gamma_update<Complex>(x, psi, inst.A, est.Q, cfg);
  const RealVector eta = subspace::music_spectrum<Complex>(est, inst.A);
  double mval = 0.0;
  for (Index j = 0; j < 30; ++j) mval += g(j) * std::norm((est.Q.adjoint() * inst.A.col(j))(0));
  const double scale = std::pow(mval, (1.0 - *cfg.p / 2.0) / 2.0);
  const RealVector d = spl::spl_denominators<Complex>(psi, inst.A, est.Q);
  for (Index i = 0; i < 30; ++i) {
    if (d(i) <= cfg.denom_tol) {
      // Support columns lie in the signal subspace and take the cap.
      EXPECT_TRUE(std::binary_search(inst.support.begin(), inst.support.end(), i));
      EXPECT_EQ(next(i), cfg.gamma_cap);
      continue;
    }
    const double expected = eta(i) * x.row(i).norm() / std::sqrt(8.0) * scale;
    EXPECT_NEAR(next(i), expected, 1e-8 * std::max(1.0, expected));
  }
}

TEST(Cost, ZeroSignalAndZeroPsi) {
  const auto a = unit_columns(random_matrix<double>(5, 8, 20));
  const auto y = random_matrix<double>(5, 2, 21);
  const Eigen::MatrixXd q = linops::noise_basis<double>(y, 2);
  const auto psi = PsdMatrix<double>(Eigen::MatrixXd::Zero(3, 3));
  const double c = spl::spl_cost<double>(Eigen::MatrixXd::Zero(8, 2), GammaVector::Ones(8), psi, a, y, q,
                                         0.1, 0.5);
  EXPECT_NEAR(c, y.squaredNorm(), 1e-12 * y.squaredNorm());
}

TEST(Cost, DirectEvaluation) {
  const auto a = unit_columns(random_matrix<double>(6, 9, 22));
  const auto y = random_matrix<double>(6, 3, 23);
  const Eigen::MatrixXd q = linops::noise_basis<double>(y, 3);
  const GammaVector g = random_gamma(9, 24);
  const auto x = random_matrix<double>(9, 3, 25);
  const double lambda = 0.2;
  const double p = 0.5;
  const auto psi = spl::spl_psi_update<double>(g, a, q, p);
  const Eigen::MatrixXd m = q.transpose() * a * g.asDiagonal() * a.transpose() * q;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  // At the optimal Psi the conjugate terms collapse to (2/p) Tr M^{p/2}.
  const double penalty = (2.0 / p) * eig.eigenvalues().array().pow(p / 2.0).sum();
  double weighted = 0.0;
  for (Index i = 0; i < 9; ++i) weighted += x.row(i).squaredNorm() / g(i);
  const double expected = (y - a * x).squaredNorm() + lambda * (weighted + 3.0 * penalty);
  EXPECT_NEAR(spl::spl_cost<double>(x, g, psi, a, y, q, lambda, p), expected, 1e-9 * expected);
}

TEST(Cost, RejectsRowsOutsideGammaSupport) {
  const auto a = unit_columns(random_matrix<double>(5, 8, 26));
  const auto y = random_matrix<double>(5, 2, 27);
  const Eigen::MatrixXd q = linops::noise_basis<double>(y, 2);
  GammaVector g = GammaVector::Ones(8);
  g(2) = 0.0;
  const auto psi = spl::spl_psi_update<double>(g, a, q, 1.0);
  const auto x = random_matrix<double>(8, 2, 28);
  EXPECT_THROW(spl::spl_cost<double>(x, g, psi, a, y, q, 0.1, 1.0), Error);
  EXPECT_THROW(spl::weighted_row_energy<double>(x, g), Error);
}

TEST(Cost, RankModeSurrogate) {
  const auto inst = model::make_instance<double>(spec_for(10, 24, 6, 5, 3, 29));
  const auto est = subspace::estimate_subspace<double>(inst.Y, subspace::RankPolicy::fixed(3));
  GammaVector g = GammaVector::Zero(24);
  for (Index i : inst.support) g(i) = 1.0;
  const auto psi = spl::spl_psi_update<double>(g, inst.A, est.Q, std::nullopt);
  const double lambda = 0.5;
  const double c = spl::spl_cost<double>(inst.X_true, g, psi, inst.A, inst.Y, est.Q, lambda, std::nullopt);
  const double expected = lambda * (inst.X_true.squaredNorm() + 6.0 * 2.0);
  EXPECT_NEAR(c, expected, 1e-9 * expected);
}

TEST(RankIdentity, TruthGivesKMinusR) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Index k = 6;
    const Index r = 2 + static_cast<Index>(seed % 4);
    const auto inst = model::make_instance<Complex>(fourier(spec_for(2 * k - r + 1, 40, 8, k, r, 30 + seed)));
    const auto est = subspace::estimate_subspace<Complex>(inst.Y, subspace::RankPolicy::fixed(r));
    GammaVector g = GammaVector::Zero(40);
    for (Index i : inst.support) g(i) = 0.5 + static_cast<double>(i % 3);
    const Matrix<Complex> w = est.Q.adjoint() * inst.A * g.cwiseSqrt().cast<Complex>().asDiagonal();
    EXPECT_EQ(linops::numerical_rank<Complex>(w), k - r);
  }
}

void expect_monotone(const std::vector<double>& trace) {
  ASSERT_GE(trace.size(), 2u);
  for (std::size_t t = 1; t < trace.size(); ++t) {
    EXPECT_LE(trace[t], trace[t - 1] + 1e-6 * std::abs(trace[t - 1])) << "t=" << t;
  }
}

TEST(Solve, CostMonotoneForFixedP) {
  for (double p : {1.0, 0.5}) {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const auto inst = model::make_instance<double>(spec_for(16, 48, 12, 8, 4, 40 + seed, 20.0));
      SplConfig cfg;
      cfg.p = p;
      cfg.lambda = msbl::noise_scaled_lambda<double>(inst.Y, 20.0);
      cfg.gamma_tol = 1e-6;
      cfg.rank_policy = subspace::RankPolicy::fixed(4);
      const auto res = spl::spl_solve<double>(inst.A, inst.Y, cfg);
      expect_monotone(res.cost_trace);
      EXPECT_TRUE((res.gamma.array() >= 0.0).all());
    }
  }
}

TEST(Solve, CostMonotoneComplex) {
  const auto inst = model::make_instance<Complex>(fourier(spec_for(14, 40, 10, 7, 4, 50, 25.0)));
  SplConfig cfg;
  cfg.p = 0.8;
  cfg.lambda = msbl::noise_scaled_lambda<Complex>(inst.Y, 25.0);
  cfg.gamma_tol = 1e-6;
  cfg.rank_policy = subspace::RankPolicy::fixed(4);
  expect_monotone(spl::spl_solve<Complex>(inst.A, inst.Y, cfg).cost_trace);
}

// At a fixed point of the gamma update the two halves of the penalty balance:
// Tr(X^* Gamma^{-1} X) = N Tr(M^{p/2}), so their sum is 2N ||Q^* A Gamma^{1/2}||_p^p.
TEST(Solve, StationaryPenaltyBalance) {
  const double p = 1.0;
  const auto inst = model::make_instance<double>(spec_for(16, 40, 10, 6, 3, 60, 20.0));
  SplConfig cfg;
  cfg.p = p;
  cfg.lambda = msbl::noise_scaled_lambda<double>(inst.Y, 20.0);
  cfg.gamma_tol = 1e-9;
  cfg.max_iters = 5000;
  cfg.rank_policy = subspace::RankPolicy::fixed(3);
  const auto est = subspace::estimate_subspace<double>(inst.Y, cfg.rank_policy);
  const auto res = spl::spl_solve<double>(inst.A, inst.Y, est, cfg);
  ASSERT_TRUE(res.converged);
  const Eigen::MatrixXd x = spl::spl_x_update<double>(res.gamma, inst.A, inst.Y, cfg.lambda);
  const double weighted = spl::weighted_row_energy<double>(x, res.gamma);
  const Eigen::MatrixXd w = est.Q.transpose() * inst.A * res.gamma.cwiseSqrt().asDiagonal();
  const double schatten = linops::schatten_p<double>(w, p);
  EXPECT_NEAR(weighted, 10.0 * schatten, 0.05 * 10.0 * schatten);
  EXPECT_NEAR(weighted + 10.0 * schatten, 2.0 * 10.0 * schatten, 0.05 * 20.0 * schatten);
}

TEST(Solve, EasyNoiselessRecovery) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto inst = model::make_instance<double>(spec_for(16, 32, 8, 3, 3, 70 + seed));
    SplConfig cfg;
    cfg.lambda = 1e-8;
    cfg.k = 3;
    const auto res = spl::spl_solve<double>(inst.A, inst.Y, cfg);
    EXPECT_EQ(res.support_estimate, inst.support);
    ASSERT_TRUE(res.r_hat.has_value());
    EXPECT_EQ(*res.r_hat, 3);
  }
}

// SPL descends locally, so agreement with the exhaustive search is measured
// as a rate rather than demanded on every instance.
TEST(Solve, RankModeAgreesWithOracle) {
  int compared = 0;
  int agreed = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Index k = 3;
    const Index r = 2;
    const auto inst = model::make_instance<double>(spec_for(2 * k - r + 1, 12, 4, k, r, 80 + seed));
    const auto oracle = oracle::brute_min_rank_support<double>(inst.A, inst.Y, k);
    if (oracle.argmin.size() != 1) continue;
    SplConfig cfg;
    cfg.lambda = 1e-2;
    cfg.anneal = spl::LambdaAnneal{};
    cfg.max_iters = 400;
    cfg.gamma_tol = 1e-6;
    cfg.k = k;
    cfg.rank_policy = subspace::RankPolicy::fixed(r);
    const auto res = spl::spl_solve<double>(inst.A, inst.Y, cfg);
    agreed += res.support_estimate == oracle.argmin.front() ? 1 : 0;
    ++compared;
  }
  ASSERT_GE(compared, 25);
  EXPECT_GE(agreed, static_cast<int>(0.8 * compared));
}

TEST(Solve, ZeroDataIsAnError) {
  const auto a = unit_columns(random_matrix<double>(5, 8, 90));
  EXPECT_THROW(spl::spl_solve<double>(a, Eigen::MatrixXd::Zero(5, 2), SplConfig{}), Error);
}

TEST(Solve, ConfigValidation) {
  SplConfig cfg;
  cfg.p = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.p = 1.2;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.lambda = -1.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.anneal = spl::LambdaAnneal{2.0, 10, 1e-10};
  EXPECT_THROW(cfg.validate(), Error);
  EXPECT_NO_THROW(SplConfig{}.validate());
}

}  // namespace
}  // namespace jsr
