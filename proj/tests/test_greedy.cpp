#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "jsr/greedy.hpp"
#include "jsr/linops.hpp"
#include "jsr/model.hpp"
#include "test_support.hpp"

namespace jsr {
namespace {

using greedy::GreedyConfig;
using subspace::RankPolicy;
using testing::random_matrix;
using testing::spec_for;
using testing::fourier;
using testing::random_unitary;


GreedyConfig config(Index k, RankPolicy policy = RankPolicy::automatic()) {
  GreedyConfig c;
  c.k = k;
  c.rank_policy = policy;
  return c;
}

Support largest_row_norms(const auto& m, Index k) {
  return linops::top_k(linops::row_norms_squared(m), k);
}

TEST(Music, FullRankNoiselessIsExact) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = model::make_instance<double>(spec_for(12, 64, 16, 8, 8, seed));
    EXPECT_EQ(greedy::music_recover<double>(inst.A, inst.Y, config(8)), inst.support);
  }
}

TEST(Music, RankDeficientUsuallyFails) {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = model::make_instance<double>(spec_for(30, 128, 256, 10, 6, 100 + seed));
    hits += greedy::music_recover<double>(inst.A, inst.Y, config(10)) == inst.support ? 1 : 0;
  }
  EXPECT_LT(hits, 25);
}

TEST(Music, IdentityDictionaryPicksLargestRow) {
  const Eigen::VectorXd u = random_matrix<double>(6, 1, 1).col(0);
  const Eigen::MatrixXd y = u * random_matrix<double>(1, 4, 2);
  const auto got = greedy::music_recover<double>(Eigen::MatrixXd::Identity(6, 6), y, config(1, RankPolicy::fixed(1)));
  EXPECT_EQ(got, largest_row_norms(y, 1));
}

TEST(Somp, UnitaryDictionary) {
  const auto u = random_unitary<Complex>(8, 3);
  const auto y = random_matrix<Complex>(8, 5, 4);
  const Matrix<Complex> corr = u.adjoint() * y;
  for (Index k : {1, 3, 5}) {
    EXPECT_EQ(greedy::somp_recover<Complex>(u, y, config(k)), largest_row_norms(corr, k));
  }
}

TEST(Somp, EasyInstances) {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Index n = 64;
    const Eigen::MatrixXd a = model::gen_gaussian_matrix(32, n, 200 + seed);
    std::mt19937_64 rng(300 + seed);
    std::vector<Index> idx(n);
    std::iota(idx.begin(), idx.end(), Index{0});
    std::shuffle(idx.begin(), idx.end(), rng);
    Support s(idx.begin(), idx.begin() + 4);
    std::sort(s.begin(), s.end());
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, 6);
    const Eigen::MatrixXd rows = random_matrix<double>(4, 6, 400 + seed);
    for (Index j = 0; j < 4; ++j) x.row(s[j]) = (1.0 + static_cast<double>(j)) * rows.row(j).normalized();
    hits += greedy::somp_recover<double>(a, a * x, config(4)) == s ? 1 : 0;
  }
  EXPECT_GE(hits, 99);
}

TEST(Somp, DependentSelectionIsAnError) {
  Eigen::MatrixXd a(3, 3);
  a << 1, 1, 0, 0, 0, 1, 0, 0, 0;
  Eigen::MatrixXd y(3, 1);
  y << 1, 0, 0;
  // After a_0 is taken the residual is zero and every score ties at 0; the
  // next pick is the duplicate a_1.
  EXPECT_THROW(greedy::somp_recover<double>(a, y, config(2)), Error);
}

TEST(SaMusic, MatchesMusicWhenRankEqualsK) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto spec = spec_for(16, 48, 12, 6, 4, 500 + seed);
    spec.snr_db = 15.0;
    const auto inst = model::make_instance<Complex>(fourier(spec));
    const auto cfg = config(6, RankPolicy::fixed(6));
    EXPECT_EQ(greedy::samusic_recover<Complex>(inst.A, inst.Y, cfg),
              greedy::music_recover<Complex>(inst.A, inst.Y, cfg));
  }
}

TEST(SaMusic, RecoversRankDeficientSupport) {
  int sa = 0;
  int mu = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto inst = model::make_instance<double>(spec_for(40, 128, 256, 10, 6, 600 + seed));
    sa += greedy::samusic_recover<double>(inst.A, inst.Y, config(10)) == inst.support ? 1 : 0;
    mu += greedy::music_recover<double>(inst.A, inst.Y, config(10)) == inst.support ? 1 : 0;
  }
  EXPECT_GE(sa, 27);
  EXPECT_GT(sa, mu);
}

TEST(SaMusic, SingleGreedyStep) {
  // k - r = 1: the output contains the first S-OMP pick on the signal subspace.
  const auto inst = model::make_instance<double>(spec_for(20, 60, 30, 5, 4, 700));
  const auto cfg = config(5, RankPolicy::fixed(4));
  const auto est = subspace::estimate_subspace<double>(inst.Y, cfg.rank_policy);
  const Support first = greedy::somp_recover<double>(inst.A, est.U_sig, config(1));
  const Support got = greedy::samusic_recover<double>(inst.A, est, cfg);
  EXPECT_TRUE(std::binary_search(got.begin(), got.end(), first.front()));
  EXPECT_EQ(got, inst.support);
}

template <typename Recover>
void check_shape_and_equivariance(Recover recover) {
  auto spec = spec_for(14, 40, 10, 6, 3, 800);
  spec.snr_db = 25.0;
  const auto inst = model::make_instance<double>(spec);
  const Support base = recover(inst.A, inst.Y);
  ASSERT_EQ(base.size(), 6u);
  EXPECT_TRUE(std::is_sorted(base.begin(), base.end()));
  EXPECT_EQ(std::set<Index>(base.begin(), base.end()).size(), 6u);

  std::vector<Index> perm(40);
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 rng(9);
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::MatrixXd permuted(14, 40);
  for (Index j = 0; j < 40; ++j) permuted.col(j) = inst.A.col(perm[static_cast<std::size_t>(j)]);
  Support mapped;
  for (Index j : recover(permuted, inst.Y)) mapped.push_back(perm[static_cast<std::size_t>(j)]);
  std::sort(mapped.begin(), mapped.end());
  EXPECT_EQ(mapped, base);
}

TEST(Invariants, MusicShapeAndEquivariance) {
  check_shape_and_equivariance([](const Eigen::MatrixXd& a, const Eigen::MatrixXd& y) {
    return greedy::music_recover<double>(a, y, config(6));
  });
}

TEST(Invariants, SompShapeAndEquivariance) {
  check_shape_and_equivariance([](const Eigen::MatrixXd& a, const Eigen::MatrixXd& y) {
    return greedy::somp_recover<double>(a, y, config(6));
  });
}

TEST(Invariants, SaMusicShapeAndEquivariance) {
  check_shape_and_equivariance([](const Eigen::MatrixXd& a, const Eigen::MatrixXd& y) {
    return greedy::samusic_recover<double>(a, y, config(6));
  });
}

TEST(GreedyConfig, Validation) {
  EXPECT_THROW(config(0).validate(5), Error);
  EXPECT_THROW(config(6).validate(5), Error);
  EXPECT_NO_THROW(config(5).validate(5));
}

}  // namespace
}  // namespace jsr
