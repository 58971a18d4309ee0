#include "jsr/oracle.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <thread>

#include "jsr/linops.hpp"

namespace jsr::oracle {

void OracleBudget::validate() const {
  if (max_supports < 1) throw Error("oracle: max_supports must be positive");
  if (!(residual_tol > 0.0)) throw Error("oracle: residual_tol must be positive");
  if (threads < 0) throw Error("oracle: threads must be nonnegative");
}

std::int64_t binomial(Index n, Index k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  constexpr auto kMax = std::numeric_limits<std::int64_t>::max();
  std::int64_t c = 1;
  for (Index i = 1; i <= k; ++i) {
    const auto num = static_cast<std::int64_t>(n - k + i);
    // c * num / i is exact at every step; guard the product against overflow.
    if (c > kMax / num) return kMax;
    c = c * num / static_cast<std::int64_t>(i);
  }
  return c;
}

namespace {

void check_budget(Index n, Index k, const OracleBudget& budget) {
  if (binomial(n, k) > budget.max_supports) {
    throw Error("oracle: C(" + std::to_string(n) + ", " + std::to_string(k) +
                ") exceeds the support budget");
  }
}

int worker_count(const OracleBudget& budget, Index tasks) {
  int t = budget.threads;
  if (t == 0) t = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return static_cast<int>(std::min<Index>(t, std::max<Index>(tasks, 1)));
}

struct Partial {
  Index best = std::numeric_limits<Index>::max();
  std::vector<Support> argmin;
};

}  // namespace

template <Scalar S>
MinRankResult brute_min_rank_support(const Matrix<S>& a, const Matrix<S>& y, Index k,
                                     RankTolerance tol, OracleBudget budget) {
  budget.validate();
  tol.validate();
  const Index n = a.cols();
  if (y.rows() != a.rows()) throw Error("oracle: A and Y row counts differ");
  if (k < 1 || k > n) throw Error("oracle: k must satisfy 1 <= k <= n");
  check_budget(n, k, budget);

  MinRankResult out;
  out.signal_rank = linops::numerical_rank<S>(y, tol);
  if (out.signal_rank >= a.rows()) throw Error("oracle: Y has full row rank, no noise subspace");
  const Matrix<S> b = linops::noise_basis<S>(y, out.signal_rank).adjoint() * a;
  // Zero level for every Q^* A_I: a subset lying in R(Y) projects to round-off.
  const double scale = linops::singular_values<S>(a)(0);

  // Partition by the first index so the merge reproduces lexicographic order.
  const Index heads = n - k + 1;
  std::vector<Partial> parts(static_cast<std::size_t>(heads));
  auto run_head = [&](Index head) {
    Partial& part = parts[static_cast<std::size_t>(head)];
    Support idx;
    for_each_subset(n - head - 1, k - 1, [&](const Support& tail) {
      idx.assign(1, head);
      for (Index t : tail) idx.push_back(head + 1 + t);
      const Index rank = linops::numerical_rank<S>(linops::select_columns(b, idx), scale, tol);
      if (rank < part.best) {
        part.best = rank;
        part.argmin.clear();
      }
      if (rank == part.best) part.argmin.push_back(idx);
      return true;
    });
  };

  const int workers = worker_count(budget, heads);
  if (workers <= 1) {
    for (Index h = 0; h < heads; ++h) run_head(h);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (Index h = w; h < heads; h += workers) run_head(h);
      });
    }
    for (auto& th : pool) th.join();
  }

  out.min_rank = std::numeric_limits<Index>::max();
  for (const auto& part : parts) out.min_rank = std::min(out.min_rank, part.best);
  for (auto& part : parts) {
    if (part.best != out.min_rank) continue;
    for (auto& s : part.argmin) out.argmin.push_back(std::move(s));
  }
  return out;
}

template <Scalar S>
std::pair<Matrix<S>, Support> brute_l0(const Matrix<S>& a, const Matrix<S>& y, Index k_max,
                                       RankTolerance tol, OracleBudget budget) {
  budget.validate();
  tol.validate();
  const Index n = a.cols();
  if (y.rows() != a.rows()) throw Error("oracle: A and Y row counts differ");
  if (k_max < 1) throw Error("oracle: k_max must be positive");
  k_max = std::min(k_max, n);
  std::int64_t total = 0;
  for (Index k = 1; k <= k_max; ++k) {
    total += binomial(n, k);
    if (total > budget.max_supports) throw Error("oracle: brute_l0 exceeds the support budget");
  }

  const double ynorm = y.norm();
  if (!(ynorm > 0.0)) return {Matrix<S>::Zero(n, y.cols()), Support{}};

  for (Index k = 1; k <= k_max; ++k) {
    Support found;
    Matrix<S> coef;
    for_each_subset(n, k, [&](const Support& idx) {
      const Matrix<S> a_i = linops::select_columns(a, idx);
      Matrix<S> c = linops::pinv<S>(a_i, tol) * y;
      if ((y - a_i * c).norm() < budget.residual_tol * ynorm) {
        found = idx;
        coef = std::move(c);
        return false;
      }
      return true;
    });
    if (!found.empty()) {
      Matrix<S> x = Matrix<S>::Zero(n, y.cols());
      for (std::size_t j = 0; j < found.size(); ++j) {
        x.row(found[j]) = coef.row(static_cast<Index>(j));
      }
      return {std::move(x), std::move(found)};
    }
  }
  throw Error("oracle: infeasible at budget");
}

template <Scalar S>
Index spark_lower_bound(const Matrix<S>& a, Index limit, RankTolerance tol, OracleBudget budget) {
  budget.validate();
  tol.validate();
  const Index n = a.cols();
  if (limit < 1) throw Error("oracle: spark limit must be positive");
  const Index top = std::min(limit, n);
  std::int64_t total = 0;
  for (Index k = 1; k <= top; ++k) {
    total += binomial(n, k);
    if (total > budget.max_supports) throw Error("oracle: spark search exceeds the support budget");
  }
  const RealVector sv_a = linops::singular_values<S>(a);
  const double scale = sv_a.size() > 0 ? sv_a(0) : 0.0;
  for (Index k = 1; k <= top; ++k) {
    bool dependent = false;
    for_each_subset(n, k, [&](const Support& idx) {
      const RealVector sv = linops::singular_values<S>(linops::select_columns(a, idx));
      // Dependence is judged against the scale of A itself so that a single
      // zero column counts.
      const double smin = sv.size() == k ? sv(k - 1) : 0.0;
      if (smin <= tol.rel_tol * scale) {
        dependent = true;
        return false;
      }
      return true;
    });
    if (dependent) return k;
  }
  return limit + 1;
}

#define JSR_INSTANTIATE(S)                                                                  \
  template MinRankResult brute_min_rank_support<S>(const Matrix<S>&, const Matrix<S>&,      \
                                                   Index, RankTolerance, OracleBudget);     \
  template std::pair<Matrix<S>, Support> brute_l0<S>(const Matrix<S>&, const Matrix<S>&,    \
                                                     Index, RankTolerance, OracleBudget);   \
  template Index spark_lower_bound<S>(const Matrix<S>&, Index, RankTolerance, OracleBudget);

JSR_INSTANTIATE(double)
JSR_INSTANTIATE(Complex)
#undef JSR_INSTANTIATE

}  // namespace jsr::oracle
