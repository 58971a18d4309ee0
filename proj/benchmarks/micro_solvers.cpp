#include <benchmark/benchmark.h>

#include "jsr/greedy.hpp"
#include "jsr/linops.hpp"
#include "jsr/model.hpp"
#include "jsr/msbl.hpp"
#include "jsr/oracle.hpp"
#include "jsr/spl.hpp"

namespace {

using namespace jsr;

model::ProblemInstance<double> instance(Index m, Index N, double snr_db) {
  model::SignalSpec s;
  s.m = m;
  s.n = 128;
  s.N = N;
  s.k = 10;
  s.r = 6;
  s.snr_db = snr_db;
  s.seed = 42;
  return model::make_instance<double>(s);
}

void BM_SplSolve(benchmark::State& state) {
  const auto inst = instance(state.range(0), state.range(1), 30.0);
  spl::SplConfig cfg;
  cfg.lambda = msbl::noise_scaled_lambda<double>(inst.Y, 30.0);
  cfg.k = 10;
  cfg.track_cost = false;
  const auto est = subspace::estimate_subspace<double>(inst.Y, cfg.rank_policy);
  int iters = 0;
  for (auto _ : state) {
    const auto res = spl::spl_solve<double>(inst.A, inst.Y, est, cfg);
    iters = res.iters;
    benchmark::DoNotOptimize(res.gamma.data());
  }
  state.counters["iters"] = iters;
}
BENCHMARK(BM_SplSolve)->Args({20, 16})->Args({40, 16})->Args({40, 256})->Unit(benchmark::kMillisecond);

void BM_MsblSolve(benchmark::State& state) {
  const auto inst = instance(state.range(0), state.range(1), 30.0);
  msbl::MsblConfig cfg;
  cfg.lambda = msbl::noise_scaled_lambda<double>(inst.Y, 30.0);
  cfg.k = 10;
  cfg.track_cost = false;
  int iters = 0;
  for (auto _ : state) {
    const auto res = msbl::msbl_solve<double>(inst.A, inst.Y, cfg);
    iters = res.iters;
    benchmark::DoNotOptimize(res.gamma.data());
  }
  state.counters["iters"] = iters;
}
BENCHMARK(BM_MsblSolve)->Args({20, 16})->Args({40, 16})->Args({40, 256})->Unit(benchmark::kMillisecond);

void BM_Music(benchmark::State& state) {
  const auto inst = instance(state.range(0), 16, 30.0);
  greedy::GreedyConfig cfg;
  cfg.k = 10;
  for (auto _ : state) benchmark::DoNotOptimize(greedy::music_recover<double>(inst.A, inst.Y, cfg));
}
BENCHMARK(BM_Music)->Arg(20)->Arg(40)->Unit(benchmark::kMicrosecond);

void BM_Somp(benchmark::State& state) {
  const auto inst = instance(state.range(0), 16, 30.0);
  greedy::GreedyConfig cfg;
  cfg.k = 10;
  for (auto _ : state) benchmark::DoNotOptimize(greedy::somp_recover<double>(inst.A, inst.Y, cfg));
}
BENCHMARK(BM_Somp)->Arg(20)->Arg(40)->Unit(benchmark::kMicrosecond);

void BM_SaMusic(benchmark::State& state) {
  const auto inst = instance(state.range(0), 16, 30.0);
  greedy::GreedyConfig cfg;
  cfg.k = 10;
  for (auto _ : state) benchmark::DoNotOptimize(greedy::samusic_recover<double>(inst.A, inst.Y, cfg));
}
BENCHMARK(BM_SaMusic)->Arg(20)->Arg(40)->Unit(benchmark::kMicrosecond);

void BM_MinRankOracle(benchmark::State& state) {
  const auto k = static_cast<Index>(state.range(0));
  const Index r = k - 1;
  model::SignalSpec s;
  s.m = 2 * k - r + 1;
  s.n = 12;
  s.N = 8;
  s.k = k;
  s.r = r;
  s.seed = 7;
  const auto inst = model::make_instance<double>(s);
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle::brute_min_rank_support<double>(inst.A, inst.Y, k));
  }
  state.counters["supports"] = static_cast<double>(oracle::binomial(12, k));
}
BENCHMARK(BM_MinRankOracle)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_SchattenP(benchmark::State& state) {
  const Index n = state.range(0);
  const Eigen::MatrixXd w = model::gen_gaussian_matrix(n, n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(linops::schatten_p<double>(w, 0.5));
}
BENCHMARK(BM_SchattenP)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
