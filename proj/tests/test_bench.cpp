#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "jsr/bench.hpp"

namespace jsr {
namespace {

using bench::Algorithm;
using bench::BenchConfig;

BenchConfig small_sweep() {
  BenchConfig c;
  c.name = "small";
  c.n = 32;
  c.r = 2;
  c.k = {3};
  c.N = {6};
  c.m = {6, 10, 14};
  c.snr_db = {30.0};
  c.trials = 4;
  c.base_seed = 9;
  c.algorithms = {Algorithm::spl, Algorithm::msbl, Algorithm::music, Algorithm::somp,
                  Algorithm::samusic};
  return c;
}

TEST(SupportEstimate, Examples) {
  RealVector g(4);
  g << 0.1, 5.0, 0.2, 4.0;
  EXPECT_EQ(bench::support_estimate(g, 2), (Support{1, 3}));

  bool degenerate = false;
  EXPECT_EQ(bench::support_estimate(RealVector::Zero(5), 3, &degenerate), (Support{0, 1, 2}));
  EXPECT_TRUE(degenerate);

  RealVector rows = RealVector::Zero(6);
  rows(1) = 2.0;
  rows(4) = 1.0;
  EXPECT_EQ(bench::support_estimate(rows, 2, &degenerate), (Support{1, 4}));
  EXPECT_FALSE(degenerate);
}

TEST(Config, ParsesListsRangesAndOverrides) {
  const auto cfg = bench::parse_config(R"({
    "name": "demo",
    "experiment": "phase_m",
    "n": 64, "r": 4,
    "m": {"from": 5, "to": 20, "step": 5},
    "k": 6, "N": [16], "snr_db": "inf", "tau": 1.0,
    "trials": 10, "base_seed": 3,
    "algorithms": ["spl", "music"],
    "rank_policy": {"mode": "fixed", "r": 4},
    "spl": {"p": 0.5, "lambda": 0.01},
    "msbl": {"lambda": "noise_scaled"}
  })");
  EXPECT_EQ(cfg.name, "demo");
  EXPECT_EQ(cfg.m, (std::vector<Index>{5, 10, 15, 20}));
  EXPECT_EQ(cfg.k, std::vector<Index>{6});
  EXPECT_TRUE(std::isinf(cfg.snr_db.front()));
  EXPECT_EQ(cfg.algorithms, (std::vector<Algorithm>{Algorithm::spl, Algorithm::music}));
  EXPECT_EQ(cfg.rank_policy.mode, subspace::RankPolicy::Mode::fixed);
  ASSERT_TRUE(cfg.spl.p.has_value());
  EXPECT_DOUBLE_EQ(*cfg.spl.p, 0.5);
  EXPECT_EQ(cfg.sweep_variable(), "m");
}

TEST(Config, RejectsUnknownKeys) {
  EXPECT_THROW(bench::parse_config(R"({"trails": 10})"), Error);
  EXPECT_THROW(bench::parse_config(R"({"spl": {"lamda": 1}})"), Error);
  EXPECT_THROW(bench::parse_config(R"({"rank_policy": {"modee": "auto"}})"), Error);
}

TEST(Config, RejectsInvalidCombinations) {
  EXPECT_THROW(bench::parse_config(R"({"m": [10, 20], "k": [3, 4]})"), Error);
  EXPECT_THROW(bench::parse_config(R"({"trials": 0})"), Error);
  EXPECT_THROW(bench::parse_config(
                   R"({"experiment": "local_minima", "algorithms": ["music"], "local_minima_overlap": 2})"),
               Error);
  EXPECT_THROW(bench::parse_config(R"({"local_minima_overlap": 2})"), Error);
  EXPECT_NO_THROW(bench::parse_config(R"({"experiment": "local_minima", "local_minima_overlap": 2})"));
  EXPECT_THROW(bench::parse_config(R"({"algorithms": ["oracle"], "snr_db": 20})"), Error);
  EXPECT_THROW(bench::parse_config(R"({"algorithms": ["lasso"]})"), Error);
  EXPECT_THROW(bench::parse_config("{not json"), Error);
}

TEST(Config, RoundTripsThroughJson) {
  const auto cfg = bench::preset("fig2a");
  const auto again = bench::parse_config(bench::config_to_json(cfg));
  EXPECT_EQ(bench::config_to_json(again), bench::config_to_json(cfg));
}

TEST(Presets, AllValid) {
  for (const auto& name : bench::preset_names()) {
    EXPECT_NO_THROW(bench::preset(name)) << name;
  }
  EXPECT_THROW(bench::preset("fig9"), Error);
}

TEST(Seeds, TrialSeedsAreDistinctAndStable) {
  const auto cfg = small_sweep();
  EXPECT_EQ(bench::trial_seed(cfg, 1, 2), bench::trial_seed(cfg, 1, 2));
  EXPECT_NE(bench::trial_seed(cfg, 1, 2), bench::trial_seed(cfg, 2, 1));
  EXPECT_NE(bench::trial_seed(cfg, 0, 0), bench::trial_seed(cfg, 0, 1));
}

TEST(RunTrial, Deterministic) {
  const auto cfg = small_sweep();
  const auto pts = bench::sweep_points(cfg);
  ASSERT_EQ(pts.size(), 3u);
  const auto a = bench::run_trial(cfg, pts[1], 2);
  const auto b = bench::run_trial(cfg, pts[1], 2);
  ASSERT_EQ(a.size(), cfg.algorithms.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].success, b[i].success);
    EXPECT_EQ(a[i].iters, b[i].iters);
    EXPECT_EQ(a[i].seed, b[i].seed);
    EXPECT_EQ(a[i].detected_rank, b[i].detected_rank);
  }
}

TEST(RunTrial, SolverFailureBecomesRecord) {
  auto cfg = small_sweep();
  cfg.m = {1};  // no noise subspace exists
  const auto recs = bench::run_trial(cfg, bench::sweep_points(cfg).front(), 0);
  ASSERT_EQ(recs.size(), cfg.algorithms.size());
  bool any_diagnostic = false;
  for (const auto& r : recs) {
    if (!r.diagnostic.empty()) {
      any_diagnostic = true;
      EXPECT_FALSE(r.success);
    }
  }
  EXPECT_TRUE(any_diagnostic);
}

TEST(Sweep, ThreadCountDoesNotChangeResults) {
  const auto cfg = small_sweep();
  const auto one = bench::run_sweep(cfg, 1);
  const auto three = bench::run_sweep(cfg, 3);
  EXPECT_EQ(bench::to_csv(one.stats, false), bench::to_csv(three.stats, false));
}

TEST(Sweep, CsvLayout) {
  const auto res = bench::run_sweep(small_sweep(), 1);
  std::istringstream in(bench::to_csv(res.stats));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, bench::kCsvHeader);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 8) << line;
  }
  EXPECT_EQ(rows, 5 * 3);
  for (const auto& s : res.stats) {
    EXPECT_EQ(s.trials, 4);
    EXPECT_DOUBLE_EQ(s.success_rate, s.successes / 4.0);
    EXPECT_NEAR(s.ci95, 1.96 * std::sqrt(s.success_rate * (1 - s.success_rate) / 4.0), 1e-12);
  }
}

TEST(Sweep, WritesCsvAndMetadata) {
  const auto dir = std::filesystem::temp_directory_path() / "jsr_bench_test";
  std::filesystem::remove_all(dir);
  auto cfg = small_sweep();
  cfg.trials = 1;
  bench::write_outputs(bench::run_sweep(cfg, 1), dir);
  EXPECT_TRUE(std::filesystem::exists(dir / "small.csv"));
  std::ifstream meta(dir / "small.meta.json");
  std::stringstream body;
  body << meta.rdbuf();
  EXPECT_NE(body.str().find("seed_rule"), std::string::npos);
  EXPECT_NE(body.str().find(std::string(bench::version())), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(OracleCheck, SmallRunSucceeds) {
  bench::OracleCheckConfig cfg;
  cfg.instances = 6;
  const auto res = bench::run_oracle_check(cfg);
  ASSERT_EQ(res.cases.size(), 6u);
  for (const auto& c : res.cases) {
    EXPECT_EQ(c.m, 2 * c.k - c.r + 1);
    EXPECT_TRUE(c.success);
    EXPECT_EQ(c.min_rank, c.k - c.r);
  }
}

}  // namespace
}  // namespace jsr
