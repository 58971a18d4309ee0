#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jsr/model.hpp"
#include "jsr/subspace.hpp"
#include "jsr/types.hpp"

/// Monte-Carlo recovery-rate sweeps.
namespace jsr::bench {

enum class Experiment { phase_m, phase_k, local_minima, fourier };
enum class Algorithm { spl, msbl, music, somp, samusic, oracle };

std::string_view to_string(Experiment e);
std::string_view to_string(Algorithm a);
Experiment parse_experiment(std::string_view s);
Algorithm parse_algorithm(std::string_view s);

/// Solver settings that a config file may override. Unset fields keep the
/// library defaults; an unset lambda means the noise-scaled default.
struct SplOverrides {
  /// Empty keeps the p -> 0 mode.
  std::optional<double> p;
  std::optional<double> lambda;
  std::optional<int> max_iters;
  std::optional<double> gamma_tol;
  std::optional<double> denom_tol;
  std::optional<double> gamma_cap;
  bool anneal = false;
};

struct MsblOverrides {
  std::optional<double> lambda;
  std::optional<int> max_iters;
  std::optional<double> gamma_tol;
};

struct BenchConfig {
  std::string name = "sweep";
  Experiment experiment = Experiment::phase_m;
  model::MatrixKind matrix_kind = model::MatrixKind::gaussian;
  Index n = 128;
  Index r = 6;
  std::vector<Index> m{20};
  std::vector<Index> k{10};
  std::vector<Index> N{16};
  std::vector<double> snr_db{30.0};
  std::vector<double> tau{1.0};
  int trials = 200;
  std::uint64_t base_seed = 1;
  std::vector<Algorithm> algorithms{Algorithm::spl, Algorithm::msbl};
  /// |supp X0 intersect S| for the local-minima experiment.
  std::optional<Index> overlap;
  subspace::RankPolicy rank_policy;
  SplOverrides spl;
  MsblOverrides msbl;
  /// Free-form remarks copied into the metadata sidecar.
  std::vector<std::string> notes;

  /// Throws jsr::Error describing the first violated constraint.
  void validate() const;

  /// Name of the swept field: the single list with more than one value, or
  /// the experiment's natural axis when every list is a singleton.
  std::string sweep_variable() const;
};

struct SweepPoint {
  Index index = 0;
  Index m = 0;
  Index k = 0;
  Index N = 0;
  double snr_db = 0.0;
  double tau = 1.0;
  double value = 0.0;  ///< value of the swept variable
};

std::vector<SweepPoint> sweep_points(const BenchConfig& cfg);

struct TrialRecord {
  Algorithm algorithm = Algorithm::spl;
  Index point = 0;
  double sweep_value = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  bool success = false;
  int iters = 0;
  double wall_seconds = 0.0;
  std::optional<Index> detected_rank;
  /// Support scores were all zero, so the tie rule picked the indices.
  bool degenerate = false;
  std::string diagnostic;
};

struct PointStats {
  Algorithm algorithm = Algorithm::spl;
  std::string sweep_var;
  double sweep_value = 0.0;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  /// Wald binomial 95% half-width.
  double ci95 = 0.0;
  double mean_iters = 0.0;
  double mean_seconds = 0.0;
};

struct SweepResult {
  BenchConfig config;
  std::vector<PointStats> stats;     ///< ordered by (algorithm, point)
  std::vector<TrialRecord> records;  ///< ordered by (point, trial, algorithm)
};

/// Seed of one trial: a hash of (base seed, experiment, point, trial).
std::uint64_t trial_seed(const BenchConfig& cfg, Index point, int trial);

/// k largest scores with ties towards the lower index; `degenerate` is set
/// when every score is zero.
Support support_estimate(const RealVector& scores, Index k, bool* degenerate = nullptr);

/// Runs every configured algorithm on one generated instance.
std::vector<TrialRecord> run_trial(const BenchConfig& cfg, const SweepPoint& point, int trial);

/// Runs all trials on `threads` workers (0 = hardware concurrency). The result
/// does not depend on the thread count apart from timing fields.
SweepResult run_sweep(const BenchConfig& cfg, int threads = 1);

/// Aggregates records in (algorithm, point) order.
std::vector<PointStats> aggregate(const BenchConfig& cfg, const std::vector<TrialRecord>& records);

/// CSV text. With `include_timing = false` the mean_seconds column is left
/// empty so that reruns can be compared byte for byte.
std::string to_csv(const std::vector<PointStats>& stats, bool include_timing = true);

inline constexpr std::string_view kCsvHeader =
    "algorithm,sweep_var,sweep_value,trials,successes,success_rate,ci95,mean_iters,mean_seconds";

// ---- configuration files ---------------------------------------------------

BenchConfig parse_config(std::string_view json_text);
BenchConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const BenchConfig& cfg);

/// Metadata sidecar: config echo, seed rule, library version and notes.
std::string metadata_json(const SweepResult& result);

/// Writes <dir>/<name>.csv and <dir>/<name>.meta.json.
void write_outputs(const SweepResult& result, const std::filesystem::path& dir);

// ---- presets ---------------------------------------------------------------

std::vector<std::string> preset_names();
BenchConfig preset(std::string_view name);

// ---- rank-criterion check ----------------------------------------------------

struct OracleCheckConfig {
  std::string name = "thm1";
  Index n = 12;
  Index k_max = 4;
  Index N = 8;
  int instances = 100;
  std::uint64_t base_seed = 20240601;
};

struct OracleCheckCase {
  Index m = 0;
  Index k = 0;
  Index r = 0;
  std::uint64_t seed = 0;
  Support planted;
  std::vector<Support> argmin;
  Index min_rank = 0;
  bool success = false;
  double wall_seconds = 0.0;
};

struct OracleCheckResult {
  OracleCheckConfig config;
  std::vector<OracleCheckCase> cases;
  std::vector<PointStats> stats;  ///< one row per k
};

/// Noiseless Gaussian instances cycling through every (k, r) with
/// 2 <= k <= k_max, 1 <= r < k and m = 2k - r + 1; success means the exhaustive
/// search returns exactly the planted support with minimum k - r.
OracleCheckResult run_oracle_check(const OracleCheckConfig& cfg);

void write_outputs(const OracleCheckResult& result, const std::filesystem::path& dir);

/// Library version string.
std::string_view version();

}  // namespace jsr::bench
