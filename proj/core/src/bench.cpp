#include "jsr/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <thread>
#include <variant>

#include "jsr/greedy.hpp"
#include "jsr/linops.hpp"
#include "jsr/msbl.hpp"
#include "jsr/oracle.hpp"
#include "jsr/spl.hpp"

namespace jsr::bench {

std::string_view version() { return JSR_VERSION; }

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::phase_m: return "phase_m";
    case Experiment::phase_k: return "phase_k";
    case Experiment::local_minima: return "local_minima";
    case Experiment::fourier: return "fourier";
  }
  return "?";
}

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::spl: return "spl";
    case Algorithm::msbl: return "msbl";
    case Algorithm::music: return "music";
    case Algorithm::somp: return "somp";
    case Algorithm::samusic: return "samusic";
    case Algorithm::oracle: return "oracle";
  }
  return "?";
}

Experiment parse_experiment(std::string_view s) {
  for (auto e : {Experiment::phase_m, Experiment::phase_k, Experiment::local_minima,
                 Experiment::fourier}) {
    if (s == to_string(e)) return e;
  }
  throw Error("unknown experiment '" + std::string(s) + "'");
}

Algorithm parse_algorithm(std::string_view s) {
  for (auto a : {Algorithm::spl, Algorithm::msbl, Algorithm::music, Algorithm::somp,
                 Algorithm::samusic, Algorithm::oracle}) {
    if (s == to_string(a)) return a;
  }
  throw Error("unknown algorithm '" + std::string(s) + "'");
}

namespace {

struct Axis {
  const char* name;
  std::size_t size;
};

std::vector<Axis> axes(const BenchConfig& cfg) {
  return {{"m", cfg.m.size()},
          {"k", cfg.k.size()},
          {"N", cfg.N.size()},
          {"snr_db", cfg.snr_db.size()},
          {"tau", cfg.tau.size()}};
}

std::string_view natural_axis(Experiment e) {
  switch (e) {
    case Experiment::phase_k: return "k";
    case Experiment::local_minima: return "snr_db";
    default: return "m";
  }
}

template <typename T>
const T& pick(const std::vector<T>& values, std::string_view var, std::string_view name,
              std::size_t i) {
  return var == name ? values[i] : values.front();
}

}  // namespace

std::string BenchConfig::sweep_variable() const {
  std::string found;
  for (const auto& ax : axes(*this)) {
    if (ax.size <= 1) continue;
    if (!found.empty()) {
      throw Error("config: only one of m, k, N, snr_db, tau may list several values (found " +
                  found + " and " + ax.name + ")");
    }
    found = ax.name;
  }
  return found.empty() ? std::string(natural_axis(experiment)) : found;
}

void BenchConfig::validate() const {
  if (name.empty()) throw Error("config: name must be nonempty");
  if (trials < 1) throw Error("config: trials must be positive");
  if (n < 1) throw Error("config: n must be positive");
  if (r < 1) throw Error("config: r must be positive");
  for (const auto& ax : axes(*this)) {
    if (ax.size == 0) throw Error(std::string("config: list '") + ax.name + "' is empty");
  }
  (void)sweep_variable();
  for (Index v : m) {
    if (v < 1 || v > n) throw Error("config: every m must lie in [1, n]");
  }
  for (Index v : k) {
    if (v < r || v > n) throw Error("config: every k must lie in [r, n]");
  }
  for (Index v : N) {
    if (v < r) throw Error("config: every N must be at least r");
  }
  for (double v : snr_db) {
    if (std::isnan(v) || v == -std::numeric_limits<double>::infinity()) {
      throw Error("config: snr_db must be a number or +inf");
    }
  }
  for (double v : tau) {
    if (!(v > 0.0 && v <= 1.0)) throw Error("config: tau must lie in (0, 1]");
  }
  if (algorithms.empty()) throw Error("config: at least one algorithm is required");
  for (std::size_t i = 0; i < algorithms.size(); ++i) {
    for (std::size_t j = i + 1; j < algorithms.size(); ++j) {
      if (algorithms[i] == algorithms[j]) throw Error("config: duplicate algorithm");
    }
  }
  if (experiment == Experiment::local_minima) {
    if (!overlap) throw Error("config: local_minima needs an overlap s");
    for (Index kk : k) {
      if (*overlap < 0 || *overlap > kk) throw Error("config: overlap must lie in [0, k]");
      for (Index mm : m) {
        if (mm - *overlap > n - kk) throw Error("config: overlap leaves too few off-support rows");
      }
    }
    for (auto a : algorithms) {
      if (a != Algorithm::spl && a != Algorithm::msbl) {
        throw Error("config: local_minima only runs spl and msbl");
      }
    }
  } else if (overlap) {
    throw Error("config: overlap is only valid for local_minima");
  }
  if (experiment == Experiment::fourier && matrix_kind != model::MatrixKind::fourier) {
    throw Error("config: the fourier experiment needs matrix_kind fourier");
  }
  const bool oracle = std::find(algorithms.begin(), algorithms.end(), Algorithm::oracle) !=
                      algorithms.end();
  if (oracle) {
    for (double v : snr_db) {
      if (std::isfinite(v)) throw Error("config: the oracle algorithm needs noiseless data");
    }
  }
  if (rank_policy.mode == subspace::RankPolicy::Mode::fixed) {
    for (Index mm : m) rank_policy.validate(mm);
  } else if (!(rank_policy.gap_threshold > 0.0 && rank_policy.gap_threshold < 1.0)) {
    throw Error("config: gap threshold must lie in (0, 1)");
  }
  if (spl.p && !(*spl.p > 0.0 && *spl.p <= 1.0)) throw Error("config: spl.p must lie in (0, 1]");
  for (auto lam : {spl.lambda, msbl.lambda}) {
    if (lam && !(*lam > 0.0)) throw Error("config: lambda must be positive");
  }
  for (auto it : {spl.max_iters, msbl.max_iters}) {
    if (it && *it < 1) throw Error("config: max_iters must be positive");
  }
  for (auto tol : {spl.gamma_tol, msbl.gamma_tol, spl.denom_tol}) {
    if (tol && !(*tol > 0.0)) throw Error("config: tolerances must be positive");
  }
  if (spl.gamma_cap && !(*spl.gamma_cap > 1.0)) throw Error("config: gamma_cap must exceed 1");
}

std::vector<SweepPoint> sweep_points(const BenchConfig& cfg) {
  const std::string var = cfg.sweep_variable();
  std::size_t count = 1;
  for (const auto& ax : axes(cfg)) {
    if (var == ax.name) count = ax.size;
  }
  std::vector<SweepPoint> out;
  for (std::size_t i = 0; i < count; ++i) {
    SweepPoint p;
    p.index = static_cast<Index>(i);
    p.m = pick(cfg.m, var, "m", i);
    p.k = pick(cfg.k, var, "k", i);
    p.N = pick(cfg.N, var, "N", i);
    p.snr_db = pick(cfg.snr_db, var, "snr_db", i);
    p.tau = pick(cfg.tau, var, "tau", i);
    if (var == "m") p.value = static_cast<double>(p.m);
    if (var == "k") p.value = static_cast<double>(p.k);
    if (var == "N") p.value = static_cast<double>(p.N);
    if (var == "snr_db") p.value = p.snr_db;
    if (var == "tau") p.value = p.tau;
    out.push_back(p);
  }
  return out;
}

std::uint64_t trial_seed(const BenchConfig& cfg, Index point, int trial) {
  return model::derive_seed(cfg.base_seed,
                            {static_cast<std::uint64_t>(cfg.experiment),
                             static_cast<std::uint64_t>(point),
                             static_cast<std::uint64_t>(trial)});
}

Support support_estimate(const RealVector& scores, Index k, bool* degenerate) {
  if (degenerate) *degenerate = !(scores.size() > 0 && scores.maxCoeff() > 0.0);
  return linops::top_k(scores, k);
}

namespace {

using Clock = std::chrono::steady_clock;

template <Scalar S>
class TrialRunner {
 public:
  TrialRunner(const BenchConfig& cfg, const model::ProblemInstance<S>& inst)
      : cfg_(cfg), inst_(inst) {}

  TrialRecord run(Algorithm algo) {
    TrialRecord rec;
    rec.algorithm = algo;
    const auto t0 = Clock::now();
    try {
      const Support found = solve(algo, rec);
      rec.success = found == inst_.support;
    } catch (const std::exception& e) {
      rec.success = false;
      rec.diagnostic = e.what();
    }
    rec.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return rec;
  }

 private:
  const subspace::SubspaceEstimate<S>& estimate() {
    if (!est_) est_ = subspace::estimate_subspace<S>(inst_.Y, cfg_.rank_policy);
    return *est_;
  }

  double default_lambda() const { return msbl::noise_scaled_lambda<S>(inst_.Y, inst_.snr_db); }

  std::optional<GammaVector> initial_gamma() {
    if (cfg_.experiment != Experiment::local_minima) return std::nullopt;
    if (!bfs_gamma_) {
      const Matrix<S> x0 = model::gen_bfs_init<S>(inst_, *cfg_.overlap,
                                                  model::derive_seed(inst_.seed, {4}));
      bfs_gamma_ = linops::row_norms_squared(x0) / static_cast<double>(x0.cols());
    }
    return bfs_gamma_;
  }

  Support scored(const Matrix<S>& x_hat, TrialRecord& rec) const {
    return support_estimate(linops::row_norms_squared(x_hat), inst_.k, &rec.degenerate);
  }

  Support solve(Algorithm algo, TrialRecord& rec) {
    const Index k = inst_.k;
    switch (algo) {
      case Algorithm::spl: {
        spl::SplConfig c;
        c.p = cfg_.spl.p;
        c.lambda = cfg_.spl.lambda.value_or(default_lambda());
        if (cfg_.spl.max_iters) c.max_iters = *cfg_.spl.max_iters;
        if (cfg_.spl.gamma_tol) c.gamma_tol = *cfg_.spl.gamma_tol;
        if (cfg_.spl.denom_tol) c.denom_tol = *cfg_.spl.denom_tol;
        if (cfg_.spl.gamma_cap) c.gamma_cap = *cfg_.spl.gamma_cap;
        if (cfg_.spl.anneal) c.anneal = spl::LambdaAnneal{};
        c.rank_policy = cfg_.rank_policy;
        c.k = k;
        c.initial_gamma = initial_gamma();
        c.track_cost = false;
        const auto& est = estimate();
        rec.detected_rank = est.r_hat;
        const auto res = spl::spl_solve<S>(inst_.A, inst_.Y, est, c);
        rec.iters = res.iters;
        return scored(res.X_hat, rec);
      }
      case Algorithm::msbl: {
        msbl::MsblConfig c;
        c.lambda = cfg_.msbl.lambda.value_or(default_lambda());
        if (cfg_.msbl.max_iters) c.max_iters = *cfg_.msbl.max_iters;
        if (cfg_.msbl.gamma_tol) c.gamma_tol = *cfg_.msbl.gamma_tol;
        c.k = k;
        c.initial_gamma = initial_gamma();
        c.track_cost = false;
        const auto res = msbl::msbl_solve<S>(inst_.A, inst_.Y, c);
        rec.iters = res.iters;
        return scored(res.X_hat, rec);
      }
      case Algorithm::music:
      case Algorithm::samusic: {
        greedy::GreedyConfig c{k, cfg_.rank_policy};
        const auto& est = estimate();
        rec.detected_rank = est.r_hat;
        return algo == Algorithm::music ? greedy::music_recover<S>(inst_.A, est, c)
                                        : greedy::samusic_recover<S>(inst_.A, est, c);
      }
      case Algorithm::somp: {
        greedy::GreedyConfig c{k, cfg_.rank_policy};
        return greedy::somp_recover<S>(inst_.A, inst_.Y, c);
      }
      case Algorithm::oracle: {
        return oracle::brute_l0<S>(inst_.A, inst_.Y, k).second;
      }
    }
    throw Error("unhandled algorithm");
  }

  const BenchConfig& cfg_;
  const model::ProblemInstance<S>& inst_;
  std::optional<subspace::SubspaceEstimate<S>> est_;
  std::optional<GammaVector> bfs_gamma_;
};

std::string format_double(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

std::vector<TrialRecord> run_trial(const BenchConfig& cfg, const SweepPoint& point, int trial) {
  const std::uint64_t seed = trial_seed(cfg, point.index, trial);
  std::vector<TrialRecord> out;

  auto stamp = [&](TrialRecord rec) {
    rec.point = point.index;
    rec.sweep_value = point.value;
    rec.trial = trial;
    rec.seed = seed;
    out.push_back(std::move(rec));
  };

  model::SignalSpec spec;
  spec.m = point.m;
  spec.n = cfg.n;
  spec.N = point.N;
  spec.k = point.k;
  spec.r = cfg.r;
  spec.tau = point.tau;
  spec.snr_db = point.snr_db;
  spec.matrix_kind = cfg.matrix_kind;
  spec.seed = seed;

  model::AnyInstance inst;
  try {
    inst = model::make_any_instance(spec);
  } catch (const std::exception& e) {
    for (auto algo : cfg.algorithms) {
      TrialRecord rec;
      rec.algorithm = algo;
      rec.diagnostic = std::string("instance generation failed: ") + e.what();
      stamp(std::move(rec));
    }
    return out;
  }

  std::visit(
      [&](const auto& concrete) {
        using S = typename std::decay_t<decltype(concrete.A)>::Scalar;
        TrialRunner<S> runner(cfg, concrete);
        for (auto algo : cfg.algorithms) stamp(runner.run(algo));
      },
      inst);
  return out;
}

std::vector<PointStats> aggregate(const BenchConfig& cfg, const std::vector<TrialRecord>& records) {
  const auto points = sweep_points(cfg);
  const std::string var = cfg.sweep_variable();
  std::vector<PointStats> out;
  for (auto algo : cfg.algorithms) {
    for (const auto& p : points) {
      PointStats s;
      s.algorithm = algo;
      s.sweep_var = var;
      s.sweep_value = p.value;
      double iters = 0.0;
      double seconds = 0.0;
      for (const auto& rec : records) {
        if (rec.algorithm != algo || rec.point != p.index) continue;
        ++s.trials;
        if (rec.success) ++s.successes;
        iters += rec.iters;
        seconds += rec.wall_seconds;
      }
      if (s.trials > 0) {
        const double t = s.trials;
        s.success_rate = s.successes / t;
        s.ci95 = 1.96 * std::sqrt(s.success_rate * (1.0 - s.success_rate) / t);
        s.mean_iters = iters / t;
        s.mean_seconds = seconds / t;
      }
      out.push_back(s);
    }
  }
  return out;
}

SweepResult run_sweep(const BenchConfig& cfg, int threads) {
  cfg.validate();
  const auto points = sweep_points(cfg);
  const std::size_t per_point = static_cast<std::size_t>(cfg.trials);
  const std::size_t total = points.size() * per_point;
  std::vector<std::vector<TrialRecord>> slots(total);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      slots[i] = run_trial(cfg, points[i / per_point], static_cast<int>(i % per_point));
    }
  };

  int workers = threads > 0 ? threads
                            : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers),
                                                   std::max<std::size_t>(total, 1)));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  SweepResult res;
  res.config = cfg;
  for (auto& slot : slots) {
    for (auto& rec : slot) res.records.push_back(std::move(rec));
  }
  res.stats = aggregate(cfg, res.records);
  return res;
}

std::string to_csv(const std::vector<PointStats>& stats, bool include_timing) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& s : stats) {
    out += to_string(s.algorithm);
    out += ',';
    out += s.sweep_var;
    out += ',';
    out += format_double("%.10g", s.sweep_value);
    out += ',';
    out += std::to_string(s.trials);
    out += ',';
    out += std::to_string(s.successes);
    out += ',';
    out += format_double("%.6f", s.success_rate);
    out += ',';
    out += format_double("%.6f", s.ci95);
    out += ',';
    out += format_double("%.3f", s.mean_iters);
    out += ',';
    if (include_timing) out += format_double("%.6e", s.mean_seconds);
    out += '\n';
  }
  return out;
}

OracleCheckResult run_oracle_check(const OracleCheckConfig& cfg) {
  if (cfg.instances < 1) throw Error("oracle check: instances must be positive");
  if (cfg.k_max < 2) throw Error("oracle check: k_max must be at least 2");

  struct Combo {
    Index k, r;
  };
  std::vector<Combo> combos;
  for (Index k = 2; k <= cfg.k_max; ++k) {
    for (Index r = 1; r < k; ++r) {
      if (2 * k - r + 1 > cfg.n) throw Error("oracle check: n too small for k_max");
      if (r > cfg.N) throw Error("oracle check: N must be at least k_max - 1");
      combos.push_back({k, r});
    }
  }

  OracleCheckResult res;
  res.config = cfg;
  for (int i = 0; i < cfg.instances; ++i) {
    const Combo combo = combos[static_cast<std::size_t>(i) % combos.size()];
    model::SignalSpec spec;
    spec.k = combo.k;
    spec.r = combo.r;
    spec.m = 2 * combo.k - combo.r + 1;
    spec.n = cfg.n;
    spec.N = cfg.N;
    spec.seed = model::derive_seed(cfg.base_seed, {static_cast<std::uint64_t>(i)});

    const auto t0 = Clock::now();
    const auto inst = model::make_instance<double>(spec);
    const auto found = oracle::brute_min_rank_support<double>(inst.A, inst.Y, spec.k);

    OracleCheckCase c;
    c.m = spec.m;
    c.k = spec.k;
    c.r = spec.r;
    c.seed = spec.seed;
    c.planted = inst.support;
    c.argmin = found.argmin;
    c.min_rank = found.min_rank;
    c.success = found.argmin.size() == 1 && found.argmin.front() == inst.support &&
                found.min_rank == spec.k - spec.r;
    c.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    res.cases.push_back(std::move(c));
  }

  for (Index k = 2; k <= cfg.k_max; ++k) {
    PointStats s;
    s.algorithm = Algorithm::oracle;
    s.sweep_var = "k";
    s.sweep_value = static_cast<double>(k);
    double seconds = 0.0;
    for (const auto& c : res.cases) {
      if (c.k != k) continue;
      ++s.trials;
      if (c.success) ++s.successes;
      seconds += c.wall_seconds;
    }
    if (s.trials > 0) {
      s.success_rate = static_cast<double>(s.successes) / s.trials;
      s.ci95 = 1.96 * std::sqrt(s.success_rate * (1.0 - s.success_rate) / s.trials);
      s.mean_seconds = seconds / s.trials;
    }
    res.stats.push_back(s);
  }
  return res;
}

}  // namespace jsr::bench
