#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "jsr/bench.hpp"
#include "json.hpp"

namespace jsr::bench {

namespace {

using nlohmann::json;

// Rejects keys outside `allowed`; `where` names the section in messages.
void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                std::string_view where) {
  if (!obj.is_object()) throw Error("config: '" + std::string(where) + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw Error("config: unknown key '" + key + "' in " + std::string(where));
  }
}

double as_real(const json& v, std::string_view what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  }
  throw Error("config: '" + std::string(what) + "' must be a number or \"inf\"");
}

Index as_count(const json& v, std::string_view what) {
  if (!v.is_number_integer()) throw Error("config: '" + std::string(what) + "' must be an integer");
  return v.get<Index>();
}

// Accepts a scalar, a list, or {"from": a, "to": b, "step": s} (inclusive).
template <typename T, typename Conv>
std::vector<T> as_list(const json& v, std::string_view what, Conv conv) {
  std::vector<T> out;
  if (v.is_array()) {
    for (const auto& e : v) out.push_back(conv(e, what));
  } else if (v.is_object()) {
    check_keys(v, {"from", "to", "step"}, what);
    if (!v.contains("from") || !v.contains("to")) {
      throw Error("config: range '" + std::string(what) + "' needs from and to");
    }
    const T from = conv(v.at("from"), what);
    const T to = conv(v.at("to"), what);
    const T step = v.contains("step") ? conv(v.at("step"), what) : T(1);
    if (!(step > T(0))) throw Error("config: range step must be positive");
    for (std::size_t i = 0;; ++i) {
      const T value = from + static_cast<T>(i) * step;
      if (value > to + (std::is_floating_point_v<T> ? step * 1e-9 : T(0))) break;
      out.push_back(value);
    }
  } else {
    out.push_back(conv(v, what));
  }
  return out;
}

json real_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::string_view spectrum_name(subspace::GapSpectrum s) {
  return s == subspace::GapSpectrum::singular_values_of_y ? "y" : "yyh";
}

void parse_rank_policy(const json& v, subspace::RankPolicy& out) {
  check_keys(v, {"mode", "r", "gap_threshold", "spectrum", "skip_structural_zeros", "zero_floor"},
             "rank_policy");
  if (v.contains("mode")) {
    const auto mode = v.at("mode").get<std::string>();
    if (mode == "auto") {
      out.mode = subspace::RankPolicy::Mode::automatic;
    } else if (mode == "fixed") {
      out.mode = subspace::RankPolicy::Mode::fixed;
    } else {
      throw Error("config: rank_policy.mode must be auto or fixed");
    }
  }
  if (v.contains("r")) out.fixed_r = as_count(v.at("r"), "rank_policy.r");
  if (v.contains("gap_threshold")) out.gap_threshold = as_real(v.at("gap_threshold"), "gap_threshold");
  if (v.contains("spectrum")) {
    const auto s = v.at("spectrum").get<std::string>();
    if (s == "y") {
      out.spectrum = subspace::GapSpectrum::singular_values_of_y;
    } else if (s == "yyh") {
      out.spectrum = subspace::GapSpectrum::singular_values_of_yyh;
    } else {
      throw Error("config: rank_policy.spectrum must be y or yyh");
    }
  }
  if (v.contains("skip_structural_zeros")) {
    out.skip_structural_zeros = v.at("skip_structural_zeros").get<bool>();
  }
  if (v.contains("zero_floor")) out.zero_floor.rel_tol = as_real(v.at("zero_floor"), "zero_floor");
  if (out.mode == subspace::RankPolicy::Mode::fixed && !out.fixed_r) {
    throw Error("config: fixed rank policy needs r");
  }
}

std::optional<double> parse_lambda(const json& v) {
  if (v.is_string() && v.get<std::string>() == "noise_scaled") return std::nullopt;
  return as_real(v, "lambda");
}

json lambda_to_json(const std::optional<double>& v) {
  return v ? json(*v) : json("noise_scaled");
}

}  // namespace

BenchConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("config: ") + e.what());
  }
  check_keys(doc,
             {"name", "experiment", "matrix_kind", "n", "r", "m", "k", "N", "snr_db", "tau",
              "trials", "base_seed", "algorithms", "local_minima_overlap", "rank_policy", "spl",
              "msbl", "notes"},
             "the top level");

  BenchConfig cfg;
  try {
    if (doc.contains("name")) cfg.name = doc.at("name").get<std::string>();
    if (doc.contains("experiment")) {
      cfg.experiment = parse_experiment(doc.at("experiment").get<std::string>());
    }
    if (cfg.experiment == Experiment::fourier) cfg.matrix_kind = model::MatrixKind::fourier;
    if (doc.contains("matrix_kind")) {
      const auto kind = doc.at("matrix_kind").get<std::string>();
      if (kind == "gaussian") {
        cfg.matrix_kind = model::MatrixKind::gaussian;
      } else if (kind == "fourier") {
        cfg.matrix_kind = model::MatrixKind::fourier;
      } else {
        throw Error("config: matrix_kind must be gaussian or fourier");
      }
    }
    if (doc.contains("n")) cfg.n = as_count(doc.at("n"), "n");
    if (doc.contains("r")) cfg.r = as_count(doc.at("r"), "r");
    if (doc.contains("m")) cfg.m = as_list<Index>(doc.at("m"), "m", as_count);
    if (doc.contains("k")) cfg.k = as_list<Index>(doc.at("k"), "k", as_count);
    if (doc.contains("N")) cfg.N = as_list<Index>(doc.at("N"), "N", as_count);
    if (doc.contains("snr_db")) cfg.snr_db = as_list<double>(doc.at("snr_db"), "snr_db", as_real);
    if (doc.contains("tau")) cfg.tau = as_list<double>(doc.at("tau"), "tau", as_real);
    if (doc.contains("trials")) cfg.trials = static_cast<int>(as_count(doc.at("trials"), "trials"));
    if (doc.contains("base_seed")) cfg.base_seed = doc.at("base_seed").get<std::uint64_t>();
    if (doc.contains("algorithms")) {
      cfg.algorithms.clear();
      for (const auto& a : doc.at("algorithms")) {
        cfg.algorithms.push_back(parse_algorithm(a.get<std::string>()));
      }
    }
    if (doc.contains("local_minima_overlap")) {
      cfg.overlap = as_count(doc.at("local_minima_overlap"), "local_minima_overlap");
    }
    if (doc.contains("rank_policy")) parse_rank_policy(doc.at("rank_policy"), cfg.rank_policy);
    if (doc.contains("spl")) {
      const auto& s = doc.at("spl");
      check_keys(s, {"p", "lambda", "max_iters", "gamma_tol", "denom_tol", "gamma_cap", "anneal"},
                 "spl");
      if (s.contains("p")) {
        const auto& p = s.at("p");
        if (p.is_string() && p.get<std::string>() == "p_to_zero") {
          cfg.spl.p.reset();
        } else {
          cfg.spl.p = as_real(p, "spl.p");
        }
      }
      if (s.contains("lambda")) cfg.spl.lambda = parse_lambda(s.at("lambda"));
      if (s.contains("max_iters")) {
        cfg.spl.max_iters = static_cast<int>(as_count(s.at("max_iters"), "spl.max_iters"));
      }
      if (s.contains("gamma_tol")) cfg.spl.gamma_tol = as_real(s.at("gamma_tol"), "spl.gamma_tol");
      if (s.contains("denom_tol")) cfg.spl.denom_tol = as_real(s.at("denom_tol"), "spl.denom_tol");
      if (s.contains("gamma_cap")) cfg.spl.gamma_cap = as_real(s.at("gamma_cap"), "spl.gamma_cap");
      if (s.contains("anneal")) cfg.spl.anneal = s.at("anneal").get<bool>();
    }
    if (doc.contains("msbl")) {
      const auto& s = doc.at("msbl");
      check_keys(s, {"lambda", "max_iters", "gamma_tol"}, "msbl");
      if (s.contains("lambda")) cfg.msbl.lambda = parse_lambda(s.at("lambda"));
      if (s.contains("max_iters")) {
        cfg.msbl.max_iters = static_cast<int>(as_count(s.at("max_iters"), "msbl.max_iters"));
      }
      if (s.contains("gamma_tol")) cfg.msbl.gamma_tol = as_real(s.at("gamma_tol"), "msbl.gamma_tol");
    }
    if (doc.contains("notes")) cfg.notes = doc.at("notes").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

BenchConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

json config_json(const BenchConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["experiment"] = to_string(cfg.experiment);
  j["matrix_kind"] = cfg.matrix_kind == model::MatrixKind::gaussian ? "gaussian" : "fourier";
  j["n"] = cfg.n;
  j["r"] = cfg.r;
  j["m"] = cfg.m;
  j["k"] = cfg.k;
  j["N"] = cfg.N;
  j["snr_db"] = json::array();
  for (double v : cfg.snr_db) j["snr_db"].push_back(real_to_json(v));
  j["tau"] = cfg.tau;
  j["trials"] = cfg.trials;
  j["base_seed"] = cfg.base_seed;
  j["algorithms"] = json::array();
  for (auto a : cfg.algorithms) j["algorithms"].push_back(to_string(a));
  if (cfg.overlap) j["local_minima_overlap"] = *cfg.overlap;

  json rp;
  rp["mode"] = cfg.rank_policy.mode == subspace::RankPolicy::Mode::fixed ? "fixed" : "auto";
  if (cfg.rank_policy.fixed_r) rp["r"] = *cfg.rank_policy.fixed_r;
  rp["gap_threshold"] = cfg.rank_policy.gap_threshold;
  rp["spectrum"] = spectrum_name(cfg.rank_policy.spectrum);
  rp["skip_structural_zeros"] = cfg.rank_policy.skip_structural_zeros;
  rp["zero_floor"] = cfg.rank_policy.zero_floor.rel_tol;
  j["rank_policy"] = rp;

  json spl;
  spl["p"] = cfg.spl.p ? json(*cfg.spl.p) : json("p_to_zero");
  spl["lambda"] = lambda_to_json(cfg.spl.lambda);
  if (cfg.spl.max_iters) spl["max_iters"] = *cfg.spl.max_iters;
  if (cfg.spl.gamma_tol) spl["gamma_tol"] = *cfg.spl.gamma_tol;
  if (cfg.spl.denom_tol) spl["denom_tol"] = *cfg.spl.denom_tol;
  if (cfg.spl.gamma_cap) spl["gamma_cap"] = *cfg.spl.gamma_cap;
  spl["anneal"] = cfg.spl.anneal;
  j["spl"] = spl;

  json msbl;
  msbl["lambda"] = lambda_to_json(cfg.msbl.lambda);
  if (cfg.msbl.max_iters) msbl["max_iters"] = *cfg.msbl.max_iters;
  if (cfg.msbl.gamma_tol) msbl["gamma_tol"] = *cfg.msbl.gamma_tol;
  j["msbl"] = msbl;
  j["notes"] = cfg.notes;
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

void prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
}

}  // namespace

std::string config_to_json(const BenchConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

std::string metadata_json(const SweepResult& result) {
  const auto& cfg = result.config;
  json j;
  j["config"] = config_json(cfg);
  j["version"] = version();
  j["sweep_var"] = cfg.sweep_variable();
  j["seed_rule"] =
      "trial seed = derive_seed(base_seed, {experiment_id, point_index, trial_index}); matrix, "
      "signal, noise and initialization seeds are derived from it with words 1, 2, 3, 4";
  j["base_seed"] = cfg.base_seed;
  json points = json::array();
  for (const auto& p : sweep_points(cfg)) {
    json jp;
    jp["index"] = p.index;
    jp["m"] = p.m;
    jp["k"] = p.k;
    jp["N"] = p.N;
    jp["snr_db"] = real_to_json(p.snr_db);
    jp["tau"] = p.tau;
    jp["first_trial_seed"] = trial_seed(cfg, p.index, 0);
    points.push_back(jp);
  }
  j["points"] = points;
  std::size_t failures_with_diagnostic = 0;
  std::size_t degenerate = 0;
  for (const auto& rec : result.records) {
    if (!rec.diagnostic.empty()) ++failures_with_diagnostic;
    if (rec.degenerate) ++degenerate;
  }
  j["aborted_solves"] = failures_with_diagnostic;
  j["degenerate_supports"] = degenerate;
  for (auto a : cfg.algorithms) {
    if (a == Algorithm::samusic) {
      j["samusic_construction"] =
          "S-OMP partial support on the signal subspace, then the best remaining columns by "
          "normalized projection onto the augmented subspace";
    }
  }
  j["notes"] = cfg.notes;
  return j.dump(2) + "\n";
}

void write_outputs(const SweepResult& result, const std::filesystem::path& dir) {
  prepare_dir(dir);
  write_file(dir / (result.config.name + ".csv"), to_csv(result.stats));
  write_file(dir / (result.config.name + ".meta.json"), metadata_json(result));
}

void write_outputs(const OracleCheckResult& result, const std::filesystem::path& dir) {
  prepare_dir(dir);
  const auto& cfg = result.config;
  write_file(dir / (cfg.name + ".csv"), to_csv(result.stats));

  json j;
  j["config"] = {{"name", cfg.name},           {"n", cfg.n},
                 {"k_max", cfg.k_max},         {"N", cfg.N},
                 {"instances", cfg.instances}, {"base_seed", cfg.base_seed}};
  j["version"] = version();
  json cases = json::array();
  for (const auto& c : result.cases) {
    cases.push_back({{"m", c.m},
                     {"k", c.k},
                     {"r", c.r},
                     {"seed", c.seed},
                     {"planted", c.planted},
                     {"argmin", c.argmin},
                     {"min_rank", c.min_rank},
                     {"success", c.success}});
  }
  j["cases"] = cases;
  write_file(dir / (cfg.name + ".meta.json"), j.dump(2) + "\n");
}

}  // namespace jsr::bench
