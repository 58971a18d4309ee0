#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "jsr/bench.hpp"

namespace {

std::vector<jsr::bench::Algorithm> parse_algorithm_list(const std::string& text) {
  std::vector<jsr::bench::Algorithm> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(jsr::bench::parse_algorithm(item));
  }
  return out;
}

void report(const jsr::bench::SweepResult& res, const std::string& out_dir) {
  jsr::bench::write_outputs(res, out_dir);
  std::cout << jsr::bench::to_csv(res.stats);
  std::cerr << "wrote " << out_dir << "/" << res.config.name << ".csv\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte-Carlo recovery-rate sweeps for joint sparse recovery"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(jsr::bench::version()));

  std::string config_path;
  std::string out_dir = "results";
  std::string preset_name;
  std::string algorithms;
  int trials = 0;
  int threads = 1;

  auto* run = app.add_subcommand("run", "Run a sweep described by a JSON config file");
  run->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--trials", trials, "Override the trial count")->check(CLI::PositiveNumber);
  run->add_option("--threads", threads, "Worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--algorithms", algorithms, "Comma separated algorithm list");

  auto* figure = app.add_subcommand("figure", "Run a named preset");
  figure->add_option("--preset", preset_name, "Preset name")
      ->required()
      ->check(CLI::IsMember(jsr::bench::preset_names()));
  figure->add_option("--out", out_dir, "Output directory")->required();
  figure->add_option("--trials", trials, "Override the trial count")->check(CLI::PositiveNumber);
  figure->add_option("--threads", threads, "Worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  figure->add_option("--algorithms", algorithms, "Comma separated algorithm list");

  auto* check = app.add_subcommand("oracle-check", "Exhaustive rank-criterion check");
  check->add_option("--preset", preset_name, "Preset name")
      ->required()
      ->check(CLI::IsMember({"thm1"}));
  check->add_option("--out", out_dir, "Output directory")->required();

  auto* presets = app.add_subcommand("presets", "List preset names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (presets->parsed()) {
      for (const auto& name : jsr::bench::preset_names()) std::cout << name << "\n";
      return 0;
    }
    if (check->parsed()) {
      jsr::bench::OracleCheckConfig cfg;
      cfg.name = preset_name;
      const auto res = jsr::bench::run_oracle_check(cfg);
      jsr::bench::write_outputs(res, out_dir);
      std::cout << jsr::bench::to_csv(res.stats);
      int ok = 0;
      for (const auto& c : res.cases) ok += c.success ? 1 : 0;
      std::cerr << ok << "/" << res.cases.size() << " instances matched the planted support\n";
      return ok == static_cast<int>(res.cases.size()) ? 0 : 1;
    }

    jsr::bench::BenchConfig cfg = run->parsed() ? jsr::bench::load_config(config_path)
                                                : jsr::bench::preset(preset_name);
    if (trials > 0) cfg.trials = trials;
    if (!algorithms.empty()) cfg.algorithms = parse_algorithm_list(algorithms);
    report(jsr::bench::run_sweep(cfg, threads), out_dir);
  } catch (const std::exception& e) {
    std::cerr << "bench: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
