#include <numeric>

#include "jsr/bench.hpp"

namespace jsr::bench {

namespace {

constexpr double kFig1SnrDb[] = {10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0};

std::vector<Index> range(Index from, Index to) {
  std::vector<Index> out(static_cast<std::size_t>(to - from + 1));
  std::iota(out.begin(), out.end(), from);
  return out;
}

// FNV-1a of the preset name, so every preset draws its own instances.
std::uint64_t name_seed(std::string_view name) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

const std::vector<Algorithm> kAllBaselines{Algorithm::spl, Algorithm::msbl, Algorithm::music,
                                           Algorithm::somp, Algorithm::samusic};

BenchConfig fig1(std::string_view name, Index s) {
  BenchConfig c;
  c.name = std::string(name);
  c.experiment = Experiment::local_minima;
  c.n = 128;
  c.r = 7;
  c.k = {10};
  c.N = {64};
  c.m = {20};
  c.tau = {1.0};
  c.snr_db.assign(std::begin(kFig1SnrDb), std::end(kFig1SnrDb));
  c.overlap = s;
  c.algorithms = {Algorithm::spl, Algorithm::msbl};
  c.notes = {"m = 20 measurements"};
  return c;
}

BenchConfig fig2(std::string_view name, double snr, Index snapshots, double tau) {
  BenchConfig c;
  c.name = std::string(name);
  c.experiment = Experiment::phase_m;
  c.n = 128;
  c.r = 6;
  c.k = {10};
  c.m = range(1, 50);
  c.N = {snapshots};
  c.snr_db = {snr};
  c.tau = {tau};
  c.algorithms = kAllBaselines;
  c.notes = {
      "uses k=10, r=6; the alternative setting k=8, r=5 with N in {32, 128} is not "
      "covered by a preset"};
  return c;
}

BenchConfig fig3(std::string_view name, Index r, double tau, double snr) {
  BenchConfig c;
  c.name = std::string(name);
  c.experiment = Experiment::phase_k;
  c.n = 128;
  c.r = r;
  c.m = {40};
  c.k = range(r, 38);
  c.N = {256};
  c.snr_db = {snr};
  c.tau = {tau};
  c.algorithms = kAllBaselines;
  c.notes = {"sparsity swept from r to 38 with m = 40"};
  return c;
}

BenchConfig fig4_m(std::string_view name, Index snapshots) {
  BenchConfig c;
  c.name = std::string(name);
  c.experiment = Experiment::fourier;
  c.matrix_kind = model::MatrixKind::fourier;
  c.n = 128;
  c.r = 8;
  c.k = {10};
  c.m = range(1, 50);
  c.N = {snapshots};
  c.snr_db = {30.0};
  c.tau = {1.0};
  c.algorithms = kAllBaselines;
  return c;
}

BenchConfig fig4_k(std::string_view name, Index r, double tau) {
  BenchConfig c = fig3(name, r, tau, 30.0);
  c.experiment = Experiment::fourier;
  c.matrix_kind = model::MatrixKind::fourier;
  return c;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig1a", "fig1b", "fig1c", "fig2a", "fig2b", "fig2c", "fig2d", "fig2e",
          "fig2f", "fig3a", "fig3b", "fig3c", "fig4a", "fig4b", "fig4c", "fig4d"};
}

BenchConfig preset(std::string_view name) {
  BenchConfig c;
  if (name == "fig1a") {
    c = fig1(name, 3);
  } else if (name == "fig1b") {
    c = fig1(name, 2);
  } else if (name == "fig1c") {
    c = fig1(name, 5);
  } else if (name == "fig2a") {
    c = fig2(name, 30.0, 16, 1.0);
  } else if (name == "fig2b") {
    c = fig2(name, 30.0, 256, 1.0);
  } else if (name == "fig2c") {
    c = fig2(name, 10.0, 16, 1.0);
  } else if (name == "fig2d") {
    c = fig2(name, 10.0, 256, 1.0);
  } else if (name == "fig2e") {
    c = fig2(name, 30.0, 16, 0.1);
  } else if (name == "fig2f") {
    c = fig2(name, 30.0, 256, 0.1);
  } else if (name == "fig3a") {
    c = fig3(name, 5, 1.0, 30.0);
  } else if (name == "fig3b") {
    c = fig3(name, 12, 1.0, 10.0);
  } else if (name == "fig3c") {
    c = fig3(name, 15, 0.5, 30.0);
  } else if (name == "fig4a") {
    c = fig4_m(name, 16);
  } else if (name == "fig4b") {
    c = fig4_m(name, 256);
  } else if (name == "fig4c") {
    c = fig4_k(name, 5, 1.0);
  } else if (name == "fig4d") {
    c = fig4_k(name, 15, 0.5);
  } else {
    throw Error("unknown preset '" + std::string(name) + "'");
  }
  c.base_seed = name_seed(name);
  c.validate();
  return c;
}

}  // namespace jsr::bench
