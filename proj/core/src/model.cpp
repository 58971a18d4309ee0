#include "jsr/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "jsr/linops.hpp"

namespace jsr::model {

namespace {

using Rng = std::mt19937_64;

template <Scalar S>
Matrix<S> gaussian(Index rows, Index cols, double variance, Rng& rng) {
  Matrix<S> out(rows, cols);
  if constexpr (std::same_as<S, double>) {
    std::normal_distribution<double> dist(0.0, std::sqrt(variance));
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) out(i, j) = dist(rng);
  } else {
    // circularly symmetric: real and imaginary parts each carry half the variance
    std::normal_distribution<double> dist(0.0, std::sqrt(variance / 2.0));
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) {
        const double re = dist(rng);
        const double im = dist(rng);
        out(i, j) = Complex(re, im);
      }
  }
  return out;
}

// Uniform k-subset of {0..n-1} (partial Fisher-Yates), returned sorted.
Support sample_subset(Index n, Index k, Rng& rng) {
  std::vector<Index> pool(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  for (Index i = 0; i < k; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
  }
  Support out(pool.begin(), pool.begin() + k);
  std::sort(out.begin(), out.end());
  return out;
}

Support sample_from(const Support& pool, Index count, Rng& rng) {
  const Support idx = sample_subset(static_cast<Index>(pool.size()), count, rng);
  Support out;
  out.reserve(idx.size());
  for (Index i : idx) out.push_back(pool[static_cast<std::size_t>(i)]);
  return out;
}

template <Scalar S>
void normalize_columns(Matrix<S>& a) {
  for (Index j = 0; j < a.cols(); ++j) {
    const double norm = a.col(j).norm();
    if (norm > 0.0) a.col(j) /= norm;
  }
}

}  // namespace

void SignalSpec::validate() const {
  if (m < 1 || n < 1 || N < 1) throw Error("signal spec: m, n, N must be positive");
  if (r < 1 || r > k) throw Error("signal spec: need 1 <= r <= k");
  if (k > n) throw Error("signal spec: need k <= n");
  if (r > N) throw Error("signal spec: need r <= N");
  if (m > n) throw Error("signal spec: need m <= n");
  if (!(tau > 0.0 && tau <= 1.0)) throw Error("signal spec: tau must lie in (0, 1]");
  if (std::isnan(snr_db) || snr_db == -kNoiseless) throw Error("signal spec: invalid snr_db");
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = mix64(base);
  for (std::uint64_t w : words) h = mix64(h ^ mix64(w));
  return h;
}

Matrix<double> gen_gaussian_matrix(Index m, Index n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw Error("gaussian matrix: dimensions must be positive");
  Rng rng(seed);
  Matrix<double> a = gaussian<double>(m, n, 1.0 / static_cast<double>(m), rng);
  normalize_columns(a);
  return a;
}

Matrix<Complex> gen_fourier_matrix(Index m, Index n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw Error("fourier matrix: dimensions must be positive");
  if (m > n) throw Error("fourier matrix: need m <= n");
  Rng rng(seed);
  const Support rows = sample_subset(n, m, rng);
  Matrix<Complex> a(m, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) {
      // reduce the phase index mod n before scaling to keep it exact
      const auto t = static_cast<double>((rows[static_cast<std::size_t>(i)] * j) % n);
      const double phase = -2.0 * std::numbers::pi * t / static_cast<double>(n);
      a(i, j) = std::polar(scale, phase);
    }
  }
  normalize_columns(a);
  return a;
}

RealVector singular_value_profile(double tau, Index r) {
  RealVector sigma(r);
  for (Index i = 0; i < r; ++i) sigma(i) = std::pow(tau, static_cast<double>(i + 1));
  return sigma;
}

template <Scalar S>
SignalDraw<S> gen_signal(const SignalSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  SignalDraw<S> out;
  out.support = sample_subset(spec.n, spec.k, rng);

  const Matrix<S> g = gaussian<S>(spec.k, spec.r, 1.0, rng);
  Eigen::HouseholderQR<Matrix<S>> qr(g);
  const Matrix<S> u = qr.householderQ() * Matrix<S>::Identity(spec.k, spec.r);

  const RealVector sigma = singular_value_profile(spec.tau, spec.r);

  Matrix<S> block;
  constexpr int kMaxRedraws = 32;
  for (int attempt = 0;; ++attempt) {
    const Matrix<S> v = gaussian<S>(spec.r, spec.N, 1.0 / static_cast<double>(spec.N), rng);
    block = u * sigma.asDiagonal() * v;
    if (linops::numerical_rank(block) == spec.r) break;
    if (attempt >= kMaxRedraws) throw Error("gen_signal: could not draw a full-rank V");
  }

  out.X = Matrix<S>::Zero(spec.n, spec.N);
  for (Index i = 0; i < spec.k; ++i) out.X.row(out.support[static_cast<std::size_t>(i)]) = block.row(i);
  return out;
}

template <Scalar S>
Matrix<S> add_noise(const Matrix<S>& y0, double snr_db, std::uint64_t seed) {
  if (std::isinf(snr_db) && snr_db > 0.0) return y0;
  if (std::isnan(snr_db) || std::isinf(snr_db)) throw Error("add_noise: invalid snr_db");
  const double signal = y0.norm();
  if (!(signal > 0.0)) throw Error("undefined SNR: noiseless measurements are zero");
  Rng rng(seed);
  Matrix<S> e = gaussian<S>(y0.rows(), y0.cols(), 1.0, rng);
  const double target = signal / std::pow(10.0, snr_db / 20.0);
  e *= target / e.norm();
  return y0 + e;
}

template <Scalar S>
Matrix<S> gen_bfs_init(const ProblemInstance<S>& inst, Index s, std::uint64_t seed) {
  const Index m = inst.m();
  const Index n = inst.n();
  const Index k = static_cast<Index>(inst.support.size());
  if (s < 0 || s > k) throw Error("bfs init: overlap s must satisfy 0 <= s <= k");
  if (m > n || m - s > n - k) throw Error("bfs init: infeasible overlap (need m - s <= n - k)");
  if (s > m) throw Error("bfs init: overlap exceeds m");

  const Matrix<S> y0 = inst.A * inst.X_true;
  Support complement;
  complement.reserve(static_cast<std::size_t>(n - k));
  for (Index i = 0, j = 0; i < n; ++i) {
    if (j < k && inst.support[static_cast<std::size_t>(j)] == i) {
      ++j;
      continue;
    }
    complement.push_back(i);
  }

  Rng rng(seed);
  constexpr int kMaxRedraws = 64;
  const double ynorm = y0.norm();
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    Support j_set = sample_from(inst.support, s, rng);
    const Support off = sample_from(complement, m - s, rng);
    j_set.insert(j_set.end(), off.begin(), off.end());
    std::sort(j_set.begin(), j_set.end());

    const Matrix<S> a_j = linops::select_columns(inst.A, j_set);
    const RealVector sv = linops::singular_values(a_j);
    if (!(sv(sv.size() - 1) > 1e-10 * sv(0))) continue;

    const Matrix<S> x_j = a_j.partialPivLu().solve(y0);
    if ((a_j * x_j - y0).norm() > 1e-8 * std::max(ynorm, 1e-300)) continue;

    Matrix<S> x0 = Matrix<S>::Zero(n, y0.cols());
    for (Index i = 0; i < m; ++i) x0.row(j_set[static_cast<std::size_t>(i)]) = x_j.row(i);
    return x0;
  }
  throw Error("bfs init: repeatedly drew a singular A_J");
}

template <Scalar S>
ProblemInstance<S> make_instance(const SignalSpec& spec) {
  spec.validate();
  if ((spec.matrix_kind == MatrixKind::gaussian) != std::same_as<S, double>) {
    throw Error("make_instance: scalar type does not match the matrix ensemble");
  }
  ProblemInstance<S> inst;
  const std::uint64_t matrix_seed = derive_seed(spec.seed, {1});
  const std::uint64_t noise_seed = derive_seed(spec.seed, {3});
  if constexpr (std::same_as<S, double>) {
    inst.A = gen_gaussian_matrix(spec.m, spec.n, matrix_seed);
  } else {
    inst.A = gen_fourier_matrix(spec.m, spec.n, matrix_seed);
  }
  SignalSpec signal_spec = spec;
  signal_spec.seed = derive_seed(spec.seed, {2});
  auto draw = gen_signal<S>(signal_spec);
  inst.X_true = std::move(draw.X);
  inst.support = std::move(draw.support);
  inst.Y = add_noise<S>(inst.A * inst.X_true, spec.snr_db, noise_seed);
  inst.k = spec.k;
  inst.r = spec.r;
  inst.snr_db = spec.snr_db;
  inst.seed = spec.seed;
  return inst;
}

AnyInstance make_any_instance(const SignalSpec& spec) {
  if (spec.matrix_kind == MatrixKind::gaussian) return make_instance<double>(spec);
  return make_instance<Complex>(spec);
}

#define JSR_INSTANTIATE(S)                                                              \
  template SignalDraw<S> gen_signal<S>(const SignalSpec&);                              \
  template Matrix<S> add_noise<S>(const Matrix<S>&, double, std::uint64_t);             \
  template Matrix<S> gen_bfs_init<S>(const ProblemInstance<S>&, Index, std::uint64_t);  \
  template ProblemInstance<S> make_instance<S>(const SignalSpec&);

JSR_INSTANTIATE(double)
JSR_INSTANTIATE(Complex)
#undef JSR_INSTANTIATE

}  // namespace jsr::model
