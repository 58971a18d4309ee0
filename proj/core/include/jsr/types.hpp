#pragma once

#include <complex>
#include <concepts>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace jsr {

using Index = Eigen::Index;
using Complex = std::complex<double>;

/// Scalar types every solver is instantiated for.
template <typename S>
concept Scalar = std::same_as<S, double> || std::same_as<S, Complex>;

template <Scalar S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

template <Scalar S>
using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using RealVector = Eigen::VectorXd;

/// Nonnegative per-row hyperparameters (the diagonal of Gamma).
using GammaVector = Eigen::VectorXd;

/// Sorted, duplicate-free, zero-based row indices.
using Support = std::vector<Index>;

enum class Field { real, complex };

template <Scalar S>
constexpr Field field_of() {
  return std::same_as<S, double> ? Field::real : Field::complex;
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Relative threshold for numerical rank and "zero" eigenvalues.
struct RankTolerance {
  double rel_tol = 1e-8;

  void validate() const {
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
      throw Error("rank tolerance must lie in (0, 1)");
    }
  }
};

}  // namespace jsr
