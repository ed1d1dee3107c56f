#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace nvcpt {

using cd = std::complex<double>;

template <typename Scalar> using Complex = std::complex<Scalar>;
template <typename Scalar, int N> using SquareC = Eigen::Matrix<std::complex<Scalar>, N, N>;
template <typename Scalar> using Matrix3c = SquareC<Scalar, 3>;
template <typename Scalar> using Matrix9c = SquareC<Scalar, 9>;
template <typename Scalar> using Vector9 = Eigen::Matrix<Scalar, 9, 1>;
template <typename Scalar> using Vector9c = Eigen::Matrix<std::complex<Scalar>, 9, 1>;

using Matrix3cd = Matrix3c<double>;
using Matrix9cd = Matrix9c<double>;
using Vector9d = Vector9<double>;
using Vector9cd = Vector9c<double>;

inline constexpr int kLevels = 9;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

// Exception taxonomy; the CLI maps each kind onto an exit code.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range input (exit code 2).
struct InputError : Error {
  using Error::Error;
};

/// Iterative numerics did not converge (exit code 3).
struct ConvergenceError : Error {
  using Error::Error;
};

/// Integration step too coarse: trace drift or lost tracking (exit code 3).
struct StepSizeError : ConvergenceError {
  using ConvergenceError::ConvergenceError;
};

/// A documented invariant was violated at runtime (exit code 4).
struct InvariantError : Error {
  using Error::Error;
};

}  // namespace nvcpt
