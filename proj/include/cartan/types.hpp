#pragma once

#include <Eigen/Core>

#include <cstddef>

namespace cartan {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Numerical thresholds shared by the Lie-algebra routines.
struct Tolerances {
  /// Skewness, symmetry and orthogonality residuals.
  double structural = 1e-12;
  /// Identities between exponentials (relative).
  double exponential = 1e-8;
  /// Smallest admissible reciprocal condition number of a group element.
  double singularity = 1e-13;
};

inline constexpr Tolerances kDefaultTolerances{};

bool all_finite(const Matrix& m) noexcept;

/// Frobenius norm of m - m^T.
double symmetric_residual(const Matrix& m);
/// Frobenius norm of m + m^T.
double skew_residual(const Matrix& m);

}  // namespace cartan
