#pragma once

// Holonomy sampling over small coordinate rectangles, numerical estimation of
// the holonomy Lie algebra, and finite-difference curvature.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "cartan/connection.hpp"

namespace cartan {

/// Rectangle from base, sides[0] along axes[0] then sides[1] along axes[1].
struct RectangleLoopSpec {
  ChartPoint base;
  std::array<Index, 2> axes{0, 1};
  std::array<double, 2> sides{0.0, 0.0};
};

/// Traverses axes[0]+, axes[1]+, axes[0]-, axes[1]- with samples_per_side
/// segments per side, parameterized by coordinate arc length. Throws
/// Error{input} for invalid specs and Error{domain} for corners outside domain.
Loop rectangle_loop(const RectangleLoopSpec& spec, int samples_per_side, const Domain& domain);

struct HolonomySample {
  RectangleLoopSpec spec;
  GroupElement element;
  AlgebraElement log;
};

struct SamplingOptions {
  int count = 16;
  double max_side = 0.1;
  std::uint64_t seed = 0;
  int steps = 1024;
  int samples_per_side = 4;
  /// Halvings of both sides tried after a branch error.
  int max_retries = 4;
  /// 0 means hardware concurrency.
  unsigned threads = 0;
};

/// Deterministic for a fixed seed, independent of the thread count.
std::vector<HolonomySample> sample_holonomy(const ConnectionForm& form, const ChartPoint& base,
                                            const SamplingOptions& options);

struct AlgebraEstimate {
  /// Trace-orthonormal basis.
  std::vector<AlgebraElement> basis;
  Index dimension = 0;
  bool in_so = true;
  /// Largest Frobenius norm of a basis element's symmetric part.
  double so_residual = 0.0;
  bool in_sl = true;
  /// Largest |trace| of a basis element.
  double sl_residual = 0.0;
  /// False when bracket closure was requested and still growing after the last round.
  bool closed = true;
  int closure_rounds = 0;
};

inline constexpr int kMaxClosureRounds = 3;

/// Numerical span of the sample logs (optionally closed under brackets):
/// singular values below tol times the largest are dropped.
AlgebraEstimate estimate_algebra(std::span<const HolonomySample> samples, bool closure, double tol = 1e-8);
/// Same estimator on raw algebra elements.
AlgebraEstimate estimate_algebra(std::span<const AlgebraElement> logs, bool closure, double tol = 1e-8);

/// F_ij = d_i omega_j - d_j omega_i + [omega_i, omega_j] by central differences.
/// For an (eps, eps) rectangle, log(holonomy) = -eps^2 F_ij + O(eps^3).
AlgebraElement curvature_probe(const ConnectionForm& form, const ChartPoint& x, Index i, Index j, double fd_step);

}  // namespace cartan
