#pragma once

// Cartan decomposition machinery on gl(n, R).
//
// The Cartan involution theta(x) = -x^T splits gl(n) into the +1 eigenspace k
// (skew-symmetric matrices, rotation generators) and the -1 eigenspace p
// (symmetric matrices, dilation generators). At the group level the involution
// is Theta(M) = (M^T)^{-1}, and Theta(exp x) = exp(theta x).

#include "cartan/error.hpp"
#include "cartan/types.hpp"

namespace cartan {

/// Square matrix with finite entries, regarded as an element of gl(n, R).
class AlgebraElement {
 public:
  /// Throws Error{input} when m is empty, non-square or non-finite.
  explicit AlgebraElement(Matrix m);

  static AlgebraElement zero(Index n) { return AlgebraElement(Matrix::Zero(n, n)); }
  static AlgebraElement identity(Index n) { return AlgebraElement(Matrix::Identity(n, n)); }

  const Matrix& matrix() const noexcept { return m_; }
  Index order() const noexcept { return m_.rows(); }

  AlgebraElement operator+(const AlgebraElement& o) const;
  AlgebraElement operator-(const AlgebraElement& o) const;
  AlgebraElement operator-() const { return AlgebraElement(Matrix(-m_)); }
  friend AlgebraElement operator*(double s, const AlgebraElement& x) {
    return AlgebraElement(Matrix(s * x.m_));
  }

 private:
  Matrix m_;
};

/// Invertible square matrix, an element of GL(n, R).
class GroupElement {
 public:
  /// Throws Error{input} for non-square/non-finite input and
  /// Error{singularity} when the reciprocal condition number is below
  /// tol.singularity.
  explicit GroupElement(Matrix m, const Tolerances& tol = kDefaultTolerances);

  static GroupElement identity(Index n) { return GroupElement(Matrix::Identity(n, n)); }

  const Matrix& matrix() const noexcept { return m_; }
  Index order() const noexcept { return m_.rows(); }

  GroupElement operator*(const GroupElement& o) const;
  GroupElement inverse() const;

 private:
  Matrix m_;
};

/// x = kPart + pPart with kPart skew (theta-fixed) and pPart symmetric
/// (theta-negated).
struct CartanSplit {
  AlgebraElement kPart;
  AlgebraElement pPart;
};

/// M = orthogonal * positive.
struct PolarFactors {
  GroupElement orthogonal;
  GroupElement positive;
};

/// M = exp(kLog) * exp(pLog).
struct GroupSplit {
  AlgebraElement kLog;
  AlgebraElement pLog;
};

AlgebraElement theta(const AlgebraElement& x);
CartanSplit cartan_split(const AlgebraElement& x);
AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y);

GroupElement group_involution(const GroupElement& m);

GroupElement matrix_exp(const AlgebraElement& x);
/// Principal logarithm. Throws Error{branch} when an eigenvalue lies on the
/// closed negative real axis.
AlgebraElement matrix_log(const GroupElement& m);

PolarFactors polar_decompose(const GroupElement& m);
/// Throws Error{branch} when the orthogonal factor has -1 in its spectrum.
GroupSplit group_factorize(const GroupElement& m);
GroupElement dual_group_element(const GroupElement& m);

/// Killing form of gl(n): B(x, y) = 2n tr(xy) - 2 tr(x) tr(y).
double killing_form(const AlgebraElement& x, const AlgebraElement& y);
/// B_theta(x, y) = -B(x, theta y). Positive semidefinite with kernel span{I}.
double killing_theta_form(const AlgebraElement& x, const AlgebraElement& y);
/// tr(x y^T), the Euclidean inner product used for numerics.
double trace_form(const AlgebraElement& x, const AlgebraElement& y);

}  // namespace cartan
