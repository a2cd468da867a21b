#include "cartan/liealg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace cartan {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::input: return "input";
    case ErrorKind::order_mismatch: return "order-mismatch";
    case ErrorKind::singularity: return "singularity";
    case ErrorKind::branch: return "branch";
    case ErrorKind::domain: return "domain";
    case ErrorKind::closure: return "closure";
    case ErrorKind::blow_up: return "blow-up";
    case ErrorKind::sampling: return "sampling";
  }
  return "unknown";
}

bool all_finite(const Matrix& m) noexcept { return m.allFinite(); }

double symmetric_residual(const Matrix& m) { return (m - m.transpose()).norm(); }

double skew_residual(const Matrix& m) { return (m + m.transpose()).norm(); }

namespace {

void require_square_finite(const Matrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << " must be a non-empty square matrix, got " << m.rows() << "x" << m.cols();
    throw Error(ErrorKind::input, os.str());
  }
  if (!m.allFinite()) throw Error(ErrorKind::input, std::string(what) + " has non-finite entries");
}

void require_same_order(Index a, Index b) {
  if (a != b) {
    std::ostringstream os;
    os << "orders " << a << " and " << b << " differ";
    throw Error(ErrorKind::order_mismatch, os.str());
  }
}

}  // namespace

AlgebraElement::AlgebraElement(Matrix m) : m_(std::move(m)) {
  require_square_finite(m_, "algebra element");
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& o) const {
  require_same_order(order(), o.order());
  return AlgebraElement(Matrix(m_ + o.m_));
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& o) const {
  require_same_order(order(), o.order());
  return AlgebraElement(Matrix(m_ - o.m_));
}

GroupElement::GroupElement(Matrix m, const Tolerances& tol) : m_(std::move(m)) {
  require_square_finite(m_, "group element");
  const Eigen::JacobiSVD<Matrix> svd(m_);
  const Vector& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (!(smin > tol.singularity * smax)) {
    std::ostringstream os;
    os.precision(3);
    os << "matrix is numerically singular (condition estimate "
       << (smin > 0.0 ? smax / smin : INFINITY) << ")";
    throw Error(ErrorKind::singularity, os.str());
  }
}

GroupElement GroupElement::operator*(const GroupElement& o) const {
  require_same_order(order(), o.order());
  return GroupElement(Matrix(m_ * o.m_));
}

GroupElement GroupElement::inverse() const { return GroupElement(Matrix(m_.partialPivLu().inverse())); }

AlgebraElement theta(const AlgebraElement& x) { return AlgebraElement(Matrix(-x.matrix().transpose())); }

CartanSplit cartan_split(const AlgebraElement& x) {
  const Matrix& m = x.matrix();
  // (x + theta x) / 2 and (x - theta x) / 2; exactly skew and exactly symmetric.
  return {AlgebraElement(Matrix(0.5 * (m - m.transpose()))),
          AlgebraElement(Matrix(0.5 * (m + m.transpose())))};
}

AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y) {
  require_same_order(x.order(), y.order());
  const Matrix& a = x.matrix();
  const Matrix& b = y.matrix();
  return AlgebraElement(Matrix(a * b - b * a));
}

GroupElement group_involution(const GroupElement& m) {
  return GroupElement(Matrix(m.matrix().transpose().partialPivLu().inverse()));
}

PolarFactors polar_decompose(const GroupElement& m) {
  const Matrix& a = m.matrix();
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(a.transpose() * a);
  const Vector& lambda = eig.eigenvalues();
  const double lmin = lambda(0);
  const double lmax = lambda(lambda.size() - 1);
  if (!(lmin > 0.0) || lmin < kDefaultTolerances.singularity * kDefaultTolerances.singularity * lmax) {
    std::ostringstream os;
    os.precision(3);
    os << "polar factor undefined (condition estimate " << (lmin > 0.0 ? std::sqrt(lmax / lmin) : INFINITY)
       << ")";
    throw Error(ErrorKind::singularity, os.str());
  }
  const Matrix& v = eig.eigenvectors();
  const Vector root = lambda.array().sqrt();
  Matrix p = v * root.asDiagonal() * v.transpose();
  p = (0.5 * (p + p.transpose())).eval();
  const Matrix p_inv = v * root.cwiseInverse().asDiagonal() * v.transpose();
  return {GroupElement(Matrix(a * p_inv)), GroupElement(std::move(p))};
}

GroupSplit group_factorize(const GroupElement& m) {
  const PolarFactors polar = polar_decompose(m);
  const AlgebraElement k = cartan_split(matrix_log(polar.orthogonal)).kPart;
  const AlgebraElement p = cartan_split(matrix_log(polar.positive)).pPart;
  return {k, p};
}

GroupElement dual_group_element(const GroupElement& m) { return group_involution(m); }

double killing_form(const AlgebraElement& x, const AlgebraElement& y) {
  require_same_order(x.order(), y.order());
  const double n = static_cast<double>(x.order());
  const Matrix& a = x.matrix();
  const Matrix& b = y.matrix();
  // tr(ab) without forming the product.
  const double tr_ab = (a.array() * b.transpose().array()).sum();
  return 2.0 * n * tr_ab - 2.0 * a.trace() * b.trace();
}

double killing_theta_form(const AlgebraElement& x, const AlgebraElement& y) {
  return -killing_form(x, theta(y));
}

double trace_form(const AlgebraElement& x, const AlgebraElement& y) {
  require_same_order(x.order(), y.order());
  return (x.matrix().array() * y.matrix().array()).sum();
}

}  // namespace cartan
