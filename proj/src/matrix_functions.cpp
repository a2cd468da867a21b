// Matrix exponential (scaling and squaring with a [13/13] Pade approximant)
// and principal logarithm (inverse scaling and squaring with a Gauss-Legendre
// evaluation of log(I + X)). Symmetric and small rotation inputs take
// closed-form routes.

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "cartan/liealg.hpp"

namespace cartan {

namespace {

bool exactly_symmetric(const Matrix& m) { return m == m.transpose(); }
bool exactly_skew(const Matrix& m) { return m == Matrix(-m.transpose()); }

Matrix exp_symmetric(const Matrix& m) {
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  const Matrix& v = eig.eigenvectors();
  const Vector e = eig.eigenvalues().array().exp();
  Matrix r = v * e.asDiagonal() * v.transpose();
  return 0.5 * (r + r.transpose());
}

Matrix exp_rotation2(const Matrix& m) {
  const double phi = m(1, 0);
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  Matrix r(2, 2);
  r << c, -s, s, c;
  return r;
}

// Rodrigues' formula for a skew 3x3 generator.
Matrix exp_rotation3(const Matrix& m) {
  const double phi = std::sqrt(m(2, 1) * m(2, 1) + m(0, 2) * m(0, 2) + m(1, 0) * m(1, 0));
  const Matrix i3 = Matrix::Identity(3, 3);
  if (phi == 0.0) return i3;
  double a;
  double b;
  if (phi < 1e-4) {
    const double p2 = phi * phi;
    a = 1.0 - p2 / 6.0 + p2 * p2 / 120.0;
    b = 0.5 - p2 / 24.0 + p2 * p2 / 720.0;
  } else {
    a = std::sin(phi) / phi;
    b = (1.0 - std::cos(phi)) / (phi * phi);
  }
  return i3 + a * m + b * (m * m);
}

Matrix exp_pade13(const Matrix& x) {
  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
      129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
      1323241920.0,        40840800.0,          960960.0,           16380.0,
      182.0,               1.0};
  static constexpr double theta13 = 5.371920351148152;

  const Index n = x.rows();
  const double norm1 = x.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > theta13) squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  const Matrix a = x / std::ldexp(1.0, squarings);

  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
  const Matrix u = a * u_inner;
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  Matrix r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

// Gauss-Legendre nodes and weights on [0, 1] by Newton iteration on P_m.
struct GaussLegendre {
  std::array<double, 8> nodes{};
  std::array<double, 8> weights{};
};

const GaussLegendre& gauss_legendre8() {
  static const GaussLegendre rule = [] {
    GaussLegendre g;
    constexpr int m = 8;
    for (int i = 0; i < m; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0;
        double p1 = z;
        for (int k = 2; k <= m; ++k) {
          const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = pk;
        }
        dp = m * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      g.nodes[i] = 0.5 * (1.0 - z);
      g.weights[i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    return g;
  }();
  return rule;
}

double norm1(const Matrix& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

// Denman-Beavers square root; the spectrum must avoid the closed negative axis.
Matrix sqrt_denman_beavers(const Matrix& a) {
  Matrix y = a;
  Matrix z = Matrix::Identity(a.rows(), a.cols());
  for (int it = 0; it < 100; ++it) {
    const Matrix y_inv = y.partialPivLu().inverse();
    const Matrix z_inv = z.partialPivLu().inverse();
    Matrix y_next = 0.5 * (y + z_inv);
    z = 0.5 * (z + y_inv);
    const double change = norm1(y_next - y);
    y = std::move(y_next);
    if (change <= 1e-15 * norm1(y)) break;
  }
  return y;
}

Matrix log_near_identity(const Matrix& x) {
  // log(I + X) = integral_0^1 X (I + tX)^{-1} dt; the 8-point rule is the
  // [8/8] Pade approximant.
  const GaussLegendre& gl = gauss_legendre8();
  const Index n = x.rows();
  const Matrix id = Matrix::Identity(n, n);
  Matrix acc = Matrix::Zero(n, n);
  for (int j = 0; j < 8; ++j) {
    const Matrix denom = id + gl.nodes[j] * x;
    acc += gl.weights[j] * denom.partialPivLu().solve(x);
  }
  return acc;
}

void require_off_branch_cut(const Matrix& m) {
  const Eigen::EigenSolver<Matrix> eig(m, false);
  for (Index i = 0; i < eig.eigenvalues().size(); ++i) {
    const std::complex<double> lambda = eig.eigenvalues()(i);
    if (lambda.real() <= 0.0 && std::abs(lambda.imag()) <= 1e-10 * std::max(1.0, std::abs(lambda))) {
      std::ostringstream os;
      os.precision(6);
      os << "eigenvalue " << lambda.real() << (lambda.imag() < 0 ? "" : "+") << lambda.imag()
         << "i lies on the principal-log branch cut; shrink the loop";
      throw Error(ErrorKind::branch, os.str());
    }
  }
}

Matrix log_symmetric(const Matrix& m) {
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  const Matrix& v = eig.eigenvectors();
  const Vector l = eig.eigenvalues().array().log();
  Matrix r = v * l.asDiagonal() * v.transpose();
  return 0.5 * (r + r.transpose());
}

bool exactly_orthogonal(const Matrix& m) {
  const Index n = m.rows();
  return (m.transpose() * m - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <= 4.0 * n * 1e-16;
}

Matrix log_rotation2(const Matrix& m) {
  const double phi = std::atan2(m(1, 0) - m(0, 1), m(0, 0) + m(1, 1));
  Matrix r(2, 2);
  r << 0.0, -phi, phi, 0.0;
  return r;
}

Matrix log_rotation3(const Matrix& m) {
  const double c = std::clamp(0.5 * (m.trace() - 1.0), -1.0, 1.0);
  const Matrix anti = 0.5 * (m - m.transpose());
  const double s = std::sqrt(anti(2, 1) * anti(2, 1) + anti(0, 2) * anti(0, 2) + anti(1, 0) * anti(1, 0));
  const double phi = std::atan2(s, c);
  const double scale = phi < 1e-4 ? 1.0 + phi * phi / 6.0 : phi / std::sin(phi);
  return scale * anti;
}

}  // namespace

GroupElement matrix_exp(const AlgebraElement& x) {
  const Matrix& m = x.matrix();
  const Index n = x.order();
  if (n == 1) return GroupElement(Matrix::Constant(1, 1, std::exp(m(0, 0))));
  if (exactly_symmetric(m)) return GroupElement(exp_symmetric(m));
  if (exactly_skew(m)) {
    if (n == 2) return GroupElement(exp_rotation2(m));
    if (n == 3) return GroupElement(exp_rotation3(m));
  }
  return GroupElement(exp_pade13(m));
}

AlgebraElement matrix_log(const GroupElement& g) {
  const Matrix& m = g.matrix();
  const Index n = g.order();
  if (n == 1) {
    if (!(m(0, 0) > 0.0)) throw Error(ErrorKind::branch, "non-positive 1x1 element has no principal logarithm");
    return AlgebraElement(Matrix::Constant(1, 1, std::log(m(0, 0))));
  }
  require_off_branch_cut(m);
  if (exactly_symmetric(m)) return AlgebraElement(log_symmetric(m));
  if (exactly_orthogonal(m) && m.determinant() > 0.0) {
    if (n == 2) return AlgebraElement(log_rotation2(m));
    // Near angle pi the closed form loses accuracy; use the general route.
    if (n == 3 && m.trace() > -0.999) return AlgebraElement(log_rotation3(m));
  }

  const Matrix id = Matrix::Identity(n, n);
  Matrix a = m;
  int roots = 0;
  while (norm1(a - id) > 0.25 && roots < 64) {
    a = sqrt_denman_beavers(a);
    ++roots;
  }
  if (norm1(a - id) > 0.25) throw Error(ErrorKind::branch, "inverse scaling and squaring failed to converge");
  return AlgebraElement(Matrix(std::ldexp(1.0, roots) * log_near_identity(a - id)));
}

}  // namespace cartan
