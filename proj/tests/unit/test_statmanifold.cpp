#include <cmath>
#include <random>

#include "cartan/connection.hpp"
#include "cartan/statmanifold.hpp"
#include "doctest.h"

using namespace cartan;

namespace {

const Domain kGaussianBox(Vector{{-1.0, 0.5}}, Vector{{1.0, 2.0}});

// Composite Simpson over mu +- 14 sigma with the closed-form density and scores.
struct SimpsonGaussian {
  double mu;
  double sigma;

  template <class F>
  double expect(F f) const {
    const int n = 40000;
    const double a = mu - 14.0 * sigma;
    const double h = 28.0 * sigma / n;
    double s = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double x = a + k * h;
      const double z = (x - mu) / sigma;
      const double density = std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
      const double w = (k == 0 || k == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
      s += w * density * f(z / sigma, (z * z - 1.0) / sigma);
    }
    return s * h / 3.0;
  }
};

std::vector<Vector> grid_points() {
  std::vector<Vector> pts;
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) pts.push_back(Vector{{-1.0 + 0.5 * a, 0.5 + 0.375 * b}});
  }
  return pts;
}

}  // namespace

TEST_CASE("densities are normalized and scores have mean zero") {
  const Gaussian1d gaussian;
  const Bernoulli bernoulli;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> mu(-3.0, 3.0), sigma(0.01, 5.0), p(0.001, 0.999);
  for (int s = 0; s < 50; ++s) {
    const Vector g{{mu(rng), sigma(rng)}};
    CHECK(std::abs(expectation_mass(gaussian, g) - 1.0) <= 1e-10);
    CHECK(score_mean(gaussian, g).cwiseAbs().maxCoeff() * g(1) <= 1e-10);
    const Vector b{{p(rng)}};
    CHECK(std::abs(expectation_mass(bernoulli, b) - 1.0) <= 1e-10);
    CHECK(std::abs(score_mean(bernoulli, b)(0)) * b(0) * (1.0 - b(0)) <= 1e-10);
  }
}

TEST_CASE("Fisher metric against closed forms and an independent Simpson oracle") {
  const Gaussian1d gaussian;
  const Matrix g01 = fisher_metric(gaussian, Vector{{0.0, 1.0}}).g;
  CHECK(std::abs(g01(0, 0) - 1.0) <= 1e-12);
  CHECK(std::abs(g01(1, 1) - 2.0) <= 1e-12);
  CHECK(std::abs(g01(0, 1)) <= 1e-12);
  for (const Vector& x : grid_points()) {
    const Matrix g = fisher_metric(gaussian, x).g;
    const SimpsonGaussian oracle{x(0), x(1)};
    const double gmm = oracle.expect([](double sm, double) { return sm * sm; });
    const double gss = oracle.expect([](double, double ss) { return ss * ss; });
    const double gms = oracle.expect([](double sm, double ss) { return sm * ss; });
    CHECK(std::abs(g(0, 0) - gmm) <= 1e-10 * gmm);
    CHECK(std::abs(g(1, 1) - gss) <= 1e-10 * gss);
    CHECK(std::abs(g(0, 1) - gms) <= 1e-10 * gss);
    const double s2 = x(1) * x(1);
    CHECK(std::abs(g(0, 0) - 1.0 / s2) <= 1e-8 / s2);
    CHECK(std::abs(g(1, 1) - 2.0 / s2) <= 1e-8 * 2.0 / s2);
    CHECK(symmetric_residual(g) <= 1e-12);
  }
  const Bernoulli bernoulli;
  for (double p : {0.05, 0.3, 0.5, 0.9}) {
    // Exact two-point sum.
    const double s1 = 1.0 / p, s0 = -1.0 / (1.0 - p);
    const double oracle = p * s1 * s1 + (1.0 - p) * s0 * s0;
    CHECK(fisher_metric(bernoulli, Vector{{p}}).g(0, 0) == doctest::Approx(oracle).epsilon(1e-14));
    CHECK(oracle == doctest::Approx(1.0 / (p * (1.0 - p))).epsilon(1e-14));
  }
}

TEST_CASE("Amari tensor against closed forms and the Simpson oracle") {
  const Gaussian1d gaussian;
  for (const Vector& x : grid_points()) {
    const Tensor3 t = amari_tensor(gaussian, x).t;
    const SimpsonGaussian oracle{x(0), x(1)};
    const double c3 = 1.0 / (x(1) * x(1) * x(1));
    const double tmms = oracle.expect([](double sm, double ss) { return sm * sm * ss; });
    const double tsss = oracle.expect([](double, double ss) { return ss * ss * ss; });
    CHECK(std::abs(t(0, 0, 1) - tmms) <= 1e-10 * tsss);
    CHECK(std::abs(t(1, 1, 1) - tsss) <= 1e-10 * tsss);
    CHECK(std::abs(t(0, 0, 0)) <= 1e-12 * c3);
    CHECK(std::abs(t(0, 1, 1)) <= 1e-12 * c3);
    CHECK(std::abs(t(0, 0, 1) - 2.0 * c3) <= 1e-8 * 2.0 * c3);
    CHECK(std::abs(t(1, 1, 1) - 8.0 * c3) <= 1e-8 * 8.0 * c3);
    for (Index i = 0; i < 2; ++i) {
      for (Index j = 0; j < 2; ++j) {
        for (Index k = 0; k < 2; ++k) {
          CHECK(t(i, j, k) == t(j, i, k));
          CHECK(t(i, j, k) == t(k, j, i));
        }
      }
    }
  }
  const Bernoulli bernoulli;
  for (double p : {0.1, 0.5, 0.8}) {
    const double oracle = p / (p * p * p) - (1.0 - p) / std::pow(1.0 - p, 3);
    CHECK(amari_tensor(bernoulli, Vector{{p}}).t(0, 0, 0) == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("Levi-Civita and alpha Christoffel symbols of the Gaussian family") {
  const Gaussian1d gaussian;
  const Tensor3 lc = levi_civita(gaussian, Vector{{0.0, 1.0}}).gamma;
  // gamma(k, i, j) with index 0 = mu, 1 = sigma.
  CHECK(lc(0, 0, 1) == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(lc(0, 1, 0) == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(lc(1, 0, 0) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(lc(1, 1, 1) == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(std::abs(lc(0, 0, 0)) <= 1e-8);
  CHECK(std::abs(lc(1, 0, 1)) <= 1e-8);
  const Tensor3 e = alpha_christoffel(gaussian, 1.0, Vector{{0.0, 1.0}}).gamma;
  CHECK(std::abs(e(1, 0, 0)) <= 1e-8);

  for (const Vector& x : grid_points()) {
    const double s = x(1);
    const Tensor3 g = levi_civita(gaussian, x).gamma;
    CHECK(g(0, 0, 1) == doctest::Approx(-1.0 / s).epsilon(1e-7));
    CHECK(g(1, 0, 0) == doctest::Approx(0.5 / s).epsilon(1e-7));
    CHECK(g(1, 1, 1) == doctest::Approx(-1.0 / s).epsilon(1e-7));
    const Tensor3 a0 = alpha_christoffel(gaussian, 0.0, x).gamma;
    for (double alpha : {-1.0, -0.5, 0.5, 1.0}) {
      const Tensor3 plus = alpha_christoffel(gaussian, alpha, x).gamma;
      const Tensor3 minus = alpha_christoffel(gaussian, -alpha, x).gamma;
      for (Index k = 0; k < 2; ++k) {
        for (Index i = 0; i < 2; ++i) {
          for (Index j = 0; j < 2; ++j) {
            CHECK(a0(k, i, j) == g(k, i, j));
            CHECK(std::abs(0.5 * (plus(k, i, j) + minus(k, i, j)) - g(k, i, j)) <= 1e-12);
            CHECK(std::abs(plus(k, i, j) - plus(k, j, i)) <= 1e-10);
          }
        }
      }
    }
  }
}

TEST_CASE("metric duality defect") {
  const Gaussian1d gaussian;
  for (const Vector& x : grid_points()) {
    for (double alpha : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
      for (Index i = 0; i < 2; ++i) {
        for (Index j = 0; j < 2; ++j) {
          for (Index k = 0; k < 2; ++k) {
            const double d = metric_duality_defect(gaussian, alpha, x, i, j, k);
            CHECK(std::abs(d) <= 1e-6);
            CHECK(d == doctest::Approx(metric_duality_defect(gaussian, -alpha, x, j, i, k)).epsilon(1e-12));
          }
        }
      }
    }
  }
}

TEST_CASE("domain guards") {
  const Gaussian1d gaussian;
  try {
    fisher_metric(gaussian, Vector{{0.0, 1e-4}});
    FAIL("sigma below the floor accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
  CHECK_THROWS_AS(levi_civita(gaussian, Vector{{0.0, 1.0e-3}}), Error);
  const Bernoulli bernoulli;
  CHECK_THROWS_AS(fisher_metric(bernoulli, Vector{{1.0}}), Error);
  CHECK_THROWS_AS(make_family("poisson"), Error);
  auto family = make_family("gaussian1d");
  CHECK_THROWS_AS(connection_form_of(family, 0.0, Domain(Vector{{-1.0, -0.5}}, Vector{{1.0, 2.0}}), Frame::coordinate),
                  Error);
}

TEST_CASE("orthonormal-frame connection forms") {
  auto family = make_family("gaussian1d");
  const ConnectionForm lc = connection_form_of(family, 0.0, kGaussianBox, Frame::orthonormal);
  const ConnectionForm e = connection_form_of(family, 1.0, kGaussianBox, Frame::orthonormal);
  const ConnectionForm m = connection_form_of(family, -1.0, kGaussianBox, Frame::orthonormal);
  const ConnectionForm amari = amari_form(family, kGaussianBox);
  for (const Vector& x : grid_points()) {
    const auto w0 = lc(x);
    const auto me = omega_minus(e)(x);
    const auto mm = omega_minus(m)(x);
    const auto d = amari(x);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(0.5 * skew_residual(w0[i]) <= 1e-6);
      CHECK((me[i] + mm[i]).norm() <= 1e-6);
      CHECK((me[i] + 0.5 * d[i]).norm() <= 1e-6);
      for (double alpha : {-0.5, 0.5}) {
        const auto ma = omega_minus(connection_form_of(family, alpha, kGaussianBox, Frame::orthonormal))(x);
        CHECK((ma[i] - alpha * me[i]).norm() <= 1e-6);
      }
    }
  }
  // Coordinate frame: (omega_i)_{kj} = Gamma^k_ij.
  const ConnectionForm coord = connection_form_of(family, 0.5, kGaussianBox, Frame::coordinate);
  const Vector x{{0.2, 1.3}};
  const Tensor3 gamma = alpha_christoffel(*family, 0.5, x).gamma;
  const auto w = coord(x);
  for (Index i = 0; i < 2; ++i) {
    for (Index k = 0; k < 2; ++k) {
      for (Index j = 0; j < 2; ++j) CHECK(w[static_cast<std::size_t>(i)](k, j) == gamma(k, i, j));
    }
  }
}
