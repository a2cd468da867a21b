#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "cartan/error.hpp"
#include "cartan/kernels.hpp"
#include "cartan/quadrature.hpp"
#include "doctest.h"

using namespace cartan;

namespace {

// Long-double accumulation in index order, independent of both variants.
long double reference_dot3(const std::vector<double>& w, const std::vector<double>& a, const std::vector<double>& b,
                           const std::vector<double>& c) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < w.size(); ++i) {
    s += static_cast<long double>(w[i]) * a[i] * b[i] * c[i];
  }
  return s;
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

long double abs_sum(const std::vector<double>& w, const std::vector<double>& a, const std::vector<double>& b,
                    const std::vector<double>& c) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < w.size(); ++i) s += std::fabs(static_cast<long double>(w[i]) * a[i] * b[i] * c[i]);
  return s;
}

}  // namespace

TEST_CASE("scalar kernels match a long-double reference for every tail length") {
  std::mt19937_64 rng(5);
  for (std::size_t n = 0; n <= 67; ++n) {
    const auto w = random_vector(rng, n), a = random_vector(rng, n), b = random_vector(rng, n),
               c = random_vector(rng, n);
    const std::vector<double> ones(n, 1.0);
    const double bound = 4e-16 * static_cast<double>(n + 1) * static_cast<double>(abs_sum(w, a, b, c) + 1e-300);
    CHECK(std::abs(kernels::scalar::weighted_dot3(w.data(), a.data(), b.data(), c.data(), n) -
                   static_cast<double>(reference_dot3(w, a, b, c))) <= bound);
    CHECK(std::abs(kernels::scalar::weighted_dot(w.data(), a.data(), b.data(), n) -
                   static_cast<double>(reference_dot3(w, a, b, ones))) <=
          4e-16 * static_cast<double>(n + 1) * static_cast<double>(abs_sum(w, a, b, ones) + 1e-300));
    CHECK(std::abs(kernels::scalar::weighted_sum(w.data(), a.data(), n) -
                   static_cast<double>(reference_dot3(w, a, ones, ones))) <=
          4e-16 * static_cast<double>(n + 1) * static_cast<double>(abs_sum(w, a, ones, ones) + 1e-300));
  }
}

#if defined(CARTAN_HAVE_AVX2)
TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (!kernels::isa_available(kernels::Isa::avx2)) {
    MESSAGE("avx2 unavailable on this CPU; skipping");
    return;
  }
  std::mt19937_64 rng(6);
  for (std::size_t n = 0; n <= 131; ++n) {
    const auto w = random_vector(rng, n), a = random_vector(rng, n), b = random_vector(rng, n),
               c = random_vector(rng, n);
    const std::vector<double> ones(n, 1.0);
    const double scale = 1e-15 * static_cast<double>(n + 1);
    CHECK(std::abs(kernels::avx2::weighted_sum(w.data(), a.data(), n) -
                   kernels::scalar::weighted_sum(w.data(), a.data(), n)) <=
          scale * static_cast<double>(abs_sum(w, a, ones, ones) + 1e-300));
    CHECK(std::abs(kernels::avx2::weighted_dot(w.data(), a.data(), b.data(), n) -
                   kernels::scalar::weighted_dot(w.data(), a.data(), b.data(), n)) <=
          scale * static_cast<double>(abs_sum(w, a, b, ones) + 1e-300));
    CHECK(std::abs(kernels::avx2::weighted_dot3(w.data(), a.data(), b.data(), c.data(), n) -
                   kernels::scalar::weighted_dot3(w.data(), a.data(), b.data(), c.data(), n)) <=
          scale * static_cast<double>(abs_sum(w, a, b, c) + 1e-300));
  }
}
#endif

TEST_CASE("dispatch switches variants and rejects mismatched lengths") {
  const kernels::Isa initial = kernels::active_isa();
  std::vector<double> w{1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> a{1.0, 1.0, 1.0, 1.0, 1.0};
  kernels::force_isa(kernels::Isa::scalar);
  CHECK(kernels::active_isa() == kernels::Isa::scalar);
  CHECK(kernels::weighted_sum(w, a) == 15.0);
  if (kernels::isa_available(kernels::Isa::avx2)) {
    kernels::force_isa(kernels::Isa::avx2);
    CHECK(kernels::active_isa() == kernels::Isa::avx2);
    CHECK(kernels::weighted_sum(w, a) == 15.0);
  } else {
    CHECK_THROWS_AS(kernels::force_isa(kernels::Isa::avx2), Error);
  }
  CHECK_THROWS_AS(kernels::weighted_sum(w, std::span<const double>(a).first(3)), Error);
  kernels::force_isa(initial);
}

TEST_CASE("gauss_hermite integrates polynomial moments exactly") {
  const QuadratureRule rule = gauss_hermite(20);
  REQUIRE(rule.nodes.size() == 20);
  CHECK(std::is_sorted(rule.nodes.begin(), rule.nodes.end()));
  // int x^(2m) e^{-x^2} dx = Gamma(m + 1/2)
  for (int m = 0; m < 20; ++m) {
    double q = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) q += rule.weights[i] * std::pow(rule.nodes[i], 2 * m);
    const double exact = std::tgamma(m + 0.5);
    CHECK(std::abs(q - exact) <= 1e-12 * exact);
    double odd = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) odd += rule.weights[i] * std::pow(rule.nodes[i], 2 * m + 1);
    CHECK(std::abs(odd) <= 1e-12 * std::tgamma(m + 1.0));
  }
  CHECK_THROWS_AS(gauss_hermite(0), Error);
}
