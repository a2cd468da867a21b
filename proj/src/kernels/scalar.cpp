#include "cartan/kernels.hpp"

namespace cartan::kernels::scalar {

double weighted_sum(const double* w, const double* a, std::size_t n) noexcept {
  double acc = 0.0;
  for (std::size_t q = 0; q < n; ++q) acc += w[q] * a[q];
  return acc;
}

double weighted_dot(const double* w, const double* a, const double* b, std::size_t n) noexcept {
  double acc = 0.0;
  for (std::size_t q = 0; q < n; ++q) acc += w[q] * a[q] * b[q];
  return acc;
}

double weighted_dot3(const double* w, const double* a, const double* b, const double* c, std::size_t n) noexcept {
  double acc = 0.0;
  for (std::size_t q = 0; q < n; ++q) acc += w[q] * a[q] * b[q] * c[q];
  return acc;
}

}  // namespace cartan::kernels::scalar
