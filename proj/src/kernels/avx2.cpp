// Compiled with -mavx2 -mfma. Keep this translation unit free of headers with
// inline functions that other units also instantiate.

#include <immintrin.h>

#include <cstddef>

namespace cartan::kernels::avx2 {

namespace {

inline double horizontal_sum(__m256d v) noexcept {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

}  // namespace

double weighted_sum(const double* w, const double* a, std::size_t n) noexcept {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t q = 0;
  for (; q + 8 <= n; q += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(w + q), _mm256_loadu_pd(a + q), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(w + q + 4), _mm256_loadu_pd(a + q + 4), acc1);
  }
  for (; q + 4 <= n; q += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(w + q), _mm256_loadu_pd(a + q), acc0);
  double acc = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; q < n; ++q) acc += w[q] * a[q];
  return acc;
}

double weighted_dot(const double* w, const double* a, const double* b, std::size_t n) noexcept {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t q = 0;
  for (; q + 8 <= n; q += 8) {
    const __m256d wa0 = _mm256_mul_pd(_mm256_loadu_pd(w + q), _mm256_loadu_pd(a + q));
    const __m256d wa1 = _mm256_mul_pd(_mm256_loadu_pd(w + q + 4), _mm256_loadu_pd(a + q + 4));
    acc0 = _mm256_fmadd_pd(wa0, _mm256_loadu_pd(b + q), acc0);
    acc1 = _mm256_fmadd_pd(wa1, _mm256_loadu_pd(b + q + 4), acc1);
  }
  for (; q + 4 <= n; q += 4) {
    const __m256d wa = _mm256_mul_pd(_mm256_loadu_pd(w + q), _mm256_loadu_pd(a + q));
    acc0 = _mm256_fmadd_pd(wa, _mm256_loadu_pd(b + q), acc0);
  }
  double acc = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; q < n; ++q) acc += w[q] * a[q] * b[q];
  return acc;
}

double weighted_dot3(const double* w, const double* a, const double* b, const double* c, std::size_t n) noexcept {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t q = 0;
  for (; q + 8 <= n; q += 8) {
    const __m256d wab0 = _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(w + q), _mm256_loadu_pd(a + q)),
                                       _mm256_loadu_pd(b + q));
    const __m256d wab1 = _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(w + q + 4), _mm256_loadu_pd(a + q + 4)),
                                       _mm256_loadu_pd(b + q + 4));
    acc0 = _mm256_fmadd_pd(wab0, _mm256_loadu_pd(c + q), acc0);
    acc1 = _mm256_fmadd_pd(wab1, _mm256_loadu_pd(c + q + 4), acc1);
  }
  for (; q + 4 <= n; q += 4) {
    const __m256d wab =
        _mm256_mul_pd(_mm256_mul_pd(_mm256_loadu_pd(w + q), _mm256_loadu_pd(a + q)), _mm256_loadu_pd(b + q));
    acc0 = _mm256_fmadd_pd(wab, _mm256_loadu_pd(c + q), acc0);
  }
  double acc = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; q < n; ++q) acc += w[q] * a[q] * b[q] * c[q];
  return acc;
}

}  // namespace cartan::kernels::avx2
