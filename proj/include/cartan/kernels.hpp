#pragma once

// Weighted reductions over quadrature nodes. Each kernel has a scalar
// reference and, on x86-64, an AVX2/FMA variant; the variant is picked once
// from the CPU feature flags (override with CARTAN_DUAL_SIMD=scalar|avx2).

#include <cstddef>
#include <span>
#include <string_view>

namespace cartan::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa) noexcept;

/// True when the variant was compiled in and the CPU can run it.
bool isa_available(Isa isa) noexcept;

Isa active_isa() noexcept;

/// Switches the process-wide variant. Throws Error{input} if unavailable.
void force_isa(Isa isa);

/// sum_q w[q] a[q]
double weighted_sum(std::span<const double> w, std::span<const double> a);
/// sum_q w[q] a[q] b[q]
double weighted_dot(std::span<const double> w, std::span<const double> a, std::span<const double> b);
/// sum_q w[q] a[q] b[q] c[q]
double weighted_dot3(std::span<const double> w, std::span<const double> a, std::span<const double> b,
                     std::span<const double> c);

namespace scalar {
double weighted_sum(const double* w, const double* a, std::size_t n) noexcept;
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n) noexcept;
double weighted_dot3(const double* w, const double* a, const double* b, const double* c, std::size_t n) noexcept;
}  // namespace scalar

#if defined(CARTAN_HAVE_AVX2)
namespace avx2 {
double weighted_sum(const double* w, const double* a, std::size_t n) noexcept;
double weighted_dot(const double* w, const double* a, const double* b, std::size_t n) noexcept;
double weighted_dot3(const double* w, const double* a, const double* b, const double* c, std::size_t n) noexcept;
}  // namespace avx2
#endif

}  // namespace cartan::kernels
