#include <atomic>
#include <cstdlib>
#include <string>

#include "cartan/error.hpp"
#include "cartan/kernels.hpp"

namespace cartan::kernels {

namespace {

struct Table {
  Isa isa;
  double (*sum)(const double*, const double*, std::size_t) noexcept;
  double (*dot)(const double*, const double*, const double*, std::size_t) noexcept;
  double (*dot3)(const double*, const double*, const double*, const double*, std::size_t) noexcept;
};

constexpr Table kScalar{Isa::scalar, &scalar::weighted_sum, &scalar::weighted_dot, &scalar::weighted_dot3};
#if defined(CARTAN_HAVE_AVX2)
constexpr Table kAvx2{Isa::avx2, &avx2::weighted_sum, &avx2::weighted_dot, &avx2::weighted_dot3};
#endif

bool cpu_has_avx2() noexcept {
#if defined(CARTAN_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Table* table_for(Isa isa) noexcept {
#if defined(CARTAN_HAVE_AVX2)
  if (isa == Isa::avx2) return &kAvx2;
#endif
  (void)isa;
  return &kScalar;
}

const Table* initial_table() noexcept {
  if (const char* env = std::getenv("CARTAN_DUAL_SIMD")) {
    const std::string choice(env);
    if (choice == "scalar") return &kScalar;
    if (choice == "avx2" && cpu_has_avx2()) return table_for(Isa::avx2);
  }
  return cpu_has_avx2() ? table_for(Isa::avx2) : &kScalar;
}

std::atomic<const Table*>& active() noexcept {
  static std::atomic<const Table*> table{initial_table()};
  return table;
}

void require_same_length(std::size_t expected, std::size_t got) {
  if (expected != got) {
    throw Error(ErrorKind::input, "kernel operands have lengths " + std::to_string(expected) + " and " +
                                      std::to_string(got));
  }
}

}  // namespace

std::string_view to_string(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) noexcept { return isa == Isa::scalar || cpu_has_avx2(); }

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed)->isa; }

void force_isa(Isa isa) {
  if (!isa_available(isa)) throw Error(ErrorKind::input, std::string(to_string(isa)) + " kernels unavailable");
  active().store(table_for(isa), std::memory_order_relaxed);
}

double weighted_sum(std::span<const double> w, std::span<const double> a) {
  require_same_length(w.size(), a.size());
  return active().load(std::memory_order_relaxed)->sum(w.data(), a.data(), w.size());
}

double weighted_dot(std::span<const double> w, std::span<const double> a, std::span<const double> b) {
  require_same_length(w.size(), a.size());
  require_same_length(w.size(), b.size());
  return active().load(std::memory_order_relaxed)->dot(w.data(), a.data(), b.data(), w.size());
}

double weighted_dot3(std::span<const double> w, std::span<const double> a, std::span<const double> b,
                     std::span<const double> c) {
  require_same_length(w.size(), a.size());
  require_same_length(w.size(), b.size());
  require_same_length(w.size(), c.size());
  return active().load(std::memory_order_relaxed)->dot3(w.data(), a.data(), b.data(), c.data(), w.size());
}

}  // namespace cartan::kernels
