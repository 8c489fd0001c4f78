#include <atomic>
#include <cstdlib>
#include <string>

#include "kernel_tables.hpp"
#include "sdnr/error.hpp"

namespace sdnr::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(SDNR_HAVE_AVX2_KERNELS)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("SDNR_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Isa::scalar;
    if (v == "avx2" && isa_supported(Isa::avx2)) return Isa::avx2;
    if (v == "neon" && isa_supported(Isa::neon)) return Isa::neon;
  }
  if (isa_supported(Isa::avx2)) return Isa::avx2;
  if (isa_supported(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

std::atomic<const KernelTable*>& current_slot() {
  static std::atomic<const KernelTable*> slot{table(detect())};
  return slot;
}

std::atomic<Isa>& current_isa() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

const KernelTable& current() { return *current_slot().load(std::memory_order_relaxed); }

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: return cpu_has_avx2();
    case Isa::neon:
#if defined(SDNR_HAVE_NEON_KERNELS)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* table(Isa isa) {
  if (!isa_supported(isa)) return nullptr;
  switch (isa) {
    case Isa::scalar: return &detail::scalar_table;
#if defined(SDNR_HAVE_AVX2_KERNELS)
    case Isa::avx2: return &detail::avx2_table;
#endif
#if defined(SDNR_HAVE_NEON_KERNELS)
    case Isa::neon: return &detail::neon_table;
#endif
    default: return nullptr;
  }
}

Isa active_isa() { return current_isa().load(); }

void force_isa(Isa isa) {
  const KernelTable* t = table(isa);
  if (!t) throw ArgumentError("SIMD variant " + std::string(isa_name(isa)) + " is not available");
  current_slot().store(t);
  current_isa().store(isa);
}

void weighted_accumulate(double w, std::span<const double> x, std::span<double> acc) {
  if (x.size() != acc.size()) throw ArgumentError("weighted_accumulate: size mismatch");
  current().weighted_accumulate(w, x.data(), acc.data(), x.size());
}

void weighted_accumulate_abs(double w, std::span<const double> x, std::span<double> acc) {
  if (x.size() != acc.size()) throw ArgumentError("weighted_accumulate_abs: size mismatch");
  current().weighted_accumulate_abs(w, x.data(), acc.data(), x.size());
}

void squared_distances(std::span<const double> columns, std::size_t n, std::span<const double> point,
                       std::span<double> out) {
  if (columns.size() != n * point.size() || out.size() != n) {
    throw ArgumentError("squared_distances: size mismatch");
  }
  current().squared_distances(columns.data(), n, point.data(), point.size(), out.data());
}

double sum_of_min(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ArgumentError("sum_of_min: size mismatch");
  return current().sum_of_min(a.data(), b.data(), a.size());
}

void min_inplace(std::span<double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ArgumentError("min_inplace: size mismatch");
  current().min_inplace(a.data(), b.data(), a.size());
}

double max_abs(std::span<const double> x) { return current().max_abs(x.data(), x.size()); }

}  // namespace sdnr::kernels
