#pragma once

#include <cstddef>
#include <span>
#include <string_view>

/// Data-parallel inner loops with a scalar reference and SIMD variants.
///
/// Every variant produces bit-identical results to the scalar reference:
/// element-wise kernels keep the scalar operation order per element, and the
/// one reduction (`sum_of_min`) is defined with four interleaved partial sums
/// combined as (s0 + s1) + (s2 + s3), which the vector variants reproduce lane
/// for lane. The implementation is selected once at runtime from the CPU
/// features; `SDNR_SIMD=scalar|avx2|neon` in the environment overrides it.
namespace sdnr::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);
bool isa_supported(Isa isa);
Isa active_isa();
/// Pins the implementation (tests and benchmarks). Throws ArgumentError when
/// the ISA is not available on this machine or build.
void force_isa(Isa isa);

struct KernelTable {
  void (*weighted_accumulate)(double w, const double* x, double* acc, std::size_t n);
  void (*weighted_accumulate_abs)(double w, const double* x, double* acc, std::size_t n);
  void (*squared_distances)(const double* columns, std::size_t n, const double* point, std::size_t dims,
                            double* out);
  double (*sum_of_min)(const double* a, const double* b, std::size_t n);
  void (*min_inplace)(double* a, const double* b, std::size_t n);
  double (*max_abs)(const double* x, std::size_t n);
};

/// Kernel table of a specific ISA, or nullptr if it is not available.
const KernelTable* table(Isa isa);

/// acc[i] += w * x[i]
void weighted_accumulate(double w, std::span<const double> x, std::span<double> acc);
/// acc[i] += w * |x[i]|
void weighted_accumulate_abs(double w, std::span<const double> x, std::span<double> acc);
/// out[j] = sum_c (columns[c * n + j] - point[c])^2 for column-major `columns`.
void squared_distances(std::span<const double> columns, std::size_t n, std::span<const double> point,
                       std::span<double> out);
/// sum_j min(a[j], b[j]) with four interleaved partial sums.
double sum_of_min(std::span<const double> a, std::span<const double> b);
/// a[j] = min(a[j], b[j])
void min_inplace(std::span<double> a, std::span<const double> b);
/// max_j |x[j]|, 0 for an empty span.
double max_abs(std::span<const double> x);

}  // namespace sdnr::kernels
