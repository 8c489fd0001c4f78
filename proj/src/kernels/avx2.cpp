#include <immintrin.h>

#include <cmath>

#include "kernel_tables.hpp"

namespace sdnr::kernels::detail {

namespace {

inline __m256d abs_pd(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

void weighted_accumulate(double w, const double* x, double* acc, std::size_t n) {
  const __m256d vw = _mm256_set1_pd(w);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(vw, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), prod));
  }
  for (; i < n; ++i) acc[i] += w * x[i];
}

void weighted_accumulate_abs(double w, const double* x, double* acc, std::size_t n) {
  const __m256d vw = _mm256_set1_pd(w);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(vw, abs_pd(_mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), prod));
  }
  for (; i < n; ++i) acc[i] += w * std::fabs(x[i]);
}

void squared_distances(const double* columns, std::size_t n, const double* point, std::size_t dims, double* out) {
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d sum = _mm256_setzero_pd();
    for (std::size_t c = 0; c < dims; ++c) {
      const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(columns + c * n + j), _mm256_set1_pd(point[c]));
      sum = _mm256_add_pd(sum, _mm256_mul_pd(d, d));
    }
    _mm256_storeu_pd(out + j, sum);
  }
  for (; j < n; ++j) {
    double s = 0.0;
    for (std::size_t c = 0; c < dims; ++c) {
      const double d = columns[c * n + j] - point[c];
      s += d * d;
    }
    out[j] = s;
  }
}

double sum_of_min(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    // min_pd(b, a) returns a when the operands compare equal, matching the scalar select.
    acc = _mm256_add_pd(acc, _mm256_min_pd(_mm256_loadu_pd(b + j), _mm256_loadu_pd(a + j)));
  }
  alignas(32) double s[4];
  _mm256_store_pd(s, acc);
  for (; j < n; ++j) s[j % 4] += b[j] < a[j] ? b[j] : a[j];
  return (s[0] + s[1]) + (s[2] + s[3]);
}

void min_inplace(double* a, const double* b, std::size_t n) {
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    _mm256_storeu_pd(a + j, _mm256_min_pd(_mm256_loadu_pd(b + j), _mm256_loadu_pd(a + j)));
  }
  for (; j < n; ++j) a[j] = b[j] < a[j] ? b[j] : a[j];
}

double max_abs(const double* x, std::size_t n) {
  __m256d m = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) m = _mm256_max_pd(m, abs_pd(_mm256_loadu_pd(x + j)));
  alignas(32) double s[4];
  _mm256_store_pd(s, m);
  double r = std::fmax(std::fmax(s[0], s[1]), std::fmax(s[2], s[3]));
  for (; j < n; ++j) r = std::fmax(r, std::fabs(x[j]));
  return r;
}

}  // namespace

const KernelTable avx2_table{weighted_accumulate, weighted_accumulate_abs, squared_distances,
                             sum_of_min,          min_inplace,             max_abs};

}  // namespace sdnr::kernels::detail
