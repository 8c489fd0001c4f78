#include <cmath>

#include "kernel_tables.hpp"

namespace sdnr::kernels::detail {

namespace {

void weighted_accumulate(double w, const double* x, double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += w * x[i];
}

void weighted_accumulate_abs(double w, const double* x, double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += w * std::fabs(x[i]);
}

void squared_distances(const double* columns, std::size_t n, const double* point, std::size_t dims, double* out) {
  for (std::size_t j = 0; j < n; ++j) out[j] = 0.0;
  for (std::size_t c = 0; c < dims; ++c) {
    const double* col = columns + c * n;
    const double p = point[c];
    for (std::size_t j = 0; j < n; ++j) {
      const double d = col[j] - p;
      out[j] += d * d;
    }
  }
}

double sum_of_min(const double* a, const double* b, std::size_t n) {
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t j = 0; j < n; ++j) {
    const double m = b[j] < a[j] ? b[j] : a[j];
    s[j % 4] += m;
  }
  return (s[0] + s[1]) + (s[2] + s[3]);
}

void min_inplace(double* a, const double* b, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) a[j] = b[j] < a[j] ? b[j] : a[j];
}

double max_abs(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t j = 0; j < n; ++j) m = std::fmax(m, std::fabs(x[j]));
  return m;
}

}  // namespace

const KernelTable scalar_table{weighted_accumulate, weighted_accumulate_abs, squared_distances,
                               sum_of_min,          min_inplace,             max_abs};

}  // namespace sdnr::kernels::detail
