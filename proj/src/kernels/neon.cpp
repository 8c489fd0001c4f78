#include <arm_neon.h>

#include <cmath>

#include "kernel_tables.hpp"

namespace sdnr::kernels::detail {

namespace {

void weighted_accumulate(double w, const double* x, double* acc, std::size_t n) {
  const float64x2_t vw = vdupq_n_f64(w);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), vmulq_f64(vw, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) acc[i] += w * x[i];
}

void weighted_accumulate_abs(double w, const double* x, double* acc, std::size_t n) {
  const float64x2_t vw = vdupq_n_f64(w);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), vmulq_f64(vw, vabsq_f64(vld1q_f64(x + i)))));
  }
  for (; i < n; ++i) acc[i] += w * std::fabs(x[i]);
}

void squared_distances(const double* columns, std::size_t n, const double* point, std::size_t dims, double* out) {
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    float64x2_t sum = vdupq_n_f64(0.0);
    for (std::size_t c = 0; c < dims; ++c) {
      const float64x2_t d = vsubq_f64(vld1q_f64(columns + c * n + j), vdupq_n_f64(point[c]));
      sum = vaddq_f64(sum, vmulq_f64(d, d));
    }
    vst1q_f64(out + j, sum);
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

inline float64x2_t select_min(float64x2_t a, float64x2_t b) {
  return vbslq_f64(vcltq_f64(b, a), b, a);
}

double sum_of_min(const double* a, const double* b, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0);  // lanes 0, 1
  float64x2_t hi = vdupq_n_f64(0.0);  // lanes 2, 3
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    lo = vaddq_f64(lo, select_min(vld1q_f64(a + j), vld1q_f64(b + j)));
    hi = vaddq_f64(hi, select_min(vld1q_f64(a + j + 2), vld1q_f64(b + j + 2)));
  }
  double s[4] = {vgetq_lane_f64(lo, 0), vgetq_lane_f64(lo, 1), vgetq_lane_f64(hi, 0), vgetq_lane_f64(hi, 1)};
  for (; j < n; ++j) s[j % 4] += b[j] < a[j] ? b[j] : a[j];
  return (s[0] + s[1]) + (s[2] + s[3]);
}

void min_inplace(double* a, const double* b, std::size_t n) {
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) vst1q_f64(a + j, select_min(vld1q_f64(a + j), vld1q_f64(b + j)));
  for (; j < n; ++j) a[j] = b[j] < a[j] ? b[j] : a[j];
}

double max_abs(const double* x, std::size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) m = vmaxq_f64(m, vabsq_f64(vld1q_f64(x + j)));
  double r = std::fmax(vgetq_lane_f64(m, 0), vgetq_lane_f64(m, 1));
  for (; j < n; ++j) r = std::fmax(r, std::fabs(x[j]));
  return r;
}

}  // namespace

const KernelTable neon_table{weighted_accumulate, weighted_accumulate_abs, squared_distances,
                             sum_of_min,          min_inplace,             max_abs};

}  // namespace sdnr::kernels::detail
