#include <arm_neon.h>

#include "kernels_impl.hpp"

namespace ctxsal::simd::detail {

namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void blend_neon(const double* x, const double* p, const double* m, double* out, std::size_t n) {
  const float64x2_t one = vdupq_n_f64(1.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vm = vld1q_f64(m + i);
    const float64x2_t keep = vmulq_f64(vsubq_f64(one, vm), vld1q_f64(p + i));
    vst1q_f64(out + i, vfmaq_f64(keep, vm, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) out[i] = (1.0 - m[i]) * p[i] + m[i] * x[i];
}

void diff_mul_neon(const double* g, const double* x, const double* p, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(out + i, vmulq_f64(vld1q_f64(g + i), vsubq_f64(vld1q_f64(x + i), vld1q_f64(p + i))));
  }
  for (; i < n; ++i) out[i] = g[i] * (x[i] - p[i]);
}

void mul_neon(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

}  // namespace

const KernelTable& neon_kernels() {
  static const KernelTable table{Isa::kNeon, "neon",        dot_neon, axpy_neon,
                                 blend_neon, diff_mul_neon, mul_neon};
  return table;
}

}  // namespace ctxsal::simd::detail
