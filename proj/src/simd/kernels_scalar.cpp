#include "ctxsal/simd/kernels.hpp"

namespace ctxsal::simd {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void blend_scalar(const double* x, const double* p, const double* m, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = (1.0 - m[i]) * p[i] + m[i] * x[i];
}

void diff_mul_scalar(const double* g, const double* x, const double* p, double* out,
                     std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = g[i] * (x[i] - p[i]);
}

void mul_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::kScalar, "scalar",      dot_scalar, axpy_scalar,
                                 blend_scalar, diff_mul_scalar, mul_scalar};
  return table;
}

}  // namespace ctxsal::simd
