#pragma once

// Data-parallel inner loops shared by the models and the perturbation operator.
//
// Every kernel has a scalar reference implementation. Vector variants (AVX2+FMA
// on x86-64, NEON on aarch64) are compiled into separate translation units and
// selected once at runtime. The environment variable CTXSAL_SIMD
// (scalar | avx2 | neon | auto) overrides the choice.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace ctxsal::simd {

enum class Isa { kScalar, kAvx2, kNeon };

struct KernelTable {
  Isa isa;
  const char* name;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out[i] = (1 - m[i]) * p[i] + m[i] * x[i]; exact at m = 0 and m = 1
  void (*blend)(const double* x, const double* p, const double* m, double* out, std::size_t n);
  // out[i] = g[i] * (x[i] - p[i])
  void (*diff_mul)(const double* g, const double* x, const double* p, double* out, std::size_t n);
  // out[i] = a[i] * b[i]
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
};

const KernelTable& scalar_kernels();

// Tables that are both compiled in and supported by the running CPU. The
// scalar table is always first.
std::vector<const KernelTable*> available_kernels();

// Currently selected table.
const KernelTable& active();

// Throws InvalidArgument when `isa` is not available on this machine.
void select(Isa isa);

// Parses scalar | avx2 | neon | auto. Throws InvalidArgument otherwise.
Isa parse_isa(std::string_view name);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace ctxsal::simd
