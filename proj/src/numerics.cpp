#include "ctxsal/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ctxsal/error.hpp"
#include "ctxsal/simd/kernels.hpp"

namespace ctxsal {

namespace {

void check_kernel(std::size_t kernel, const char* what) {
  if (kernel == 0 || kernel % 2 == 0) {
    throw InvalidArgument(std::string(what) + ": kernel must be a positive odd integer, got " +
                          std::to_string(kernel));
  }
}

}  // namespace

EegMatrix avg_pool_temporal(const EegMatrix& x, std::size_t kernel) {
  check_kernel(kernel, "avg_pool_temporal");
  const std::size_t half = kernel / 2;
  const std::size_t T = x.timesteps();
  EegMatrix out(x.channels(), T);
  for (std::size_t ch = 0; ch < x.channels(); ++ch) {
    auto in = x.row(ch);
    auto dst = out.row(ch);
    for (std::size_t t = 0; t < T; ++t) {
      const std::size_t lo = t >= half ? t - half : 0;
      const std::size_t hi = std::min(T - 1, t + half);
      double s = 0.0;
      for (std::size_t j = lo; j <= hi; ++j) s += in[j];
      dst[t] = s / static_cast<double>(hi - lo + 1);
    }
  }
  return out;
}

EegMatrix avg_pool_spatial(const EegMatrix& x, std::size_t kernel) {
  check_kernel(kernel, "avg_pool_spatial");
  const std::size_t half = kernel / 2;
  const std::size_t C = x.channels();
  EegMatrix out(C, x.timesteps());
  for (std::size_t ch = 0; ch < C; ++ch) {
    const std::size_t lo = ch >= half ? ch - half : 0;
    const std::size_t hi = std::min(C - 1, ch + half);
    auto dst = out.row(ch);
    for (std::size_t r = lo; r <= hi; ++r) simd::axpy(1.0, x.row(r), dst);
    const double count = static_cast<double>(hi - lo + 1);
    for (double& v : dst) v /= count;
  }
  return out;
}

PairWeights pairwise_softmax(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw InvalidArgument("pairwise_softmax: inputs must be finite");
  }
  const double m = std::max(a, b);
  const double ea = std::exp(a - m);
  const double eb = std::exp(b - m);
  const double s = ea + eb;
  return {ea / s, eb / s};
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double m = *std::max_element(logits.begin(), logits.end());
  double s = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    s += out[i];
  }
  for (double& v : out) v /= s;
  return out;
}

EegMatrix finite_difference_gradient(const std::function<double(const EegMatrix&)>& g,
                                     const EegMatrix& x, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("finite_difference_gradient: eps must be positive");
  EegMatrix grad(x.channels(), x.timesteps());
  EegMatrix probe = x;
  auto pv = probe.values();
  auto gv = grad.values();
  for (std::size_t i = 0; i < pv.size(); ++i) {
    const double orig = pv[i];
    pv[i] = orig + eps;
    const double up = g(probe);
    pv[i] = orig - eps;
    const double down = g(probe);
    pv[i] = orig;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericError("finite_difference_gradient: non-finite evaluation at entry " +
                         std::to_string(i));
    }
    gv[i] = (up - down) / (2.0 * eps);
  }
  return grad;
}

}  // namespace ctxsal
