#include "ctxsal/perturbation.hpp"

#include <algorithm>

#include "ctxsal/error.hpp"
#include "ctxsal/numerics.hpp"
#include "ctxsal/simd/kernels.hpp"

namespace ctxsal {

SaliencyMask::SaliencyMask(EegMatrix m) : m_(std::move(m)) {
  for (double v : m_.values()) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("SaliencyMask: entries must lie in [0, 1]");
  }
}

SaliencyMask SaliencyMask::filled(std::size_t channels, std::size_t timesteps, double value) {
  return SaliencyMask(EegMatrix(channels, timesteps, value));
}

SaliencyMask SaliencyMask::clamped(EegMatrix m) {
  for (double& v : m.values()) v = std::clamp(v, 0.0, 1.0);
  return SaliencyMask(std::move(m));
}

ContextPerturbation build_context(const EegMatrix& x, std::size_t temporal_kernel,
                                  std::size_t spatial_kernel) {
  ContextPerturbation ctx{avg_pool_temporal(x, temporal_kernel), avg_pool_spatial(x, spatial_kernel),
                          EegMatrix(x.channels(), x.timesteps()),
                          EegMatrix(x.channels(), x.timesteps()),
                          EegMatrix(x.channels(), x.timesteps())};
  auto ct = ctx.c_temporal.values();
  auto cs = ctx.c_spatial.values();
  auto wt = ctx.w_temporal.values();
  auto ws = ctx.w_spatial.values();
  auto p = ctx.p.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const PairWeights w = pairwise_softmax(ct[i], cs[i]);
    wt[i] = w.first;
    ws[i] = w.second;
    p[i] = w.first * ct[i] + w.second * cs[i];
  }
  return ctx;
}

void detail::blend_into(const EegMatrix& x, const EegMatrix& m, const EegMatrix& p,
                        EegMatrix& out) {
  require_same_shape(x, m, "apply_mask");
  require_same_shape(x, p, "apply_mask");
  require_same_shape(x, out, "apply_mask");
  simd::active().blend(x.values().data(), p.values().data(), m.values().data(),
                       out.values().data(), x.size());
}

EegMatrix apply_mask(const EegMatrix& x, const SaliencyMask& m, const EegMatrix& p) {
  EegMatrix out(x.channels(), x.timesteps());
  detail::blend_into(x, m.matrix(), p, out);
  return out;
}

EegMatrix apply_mask_nocontext(const EegMatrix& x, const SaliencyMask& m) {
  require_same_shape(x, m.matrix(), "apply_mask_nocontext");
  EegMatrix out(x.channels(), x.timesteps());
  simd::active().mul(m.matrix().values().data(), x.values().data(), out.values().data(), x.size());
  return out;
}

}  // namespace ctxsal
