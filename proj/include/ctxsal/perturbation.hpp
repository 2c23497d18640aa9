#pragma once

#include <cstddef>

#include "ctxsal/matrix.hpp"

namespace ctxsal {

inline constexpr std::size_t kDefaultTemporalKernel = 15;
inline constexpr std::size_t kDefaultSpatialKernel = 29;

/// Saliency mask: same shape as its input, every entry in [0, 1].
/// 1 keeps the input feature, 0 replaces it with the perturbation.
class SaliencyMask {
 public:
  // Throws InvalidArgument if any entry lies outside [0, 1].
  explicit SaliencyMask(EegMatrix m);

  static SaliencyMask filled(std::size_t channels, std::size_t timesteps, double value);
  // Projects every entry onto [0, 1].
  static SaliencyMask clamped(EegMatrix m);

  const EegMatrix& matrix() const { return m_; }
  std::size_t channels() const { return m_.channels(); }
  std::size_t timesteps() const { return m_.timesteps(); }
  double operator()(std::size_t ch, std::size_t t) const { return m_(ch, t); }

  friend bool operator==(const SaliencyMask&, const SaliencyMask&) = default;

 private:
  EegMatrix m_;
};

/// Context-aware perturbation for one input: temporal and spatial local means,
/// per-entry soft-attention weights over the two, and their fusion.
struct ContextPerturbation {
  EegMatrix c_temporal;
  EegMatrix c_spatial;
  EegMatrix w_temporal;
  EegMatrix w_spatial;
  EegMatrix p;
};

/// w^t, w^s = softmax(c^t, c^s) entrywise; p = w^t c^t + w^s c^s.
ContextPerturbation build_context(const EegMatrix& x,
                                  std::size_t temporal_kernel = kDefaultTemporalKernel,
                                  std::size_t spatial_kernel = kDefaultSpatialKernel);

/// x_hat = (1 - m) p + m x, entrywise.
EegMatrix apply_mask(const EegMatrix& x, const SaliencyMask& m, const EegMatrix& p);

/// x_hat = m x (the perturbation term dropped).
EegMatrix apply_mask_nocontext(const EegMatrix& x, const SaliencyMask& m);

namespace detail {
// apply_mask without the [0, 1] check on m; used inside the optimizer and by
// finite-difference probes.
void blend_into(const EegMatrix& x, const EegMatrix& m, const EegMatrix& p, EegMatrix& out);
}  // namespace detail

}  // namespace ctxsal
