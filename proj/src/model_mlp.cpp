#include <cmath>

#include "ctxsal/architectures.hpp"
#include "ctxsal/error.hpp"
#include "ctxsal/simd/kernels.hpp"

namespace ctxsal {

MlpModel::MlpModel(ModelShape shape, ModelConfig config, std::vector<double> params)
    : DifferentiableModel(shape, config, 0) {
  params_ = std::move(params);
}

std::unique_ptr<DifferentiableModel> MlpModel::clone() const {
  return std::make_unique<MlpModel>(*this);
}

std::size_t MlpModel::count(const ModelConfig& config, const ModelShape& shape) {
  if (config.hidden == 0) throw InvalidArgument("mlp: hidden width must be positive");
  const std::size_t N = shape.channels * shape.timesteps;
  return config.hidden * N + config.hidden + shape.num_classes * config.hidden + shape.num_classes;
}

// act.buffers[0] = hidden activations h.
void MlpModel::compute_logits(const EegMatrix& x, Activations& act,
                              std::span<double> logits) const {
  const std::size_t N = x.size();
  const std::size_t H = config_.hidden;
  const std::size_t C = shape_.num_classes;
  std::span<const double> p(params_);
  const auto w1 = p.subspan(0, H * N);
  const auto b1 = p.subspan(H * N, H);
  const auto w2 = p.subspan(H * N + H, C * H);
  const auto b2 = p.subspan(H * N + H + C * H, C);

  act.buffers.assign(1, std::vector<double>(H));
  auto& h = act.buffers[0];
  for (std::size_t j = 0; j < H; ++j) {
    h[j] = std::tanh(simd::dot(w1.subspan(j * N, N), x.values()) + b1[j]);
  }
  for (std::size_t c = 0; c < C; ++c) logits[c] = simd::dot(w2.subspan(c * H, H), h) + b2[c];
}

void MlpModel::backprop(const EegMatrix& x, const Activations& act,
                        std::span<const double> dlogits, EegMatrix* dx,
                        std::span<double> dparams) const {
  const std::size_t N = x.size();
  const std::size_t H = config_.hidden;
  const std::size_t C = shape_.num_classes;
  std::span<const double> p(params_);
  const auto w1 = p.subspan(0, H * N);
  const auto w2 = p.subspan(H * N + H, C * H);
  const auto& h = act.buffers[0];

  std::vector<double> da(H, 0.0);
  for (std::size_t c = 0; c < C; ++c) {
    if (dlogits[c] != 0.0) simd::axpy(dlogits[c], w2.subspan(c * H, H), da);
  }
  for (std::size_t j = 0; j < H; ++j) da[j] *= 1.0 - h[j] * h[j];

  if (dx != nullptr) {
    for (std::size_t j = 0; j < H; ++j) {
      if (da[j] != 0.0) simd::axpy(da[j], w1.subspan(j * N, N), dx->values());
    }
  }
  if (!dparams.empty()) {
    auto dw1 = dparams.subspan(0, H * N);
    auto db1 = dparams.subspan(H * N, H);
    auto dw2 = dparams.subspan(H * N + H, C * H);
    auto db2 = dparams.subspan(H * N + H + C * H, C);
    for (std::size_t j = 0; j < H; ++j) {
      if (da[j] != 0.0) simd::axpy(da[j], x.values(), dw1.subspan(j * N, N));
      db1[j] += da[j];
    }
    for (std::size_t c = 0; c < C; ++c) {
      simd::axpy(dlogits[c], h, dw2.subspan(c * H, H));
      db2[c] += dlogits[c];
    }
  }
}

}  // namespace ctxsal
