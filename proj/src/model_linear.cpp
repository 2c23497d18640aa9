#include "ctxsal/architectures.hpp"
#include "ctxsal/simd/kernels.hpp"

namespace ctxsal {

LinearModel::LinearModel(ModelShape shape, ModelConfig config, std::vector<double> params)
    : DifferentiableModel(shape, config, 0) {
  params_ = std::move(params);
}

std::unique_ptr<DifferentiableModel> LinearModel::clone() const {
  return std::make_unique<LinearModel>(*this);
}

std::size_t LinearModel::count(const ModelConfig&, const ModelShape& shape) {
  return shape.num_classes * shape.channels * shape.timesteps + shape.num_classes;
}

std::span<const double> LinearModel::class_weights(std::size_t c) const {
  const std::size_t N = shape_.channels * shape_.timesteps;
  return std::span<const double>(params_).subspan(c * N, N);
}

void LinearModel::compute_logits(const EegMatrix& x, Activations&, std::span<double> logits) const {
  const std::size_t N = x.size();
  const std::size_t C = shape_.num_classes;
  const double* bias = params_.data() + C * N;
  for (std::size_t c = 0; c < C; ++c) {
    logits[c] = simd::dot(class_weights(c), x.values()) + bias[c];
  }
}

void LinearModel::backprop(const EegMatrix& x, const Activations&, std::span<const double> dlogits,
                           EegMatrix* dx, std::span<double> dparams) const {
  const std::size_t N = x.size();
  const std::size_t C = shape_.num_classes;
  for (std::size_t c = 0; c < C; ++c) {
    if (dlogits[c] == 0.0) continue;
    if (dx != nullptr) simd::axpy(dlogits[c], class_weights(c), dx->values());
    if (!dparams.empty()) {
      simd::axpy(dlogits[c], x.values(), dparams.subspan(c * N, N));
      dparams[C * N + c] += dlogits[c];
    }
  }
}

}  // namespace ctxsal
