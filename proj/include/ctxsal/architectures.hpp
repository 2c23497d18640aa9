#pragma once

// Concrete classifiers. Parameter layouts (the checkpoint's canonical order)
// are listed on each class; N = channels * timesteps, inputs are flattened
// row-major (index = ch * T + t), C = num_classes.

#include "ctxsal/model.hpp"

namespace ctxsal {

/// z = W x + b.
/// params: W [C][N], b [C].
class LinearModel final : public DifferentiableModel {
 public:
  LinearModel(ModelShape shape, ModelConfig config, std::vector<double> params);

  Architecture architecture() const override { return Architecture::kLinear; }
  std::unique_ptr<DifferentiableModel> clone() const override;

  static std::size_t count(const ModelConfig& config, const ModelShape& shape);

  std::span<const double> class_weights(std::size_t c) const;

 protected:
  void compute_logits(const EegMatrix& x, Activations& act, std::span<double> logits) const override;
  void backprop(const EegMatrix& x, const Activations& act, std::span<const double> dlogits,
                EegMatrix* dx, std::span<double> dparams) const override;
};

/// h = tanh(W1 x + b1), z = W2 h + b2.
/// params: W1 [H][N], b1 [H], W2 [C][H], b2 [C].
class MlpModel final : public DifferentiableModel {
 public:
  MlpModel(ModelShape shape, ModelConfig config, std::vector<double> params);

  Architecture architecture() const override { return Architecture::kMlp; }
  std::unique_ptr<DifferentiableModel> clone() const override;

  static std::size_t count(const ModelConfig& config, const ModelShape& shape);

 protected:
  void compute_logits(const EegMatrix& x, Activations& act, std::span<double> logits) const override;
  void backprop(const EegMatrix& x, const Activations& act, std::span<const double> dlogits,
                EegMatrix* dx, std::span<double> dparams) const override;
};

/// Channels are split into G = Ch / group_size consecutive groups. Each group
/// has F filters spanning its channels and K time steps (valid convolution
/// along time, To = T - K + 1 outputs), followed by tanh and non-overlapping
/// average pooling of width `pool` (Tp = To / pool, tail dropped). The pooled
/// maps feed a tanh dense layer of width H and a dense softmax layer.
/// params: conv_w [G][F][group_size][K], conv_b [G][F], Wh [H][G*F*Tp], bh [H],
///         Wo [C][H], bo [C].
class ConvNetModel final : public DifferentiableModel {
 public:
  ConvNetModel(ModelShape shape, ModelConfig config, std::vector<double> params);

  Architecture architecture() const override { return Architecture::kConvNet; }
  std::unique_ptr<DifferentiableModel> clone() const override;

  static std::size_t count(const ModelConfig& config, const ModelShape& shape);

 protected:
  void compute_logits(const EegMatrix& x, Activations& act, std::span<double> logits) const override;
  void backprop(const EegMatrix& x, const Activations& act, std::span<const double> dlogits,
                EegMatrix* dx, std::span<double> dparams) const override;

 private:
  struct Dims {
    std::size_t groups, filters, group_size, kernel, conv_len, pool, pooled_len, features, hidden;
  };
  static Dims dims(const ModelConfig& config, const ModelShape& shape);
  Dims d_;
};

}  // namespace ctxsal
