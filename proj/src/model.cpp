#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "ctxsal/architectures.hpp"
#include "ctxsal/error.hpp"
#include "ctxsal/numerics.hpp"

namespace ctxsal {

const char* architecture_tag(Architecture arch) {
  switch (arch) {
    case Architecture::kLinear:
      return "linear";
    case Architecture::kMlp:
      return "mlp";
    case Architecture::kConvNet:
      return "convnet";
  }
  return "unknown";
}

Architecture parse_architecture(std::string_view tag) {
  if (tag == "linear") return Architecture::kLinear;
  if (tag == "mlp") return Architecture::kMlp;
  if (tag == "convnet") return Architecture::kConvNet;
  throw InvalidArgument("unknown architecture '" + std::string(tag) + "'");
}

DifferentiableModel::DifferentiableModel(ModelShape shape, ModelConfig config,
                                         std::size_t num_params)
    : shape_(shape), config_(config), params_(num_params, 0.0) {}

std::vector<double> ForwardPass::logit_seed(std::span<const double> upstream,
                                            OutputPath path) const {
  const std::size_t C = logits_.size();
  if (upstream.size() != C) {
    throw InvalidArgument("upstream weights: expected " + std::to_string(C) + " entries, got " +
                          std::to_string(upstream.size()));
  }
  std::vector<double> dz(upstream.begin(), upstream.end());
  switch (path) {
    case OutputPath::kLogits:
      break;
    case OutputPath::kLogProbabilities: {
      double total = 0.0;
      for (double u : upstream) total += u;
      for (std::size_t j = 0; j < C; ++j) dz[j] = upstream[j] - probs_[j] * total;
      break;
    }
    case OutputPath::kProbabilities: {
      double expected = 0.0;
      for (std::size_t c = 0; c < C; ++c) expected += upstream[c] * probs_[c];
      for (std::size_t j = 0; j < C; ++j) dz[j] = probs_[j] * (upstream[j] - expected);
      break;
    }
  }
  return dz;
}

EegMatrix ForwardPass::input_gradient(std::span<const double> upstream, OutputPath path) const {
  const auto dz = logit_seed(upstream, path);
  EegMatrix dx(x_->channels(), x_->timesteps());
  model_->backprop(*x_, act_, dz, &dx, {});
  return dx;
}

void ForwardPass::accumulate_parameter_gradient(std::span<const double> upstream, OutputPath path,
                                                std::span<double> grad) const {
  if (grad.size() != model_->params_.size()) {
    throw InvalidArgument("parameter gradient buffer has wrong size");
  }
  const auto dz = logit_seed(upstream, path);
  model_->backprop(*x_, act_, dz, nullptr, grad);
}

ForwardPass DifferentiableModel::run(const EegMatrix& x) const {
  if (x.channels() != shape_.channels || x.timesteps() != shape_.timesteps) {
    throw InvalidArgument("model expects " + std::to_string(shape_.channels) + "x" +
                          std::to_string(shape_.timesteps) + " input, got " +
                          std::to_string(x.channels()) + "x" + std::to_string(x.timesteps()));
  }
  ForwardPass pass(*this, x);
  pass.logits_.assign(shape_.num_classes, 0.0);
  compute_logits(x, pass.act_, pass.logits_);
  pass.probs_ = softmax(pass.logits_);
  return pass;
}

std::vector<double> DifferentiableModel::forward(const EegMatrix& x) const {
  return run(x).probabilities();
}

std::vector<double> DifferentiableModel::logits(const EegMatrix& x) const {
  return run(x).logits();
}

std::size_t DifferentiableModel::predict(const EegMatrix& x) const {
  const auto p = forward(x);
  return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

EegMatrix DifferentiableModel::input_gradient(const EegMatrix& x, std::span<const double> upstream,
                                              OutputPath path) const {
  return run(x).input_gradient(upstream, path);
}

std::size_t parameter_count(const ModelConfig& config, const ModelShape& shape) {
  if (shape.channels == 0 || shape.timesteps == 0) {
    throw InvalidArgument("model shape must be at least 1x1");
  }
  if (shape.num_classes < 2) throw InvalidArgument("model needs at least 2 classes");
  switch (config.arch) {
    case Architecture::kLinear:
      return LinearModel::count(config, shape);
    case Architecture::kMlp:
      return MlpModel::count(config, shape);
    case Architecture::kConvNet:
      return ConvNetModel::count(config, shape);
  }
  throw InvalidArgument("unknown architecture");
}

std::unique_ptr<DifferentiableModel> make_model(const ModelConfig& config, const ModelShape& shape,
                                                std::vector<double> params) {
  const std::size_t expected = parameter_count(config, shape);
  if (params.size() != expected) {
    throw InvalidArgument(std::string(architecture_tag(config.arch)) + " expects " +
                          std::to_string(expected) + " parameters, got " +
                          std::to_string(params.size()));
  }
  switch (config.arch) {
    case Architecture::kLinear:
      return std::make_unique<LinearModel>(shape, config, std::move(params));
    case Architecture::kMlp:
      return std::make_unique<MlpModel>(shape, config, std::move(params));
    case Architecture::kConvNet:
      return std::make_unique<ConvNetModel>(shape, config, std::move(params));
  }
  throw InvalidArgument("unknown architecture");
}

namespace {

void glorot(std::span<double> w, std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& v : w) v = dist(rng);
}

}  // namespace

std::unique_ptr<DifferentiableModel> make_model(const ModelConfig& config, const ModelShape& shape,
                                                std::uint64_t seed) {
  std::vector<double> params(parameter_count(config, shape), 0.0);
  std::mt19937_64 rng(seed);
  const std::size_t N = shape.channels * shape.timesteps;
  const std::size_t C = shape.num_classes;
  std::span<double> p(params);
  switch (config.arch) {
    case Architecture::kLinear:
      break;
    case Architecture::kMlp: {
      const std::size_t H = config.hidden;
      glorot(p.subspan(0, H * N), N, H, rng);
      glorot(p.subspan(H * N + H, C * H), H, C, rng);
      break;
    }
    case Architecture::kConvNet: {
      const std::size_t G = shape.channels / config.group_size;
      const std::size_t F = config.filters;
      const std::size_t K = config.kernel;
      const std::size_t gs = config.group_size;
      const std::size_t To = shape.timesteps - K + 1;
      const std::size_t D = G * F * (To / config.pool);
      const std::size_t H = config.hidden;
      std::size_t off = 0;
      glorot(p.subspan(off, G * F * gs * K), gs * K, F * K, rng);
      off += G * F * gs * K + G * F;
      glorot(p.subspan(off, H * D), D, H, rng);
      off += H * D + H;
      glorot(p.subspan(off, C * H), H, C, rng);
      break;
    }
  }
  return make_model(config, shape, std::move(params));
}

}  // namespace ctxsal
