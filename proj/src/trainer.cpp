#include "ctxsal/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ctxsal/error.hpp"

namespace ctxsal {

double accuracy(const DifferentiableModel& model,
                const std::vector<const LabeledSample*>& samples) {
  if (samples.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto* s : samples) hits += model.predict(s->x) == s->label ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

TrainResult train(const DatasetManifest& data, const TrainOptions& opts) {
  if (!(opts.lr > 0.0)) throw InvalidArgument("train: lr must be positive");
  if (!(opts.weight_decay >= 0.0)) throw InvalidArgument("train: weight_decay must be >= 0");
  const ModelShape shape{data.channels, data.timesteps, data.num_classes};
  TrainResult result;
  result.model = make_model(opts.model, shape, opts.seed);
  DifferentiableModel& model = *result.model;

  const auto train_set = data.subset(Split::kTrain);
  const auto test_set = data.subset(Split::kTest);
  for (const auto* s : train_set) {
    if (s->x.channels() != shape.channels || s->x.timesteps() != shape.timesteps) {
      throw InvalidArgument("train: sample shape does not match dataset header");
    }
  }

  std::mt19937_64 rng(opts.seed ^ 0x5bd1e995ULL);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad(model.parameters().size());
  std::vector<double> upstream(shape.num_classes);

  for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += kTrainBatchSize) {
      const std::size_t end = std::min(order.size(), start + kTrainBatchSize);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t i = start; i < end; ++i) {
        const LabeledSample& s = *train_set[order[i]];
        const ForwardPass pass = model.run(s.x);
        loss -= std::log(std::max(pass.probabilities()[s.label], 1e-300));
        std::fill(upstream.begin(), upstream.end(), 0.0);
        upstream[s.label] = -1.0;
        pass.accumulate_parameter_gradient(upstream, OutputPath::kLogProbabilities, grad);
      }
      const double step = opts.lr / static_cast<double>(end - start);
      const double shrink = 1.0 - opts.lr * opts.weight_decay;
      auto params = model.mutable_parameters();
      for (std::size_t k = 0; k < params.size(); ++k) params[k] = shrink * params[k] - step * grad[k];
    }
    const double mean_loss = train_set.empty() ? 0.0 : loss / static_cast<double>(train_set.size());
    if (!std::isfinite(mean_loss)) throw NumericError("train: loss diverged");
    result.epoch_loss.push_back(mean_loss);
  }
  result.train_accuracy = accuracy(model, train_set);
  result.test_accuracy = accuracy(model, test_set);
  return result;
}

}  // namespace ctxsal
