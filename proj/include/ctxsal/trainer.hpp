#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "ctxsal/dataset.hpp"
#include "ctxsal/model.hpp"

namespace ctxsal {

inline constexpr std::size_t kTrainBatchSize = 32;

struct TrainOptions {
  ModelConfig model;
  std::size_t epochs = 20;
  double lr = 0.01;
  double weight_decay = 0.0;  // L2 coefficient, applied to every parameter
  std::uint64_t seed = 0;
};

struct TrainResult {
  std::unique_ptr<DifferentiableModel> model;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  std::vector<double> epoch_loss;  // mean cross-entropy over the train split
};

/// Mini-batch SGD on cross-entropy (+ weight_decay/2 * |theta|^2) over the
/// train split, batch size 32, seeded initialization and shuffling.
TrainResult train(const DatasetManifest& data, const TrainOptions& opts);

/// Fraction of samples whose argmax prediction equals the label; 0 for an empty set.
double accuracy(const DifferentiableModel& model, const std::vector<const LabeledSample*>& samples);

}  // namespace ctxsal
