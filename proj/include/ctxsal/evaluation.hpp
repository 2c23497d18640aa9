#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctxsal/dataset.hpp"
#include "ctxsal/model.hpp"
#include "ctxsal/perturbation.hpp"
#include "ctxsal/saliency.hpp"

namespace ctxsal {

enum class Method { kContext, kNoContext, kGradient };
enum class ReductionMode { kChannel, kTimestep };
enum class Selection { kTop, kBottom };
enum class Granularity { kInstance, kGroup };

const char* method_tag(Method m);
Method parse_method(std::string_view tag);
const char* mode_tag(ReductionMode m);
ReductionMode parse_mode(std::string_view tag);

// Mean of each row / each column of the mask.
std::vector<double> channel_scores(const SaliencyMask& m);
std::vector<double> timestep_scores(const SaliencyMask& m);

// Zero the listed rows / columns. Throws InvalidArgument for out-of-range indices.
EegMatrix reduce_channels(const EegMatrix& x, std::span<const std::size_t> channels);
EegMatrix reduce_timesteps(const EegMatrix& x, std::span<const std::size_t> steps);

// Elementwise mean of the masks; all must share one shape.
SaliencyMask group_mask(const std::vector<SaliencyMask>& masks);

/// k indices with the highest (top) or lowest (bottom) scores. Ties go to the
/// lower index. Throws InvalidArgument when k exceeds the number of scores.
std::vector<std::size_t> select_indices(std::span<const double> scores, std::size_t k,
                                        Selection selection);

/// |top-k(scores) ∩ planted| / min(k, |planted|). NaN when k or planted is empty.
double planted_recall(std::span<const double> scores, std::span<const std::size_t> planted,
                      std::size_t k);

// Planted channels, or the planted window's time steps.
std::vector<std::size_t> planted_indices(const PlantSpec& plant, ReductionMode mode);

// Ground truth for one sample: its recorded planted region when present,
// otherwise as above.
std::vector<std::size_t> planted_indices(const PlantSpec& plant, const LabeledSample& sample,
                                         ReductionMode mode);

SaliencyMask explain(const DifferentiableModel& model, const EegMatrix& x, Method method,
                     const ExplainConfig& cfg);

/// One mask per sample, computed on `jobs` worker threads. Output order
/// follows `samples` regardless of the thread count.
std::vector<SaliencyMask> explain_all(const DifferentiableModel& model,
                                      const std::vector<const LabeledSample*>& samples,
                                      Method method, const ExplainConfig& cfg,
                                      std::size_t jobs = 1);

struct ReductionOptions {
  ReductionMode mode = ReductionMode::kChannel;
  Selection selection = Selection::kTop;
  Granularity granularity = Granularity::kInstance;
  std::vector<std::size_t> k_list{0, 2, 4, 6};
};

struct ReductionReport {
  std::string method;
  ReductionMode mode = ReductionMode::kChannel;
  Selection selection = Selection::kTop;
  Granularity granularity = Granularity::kInstance;
  std::size_t num_samples = 0;
  double baseline_accuracy = 0.0;
  std::vector<std::size_t> k;
  std::vector<double> accuracy;
  std::optional<std::vector<double>> planted_recall;  // per k; NaN at k = 0

  std::string to_json() const;
  std::string to_csv() const;
};

/// Removal experiment over precomputed masks (one per sample): score each
/// mask, zero the selected k rows/columns, and report accuracy per k. Group
/// granularity averages the masks first and applies one selection to all.
ReductionReport run_reduction(const DifferentiableModel& model,
                              const std::vector<const LabeledSample*>& samples,
                              const std::vector<SaliencyMask>& masks, std::string_view method,
                              const ReductionOptions& opts,
                              const std::optional<PlantSpec>& plant = std::nullopt);

/// As above, explaining every test-split sample first.
ReductionReport run_reduction(const DifferentiableModel& model, const DatasetManifest& data,
                              Method method, const ExplainConfig& cfg,
                              const ReductionOptions& opts, std::size_t jobs = 1);

}  // namespace ctxsal
