#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctxsal/matrix.hpp"

namespace ctxsal {

enum class Architecture { kLinear, kMlp, kConvNet };

const char* architecture_tag(Architecture arch);
Architecture parse_architecture(std::string_view tag);

struct ModelShape {
  std::size_t channels = 0;
  std::size_t timesteps = 0;
  std::size_t num_classes = 0;

  friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

/// Architecture hyperparameters. Fields not used by `arch` are ignored.
struct ModelConfig {
  Architecture arch = Architecture::kMlp;
  std::size_t hidden = 64;     // mlp hidden width; convnet dense width
  std::size_t filters = 16;    // convnet filters per channel group
  std::size_t kernel = 16;     // convnet temporal kernel
  std::size_t group_size = 4;  // convnet channels per group
  std::size_t pool = 2;        // convnet average-pool width (non-overlapping)

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Which scalar an upstream weight vector u is applied to in input_gradient:
/// sum_c u_c z_c (logits), sum_c u_c p_c, or sum_c u_c log p_c.
enum class OutputPath { kLogits, kProbabilities, kLogProbabilities };

class DifferentiableModel;

// Cached intermediate values for one forward pass; layout is model-specific.
struct Activations {
  std::vector<std::vector<double>> buffers;
};

/// Result of one forward evaluation, able to backpropagate into the input or
/// the parameters without recomputing the forward pass. Holds references to
/// the model and the input; both must outlive it.
class ForwardPass {
 public:
  const std::vector<double>& logits() const { return logits_; }
  const std::vector<double>& probabilities() const { return probs_; }

  EegMatrix input_gradient(std::span<const double> upstream, OutputPath path) const;

  // Adds d(scalar)/d(params) into `grad` (size = parameter count).
  void accumulate_parameter_gradient(std::span<const double> upstream, OutputPath path,
                                     std::span<double> grad) const;

 private:
  friend class DifferentiableModel;
  ForwardPass(const DifferentiableModel& model, const EegMatrix& x) : model_(&model), x_(&x) {}

  std::vector<double> logit_seed(std::span<const double> upstream, OutputPath path) const;

  const DifferentiableModel* model_;
  const EegMatrix* x_;
  Activations act_;
  std::vector<double> logits_;
  std::vector<double> probs_;
};

/// Classifier f: Ch x T input -> class probabilities, with analytic gradients.
///
/// Parameters live in one flat vector in a fixed canonical order per
/// architecture (see the concrete classes); checkpoints store that vector as-is.
class DifferentiableModel {
 public:
  virtual ~DifferentiableModel() = default;

  virtual Architecture architecture() const = 0;
  virtual std::unique_ptr<DifferentiableModel> clone() const = 0;

  const ModelShape& shape() const { return shape_; }
  const ModelConfig& config() const { return config_; }
  std::span<const double> parameters() const { return params_; }
  std::span<double> mutable_parameters() { return params_; }

  ForwardPass run(const EegMatrix& x) const;
  std::vector<double> forward(const EegMatrix& x) const;
  std::vector<double> logits(const EegMatrix& x) const;
  std::size_t predict(const EegMatrix& x) const;
  EegMatrix input_gradient(const EegMatrix& x, std::span<const double> upstream,
                           OutputPath path) const;

 protected:
  DifferentiableModel(ModelShape shape, ModelConfig config, std::size_t num_params);

  virtual void compute_logits(const EegMatrix& x, Activations& act,
                              std::span<double> logits) const = 0;
  // dx may be null; dparams may be empty. Both are accumulated into.
  virtual void backprop(const EegMatrix& x, const Activations& act,
                        std::span<const double> dlogits, EegMatrix* dx,
                        std::span<double> dparams) const = 0;

  ModelShape shape_;
  ModelConfig config_;
  std::vector<double> params_;

 private:
  friend class ForwardPass;
};

/// Number of parameters `config` implies for `shape`. Throws InvalidArgument
/// for incompatible combinations (e.g. channels not divisible by group_size).
std::size_t parameter_count(const ModelConfig& config, const ModelShape& shape);

/// Seeded initialization: linear weights start at zero, the others use
/// Glorot-uniform weights and zero biases.
std::unique_ptr<DifferentiableModel> make_model(const ModelConfig& config, const ModelShape& shape,
                                                std::uint64_t seed);

/// Builds a model around an existing parameter vector (checkpoint load).
std::unique_ptr<DifferentiableModel> make_model(const ModelConfig& config, const ModelShape& shape,
                                                std::vector<double> params);

// Checkpoint: JSON {version:"v1", arch, ch, t, num_classes, hyper, params}.
std::string checkpoint_to_json(const DifferentiableModel& model);
std::unique_ptr<DifferentiableModel> checkpoint_from_json(
    std::string_view text, const std::string& source,
    std::optional<Architecture> expected = std::nullopt);
void save_checkpoint(const DifferentiableModel& model, const std::filesystem::path& path);
std::unique_ptr<DifferentiableModel> load_checkpoint(
    const std::filesystem::path& path, std::optional<Architecture> expected = std::nullopt);

}  // namespace ctxsal
