#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctxsal/error.hpp"
#include "ctxsal/matrix.hpp"
#include "ctxsal/model.hpp"
#include "ctxsal/perturbation.hpp"

namespace ctxsal {

inline constexpr double kLogClamp = 1e-12;

struct ExplainConfig {
  std::size_t epochs = 200;
  double lr = 0.1;
  double mask_init = 0.9;
  bool area_enabled = false;
  double area_ratio = 0.5;     // a: fraction of entries pushed toward 0
  double lambda = 0.05;        // weight of the area term
  std::size_t stage_switch = 100;  // k: error-only epochs before the area term starts
  std::size_t temporal_kernel = kDefaultTemporalKernel;
  std::size_t spatial_kernel = kDefaultSpatialKernel;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;

  // Throws InvalidArgument unless 0 <= a <= 1, 0 <= k <= epochs, lr > 0,
  // lambda >= 0 and mask_init in [0, 1].
  void validate() const;
};

struct EpochLoss {
  double error = 0.0;
  double area = 0.0;   // evaluated every epoch, weighted into total only when active
  double total = 0.0;
  bool area_active = false;
};

struct ExplainTrace {
  std::vector<EpochLoss> epochs;
  std::optional<std::size_t> area_start_epoch;  // 1-based epoch where the area term starts

  std::string to_json() const;
};

struct Explanation {
  SaliencyMask mask;
  ExplainTrace trace;
};

/// Raised when a loss turns non-finite; carries the trace up to that epoch.
class ExplainError : public NumericError {
 public:
  ExplainError(const std::string& what, ExplainTrace trace)
      : NumericError(what), trace_(std::move(trace)) {}
  const ExplainTrace& trace() const { return trace_; }

 private:
  ExplainTrace trace_;
};

/// Element-wise Adam with a fixed learning rate. The caller projects.
class Adam {
 public:
  Adam(std::size_t size, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  void step(std::span<double> params, std::span<const double> grad);
  std::size_t steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

/// Cross-entropy -sum_c original_c * log(max(perturbed_c, 1e-12)).
double error_loss(std::span<const double> original, std::span<const double> perturbed);

/// floor(a * n), the number of entries the area term acts on.
std::size_t area_cut(double a, std::size_t n);

/// Euclidean norm of the floor(a * Ch * T) smallest mask entries (stable
/// ascending sort, ties broken by index).
double area_loss(const EegMatrix& m, double a);

/// Subgradient of area_loss: m / area_loss on the cut set, 0 elsewhere, and
/// all-zero when area_loss is 0.
EegMatrix area_loss_gradient(const EegMatrix& m, double a);

struct MaskObjective {
  bool area_enabled = false;
  double area_ratio = 0.5;
  double lambda = 0.05;
};

struct ObjectiveValue {
  double error = 0.0;
  double area = 0.0;
  double total = 0.0;
};

/// L(m) = error_loss(f(x), f(x_hat)) [+ lambda * area_loss(m, a)] with
/// x_hat = (1 - m) p + m x. `target` is f(x), held constant.
ObjectiveValue mask_objective(const DifferentiableModel& model, const EegMatrix& x,
                              const EegMatrix& p, const EegMatrix& m,
                              std::span<const double> target, const MaskObjective& obj);

/// dL/dm = dL_error/dx_hat * (x - p) [+ lambda * area_loss_gradient].
EegMatrix mask_gradient(const DifferentiableModel& model, const EegMatrix& x, const EegMatrix& p,
                        const EegMatrix& m, std::span<const double> target,
                        const MaskObjective& obj);

// Convenience overload computing target = f(x).
EegMatrix mask_gradient(const DifferentiableModel& model, const EegMatrix& x, const EegMatrix& p,
                        const EegMatrix& m, const MaskObjective& obj);

/// Mask optimization against the context perturbation of x. Epochs 1..k use the
/// error loss only; later epochs add lambda * area loss when enabled. Each
/// epoch takes one Adam step and clamps the mask to [0, 1].
Explanation explain_context(const DifferentiableModel& model, const EegMatrix& x,
                            const ExplainConfig& cfg);

/// Same loop with x_hat = m x (no perturbation term).
Explanation explain_nocontext(const DifferentiableModel& model, const EegMatrix& x,
                              const ExplainConfig& cfg);

/// |d(top-class logit)/dx| divided by its maximum; all-zero if the maximum is 0.
SaliencyMask gradient_saliency(const DifferentiableModel& model, const EegMatrix& x);

}  // namespace ctxsal
