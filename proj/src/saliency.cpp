#include "ctxsal/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "ctxsal/simd/kernels.hpp"

namespace ctxsal {

void ExplainConfig::validate() const {
  if (!(area_ratio >= 0.0 && area_ratio <= 1.0)) throw InvalidArgument("area ratio a must be in [0, 1]");
  if (stage_switch > epochs) throw InvalidArgument("stage switch k must not exceed epochs");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw InvalidArgument("lr must be positive");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be >= 0");
  if (!(mask_init >= 0.0 && mask_init <= 1.0)) throw InvalidArgument("mask_init must be in [0, 1]");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(adam_eps > 0.0)) {
    throw InvalidArgument("invalid Adam hyperparameters");
  }
}

std::string ExplainTrace::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    const auto& e = epochs[i];
    arr.push_back({{"epoch", i + 1},
                   {"error", e.error},
                   {"area", e.area},
                   {"total", e.total},
                   {"area_active", e.area_active}});
  }
  return arr.dump(1) + "\n";
}

Adam::Adam(std::size_t size, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(size, 0.0), v_(size, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw InvalidArgument("Adam::step: size mismatch");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g * g;
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
  }
}

namespace {

void check_probability_vector(std::span<const double> p, const char* what) {
  double s = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidArgument(std::string("error_loss: ") + what + " has a negative or non-finite entry");
    }
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-6) {
    throw InvalidArgument(std::string("error_loss: ") + what + " does not sum to 1");
  }
}

// Indices of the cut set: the first area_cut(a, n) positions of a stable
// ascending sort.
std::vector<std::size_t> smallest_entries(std::span<const double> v, double a) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
  idx.resize(area_cut(a, v.size()));
  return idx;
}

// dL_error/dlog f(x_hat)_c, with zero weight where the clamp is active.
std::vector<double> error_upstream(std::span<const double> target, std::span<const double> probs) {
  std::vector<double> u(target.size());
  for (std::size_t c = 0; c < target.size(); ++c) u[c] = probs[c] > kLogClamp ? -target[c] : 0.0;
  return u;
}

}  // namespace

double error_loss(std::span<const double> original, std::span<const double> perturbed) {
  if (original.size() != perturbed.size() || original.empty()) {
    throw InvalidArgument("error_loss: probability vectors differ in length");
  }
  check_probability_vector(original, "original");
  check_probability_vector(perturbed, "perturbed");
  double loss = 0.0;
  for (std::size_t c = 0; c < original.size(); ++c) {
    loss -= original[c] * std::log(std::max(perturbed[c], kLogClamp));
  }
  return loss;
}

std::size_t area_cut(double a, std::size_t n) {
  // The small slack keeps products like 0.29 * 100 from rounding below the integer.
  const double raw = std::floor(a * static_cast<double>(n) + 1e-9);
  return std::min(n, static_cast<std::size_t>(std::max(0.0, raw)));
}

double area_loss(const EegMatrix& m, double a) {
  const auto v = m.values();
  double s = 0.0;
  for (std::size_t i : smallest_entries(v, a)) s += v[i] * v[i];
  return std::sqrt(s);
}

EegMatrix area_loss_gradient(const EegMatrix& m, double a) {
  const auto v = m.values();
  const auto cut = smallest_entries(v, a);
  double s = 0.0;
  for (std::size_t i : cut) s += v[i] * v[i];
  EegMatrix g(m.channels(), m.timesteps());
  if (s == 0.0) return g;
  const double norm = std::sqrt(s);
  auto gv = g.values();
  for (std::size_t i : cut) gv[i] = v[i] / norm;
  return g;
}

ObjectiveValue mask_objective(const DifferentiableModel& model, const EegMatrix& x,
                              const EegMatrix& p, const EegMatrix& m,
                              std::span<const double> target, const MaskObjective& obj) {
  EegMatrix x_hat(x.channels(), x.timesteps());
  detail::blend_into(x, m, p, x_hat);
  ObjectiveValue out;
  out.error = error_loss(target, model.forward(x_hat));
  out.total = out.error;
  if (obj.area_enabled) {
    out.area = area_loss(m, obj.area_ratio);
    out.total += obj.lambda * out.area;
  }
  return out;
}

EegMatrix mask_gradient(const DifferentiableModel& model, const EegMatrix& x, const EegMatrix& p,
                        const EegMatrix& m, std::span<const double> target,
                        const MaskObjective& obj) {
  EegMatrix x_hat(x.channels(), x.timesteps());
  detail::blend_into(x, m, p, x_hat);
  const ForwardPass pass = model.run(x_hat);
  const auto upstream = error_upstream(target, pass.probabilities());
  const EegMatrix g_hat = pass.input_gradient(upstream, OutputPath::kLogProbabilities);
  EegMatrix grad(x.channels(), x.timesteps());
  simd::active().diff_mul(g_hat.values().data(), x.values().data(), p.values().data(),
                          grad.values().data(), grad.size());
  if (obj.area_enabled && obj.lambda != 0.0) {
    const EegMatrix ga = area_loss_gradient(m, obj.area_ratio);
    simd::axpy(obj.lambda, ga.values(), grad.values());
  }
  return grad;
}

EegMatrix mask_gradient(const DifferentiableModel& model, const EegMatrix& x, const EegMatrix& p,
                        const EegMatrix& m, const MaskObjective& obj) {
  return mask_gradient(model, x, p, m, model.forward(x), obj);
}

namespace {

Explanation optimize_mask(const DifferentiableModel& model, const EegMatrix& x, const EegMatrix& p,
                          const ExplainConfig& cfg) {
  cfg.validate();
  const std::vector<double> target = model.forward(x);
  EegMatrix mask(x.channels(), x.timesteps(), cfg.mask_init);
  EegMatrix x_hat(x.channels(), x.timesteps());
  EegMatrix grad(x.channels(), x.timesteps());
  Adam adam(mask.size(), cfg.lr, cfg.beta1, cfg.beta2, cfg.adam_eps);
  ExplainTrace trace;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const bool area_active = cfg.area_enabled && epoch > cfg.stage_switch;
    if (area_active && !trace.area_start_epoch) trace.area_start_epoch = epoch;

    detail::blend_into(x, mask, p, x_hat);
    const ForwardPass pass = model.run(x_hat);
    EpochLoss loss;
    loss.area_active = area_active;
    loss.error = error_loss(target, pass.probabilities());
    loss.area = cfg.area_enabled ? area_loss(mask, cfg.area_ratio) : 0.0;
    loss.total = loss.error + (area_active ? cfg.lambda * loss.area : 0.0);
    trace.epochs.push_back(loss);
    if (!std::isfinite(loss.total)) {
      throw ExplainError("mask optimization: non-finite loss at epoch " + std::to_string(epoch),
                         std::move(trace));
    }

    const auto upstream = error_upstream(target, pass.probabilities());
    const EegMatrix g_hat = pass.input_gradient(upstream, OutputPath::kLogProbabilities);
    simd::active().diff_mul(g_hat.values().data(), x.values().data(), p.values().data(),
                            grad.values().data(), grad.size());
    if (area_active && cfg.lambda != 0.0) {
      simd::axpy(cfg.lambda, area_loss_gradient(mask, cfg.area_ratio).values(), grad.values());
    }
    if (!grad.all_finite()) {
      throw ExplainError("mask optimization: non-finite gradient at epoch " + std::to_string(epoch),
                         std::move(trace));
    }
    adam.step(mask.values(), grad.values());
    for (double& v : mask.values()) v = std::clamp(v, 0.0, 1.0);
  }
  return Explanation{SaliencyMask(std::move(mask)), std::move(trace)};
}

}  // namespace

Explanation explain_context(const DifferentiableModel& model, const EegMatrix& x,
                            const ExplainConfig& cfg) {
  cfg.validate();
  const ContextPerturbation ctx = build_context(x, cfg.temporal_kernel, cfg.spatial_kernel);
  return optimize_mask(model, x, ctx.p, cfg);
}

Explanation explain_nocontext(const DifferentiableModel& model, const EegMatrix& x,
                              const ExplainConfig& cfg) {
  // (1 - m) * 0 + m * x is bit-identical to m * x.
  return optimize_mask(model, x, EegMatrix(x.channels(), x.timesteps()), cfg);
}

SaliencyMask gradient_saliency(const DifferentiableModel& model, const EegMatrix& x) {
  const ForwardPass pass = model.run(x);
  const auto& probs = pass.probabilities();
  const std::size_t top =
      static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
  std::vector<double> upstream(probs.size(), 0.0);
  upstream[top] = 1.0;
  EegMatrix g = pass.input_gradient(upstream, OutputPath::kLogits);
  double peak = 0.0;
  for (double& v : g.values()) {
    v = std::abs(v);
    peak = std::max(peak, v);
  }
  if (peak > 0.0) {
    for (double& v : g.values()) v /= peak;
  }
  return SaliencyMask(std::move(g));
}

}  // namespace ctxsal
