#include "ctxsal/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <set>
#include <thread>

#include <json.hpp>

#include "ctxsal/csv.hpp"
#include "ctxsal/error.hpp"
#include "ctxsal/trainer.hpp"

namespace ctxsal {

const char* method_tag(Method m) {
  switch (m) {
    case Method::kContext:
      return "context";
    case Method::kNoContext:
      return "nocontext";
    case Method::kGradient:
      return "gradient";
  }
  return "unknown";
}

Method parse_method(std::string_view tag) {
  if (tag == "context") return Method::kContext;
  if (tag == "nocontext") return Method::kNoContext;
  if (tag == "gradient") return Method::kGradient;
  throw InvalidArgument("unknown method '" + std::string(tag) + "'");
}

const char* mode_tag(ReductionMode m) { return m == ReductionMode::kChannel ? "channel" : "timestep"; }

ReductionMode parse_mode(std::string_view tag) {
  if (tag == "channel") return ReductionMode::kChannel;
  if (tag == "timestep") return ReductionMode::kTimestep;
  throw InvalidArgument("unknown reduction mode '" + std::string(tag) + "'");
}

std::vector<double> channel_scores(const SaliencyMask& m) {
  std::vector<double> out(m.channels(), 0.0);
  for (std::size_t ch = 0; ch < m.channels(); ++ch) {
    double s = 0.0;
    for (double v : m.matrix().row(ch)) s += v;
    out[ch] = s / static_cast<double>(m.timesteps());
  }
  return out;
}

std::vector<double> timestep_scores(const SaliencyMask& m) {
  std::vector<double> out(m.timesteps(), 0.0);
  for (std::size_t ch = 0; ch < m.channels(); ++ch) {
    auto row = m.matrix().row(ch);
    for (std::size_t t = 0; t < row.size(); ++t) out[t] += row[t];
  }
  for (double& v : out) v /= static_cast<double>(m.channels());
  return out;
}

EegMatrix reduce_channels(const EegMatrix& x, std::span<const std::size_t> channels) {
  EegMatrix out = x;
  for (std::size_t ch : channels) {
    if (ch >= x.channels()) throw InvalidArgument("reduce_channels: channel out of range");
    std::fill(out.row(ch).begin(), out.row(ch).end(), 0.0);
  }
  return out;
}

EegMatrix reduce_timesteps(const EegMatrix& x, std::span<const std::size_t> steps) {
  EegMatrix out = x;
  for (std::size_t t : steps) {
    if (t >= x.timesteps()) throw InvalidArgument("reduce_timesteps: time step out of range");
    for (std::size_t ch = 0; ch < x.channels(); ++ch) out(ch, t) = 0.0;
  }
  return out;
}

SaliencyMask group_mask(const std::vector<SaliencyMask>& masks) {
  if (masks.empty()) throw InvalidArgument("group_mask: no masks");
  EegMatrix sum(masks.front().channels(), masks.front().timesteps());
  for (const auto& m : masks) {
    require_same_shape(sum, m.matrix(), "group_mask");
    auto dst = sum.values();
    auto src = m.matrix().values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
  const double n = static_cast<double>(masks.size());
  for (double& v : sum.values()) v = std::clamp(v / n, 0.0, 1.0);
  return SaliencyMask(std::move(sum));
}

std::vector<std::size_t> select_indices(std::span<const double> scores, std::size_t k,
                                        Selection selection) {
  if (k > scores.size()) {
    throw InvalidArgument("k = " + std::to_string(k) + " exceeds the " +
                          std::to_string(scores.size()) + " available indices");
  }
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  if (selection == Selection::kTop) {
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  } else {
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  }
  idx.resize(k);
  return idx;
}

double planted_recall(std::span<const double> scores, std::span<const std::size_t> planted,
                      std::size_t k) {
  const std::size_t denom = std::min(k, planted.size());
  if (denom == 0) return std::numeric_limits<double>::quiet_NaN();
  const auto top = select_indices(scores, k, Selection::kTop);
  const std::set<std::size_t> truth(planted.begin(), planted.end());
  std::size_t hits = 0;
  for (std::size_t i : top) hits += truth.contains(i) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(denom);
}

std::vector<std::size_t> planted_indices(const PlantSpec& plant, ReductionMode mode) {
  if (mode == ReductionMode::kChannel) return plant.planted_channels;
  std::vector<std::size_t> out;
  for (std::size_t t = plant.t_start; t < plant.t_end; ++t) out.push_back(t);
  return out;
}

std::vector<std::size_t> planted_indices(const PlantSpec& plant, const LabeledSample& sample,
                                         ReductionMode mode) {
  if (!sample.truth) return planted_indices(plant, mode);
  if (mode == ReductionMode::kChannel) return sample.truth->channels;
  std::vector<std::size_t> out;
  for (std::size_t t = sample.truth->t_start; t < sample.truth->t_end; ++t) out.push_back(t);
  return out;
}

SaliencyMask explain(const DifferentiableModel& model, const EegMatrix& x, Method method,
                     const ExplainConfig& cfg) {
  switch (method) {
    case Method::kContext:
      return explain_context(model, x, cfg).mask;
    case Method::kNoContext:
      return explain_nocontext(model, x, cfg).mask;
    case Method::kGradient:
      return gradient_saliency(model, x);
  }
  throw InvalidArgument("unknown method");
}

std::vector<SaliencyMask> explain_all(const DifferentiableModel& model,
                                      const std::vector<const LabeledSample*>& samples,
                                      Method method, const ExplainConfig& cfg, std::size_t jobs) {
  std::vector<std::optional<SaliencyMask>> slots(samples.size());
  jobs = std::max<std::size_t>(1, std::min(jobs, samples.size()));
  if (jobs == 1) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      slots[i] = explain(model, samples[i]->x, method, cfg);
    }
  } else {
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < samples.size(); i += jobs) {
            slots[i] = explain(model, samples[i]->x, method, cfg);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : workers) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  std::vector<SaliencyMask> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

ReductionReport run_reduction(const DifferentiableModel& model,
                              const std::vector<const LabeledSample*>& samples,
                              const std::vector<SaliencyMask>& masks, std::string_view method,
                              const ReductionOptions& opts, const std::optional<PlantSpec>& plant) {
  if (masks.size() != samples.size()) {
    throw InvalidArgument("run_reduction: need exactly one mask per sample");
  }
  const std::size_t limit =
      opts.mode == ReductionMode::kChannel ? model.shape().channels : model.shape().timesteps;
  for (std::size_t i = 0; i < opts.k_list.size(); ++i) {
    if (opts.k_list[i] > limit) {
      throw InvalidArgument("run_reduction: k = " + std::to_string(opts.k_list[i]) + " exceeds " +
                            std::to_string(limit) + " " + mode_tag(opts.mode) + "s");
    }
    if (i > 0 && opts.k_list[i] <= opts.k_list[i - 1]) {
      throw InvalidArgument("run_reduction: k values must be strictly increasing");
    }
  }

  ReductionReport report;
  report.method = std::string(method);
  report.mode = opts.mode;
  report.selection = opts.selection;
  report.granularity = opts.granularity;
  report.num_samples = samples.size();
  report.k = opts.k_list;
  report.baseline_accuracy = accuracy(model, samples);

  auto scores_of = [&](const SaliencyMask& m) {
    return opts.mode == ReductionMode::kChannel ? channel_scores(m) : timestep_scores(m);
  };
  std::vector<std::vector<double>> scores;
  if (opts.granularity == Granularity::kGroup) {
    scores.assign(samples.size(), scores_of(group_mask(masks)));
  } else {
    for (const auto& m : masks) scores.push_back(scores_of(m));
  }

  std::vector<std::vector<std::size_t>> planted;
  if (plant) {
    for (const auto* s : samples) planted.push_back(planted_indices(*plant, *s, opts.mode));
    report.planted_recall.emplace();
  }

  for (std::size_t k : opts.k_list) {
    std::size_t hits = 0;
    double recall_sum = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto removed = select_indices(scores[i], k, opts.selection);
      const EegMatrix reduced = opts.mode == ReductionMode::kChannel
                                    ? reduce_channels(samples[i]->x, removed)
                                    : reduce_timesteps(samples[i]->x, removed);
      hits += model.predict(reduced) == samples[i]->label ? 1 : 0;
      if (plant) recall_sum += planted_recall(scores[i], planted[i], k);
    }
    const double n = static_cast<double>(samples.size());
    report.accuracy.push_back(samples.empty() ? 0.0 : static_cast<double>(hits) / n);
    if (plant) report.planted_recall->push_back(samples.empty() ? 0.0 : recall_sum / n);
  }
  return report;
}

ReductionReport run_reduction(const DifferentiableModel& model, const DatasetManifest& data,
                              Method method, const ExplainConfig& cfg,
                              const ReductionOptions& opts, std::size_t jobs) {
  const auto samples = data.subset(Split::kTest);
  const auto masks = explain_all(model, samples, method, cfg, jobs);
  return run_reduction(model, samples, masks, method_tag(method), opts, data.plant);
}

std::string ReductionReport::to_json() const {
  nlohmann::json j;
  j["method"] = method;
  j["mode"] = mode_tag(mode);
  j["selection"] = selection == Selection::kTop ? "top" : "bottom";
  j["granularity"] = granularity == Granularity::kInstance ? "instance" : "group";
  j["num_samples"] = num_samples;
  j["baseline_accuracy"] = baseline_accuracy;
  j["k"] = k;
  j["accuracy"] = accuracy;
  if (planted_recall) {
    nlohmann::json r = nlohmann::json::array();
    for (double v : *planted_recall) r.push_back(std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v));
    j["planted_recall"] = std::move(r);
  } else {
    j["planted_recall"] = nullptr;
  }
  return j.dump(2) + "\n";
}

std::string ReductionReport::to_csv() const {
  std::string out = "k,accuracy,recall\n";
  for (std::size_t i = 0; i < k.size(); ++i) {
    out += std::to_string(k[i]) + "," + format_double(accuracy[i]) + ",";
    if (planted_recall && !std::isnan((*planted_recall)[i])) out += format_double((*planted_recall)[i]);
    out += "\n";
  }
  return out;
}

}  // namespace ctxsal
